#include "gcurv/expr.hpp"

#include <cctype>
#include <charconv>
#include <cmath>
#include <sstream>

namespace gcurv {

ParseError::ParseError(std::size_t off, std::string msg, std::vector<std::string> exp)
    : std::runtime_error("parse error at offset " + std::to_string(off) + ": " + msg),
      offset(off),
      message(std::move(msg)),
      expected(std::move(exp)) {}

DomainError::DomainError(std::string why, std::string sub)
    : std::domain_error(why + " in '" + sub + "'"), reason(std::move(why)), subexpr(std::move(sub)) {}

namespace {

using NodePtr = std::shared_ptr<const ExprNode>;

struct FuncName {
  const char* name;
  Func fn;
};

constexpr FuncName kFuncs[] = {
    {"sin", Func::Sin},   {"cos", Func::Cos},   {"tan", Func::Tan},   {"sinh", Func::Sinh},
    {"cosh", Func::Cosh}, {"tanh", Func::Tanh}, {"exp", Func::Exp},   {"log", Func::Log},
    {"sqrt", Func::Sqrt}, {"abs", Func::Abs},
};

const char* func_name(Func f) {
  for (const auto& e : kFuncs) {
    if (e.fn == f) return e.name;
  }
  return "?";
}

class Parser {
 public:
  Parser(std::string_view text, const std::vector<std::string>& chart) : s_(text), chart_(chart) {}

  NodePtr parse_all() {
    skip_ws();
    if (pos_ >= s_.size()) fail("empty expression", {"number", "identifier", "(", "-"});
    NodePtr e = expr();
    skip_ws();
    if (pos_ < s_.size()) {
      fail("unexpected '" + std::string(1, s_[pos_]) + "'", {"+", "-", "*", "/", "^", "end of input"});
    }
    return e;
  }

 private:
  std::string_view s_;
  const std::vector<std::string>& chart_;
  std::size_t pos_ = 0;

  [[noreturn]] void fail(const std::string& msg, std::vector<std::string> expected) const {
    std::size_t off = pos_ < s_.size() ? pos_ : (s_.empty() ? 0 : s_.size() - 1);
    throw ParseError(off, msg, std::move(expected));
  }

  void skip_ws() {
    while (pos_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[pos_]))) ++pos_;
  }

  bool peek(char c) {
    skip_ws();
    return pos_ < s_.size() && s_[pos_] == c;
  }

  static NodePtr make(ExprNode::Kind k, NodePtr a, NodePtr b, std::size_t off, std::size_t end) {
    auto n = std::make_shared<ExprNode>();
    n->kind = k;
    n->lhs = std::move(a);
    n->rhs = std::move(b);
    n->offset = off;
    n->length = end - off;
    return n;
  }

  NodePtr expr() {
    skip_ws();
    std::size_t start = pos_;
    NodePtr lhs = term();
    while (true) {
      if (peek('+')) {
        ++pos_;
        NodePtr rhs = term();
        lhs = make(ExprNode::Kind::Add, lhs, rhs, start, pos_);
      } else if (peek('-')) {
        ++pos_;
        NodePtr rhs = term();
        lhs = make(ExprNode::Kind::Sub, lhs, rhs, start, pos_);
      } else {
        return lhs;
      }
    }
  }

  NodePtr term() {
    skip_ws();
    std::size_t start = pos_;
    NodePtr lhs = unary();
    while (true) {
      if (peek('*')) {
        ++pos_;
        NodePtr rhs = unary();
        lhs = make(ExprNode::Kind::Mul, lhs, rhs, start, pos_);
      } else if (peek('/')) {
        ++pos_;
        NodePtr rhs = unary();
        lhs = make(ExprNode::Kind::Div, lhs, rhs, start, pos_);
      } else {
        return lhs;
      }
    }
  }

  // '^' binds tighter than unary minus: -x^2 is -(x^2), and x^-2 is allowed.
  NodePtr unary() {
    skip_ws();
    std::size_t start = pos_;
    if (peek('-')) {
      ++pos_;
      NodePtr a = unary();
      return make(ExprNode::Kind::Neg, a, nullptr, start, pos_);
    }
    return power();
  }

  NodePtr power() {
    skip_ws();
    std::size_t start = pos_;
    NodePtr base = atom();
    if (peek('^')) {
      ++pos_;
      NodePtr ex = unary();
      return make(ExprNode::Kind::Pow, base, ex, start, pos_);
    }
    return base;
  }

  NodePtr atom() {
    skip_ws();
    if (pos_ >= s_.size()) fail("unexpected end of input", {"number", "identifier", "(", "-"});
    std::size_t start = pos_;
    char c = s_[pos_];
    if (c == '(') {
      ++pos_;
      NodePtr e = expr();
      if (!peek(')')) fail("expected ')'", {")"});
      ++pos_;
      auto n = std::make_shared<ExprNode>(*e);
      n->offset = start;
      n->length = pos_ - start;
      return n;
    }
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') return number();
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') return identifier();
    fail("unexpected '" + std::string(1, c) + "'", {"number", "identifier", "(", "-"});
  }

  NodePtr number() {
    std::size_t start = pos_;
    std::size_t i = pos_;
    auto digits = [&] {
      std::size_t b = i;
      while (i < s_.size() && std::isdigit(static_cast<unsigned char>(s_[i]))) ++i;
      return i - b;
    };
    std::size_t nd = digits();
    if (i < s_.size() && s_[i] == '.') {
      ++i;
      nd += digits();
    }
    if (nd == 0) fail("malformed number", {"digit"});
    if (i < s_.size() && (s_[i] == 'e' || s_[i] == 'E')) {
      std::size_t save = i;
      ++i;
      if (i < s_.size() && (s_[i] == '+' || s_[i] == '-')) ++i;
      if (digits() == 0) i = save;  // not an exponent; leave 'e' for the next token
    }
    double v = 0.0;
    auto res = std::from_chars(s_.data() + start, s_.data() + i, v);
    if (res.ec != std::errc()) fail("malformed number", {"number"});
    pos_ = i;
    auto n = std::make_shared<ExprNode>();
    n->kind = ExprNode::Kind::Num;
    n->num = v;
    n->offset = start;
    n->length = i - start;
    return n;
  }

  NodePtr identifier() {
    std::size_t start = pos_;
    while (pos_ < s_.size() &&
           (std::isalnum(static_cast<unsigned char>(s_[pos_])) || s_[pos_] == '_')) {
      ++pos_;
    }
    std::string name(s_.substr(start, pos_ - start));
    for (const auto& f : kFuncs) {
      if (name == f.name) {
        if (!peek('(')) fail("expected '(' after function '" + name + "'", {"("});
        ++pos_;
        NodePtr arg = expr();
        if (!peek(')')) fail("expected ')'", {")"});
        ++pos_;
        auto n = std::make_shared<ExprNode>();
        n->kind = ExprNode::Kind::Call;
        n->fn = f.fn;
        n->lhs = arg;
        n->offset = start;
        n->length = pos_ - start;
        return n;
      }
    }
    for (std::size_t k = 0; k < chart_.size(); ++k) {
      if (chart_[k] == name) {
        auto n = std::make_shared<ExprNode>();
        n->kind = ExprNode::Kind::Var;
        n->var = static_cast<int>(k);
        n->offset = start;
        n->length = pos_ - start;
        return n;
      }
    }
    std::vector<std::string> expected(chart_.begin(), chart_.end());
    for (const auto& f : kFuncs) expected.emplace_back(f.name);
    pos_ = start;
    fail("unknown identifier " + name, expected);
  }
};

void render(const ExprNode& n, const std::vector<std::string>& chart, std::ostringstream& os) {
  using K = ExprNode::Kind;
  auto bin = [&](const char* tag) {
    os << tag << '(';
    render(*n.lhs, chart, os);
    os << ',';
    render(*n.rhs, chart, os);
    os << ')';
  };
  switch (n.kind) {
    case K::Num: {
      std::ostringstream t;
      t.precision(17);
      t << n.num;
      os << t.str();
      break;
    }
    case K::Var: os << chart.at(n.var); break;
    case K::Neg:
      os << "Neg(";
      render(*n.lhs, chart, os);
      os << ')';
      break;
    case K::Add: bin("Add"); break;
    case K::Sub: bin("Sub"); break;
    case K::Mul: bin("Mul"); break;
    case K::Div: bin("Div"); break;
    case K::Pow: bin("Pow"); break;
    case K::Call: {
      std::string f = func_name(n.fn);
      f[0] = static_cast<char>(std::toupper(static_cast<unsigned char>(f[0])));
      os << f << '(';
      render(*n.lhs, chart, os);
      os << ')';
      break;
    }
  }
}

class Evaluator {
 public:
  Evaluator(const Expr& e, const std::vector<double>& point, int order)
      : e_(e), point_(point), order_(order) {}

  Jet run(const ExprNode& n) const {
    using K = ExprNode::Kind;
    try {
      switch (n.kind) {
        case K::Num: return Jet(n.num);
        case K::Var:
          return Jet::variable(static_cast<int>(point_.size()), n.var, point_[n.var]).truncated(order_);
        case K::Neg: return -run(*n.lhs);
        case K::Add: return run(*n.lhs) + run(*n.rhs);
        case K::Sub: return run(*n.lhs) - run(*n.rhs);
        case K::Mul: return run(*n.lhs) * run(*n.rhs);
        case K::Div: {
          Jet den = run(*n.rhs);
          if (den.value() == 0.0) throw DomainError("division by zero", text(n));
          return run(*n.lhs) / den;
        }
        case K::Pow: return pow(run(*n.lhs), run(*n.rhs));
        case K::Call: return call(n.fn, run(*n.lhs));
      }
    } catch (const DomainError&) {
      throw;
    } catch (const std::domain_error& ex) {
      throw DomainError(ex.what(), text(n));
    }
    return Jet(0.0);
  }

 private:
  const Expr& e_;
  const std::vector<double>& point_;
  int order_;

  std::string text(const ExprNode& n) const {
    const std::string& s = e_.source();
    if (n.offset + n.length <= s.size() && n.length > 0) return s.substr(n.offset, n.length);
    return e_.structure();
  }

  static Jet call(Func f, const Jet& x) {
    switch (f) {
      case Func::Sin: return sin(x);
      case Func::Cos: return cos(x);
      case Func::Tan: return tan(x);
      case Func::Sinh: return sinh(x);
      case Func::Cosh: return cosh(x);
      case Func::Tanh: return tanh(x);
      case Func::Exp: return exp(x);
      case Func::Log: return log(x);
      case Func::Sqrt: return sqrt(x);
      case Func::Abs: return abs(x);
    }
    return x;
  }
};

}  // namespace

Expr::Expr() : Expr(constant(0.0)) {}

Expr::Expr(std::shared_ptr<const ExprNode> root, std::string source, std::vector<std::string> chart)
    : root_(std::move(root)), source_(std::move(source)), chart_(std::move(chart)) {}

Expr Expr::constant(double c, std::vector<std::string> chart) {
  auto n = std::make_shared<ExprNode>();
  n->kind = ExprNode::Kind::Num;
  n->num = c;
  std::ostringstream os;
  os.precision(17);
  os << c;
  n->length = os.str().size();
  return Expr(n, os.str(), std::move(chart));
}

std::string Expr::structure() const {
  std::ostringstream os;
  render(*root_, chart_, os);
  return os.str();
}

bool Expr::is_zero_literal() const {
  return root_->kind == ExprNode::Kind::Num && root_->num == 0.0;
}

Jet Expr::eval(const std::vector<double>& point, int order) const {
  if (point.size() != chart_.size() && !chart_.empty()) {
    throw std::invalid_argument("point has " + std::to_string(point.size()) +
                                " coordinates, chart has " + std::to_string(chart_.size()));
  }
  Jet r = Evaluator(*this, point, order).run(*root_);
  if (r.dim() == 0 && !point.empty()) r = Jet::zero(static_cast<int>(point.size()), order) + r;
  return r;
}

Expr parse(std::string_view text, const std::vector<std::string>& chart) {
  Parser p(text, chart);
  return Expr(p.parse_all(), std::string(text), chart);
}

Jet eval_jet(const Expr& e, const std::vector<double>& point, int order) {
  return e.eval(point, order);
}

}  // namespace gcurv
