#pragma once

#include <memory>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "gcurv/jet.hpp"

namespace gcurv {

class ParseError : public std::runtime_error {
 public:
  ParseError(std::size_t offset, std::string message, std::vector<std::string> expected);
  std::size_t offset;
  std::string message;
  std::vector<std::string> expected;
};

// Raised when an expression is evaluated outside its domain; `subexpr` is the
// source text of the offending node.
class DomainError : public std::domain_error {
 public:
  DomainError(std::string reason, std::string subexpr);
  std::string reason;
  std::string subexpr;
};

enum class Func { Sin, Cos, Tan, Sinh, Cosh, Tanh, Exp, Log, Sqrt, Abs };

struct ExprNode {
  enum class Kind { Num, Var, Neg, Add, Sub, Mul, Div, Pow, Call };
  Kind kind = Kind::Num;
  double num = 0.0;
  int var = -1;
  Func fn = Func::Sin;
  std::shared_ptr<const ExprNode> lhs, rhs;
  std::size_t offset = 0, length = 0;
};

class Expr {
 public:
  Expr();  // the literal 0
  Expr(std::shared_ptr<const ExprNode> root, std::string source, std::vector<std::string> chart);

  static Expr constant(double c, std::vector<std::string> chart = {});

  const ExprNode& root() const { return *root_; }
  const std::string& source() const { return source_; }
  const std::vector<std::string>& chart() const { return chart_; }

  // Structural rendering, e.g. "Add(Mul(u,v),2)".
  std::string structure() const;
  // True when the tree is a literal 0 (used to skip identically-zero fields).
  bool is_zero_literal() const;

  Jet eval(const std::vector<double>& point, int order = kJetOrder) const;
  double value(const std::vector<double>& point) const { return eval(point, 0).value(); }

 private:
  std::shared_ptr<const ExprNode> root_;
  std::string source_;
  std::vector<std::string> chart_;
};

Expr parse(std::string_view text, const std::vector<std::string>& chart);
Jet eval_jet(const Expr& e, const std::vector<double>& point, int order = kJetOrder);

}  // namespace gcurv
