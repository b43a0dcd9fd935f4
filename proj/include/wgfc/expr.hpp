// Single-variable expression language for config files: parsing, evaluation
// and symbolic differentiation.
//
// Grammar (whitespace ignored, standard precedence):
//   expression := term (('+'|'-') term)*
//   term       := unary (('*'|'/') unary)*
//   unary      := '-' unary | power
//   power      := atom ('^' unary)?          -- right-associative
//   atom       := number | name | name '(' expression ')' | '(' expression ')'
// Functions: exp log sin cos sqrt abs. Constants: pi, e. Any other identifier
// is the free variable; all occurrences must use the same name. '^' requires a
// constant exponent or a positive base at evaluation time.
#ifndef WGFC_EXPR_HPP
#define WGFC_EXPR_HPP

#include <memory>
#include <string>
#include <string_view>

namespace wgfc::expr {

struct Node;
using NodePtr = std::shared_ptr<const Node>;

class Expr {
 public:
  Expr() = default;
  Expr(NodePtr root, std::string var) : root_(std::move(root)), var_(std::move(var)) {}

  bool empty() const { return root_ == nullptr; }
  // True when the expression contains no occurrence of the free variable.
  bool is_constant() const;
  const std::string& variable() const { return var_; }
  const NodePtr& root() const { return root_; }

 private:
  NodePtr root_;
  std::string var_;
};

Expr parse(std::string_view text);

double eval(const Expr& e, double x);

// d/dx, simplified by constant folding and 0/1 identity elimination only.
// abs() is not differentiable here and raises UnsupportedError.
Expr differentiate(const Expr& e);

std::string to_string(const Expr& e);

}  // namespace wgfc::expr

#endif
