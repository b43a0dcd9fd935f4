#include "wgfc/expr.hpp"

#include <cctype>
#include <cmath>
#include <cstdio>
#include <sstream>

#include "wgfc/errors.hpp"

namespace wgfc::expr {

enum class Kind { Literal, Variable, Add, Sub, Mul, Div, Pow, Neg, Call };
enum class Func { Exp, Log, Sin, Cos, Sqrt, Abs };

struct Node {
  Kind kind;
  double value = 0.0;       // Literal
  Func func = Func::Exp;    // Call
  NodePtr lhs, rhs;         // rhs empty for Neg/Call
  std::size_t offset = 0;   // byte offset in the source text, for diagnostics
};

static NodePtr literal(double v, std::size_t off = 0) {
  return std::make_shared<Node>(Node{Kind::Literal, v, Func::Exp, nullptr, nullptr, off});
}
static NodePtr variable(std::size_t off = 0) {
  return std::make_shared<Node>(Node{Kind::Variable, 0.0, Func::Exp, nullptr, nullptr, off});
}
static NodePtr unary(Kind k, NodePtr a, std::size_t off = 0) {
  return std::make_shared<Node>(Node{k, 0.0, Func::Exp, std::move(a), nullptr, off});
}
static NodePtr binary(Kind k, NodePtr a, NodePtr b, std::size_t off = 0) {
  return std::make_shared<Node>(Node{k, 0.0, Func::Exp, std::move(a), std::move(b), off});
}
static NodePtr call(Func f, NodePtr a, std::size_t off = 0) {
  return std::make_shared<Node>(Node{Kind::Call, 0.0, f, std::move(a), nullptr, off});
}

static const char* func_name(Func f) {
  switch (f) {
    case Func::Exp: return "exp";
    case Func::Log: return "log";
    case Func::Sin: return "sin";
    case Func::Cos: return "cos";
    case Func::Sqrt: return "sqrt";
    case Func::Abs: return "abs";
  }
  return "?";
}

// ---------------------------------------------------------------- parsing

namespace {

class Parser {
 public:
  explicit Parser(std::string_view text) : text_(text) {}

  Expr run() {
    skip_ws();
    if (pos_ >= text_.size())
      throw ParseError("empty expression", 0, {"expression"});
    NodePtr root = expression();
    skip_ws();
    if (pos_ < text_.size())
      throw ParseError("unexpected trailing input", pos_, {"end of input", "operator"});
    return Expr(root, var_);
  }

 private:
  std::string_view text_;
  std::size_t pos_ = 0;
  std::string var_;

  void skip_ws() {
    while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
  }

  bool eat(char c) {
    skip_ws();
    if (pos_ < text_.size() && text_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }

  char peek() {
    skip_ws();
    return pos_ < text_.size() ? text_[pos_] : '\0';
  }

  NodePtr expression() {
    NodePtr lhs = term();
    for (;;) {
      const std::size_t at = pos_;
      if (eat('+'))
        lhs = binary(Kind::Add, lhs, term(), at);
      else if (eat('-'))
        lhs = binary(Kind::Sub, lhs, term(), at);
      else
        return lhs;
    }
  }

  NodePtr term() {
    NodePtr lhs = unary_expr();
    for (;;) {
      const std::size_t at = pos_;
      if (eat('*'))
        lhs = binary(Kind::Mul, lhs, unary_expr(), at);
      else if (eat('/'))
        lhs = binary(Kind::Div, lhs, unary_expr(), at);
      else
        return lhs;
    }
  }

  NodePtr unary_expr() {
    const std::size_t at = pos_;
    if (eat('-')) return unary(Kind::Neg, unary_expr(), at);
    return power();
  }

  NodePtr power() {
    NodePtr base = atom();
    const std::size_t at = pos_;
    if (eat('^')) return binary(Kind::Pow, base, unary_expr(), at);
    return base;
  }

  NodePtr atom() {
    skip_ws();
    const std::size_t at = pos_;
    if (pos_ >= text_.size())
      throw ParseError("expected an operand", at, {"number", "name", "("});
    const char c = text_[pos_];

    if (c == '(') {
      ++pos_;
      NodePtr inner = expression();
      if (!eat(')'))
        throw ParseError("missing ')'", pos_, {")"});
      return inner;
    }
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') return number();
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') return name();
    throw ParseError(std::string("unexpected character '") + c + "'", at,
                     {"number", "name", "(", "-"});
  }

  NodePtr number() {
    const std::size_t at = pos_;
    std::size_t end = pos_;
    auto digits = [&] {
      while (end < text_.size() && std::isdigit(static_cast<unsigned char>(text_[end]))) ++end;
    };
    digits();
    if (end < text_.size() && text_[end] == '.') {
      ++end;
      digits();
    }
    if (end < text_.size() && (text_[end] == 'e' || text_[end] == 'E')) {
      std::size_t mark = end + 1;
      if (mark < text_.size() && (text_[mark] == '+' || text_[mark] == '-')) ++mark;
      if (mark < text_.size() && std::isdigit(static_cast<unsigned char>(text_[mark]))) {
        end = mark;
        digits();
      }
    }
    const std::string tok(text_.substr(at, end - at));
    try {
      const double v = std::stod(tok);
      pos_ = end;
      return literal(v, at);
    } catch (const std::exception&) {
      throw ParseError("malformed number '" + tok + "'", at, {"number"});
    }
  }

  NodePtr name() {
    const std::size_t at = pos_;
    std::size_t end = pos_;
    while (end < text_.size() &&
           (std::isalnum(static_cast<unsigned char>(text_[end])) || text_[end] == '_'))
      ++end;
    const std::string id(text_.substr(at, end - at));
    pos_ = end;

    if (id == "pi") return literal(M_PI, at);
    if (id == "e") return literal(M_E, at);

    Func f;
    bool is_func = true;
    if (id == "exp") f = Func::Exp;
    else if (id == "log") f = Func::Log;
    else if (id == "sin") f = Func::Sin;
    else if (id == "cos") f = Func::Cos;
    else if (id == "sqrt") f = Func::Sqrt;
    else if (id == "abs") f = Func::Abs;
    else is_func = false;

    if (is_func) {
      if (!eat('('))
        throw ParseError("function '" + id + "' needs '('", pos_, {"("});
      NodePtr arg = expression();
      if (!eat(')'))
        throw ParseError("missing ')' after argument of '" + id + "'", pos_, {")"});
      return call(f, arg, at);
    }

    if (var_.empty()) var_ = id;
    if (id != var_)
      throw MultipleVariablesError("expression uses both '" + var_ + "' and '" + id +
                                   "'; only one free variable is allowed");
    return variable(at);
  }
};

}  // namespace

Expr parse(std::string_view text) { return Parser(text).run(); }

// ------------------------------------------------------------- evaluation

static double eval_node(const Node& n, double x) {
  switch (n.kind) {
    case Kind::Literal:
      return n.value;
    case Kind::Variable:
      return x;
    case Kind::Add:
      return eval_node(*n.lhs, x) + eval_node(*n.rhs, x);
    case Kind::Sub:
      return eval_node(*n.lhs, x) - eval_node(*n.rhs, x);
    case Kind::Mul:
      return eval_node(*n.lhs, x) * eval_node(*n.rhs, x);
    case Kind::Div: {
      const double d = eval_node(*n.rhs, x);
      if (d == 0.0) throw EvalError("division by zero", n.offset);
      return eval_node(*n.lhs, x) / d;
    }
    case Kind::Pow: {
      const double base = eval_node(*n.lhs, x);
      const double ex = eval_node(*n.rhs, x);
      if (base < 0.0 && ex != std::floor(ex))
        throw EvalError("negative base with non-integer exponent", n.offset);
      if (base == 0.0 && ex < 0.0) throw EvalError("zero base with negative exponent", n.offset);
      return std::pow(base, ex);
    }
    case Kind::Neg:
      return -eval_node(*n.lhs, x);
    case Kind::Call: {
      const double a = eval_node(*n.lhs, x);
      switch (n.func) {
        case Func::Exp: return std::exp(a);
        case Func::Log:
          if (a <= 0.0) throw EvalError("log of a non-positive number", n.offset);
          return std::log(a);
        case Func::Sin: return std::sin(a);
        case Func::Cos: return std::cos(a);
        case Func::Sqrt:
          if (a < 0.0) throw EvalError("sqrt of a negative number", n.offset);
          return std::sqrt(a);
        case Func::Abs: return std::fabs(a);
      }
    }
  }
  throw EvalError("corrupt expression tree");
}

double eval(const Expr& e, double x) {
  if (e.empty()) throw EvalError("empty expression");
  return eval_node(*e.root(), x);
}

static bool contains_variable(const Node& n) {
  if (n.kind == Kind::Variable) return true;
  if (n.lhs && contains_variable(*n.lhs)) return true;
  if (n.rhs && contains_variable(*n.rhs)) return true;
  return false;
}

bool Expr::is_constant() const { return root_ && !contains_variable(*root_); }

// --------------------------------------------------------- simplification

static bool is_literal(const NodePtr& n, double v) {
  return n->kind == Kind::Literal && n->value == v;
}

// Folds constant subtrees that evaluate cleanly; leaves failing ones alone so
// runtime evaluation still reports the error at the right node.
static NodePtr simplify(const NodePtr& n);

static NodePtr fold_if_constant(const NodePtr& n) {
  if (contains_variable(*n)) return n;
  try {
    const double v = eval_node(*n, 0.0);
    if (std::isfinite(v)) return literal(v, n->offset);
  } catch (const EvalError&) {
  }
  return n;
}

static NodePtr simplify(const NodePtr& n) {
  if (n->kind == Kind::Literal || n->kind == Kind::Variable) return n;

  NodePtr a = n->lhs ? simplify(n->lhs) : nullptr;
  NodePtr b = n->rhs ? simplify(n->rhs) : nullptr;

  switch (n->kind) {
    case Kind::Add:
      if (is_literal(a, 0.0)) return b;
      if (is_literal(b, 0.0)) return a;
      break;
    case Kind::Sub:
      if (is_literal(b, 0.0)) return a;
      if (is_literal(a, 0.0)) return fold_if_constant(unary(Kind::Neg, b, n->offset));
      break;
    case Kind::Mul:
      if (is_literal(a, 0.0) || is_literal(b, 0.0)) return literal(0.0, n->offset);
      if (is_literal(a, 1.0)) return b;
      if (is_literal(b, 1.0)) return a;
      break;
    case Kind::Div:
      if (is_literal(a, 0.0) && !is_literal(b, 0.0)) return literal(0.0, n->offset);
      if (is_literal(b, 1.0)) return a;
      break;
    case Kind::Pow:
      if (is_literal(b, 1.0)) return a;
      if (is_literal(b, 0.0)) return literal(1.0, n->offset);
      break;
    case Kind::Neg:
      if (a->kind == Kind::Neg) return a->lhs;
      break;
    default:
      break;
  }

  NodePtr rebuilt;
  if (n->kind == Kind::Call)
    rebuilt = call(n->func, a, n->offset);
  else if (n->kind == Kind::Neg)
    rebuilt = unary(Kind::Neg, a, n->offset);
  else
    rebuilt = binary(n->kind, a, b, n->offset);
  return fold_if_constant(rebuilt);
}

// ------------------------------------------------------- differentiation

static NodePtr diff_node(const NodePtr& n) {
  switch (n->kind) {
    case Kind::Literal:
      return literal(0.0, n->offset);
    case Kind::Variable:
      return literal(1.0, n->offset);
    case Kind::Add:
      return binary(Kind::Add, diff_node(n->lhs), diff_node(n->rhs), n->offset);
    case Kind::Sub:
      return binary(Kind::Sub, diff_node(n->lhs), diff_node(n->rhs), n->offset);
    case Kind::Mul:
      return binary(Kind::Add,
                    binary(Kind::Mul, diff_node(n->lhs), n->rhs, n->offset),
                    binary(Kind::Mul, n->lhs, diff_node(n->rhs), n->offset), n->offset);
    case Kind::Div:
      // (f'g - fg') / g^2
      return binary(
          Kind::Div,
          binary(Kind::Sub, binary(Kind::Mul, diff_node(n->lhs), n->rhs, n->offset),
                 binary(Kind::Mul, n->lhs, diff_node(n->rhs), n->offset), n->offset),
          binary(Kind::Pow, n->rhs, literal(2.0), n->offset), n->offset);
    case Kind::Pow: {
      if (!contains_variable(*n->rhs)) {
        // c * f^(c-1) * f'
        NodePtr cm1 = binary(Kind::Sub, n->rhs, literal(1.0), n->offset);
        return binary(Kind::Mul,
                      binary(Kind::Mul, n->rhs,
                             binary(Kind::Pow, n->lhs, cm1, n->offset), n->offset),
                      diff_node(n->lhs), n->offset);
      }
      // f^g * (g' log f + g f'/f); the evaluation contract already demands f > 0.
      NodePtr term1 = binary(Kind::Mul, diff_node(n->rhs),
                             call(Func::Log, n->lhs, n->offset), n->offset);
      NodePtr term2 = binary(Kind::Div, binary(Kind::Mul, n->rhs, diff_node(n->lhs), n->offset),
                             n->lhs, n->offset);
      return binary(Kind::Mul, binary(Kind::Pow, n->lhs, n->rhs, n->offset),
                    binary(Kind::Add, term1, term2, n->offset), n->offset);
    }
    case Kind::Neg:
      return unary(Kind::Neg, diff_node(n->lhs), n->offset);
    case Kind::Call: {
      NodePtr inner = diff_node(n->lhs);
      switch (n->func) {
        case Func::Exp:
          return binary(Kind::Mul, inner, call(Func::Exp, n->lhs, n->offset), n->offset);
        case Func::Log:
          return binary(Kind::Div, inner, n->lhs, n->offset);
        case Func::Sin:
          return binary(Kind::Mul, inner, call(Func::Cos, n->lhs, n->offset), n->offset);
        case Func::Cos:
          return unary(Kind::Neg,
                       binary(Kind::Mul, inner, call(Func::Sin, n->lhs, n->offset), n->offset),
                       n->offset);
        case Func::Sqrt:
          return binary(Kind::Div, inner,
                        binary(Kind::Mul, literal(2.0), call(Func::Sqrt, n->lhs, n->offset),
                               n->offset),
                        n->offset);
        case Func::Abs:
          throw UnsupportedError("abs() is not differentiable here");
      }
    }
  }
  throw EvalError("corrupt expression tree");
}

Expr differentiate(const Expr& e) {
  if (e.empty()) throw EvalError("empty expression");
  return Expr(simplify(diff_node(e.root())), e.variable());
}

// ----------------------------------------------------------------- print

static int precedence(Kind k) {
  switch (k) {
    case Kind::Add:
    case Kind::Sub: return 1;
    case Kind::Mul:
    case Kind::Div: return 2;
    case Kind::Neg: return 3;
    case Kind::Pow: return 4;
    default: return 5;
  }
}

static void print_node(std::ostringstream& os, const Node& n, const std::string& var,
                       int parent_prec, bool rhs_of_parent) {
  const int prec = precedence(n.kind);
  const bool parens = prec < parent_prec || (prec == parent_prec && rhs_of_parent);
  if (parens) os << '(';
  switch (n.kind) {
    case Kind::Literal: {
      char buf[40];
      std::snprintf(buf, sizeof buf, "%.17g", n.value);
      if (n.value < 0.0) os << '(' << buf << ')';
      else os << buf;
      break;
    }
    case Kind::Variable:
      os << (var.empty() ? "x" : var);
      break;
    case Kind::Add:
      print_node(os, *n.lhs, var, prec, false);
      os << " + ";
      print_node(os, *n.rhs, var, prec, true);
      break;
    case Kind::Sub:
      print_node(os, *n.lhs, var, prec, false);
      os << " - ";
      print_node(os, *n.rhs, var, prec, true);
      break;
    case Kind::Mul:
      print_node(os, *n.lhs, var, prec, false);
      os << " * ";
      print_node(os, *n.rhs, var, prec, true);
      break;
    case Kind::Div:
      print_node(os, *n.lhs, var, prec, false);
      os << " / ";
      print_node(os, *n.rhs, var, prec, true);
      break;
    case Kind::Pow:
      // '^' binds tighter than unary minus, so a Neg base always needs parens.
      print_node(os, *n.lhs, var, prec + 1, false);
      os << "^";
      print_node(os, *n.rhs, var, prec, false);
      break;
    case Kind::Neg:
      os << "-";
      print_node(os, *n.lhs, var, prec, true);
      break;
    case Kind::Call:
      os << func_name(n.func) << '(';
      print_node(os, *n.lhs, var, 0, false);
      os << ')';
      break;
  }
  if (parens) os << ')';
}

std::string to_string(const Expr& e) {
  if (e.empty()) return "";
  std::ostringstream os;
  print_node(os, *e.root(), e.variable(), 0, false);
  return os.str();
}

}  // namespace wgfc::expr
