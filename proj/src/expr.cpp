#include "nilstruct/expr.hpp"

#include <cctype>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <utility>

namespace nilstruct {

namespace detail {

struct ExprNode {
  enum class Kind { Number, Symbol, Unary, Binary, Power };
  Kind kind;
  double number = 0.0;   // Number
  int symbol = -1;       // Symbol: slot in the variable table
  std::string name;      // Symbol: variable name (for printing/errors)
  UnaryOp uop{};
  BinaryOp bop{};
  int exponent = 0;      // Power
  NodePtr a, b;
};

namespace {

using Kind = ExprNode::Kind;

NodePtr make_number(double v) {
  auto n = std::make_shared<ExprNode>();
  n->kind = Kind::Number;
  n->number = v;
  return n;
}

NodePtr make_symbol(int index, std::string name) {
  auto n = std::make_shared<ExprNode>();
  n->kind = Kind::Symbol;
  n->symbol = index;
  n->name = std::move(name);
  return n;
}

bool is_num(const NodePtr& n, double v) {
  return n->kind == Kind::Number && n->number == v;
}

NodePtr make_unary(UnaryOp op, NodePtr a);

NodePtr make_binary(BinaryOp op, NodePtr a, NodePtr b) {
  // Fold numeric operands and the cheap identities with 0 and 1. Folding
  // uses the same IEEE operations as evaluation, so values are unchanged.
  if (a->kind == Kind::Number && b->kind == Kind::Number) {
    double v = 0;
    bool ok = true;
    switch (op) {
      case BinaryOp::Add: v = a->number + b->number; break;
      case BinaryOp::Sub: v = a->number - b->number; break;
      case BinaryOp::Mul: v = a->number * b->number; break;
      case BinaryOp::Div:
        ok = b->number != 0.0;
        if (ok) v = a->number / b->number;
        break;
    }
    if (ok && std::isfinite(v)) return make_number(v);
  }
  switch (op) {
    case BinaryOp::Add:
      if (is_num(a, 0.0)) return b;
      if (is_num(b, 0.0)) return a;
      break;
    case BinaryOp::Sub:
      if (is_num(b, 0.0)) return a;
      if (is_num(a, 0.0)) return make_unary(UnaryOp::Neg, std::move(b));
      break;
    case BinaryOp::Mul:
      if (is_num(a, 0.0) || is_num(b, 0.0)) return make_number(0.0);
      if (is_num(a, 1.0)) return b;
      if (is_num(b, 1.0)) return a;
      break;
    case BinaryOp::Div:
      if (is_num(a, 0.0)) return make_number(0.0);
      if (is_num(b, 1.0)) return a;
      break;
  }
  auto n = std::make_shared<ExprNode>();
  n->kind = Kind::Binary;
  n->bop = op;
  n->a = std::move(a);
  n->b = std::move(b);
  return n;
}

NodePtr make_unary(UnaryOp op, NodePtr a) {
  if (op == UnaryOp::Neg) {
    if (a->kind == Kind::Number) return make_number(-a->number);
    if (a->kind == Kind::Unary && a->uop == UnaryOp::Neg) return a->a;
  }
  auto n = std::make_shared<ExprNode>();
  n->kind = Kind::Unary;
  n->uop = op;
  n->a = std::move(a);
  return n;
}

NodePtr make_power(NodePtr base, int exponent) {
  if (exponent == 0) return make_number(1.0);
  if (exponent == 1) return base;
  if (base->kind == Kind::Number && exponent > 0)
    return make_number(ipow(base->number, exponent));
  auto n = std::make_shared<ExprNode>();
  n->kind = Kind::Power;
  n->exponent = exponent;
  n->a = std::move(base);
  return n;
}

// ---- printing ------------------------------------------------------------

// Precedence: additive 1, multiplicative 2, power 3, atoms 4. Negation is
// handled separately because the grammar allows '-' only in front of a base.
int precedence(const ExprNode& n) {
  switch (n.kind) {
    case Kind::Binary:
      return (n.bop == BinaryOp::Add || n.bop == BinaryOp::Sub) ? 1 : 2;
    case Kind::Power: return 3;
    case Kind::Unary: return n.uop == UnaryOp::Neg ? 3 : 4;
    default: return 4;
  }
}

std::string number_text(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

void print_node(const ExprNode& n, std::string& out);

void print_child(const ExprNode& child, int min_prec, std::string& out) {
  if (precedence(child) < min_prec) {
    out += '(';
    print_node(child, out);
    out += ')';
  } else {
    print_node(child, out);
  }
}

void print_node(const ExprNode& n, std::string& out) {
  switch (n.kind) {
    case Kind::Number:
      if (n.number < 0 || (n.number == 0 && std::signbit(n.number))) {
        // keep the token stream unambiguous: negative literals print as
        // negated positives
        out += "-";
        out += number_text(-n.number);
      } else {
        out += number_text(n.number);
      }
      return;
    case Kind::Symbol:
      out += n.name;
      return;
    case Kind::Power:
      print_child(*n.a, 4, out);  // power base must be an atom or '-' base
      out += '^';
      out += std::to_string(n.exponent);
      return;
    case Kind::Unary:
      switch (n.uop) {
        case UnaryOp::Neg:
          out += '-';
          // '-' binds a base and '^' binds after it, so -(u^2) must keep
          // its parentheses: anything below atom level gets wrapped
          print_child(*n.a, 4, out);
          return;
        case UnaryOp::Sin: out += "sin("; break;
        case UnaryOp::Cos: out += "cos("; break;
        case UnaryOp::Exp: out += "exp("; break;
        case UnaryOp::Log: out += "log("; break;
        case UnaryOp::Sqrt: out += "sqrt("; break;
        default: break;
      }
      print_node(*n.a, out);
      out += ')';
      return;
    case Kind::Binary: {
      int prec = precedence(n);
      const char* sym = nullptr;
      switch (n.bop) {
        case BinaryOp::Add: sym = " + "; break;
        case BinaryOp::Sub: sym = " - "; break;
        case BinaryOp::Mul: sym = "*"; break;
        case BinaryOp::Div: sym = "/"; break;
      }
      print_child(*n.a, prec, out);
      out += sym;
      // parenthesize equal precedence on the right so the reparse rebuilds
      // the identical tree under left association
      print_child(*n.b, prec + 1, out);
      return;
    }
  }
}

std::string node_text(const ExprNode& n) {
  std::string out;
  print_node(n, out);
  return out;
}

// ---- evaluation ----------------------------------------------------------

double eval_node(const ExprNode& n, std::span<const double> point) {
  switch (n.kind) {
    case Kind::Number:
      return n.number;
    case Kind::Symbol:
      return point[static_cast<std::size_t>(n.symbol)];
    case Kind::Power: {
      double base = eval_node(*n.a, point);
      if (base == 0.0 && n.exponent < 0)
        throw EvalError("zero raised to a negative power", node_text(n));
      return ipow(base, n.exponent);
    }
    case Kind::Unary: {
      double a = eval_node(*n.a, point);
      switch (n.uop) {
        case UnaryOp::Neg: return -a;
        case UnaryOp::Sin: return std::sin(a);
        case UnaryOp::Cos: return std::cos(a);
        case UnaryOp::Exp: return std::exp(a);
        case UnaryOp::Log:
          if (a <= 0.0) throw EvalError("log of a non-positive value", node_text(n));
          return std::log(a);
        case UnaryOp::Sqrt:
          if (a < 0.0) throw EvalError("sqrt of a negative value", node_text(n));
          return std::sqrt(a);
      }
      return 0.0;
    }
    case Kind::Binary: {
      double a = eval_node(*n.a, point);
      double b = eval_node(*n.b, point);
      switch (n.bop) {
        case BinaryOp::Add: return a + b;
        case BinaryOp::Sub: return a - b;
        case BinaryOp::Mul: return a * b;
        case BinaryOp::Div:
          if (b == 0.0) throw EvalError("division by zero", node_text(n));
          return a / b;
      }
      return 0.0;
    }
  }
  return 0.0;
}

// ---- derivative ----------------------------------------------------------

NodePtr diff_node(const NodePtr& n, int var) {
  switch (n->kind) {
    case Kind::Number:
      return make_number(0.0);
    case Kind::Symbol:
      return make_number(n->symbol == var ? 1.0 : 0.0);
    case Kind::Power: {
      // d(a^k) = k a^(k-1) a'
      NodePtr da = diff_node(n->a, var);
      NodePtr factor = make_binary(BinaryOp::Mul, make_number(n->exponent),
                                   make_power(n->a, n->exponent - 1));
      return make_binary(BinaryOp::Mul, std::move(factor), std::move(da));
    }
    case Kind::Unary: {
      NodePtr da = diff_node(n->a, var);
      switch (n->uop) {
        case UnaryOp::Neg:
          return make_unary(UnaryOp::Neg, std::move(da));
        case UnaryOp::Sin:
          return make_binary(BinaryOp::Mul, make_unary(UnaryOp::Cos, n->a),
                             std::move(da));
        case UnaryOp::Cos:
          return make_unary(
              UnaryOp::Neg,
              make_binary(BinaryOp::Mul, make_unary(UnaryOp::Sin, n->a),
                          std::move(da)));
        case UnaryOp::Exp:
          return make_binary(BinaryOp::Mul, make_unary(UnaryOp::Exp, n->a),
                             std::move(da));
        case UnaryOp::Log:
          return make_binary(BinaryOp::Div, std::move(da), n->a);
        case UnaryOp::Sqrt:
          return make_binary(
              BinaryOp::Div, std::move(da),
              make_binary(BinaryOp::Mul, make_number(2.0),
                          make_unary(UnaryOp::Sqrt, n->a)));
      }
      return make_number(0.0);
    }
    case Kind::Binary: {
      NodePtr da = diff_node(n->a, var);
      NodePtr db = diff_node(n->b, var);
      switch (n->bop) {
        case BinaryOp::Add:
          return make_binary(BinaryOp::Add, std::move(da), std::move(db));
        case BinaryOp::Sub:
          return make_binary(BinaryOp::Sub, std::move(da), std::move(db));
        case BinaryOp::Mul:
          return make_binary(
              BinaryOp::Add, make_binary(BinaryOp::Mul, std::move(da), n->b),
              make_binary(BinaryOp::Mul, n->a, std::move(db)));
        case BinaryOp::Div:
          return make_binary(
              BinaryOp::Div,
              make_binary(BinaryOp::Sub,
                          make_binary(BinaryOp::Mul, std::move(da), n->b),
                          make_binary(BinaryOp::Mul, n->a, std::move(db))),
              make_power(n->b, 2));
      }
      return make_number(0.0);
    }
  }
  return make_number(0.0);
}

bool node_has_symbol(const ExprNode& n) {
  switch (n.kind) {
    case Kind::Symbol: return true;
    case Kind::Number: return false;
    case Kind::Unary:
    case Kind::Power: return node_has_symbol(*n.a);
    case Kind::Binary: return node_has_symbol(*n.a) || node_has_symbol(*n.b);
  }
  return false;
}

NodePtr substitute_node(const NodePtr& n,
                        const std::map<std::string, detail::NodePtr>& map,
                        const VarTable& new_vars) {
  switch (n->kind) {
    case Kind::Number:
      return n;
    case Kind::Symbol: {
      auto it = map.find(n->name);
      if (it != map.end()) return it->second;
      int idx = var_index(new_vars, n->name);
      if (idx < 0)
        throw ShapeError("substitute: variable '" + n->name +
                         "' is absent from the target table");
      return make_symbol(idx, n->name);
    }
    case Kind::Unary:
      return make_unary(n->uop, substitute_node(n->a, map, new_vars));
    case Kind::Power:
      return make_power(substitute_node(n->a, map, new_vars), n->exponent);
    case Kind::Binary:
      return make_binary(n->bop, substitute_node(n->a, map, new_vars),
                         substitute_node(n->b, map, new_vars));
  }
  return n;
}

}  // namespace
}  // namespace detail

using detail::ExprNode;
using detail::NodePtr;
using Kind = ExprNode::Kind;

double ipow(double base, int exponent) {
  if (exponent < 0) return 1.0 / ipow(base, -exponent);
  double result = 1.0;
  double square = base;
  for (int e = exponent; e > 0; e >>= 1) {
    if (e & 1) result *= square;
    square *= square;
  }
  return result;
}

VarTablePtr make_vars(std::vector<std::string> names) {
  return std::make_shared<const VarTable>(std::move(names));
}

VarTablePtr make_vars(std::initializer_list<const char*> names) {
  VarTable v;
  for (const char* n : names) v.emplace_back(n);
  return std::make_shared<const VarTable>(std::move(v));
}

int var_index(const VarTable& vars, std::string_view name) {
  for (std::size_t i = 0; i < vars.size(); ++i)
    if (vars[i] == name) return static_cast<int>(i);
  return -1;
}

VarTablePtr default_coords(int dim) {
  VarTable v;
  v.reserve(static_cast<std::size_t>(dim));
  for (int i = 1; i <= dim; ++i) v.push_back("z" + std::to_string(i));
  return std::make_shared<const VarTable>(std::move(v));
}

Expression::Expression()
    : root_(detail::make_number(0.0)),
      vars_(std::make_shared<const VarTable>()) {}

Expression::Expression(NodePtr root, VarTablePtr vars)
    : root_(std::move(root)), vars_(std::move(vars)) {}

Expression Expression::number(double value, VarTablePtr vars) {
  return Expression(detail::make_number(value), std::move(vars));
}

Expression Expression::symbol(std::string_view name, VarTablePtr vars) {
  int idx = var_index(*vars, name);
  if (idx < 0)
    throw ShapeError("unknown variable '" + std::string(name) + "'");
  return Expression(detail::make_symbol(idx, std::string(name)),
                    std::move(vars));
}

double Expression::evaluate(std::span<const double> point) const {
  if (point.size() < vars_->size())
    throw ShapeError("evaluation point has " + std::to_string(point.size()) +
                     " entries, expected " + std::to_string(vars_->size()));
  return detail::eval_node(*root_, point);
}

Expression Expression::derivative(std::string_view var) const {
  int idx = var_index(*vars_, var);
  if (idx < 0)
    throw ShapeError("derivative with respect to unknown variable '" +
                     std::string(var) + "'");
  return Expression(detail::diff_node(root_, idx), vars_);
}

Expression Expression::substitute(const std::map<std::string, Expression>& map,
                                  VarTablePtr new_vars) const {
  std::map<std::string, NodePtr> nodes;
  for (const auto& [name, e] : map) nodes.emplace(name, e.root());
  return Expression(detail::substitute_node(root_, nodes, *new_vars),
                    std::move(new_vars));
}

Expression Expression::rehosted(VarTablePtr wider_vars) const {
  if (wider_vars->size() < vars_->size())
    throw ShapeError("rehost target table is smaller than the source");
  for (std::size_t i = 0; i < vars_->size(); ++i)
    if ((*wider_vars)[i] != (*vars_)[i])
      throw ShapeError("rehost target table does not extend the source");
  return Expression(root_, std::move(wider_vars));
}

std::string Expression::to_string() const { return detail::node_text(*root_); }

bool Expression::is_zero() const {
  return root_->kind == Kind::Number && root_->number == 0.0;
}

bool Expression::is_number() const { return root_->kind == Kind::Number; }

double Expression::number_value() const { return root_->number; }

bool Expression::is_constant() const {
  return !detail::node_has_symbol(*root_);
}

namespace {

const VarTablePtr& join_vars(const Expression& a, const Expression& b) {
  // constants carry an empty table and adopt the other operand's table
  if (a.variables()->empty()) return b.variables();
  if (b.variables()->empty()) return a.variables();
  if (a.variables() != b.variables() && *a.variables() != *b.variables())
    throw ShapeError("expression operands use different variable tables");
  return a.variables();
}

}  // namespace

Expression operator+(const Expression& a, const Expression& b) {
  return Expression(detail::make_binary(BinaryOp::Add, a.root(), b.root()),
                    join_vars(a, b));
}
Expression operator-(const Expression& a, const Expression& b) {
  return Expression(detail::make_binary(BinaryOp::Sub, a.root(), b.root()),
                    join_vars(a, b));
}
Expression operator*(const Expression& a, const Expression& b) {
  return Expression(detail::make_binary(BinaryOp::Mul, a.root(), b.root()),
                    join_vars(a, b));
}
Expression operator/(const Expression& a, const Expression& b) {
  return Expression(detail::make_binary(BinaryOp::Div, a.root(), b.root()),
                    join_vars(a, b));
}
Expression operator-(const Expression& a) {
  return Expression(detail::make_unary(UnaryOp::Neg, a.root()), a.variables());
}
Expression pow_int(const Expression& base, int exponent) {
  return Expression(detail::make_power(base.root(), exponent),
                    base.variables());
}
Expression sin(const Expression& a) {
  return Expression(detail::make_unary(UnaryOp::Sin, a.root()), a.variables());
}
Expression cos(const Expression& a) {
  return Expression(detail::make_unary(UnaryOp::Cos, a.root()), a.variables());
}
Expression exp(const Expression& a) {
  return Expression(detail::make_unary(UnaryOp::Exp, a.root()), a.variables());
}
Expression log(const Expression& a) {
  return Expression(detail::make_unary(UnaryOp::Log, a.root()), a.variables());
}
Expression sqrt(const Expression& a) {
  return Expression(detail::make_unary(UnaryOp::Sqrt, a.root()), a.variables());
}

// ---- parser ----------------------------------------------------------------

namespace {

class Parser {
 public:
  Parser(std::string_view text, VarTablePtr vars)
      : text_(text), vars_(std::move(vars)) {}

  NodePtr run() {
    skip_ws();
    if (pos_ >= text_.size()) throw ParseError("empty expression", pos_);
    NodePtr e = parse_expr();
    skip_ws();
    if (pos_ < text_.size())
      throw ParseError("unexpected trailing input", pos_);
    return e;
  }

 private:
  NodePtr parse_expr() {
    NodePtr left = parse_term();
    for (;;) {
      skip_ws();
      if (accept('+')) {
        left = detail::make_binary(BinaryOp::Add, left, parse_term());
      } else if (accept('-')) {
        left = detail::make_binary(BinaryOp::Sub, left, parse_term());
      } else {
        return left;
      }
    }
  }

  NodePtr parse_term() {
    NodePtr left = parse_factor();
    for (;;) {
      skip_ws();
      if (accept('*')) {
        left = detail::make_binary(BinaryOp::Mul, left, parse_factor());
      } else if (accept('/')) {
        left = detail::make_binary(BinaryOp::Div, left, parse_factor());
      } else {
        return left;
      }
    }
  }

  NodePtr parse_factor() {
    NodePtr base = parse_base();
    skip_ws();
    if (accept('^')) return detail::make_power(base, parse_int_literal());
    return base;
  }

  NodePtr parse_base() {
    skip_ws();
    if (pos_ >= text_.size())
      throw ParseError("unexpected end of expression", pos_);
    char c = text_[pos_];
    if (c == '-') {
      ++pos_;
      return detail::make_unary(UnaryOp::Neg, parse_base());
    }
    if (c == '(') {
      ++pos_;
      NodePtr e = parse_expr();
      expect(')');
      return e;
    }
    if (std::isdigit(static_cast<unsigned char>(c))) return parse_number();
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_')
      return parse_identifier();
    throw ParseError(std::string("unexpected character '") + c + "'", pos_);
  }

  NodePtr parse_number() {
    std::size_t start = pos_;
    while (pos_ < text_.size() &&
           std::isdigit(static_cast<unsigned char>(text_[pos_])))
      ++pos_;
    if (pos_ < text_.size() && text_[pos_] == '.') {
      ++pos_;
      while (pos_ < text_.size() &&
             std::isdigit(static_cast<unsigned char>(text_[pos_])))
        ++pos_;
    }
    if (pos_ < text_.size() && (text_[pos_] == 'e' || text_[pos_] == 'E')) {
      std::size_t mark = pos_;
      ++pos_;
      if (pos_ < text_.size() && (text_[pos_] == '+' || text_[pos_] == '-'))
        ++pos_;
      if (pos_ < text_.size() &&
          std::isdigit(static_cast<unsigned char>(text_[pos_]))) {
        while (pos_ < text_.size() &&
               std::isdigit(static_cast<unsigned char>(text_[pos_])))
          ++pos_;
      } else {
        pos_ = mark;  // 'e' begins an identifier, not an exponent
      }
    }
    std::string token(text_.substr(start, pos_ - start));
    return detail::make_number(std::strtod(token.c_str(), nullptr));
  }

  NodePtr parse_identifier() {
    std::size_t start = pos_;
    while (pos_ < text_.size() &&
           (std::isalnum(static_cast<unsigned char>(text_[pos_])) ||
            text_[pos_] == '_'))
      ++pos_;
    std::string name(text_.substr(start, pos_ - start));
    skip_ws();
    if (pos_ < text_.size() && text_[pos_] == '(') {
      UnaryOp op;
      if (name == "sin") op = UnaryOp::Sin;
      else if (name == "cos") op = UnaryOp::Cos;
      else if (name == "exp") op = UnaryOp::Exp;
      else if (name == "log") op = UnaryOp::Log;
      else if (name == "sqrt") op = UnaryOp::Sqrt;
      else throw ParseError("unknown function '" + name + "'", start);
      ++pos_;
      NodePtr arg = parse_expr();
      expect(')');
      return detail::make_unary(op, arg);
    }
    int idx = var_index(*vars_, name);
    if (idx < 0) throw ParseError("unknown identifier '" + name + "'", start);
    return detail::make_symbol(idx, std::move(name));
  }

  int parse_int_literal() {
    skip_ws();
    std::size_t start = pos_;
    bool negative = false;
    if (pos_ < text_.size() && (text_[pos_] == '-' || text_[pos_] == '+')) {
      negative = text_[pos_] == '-';
      ++pos_;
    }
    if (pos_ >= text_.size() ||
        !std::isdigit(static_cast<unsigned char>(text_[pos_])))
      throw ParseError("expected integer exponent", pos_);
    long value = 0;
    while (pos_ < text_.size() &&
           std::isdigit(static_cast<unsigned char>(text_[pos_]))) {
      value = value * 10 + (text_[pos_] - '0');
      if (value > 1000000) throw ParseError("exponent too large", start);
      ++pos_;
    }
    if (pos_ < text_.size() && (text_[pos_] == '.' || text_[pos_] == 'e' ||
                                text_[pos_] == 'E'))
      throw ParseError("non-integer exponent", pos_);
    return static_cast<int>(negative ? -value : value);
  }

  void skip_ws() {
    while (pos_ < text_.size() &&
           std::isspace(static_cast<unsigned char>(text_[pos_])))
      ++pos_;
  }

  bool accept(char c) {
    if (pos_ < text_.size() && text_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }

  void expect(char c) {
    skip_ws();
    if (!accept(c))
      throw ParseError(std::string("expected '") + c + "'", pos_);
  }

  std::string_view text_;
  VarTablePtr vars_;
  std::size_t pos_ = 0;
};

}  // namespace

Expression parse_expression(std::string_view text, VarTablePtr vars) {
  Parser p(text, vars);
  return Expression(p.run(), std::move(vars));
}

std::string SingularError::format_point(const std::vector<double>& p) {
  std::string out = "(";
  for (std::size_t i = 0; i < p.size(); ++i) {
    if (i) out += ", ";
    char buf[32];
    std::snprintf(buf, sizeof buf, "%g", p[i]);
    out += buf;
  }
  out += ")";
  return out;
}

}  // namespace nilstruct
