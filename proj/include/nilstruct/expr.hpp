#pragma once

#include <map>
#include <memory>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "nilstruct/error.hpp"

namespace nilstruct {

// Shared, immutable table of variable names. Every Expression is bound to
// one table; the i-th entry names the i-th slot of an evaluation point.
using VarTable = std::vector<std::string>;
using VarTablePtr = std::shared_ptr<const VarTable>;

VarTablePtr make_vars(std::vector<std::string> names);
VarTablePtr make_vars(std::initializer_list<const char*> names);

// Index of `name` in `vars`, or -1 when absent.
int var_index(const VarTable& vars, std::string_view name);

// Default chart coordinate names z1..z{dim}.
VarTablePtr default_coords(int dim);

enum class UnaryOp { Neg, Sin, Cos, Exp, Log, Sqrt };
enum class BinaryOp { Add, Sub, Mul, Div };

namespace detail {
struct ExprNode;
using NodePtr = std::shared_ptr<const ExprNode>;
}  // namespace detail

// Immutable symbolic scalar function of the variables in its table.
//
// An Expression is an AST over numeric literals, variable symbols, the
// unary functions neg/sin/cos/exp/log/sqrt, the binary operators + - * /,
// and integer powers. Construction goes through parse() or the overloaded
// operators below; light constant folding is applied on construction.
// Evaluation is a pure function of the point, so Expressions are safe to
// share across threads.
class Expression {
 public:
  Expression();  // the constant 0 with an empty variable table

  static Expression number(double value, VarTablePtr vars);
  static Expression symbol(std::string_view name, VarTablePtr vars);

  // Evaluates at `point`, which must supply one value per table entry.
  // Throws EvalError on domain failures.
  double evaluate(std::span<const double> point) const;

  // Exact symbolic partial derivative with respect to the named variable.
  Expression derivative(std::string_view var) const;

  // Replaces every symbol by the mapped expression (symbols not present in
  // `map` are looked up by name in `new_vars`). All mapped expressions must
  // be bound to `new_vars`.
  Expression substitute(const std::map<std::string, Expression>& map,
                        VarTablePtr new_vars) const;

  // Rebinds the expression to a larger table whose leading entries match
  // the current one (used when a base-chart expression moves to a lifted
  // chart).
  Expression rehosted(VarTablePtr wider_vars) const;

  // Parseable text form; parse(to_string(), vars) evaluates identically.
  std::string to_string() const;

  // True when the AST is the literal 0 / a numeric literal.
  bool is_zero() const;
  bool is_number() const;
  double number_value() const;  // pre: is_number()

  // True when no symbol occurs, i.e. every partial derivative vanishes.
  bool is_constant() const;

  const VarTablePtr& variables() const { return vars_; }
  const detail::NodePtr& root() const { return root_; }

  Expression(detail::NodePtr root, VarTablePtr vars);

 private:
  detail::NodePtr root_;
  VarTablePtr vars_;
};

// Smart-constructor arithmetic; folds numeric operands and algebraic
// identities with 0 and 1. Operands must share a variable table.
Expression operator+(const Expression& a, const Expression& b);
Expression operator-(const Expression& a, const Expression& b);
Expression operator*(const Expression& a, const Expression& b);
Expression operator/(const Expression& a, const Expression& b);
Expression operator-(const Expression& a);
Expression pow_int(const Expression& base, int exponent);
Expression sin(const Expression& a);
Expression cos(const Expression& a);
Expression exp(const Expression& a);
Expression log(const Expression& a);
Expression sqrt(const Expression& a);

// Integer power by repeated squaring; the same routine backs evaluation
// and constant folding so folded values match evaluated ones bitwise.
double ipow(double base, int exponent);

// Parses `text` against the grammar
//   expr   := term (('+'|'-') term)*
//   term   := factor (('*'|'/') factor)*
//   factor := base ('^' intlit)?
//   base   := number | ident | ident '(' expr ')' | '(' expr ')' | '-' base
// where every identifier must be a table entry or one of sin, cos, exp,
// log, sqrt. Throws ParseError with the character position on bad syntax,
// unknown identifiers, and non-integer exponents.
Expression parse_expression(std::string_view text, VarTablePtr vars);

}  // namespace nilstruct
