#ifndef VIRIAL_EXPR_HPP_
#define VIRIAL_EXPR_HPP_

#include <memory>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace virial {

// Expression trees for scalar potentials V(s), where s >= 0 is the gauge
// invariant phi^dag phi.  Node set: real constants, the variable `s`,
// + - * /, powers with a constant real exponent, and the natural log.

enum class ExprKind { Constant, Var, Add, Sub, Mul, Div, Pow, Log };

struct ExprNode;
using ExprPtr = std::shared_ptr<const ExprNode>;

struct ExprNode {
  ExprKind kind;
  double value = 0.0;  // Constant: the value; Pow: the exponent
  ExprPtr a, b;        // children (a only for Pow/Log)
};

class ParseError : public std::runtime_error {
 public:
  ParseError(const std::string& what, std::size_t offset);
  std::size_t offset() const { return offset_; }

 private:
  std::size_t offset_;
};

// Raised when an evaluation leaves the domain of the expression
// (log of a non-positive argument, division by zero, 0^negative, ...).
class EvalDomainError : public std::runtime_error {
 public:
  explicit EvalDomainError(const std::string& what);
};

class PotentialExpr {
 public:
  PotentialExpr();  // the zero potential
  explicit PotentialExpr(ExprPtr root);

  const ExprPtr& root() const { return root_; }

  double eval(double s) const;  // throws EvalDomainError
  bool try_eval(double s, double* out) const noexcept;

  PotentialExpr derivative() const;
  std::string str() const;

 private:
  ExprPtr root_;
};

// Grammar:
//   expr   := term (('+'|'-') term)*
//   term   := unary (('*'|'/') unary)*
//   unary  := '-' unary | factor
//   factor := base ('^' number)?
//   base   := number | 's' | 'ln' '(' expr ')' | '(' expr ')'
// Whitespace is insignificant; exponents must be numeric constants.
PotentialExpr parse_potential(std::string_view text);

// Exact symbolic derivative d/ds.
PotentialExpr differentiate(const PotentialExpr& expr);

// Parenthesized text form; reparses to an equivalent tree.
std::string to_string(const PotentialExpr& expr);

// Node constructors; fold constants where the fold cannot hide a domain
// error (no folding of x/0 or ln(c<=0)).
ExprPtr make_constant(double c);
ExprPtr make_var();
ExprPtr make_add(ExprPtr a, ExprPtr b);
ExprPtr make_sub(ExprPtr a, ExprPtr b);
ExprPtr make_mul(ExprPtr a, ExprPtr b);
ExprPtr make_div(ExprPtr a, ExprPtr b);
ExprPtr make_pow(ExprPtr base, double exponent);
ExprPtr make_log(ExprPtr arg);

// Flat postfix program for fast repeated evaluation of one tree.
// eval() returns NaN on a domain error instead of throwing.
class CompiledPotential {
 public:
  CompiledPotential() = default;
  explicit CompiledPotential(const PotentialExpr& expr);

  double eval(double s) const noexcept;
  bool try_eval(double s, double* out) const noexcept;
  double eval_checked(double s) const;  // throws EvalDomainError

 private:
  enum class Op : unsigned char {
    PushConst,
    PushS,
    Add,
    Sub,
    Mul,
    Div,
    PowC,    // pow with non-integer exponent imm
    PowInt,  // pow with integer exponent iexp
    Log,
  };
  struct Instr {
    Op op;
    double imm = 0.0;
    int iexp = 0;
  };
  std::vector<Instr> prog_;
  int max_stack_ = 0;
};

}  // namespace virial

#endif  // VIRIAL_EXPR_HPP_
