#include "virial/expr.hpp"

#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <limits>

namespace virial {

ParseError::ParseError(const std::string& what, std::size_t offset)
    : std::runtime_error(what + " (at offset " + std::to_string(offset) + ")"),
      offset_(offset) {}

EvalDomainError::EvalDomainError(const std::string& what)
    : std::runtime_error(what) {}

namespace {

ExprPtr node(ExprKind kind, double value, ExprPtr a = nullptr,
             ExprPtr b = nullptr) {
  auto n = std::make_shared<ExprNode>();
  n->kind = kind;
  n->value = value;
  n->a = std::move(a);
  n->b = std::move(b);
  return n;
}

bool is_const(const ExprPtr& e, double v) {
  return e->kind == ExprKind::Constant && e->value == v;
}

}  // namespace

ExprPtr make_constant(double c) { return node(ExprKind::Constant, c); }

ExprPtr make_var() { return node(ExprKind::Var, 0.0); }

ExprPtr make_add(ExprPtr a, ExprPtr b) {
  if (a->kind == ExprKind::Constant && b->kind == ExprKind::Constant)
    return make_constant(a->value + b->value);
  if (is_const(a, 0.0)) return b;
  if (is_const(b, 0.0)) return a;
  return node(ExprKind::Add, 0.0, std::move(a), std::move(b));
}

ExprPtr make_sub(ExprPtr a, ExprPtr b) {
  if (a->kind == ExprKind::Constant && b->kind == ExprKind::Constant)
    return make_constant(a->value - b->value);
  if (is_const(b, 0.0)) return a;
  return node(ExprKind::Sub, 0.0, std::move(a), std::move(b));
}

ExprPtr make_mul(ExprPtr a, ExprPtr b) {
  if (a->kind == ExprKind::Constant && b->kind == ExprKind::Constant)
    return make_constant(a->value * b->value);
  if (is_const(a, 0.0) || is_const(b, 0.0)) return make_constant(0.0);
  if (is_const(a, 1.0)) return b;
  if (is_const(b, 1.0)) return a;
  return node(ExprKind::Mul, 0.0, std::move(a), std::move(b));
}

ExprPtr make_div(ExprPtr a, ExprPtr b) {
  if (a->kind == ExprKind::Constant && b->kind == ExprKind::Constant &&
      b->value != 0.0)
    return make_constant(a->value / b->value);
  if (is_const(b, 1.0)) return a;
  return node(ExprKind::Div, 0.0, std::move(a), std::move(b));
}

ExprPtr make_pow(ExprPtr base, double exponent) {
  if (exponent == 1.0) return base;
  if (exponent == 0.0) return make_constant(1.0);  // 0^0 := 1
  if (base->kind == ExprKind::Constant) {
    double v = std::pow(base->value, exponent);
    if (std::isfinite(v)) return make_constant(v);
  }
  return node(ExprKind::Pow, exponent, std::move(base));
}

ExprPtr make_log(ExprPtr arg) {
  if (arg->kind == ExprKind::Constant && arg->value > 0.0)
    return make_constant(std::log(arg->value));
  return node(ExprKind::Log, 0.0, std::move(arg));
}

// ---------------------------------------------------------------------------
// Evaluation

namespace {

bool is_small_integer(double x, int* out) {
  if (x != std::floor(x) || std::fabs(x) > 64.0) return false;
  *out = static_cast<int>(x);
  return true;
}

double pow_int(double x, int n) {
  if (n < 0) return 1.0 / pow_int(x, -n);
  double r = 1.0, p = x;
  while (n > 0) {
    if (n & 1) r *= p;
    p *= p;
    n >>= 1;
  }
  return r;
}

double eval_node(const ExprNode& e, double s, bool* ok, std::string* err) {
  switch (e.kind) {
    case ExprKind::Constant:
      return e.value;
    case ExprKind::Var:
      return s;
    case ExprKind::Add:
      return eval_node(*e.a, s, ok, err) + eval_node(*e.b, s, ok, err);
    case ExprKind::Sub:
      return eval_node(*e.a, s, ok, err) - eval_node(*e.b, s, ok, err);
    case ExprKind::Mul:
      return eval_node(*e.a, s, ok, err) * eval_node(*e.b, s, ok, err);
    case ExprKind::Div: {
      double num = eval_node(*e.a, s, ok, err);
      double den = eval_node(*e.b, s, ok, err);
      if (den == 0.0) {
        *ok = false;
        if (err->empty()) *err = "division by zero";
        return std::numeric_limits<double>::quiet_NaN();
      }
      return num / den;
    }
    case ExprKind::Pow: {
      double base = eval_node(*e.a, s, ok, err);
      int n;
      if (is_small_integer(e.value, &n)) {
        if (base == 0.0 && n < 0) {
          *ok = false;
          if (err->empty()) *err = "zero raised to a negative power";
          return std::numeric_limits<double>::quiet_NaN();
        }
        return pow_int(base, n);
      }
      if (base < 0.0) {
        *ok = false;
        if (err->empty()) *err = "negative base with non-integer exponent";
        return std::numeric_limits<double>::quiet_NaN();
      }
      if (base == 0.0 && e.value < 0.0) {
        *ok = false;
        if (err->empty()) *err = "zero raised to a negative power";
        return std::numeric_limits<double>::quiet_NaN();
      }
      return std::pow(base, e.value);
    }
    case ExprKind::Log: {
      double arg = eval_node(*e.a, s, ok, err);
      if (!(arg > 0.0)) {
        *ok = false;
        if (err->empty()) *err = "log of non-positive argument";
        return std::numeric_limits<double>::quiet_NaN();
      }
      return std::log(arg);
    }
  }
  *ok = false;
  return std::numeric_limits<double>::quiet_NaN();
}

}  // namespace

PotentialExpr::PotentialExpr() : root_(make_constant(0.0)) {}

PotentialExpr::PotentialExpr(ExprPtr root) : root_(std::move(root)) {
  if (!root_) throw std::invalid_argument("null expression root");
}

double PotentialExpr::eval(double s) const {
  bool ok = true;
  std::string err;
  double v = eval_node(*root_, s, &ok, &err);
  if (!ok) throw EvalDomainError(err.empty() ? "domain error" : err);
  return v;
}

bool PotentialExpr::try_eval(double s, double* out) const noexcept {
  bool ok = true;
  std::string err;
  double v = eval_node(*root_, s, &ok, &err);
  if (ok) *out = v;
  return ok;
}

// ---------------------------------------------------------------------------
// Parser

namespace {

class Parser {
 public:
  explicit Parser(std::string_view text) : text_(text), pos_(0) {}

  ExprPtr run() {
    skip_ws();
    if (pos_ >= text_.size()) throw ParseError("empty expression", 0);
    ExprPtr e = parse_expr();
    skip_ws();
    if (pos_ < text_.size())
      throw ParseError("unexpected trailing input", pos_);
    return e;
  }

 private:
  void skip_ws() {
    while (pos_ < text_.size() &&
           std::isspace(static_cast<unsigned char>(text_[pos_])))
      ++pos_;
  }

  char peek() { return pos_ < text_.size() ? text_[pos_] : '\0'; }

  bool accept(char c) {
    skip_ws();
    if (peek() == c) {
      ++pos_;
      return true;
    }
    return false;
  }

  void expect(char c, const char* what) {
    if (!accept(c)) throw ParseError(std::string("expected ") + what, pos_);
  }

  double parse_number(const char* what) {
    skip_ws();
    std::size_t start = pos_;
    bool neg = false;
    if (peek() == '-' || peek() == '+') {  // sign allowed in exponents
      neg = (peek() == '-');
      ++pos_;
      skip_ws();
    }
    char c = peek();
    if (!(std::isdigit(static_cast<unsigned char>(c)) || c == '.'))
      throw ParseError(std::string("expected ") + what, start);
    double value = 0.0;
    const char* first = text_.data() + pos_;
    const char* last = text_.data() + text_.size();
    auto [ptr, ec] = std::from_chars(first, last, value);
    if (ec != std::errc())
      throw ParseError(std::string("malformed ") + what, pos_);
    pos_ = static_cast<std::size_t>(ptr - text_.data());
    return neg ? -value : value;
  }

  ExprPtr parse_expr() {
    ExprPtr lhs = parse_term();
    for (;;) {
      skip_ws();
      if (accept('+'))
        lhs = make_add(lhs, parse_term());
      else if (accept('-'))
        lhs = make_sub(lhs, parse_term());
      else
        return lhs;
    }
  }

  ExprPtr parse_term() {
    ExprPtr lhs = parse_unary();
    for (;;) {
      skip_ws();
      if (accept('*'))
        lhs = make_mul(lhs, parse_unary());
      else if (accept('/'))
        lhs = make_div(lhs, parse_unary());
      else
        return lhs;
    }
  }

  ExprPtr parse_unary() {
    skip_ws();
    if (accept('-')) {
      ExprPtr inner = parse_unary();
      if (inner->kind == ExprKind::Constant)
        return make_constant(-inner->value);
      return make_mul(make_constant(-1.0), inner);
    }
    return parse_factor();
  }

  ExprPtr parse_factor() {
    ExprPtr base = parse_base();
    skip_ws();
    if (accept('^')) {
      double e = parse_number("numeric exponent");
      return make_pow(base, e);
    }
    return base;
  }

  ExprPtr parse_base() {
    skip_ws();
    std::size_t start = pos_;
    char c = peek();
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.')
      return make_constant(parse_number("number"));
    if (std::isalpha(static_cast<unsigned char>(c))) {
      std::size_t end = pos_;
      while (end < text_.size() &&
             std::isalnum(static_cast<unsigned char>(text_[end])))
        ++end;
      std::string_view ident = text_.substr(pos_, end - pos_);
      if (ident == "s") {
        pos_ = end;
        return make_var();
      }
      if (ident == "ln") {
        pos_ = end;
        expect('(', "'(' after ln");
        ExprPtr arg = parse_expr();
        expect(')', "')'");
        return make_log(arg);
      }
      throw ParseError("unknown identifier '" + std::string(ident) + "'",
                       start);
    }
    if (accept('(')) {
      ExprPtr e = parse_expr();
      expect(')', "')'");
      return e;
    }
    throw ParseError("expected number, 's', 'ln(...)' or '('", pos_);
  }

  std::string_view text_;
  std::size_t pos_;
};

}  // namespace

PotentialExpr parse_potential(std::string_view text) {
  Parser p(text);
  return PotentialExpr(p.run());
}

// ---------------------------------------------------------------------------
// Differentiation

namespace {

ExprPtr diff_node(const ExprPtr& e) {
  switch (e->kind) {
    case ExprKind::Constant:
      return make_constant(0.0);
    case ExprKind::Var:
      return make_constant(1.0);
    case ExprKind::Add:
      return make_add(diff_node(e->a), diff_node(e->b));
    case ExprKind::Sub:
      return make_sub(diff_node(e->a), diff_node(e->b));
    case ExprKind::Mul:
      return make_add(make_mul(diff_node(e->a), e->b),
                      make_mul(e->a, diff_node(e->b)));
    case ExprKind::Div:
      // (u/v)' = (u'v - uv') / v^2
      return make_div(make_sub(make_mul(diff_node(e->a), e->b),
                               make_mul(e->a, diff_node(e->b))),
                      make_pow(e->b, 2.0));
    case ExprKind::Pow:
      // (u^c)' = c u^(c-1) u'
      return make_mul(make_constant(e->value),
                      make_mul(make_pow(e->a, e->value - 1.0),
                               diff_node(e->a)));
    case ExprKind::Log:
      return make_div(diff_node(e->a), e->a);
  }
  throw std::logic_error("unreachable expression kind");
}

}  // namespace

PotentialExpr differentiate(const PotentialExpr& expr) {
  return PotentialExpr(diff_node(expr.root()));
}

PotentialExpr PotentialExpr::derivative() const {
  return differentiate(*this);
}

// ---------------------------------------------------------------------------
// Printing

namespace {

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

// precedence: + - = 1, * / = 2, ^ = 3, atoms = 4
int precedence(const ExprNode& e) {
  switch (e.kind) {
    case ExprKind::Add:
    case ExprKind::Sub:
      return 1;
    case ExprKind::Mul:
    case ExprKind::Div:
      return 2;
    case ExprKind::Pow:
      return 3;
    default:
      return 4;
  }
}

void print_node(const ExprPtr& e, int parent_prec, bool right_assoc_side,
                std::string& out) {
  int prec = precedence(*e);
  bool parens =
      prec < parent_prec || (prec == parent_prec && right_assoc_side);
  if (parens) out += '(';
  switch (e->kind) {
    case ExprKind::Constant: {
      if (e->value < 0.0 && !parens) {
        out += '(';
        out += format_double(e->value);
        out += ')';
      } else {
        out += format_double(e->value);
      }
      break;
    }
    case ExprKind::Var:
      out += 's';
      break;
    case ExprKind::Add:
      print_node(e->a, prec, false, out);
      out += " + ";
      print_node(e->b, prec, true, out);
      break;
    case ExprKind::Sub:
      print_node(e->a, prec, false, out);
      out += " - ";
      print_node(e->b, prec, true, out);
      break;
    case ExprKind::Mul:
      print_node(e->a, prec, false, out);
      out += " * ";
      print_node(e->b, prec, true, out);
      break;
    case ExprKind::Div:
      print_node(e->a, prec, false, out);
      out += " / ";
      print_node(e->b, prec, true, out);
      break;
    case ExprKind::Pow:
      print_node(e->a, prec + 1, false, out);
      out += '^';
      out += format_double(e->value);
      break;
    case ExprKind::Log:
      out += "ln(";
      print_node(e->a, 0, false, out);
      out += ')';
      break;
  }
  if (parens) out += ')';
}

}  // namespace

std::string to_string(const PotentialExpr& expr) {
  std::string out;
  print_node(expr.root(), 0, false, out);
  return out;
}

std::string PotentialExpr::str() const { return to_string(*this); }

// ---------------------------------------------------------------------------
// Compiled form

CompiledPotential::CompiledPotential(const PotentialExpr& expr) {
  // post-order linearization
  struct Frame {
    const ExprNode* node;
    bool expanded;
  };
  std::vector<Frame> stack{{expr.root().get(), false}};
  std::vector<const ExprNode*> post;
  while (!stack.empty()) {
    Frame f = stack.back();
    stack.pop_back();
    if (f.expanded) {
      post.push_back(f.node);
      continue;
    }
    stack.push_back({f.node, true});
    if (f.node->b) stack.push_back({f.node->b.get(), false});
    if (f.node->a) stack.push_back({f.node->a.get(), false});
  }
  int depth = 0;
  for (const ExprNode* n : post) {
    Instr ins;
    switch (n->kind) {
      case ExprKind::Constant:
        ins.op = Op::PushConst;
        ins.imm = n->value;
        ++depth;
        break;
      case ExprKind::Var:
        ins.op = Op::PushS;
        ++depth;
        break;
      case ExprKind::Add:
        ins.op = Op::Add;
        --depth;
        break;
      case ExprKind::Sub:
        ins.op = Op::Sub;
        --depth;
        break;
      case ExprKind::Mul:
        ins.op = Op::Mul;
        --depth;
        break;
      case ExprKind::Div:
        ins.op = Op::Div;
        --depth;
        break;
      case ExprKind::Pow: {
        int iexp;
        if (is_small_integer(n->value, &iexp)) {
          ins.op = Op::PowInt;
          ins.iexp = iexp;
        } else {
          ins.op = Op::PowC;
          ins.imm = n->value;
        }
        break;
      }
      case ExprKind::Log:
        ins.op = Op::Log;
        break;
    }
    max_stack_ = std::max(max_stack_, depth);
    prog_.push_back(ins);
  }
}

double CompiledPotential::eval(double s) const noexcept {
  constexpr int kMaxStack = 128;
  double st[kMaxStack];
  if (max_stack_ >= kMaxStack || prog_.empty())
    return std::numeric_limits<double>::quiet_NaN();
  int top = -1;
  for (const Instr& ins : prog_) {
    switch (ins.op) {
      case Op::PushConst:
        st[++top] = ins.imm;
        break;
      case Op::PushS:
        st[++top] = s;
        break;
      case Op::Add:
        --top;
        st[top] += st[top + 1];
        break;
      case Op::Sub:
        --top;
        st[top] -= st[top + 1];
        break;
      case Op::Mul:
        --top;
        st[top] *= st[top + 1];
        break;
      case Op::Div:
        --top;
        if (st[top + 1] == 0.0)
          return std::numeric_limits<double>::quiet_NaN();
        st[top] /= st[top + 1];
        break;
      case Op::PowInt:
        if (st[top] == 0.0 && ins.iexp < 0)
          return std::numeric_limits<double>::quiet_NaN();
        st[top] = pow_int(st[top], ins.iexp);
        break;
      case Op::PowC:
        if (st[top] < 0.0 || (st[top] == 0.0 && ins.imm < 0.0))
          return std::numeric_limits<double>::quiet_NaN();
        st[top] = std::pow(st[top], ins.imm);
        break;
      case Op::Log:
        if (!(st[top] > 0.0))
          return std::numeric_limits<double>::quiet_NaN();
        st[top] = std::log(st[top]);
        break;
    }
  }
  return st[0];
}

bool CompiledPotential::try_eval(double s, double* out) const noexcept {
  double v = eval(s);
  if (std::isnan(v)) return false;
  *out = v;
  return true;
}

double CompiledPotential::eval_checked(double s) const {
  double v = eval(s);
  if (std::isnan(v))
    throw EvalDomainError("potential evaluation left its domain at s = " +
                          format_double(s));
  return v;
}

}  // namespace virial
