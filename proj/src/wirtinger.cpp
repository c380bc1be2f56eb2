#include "semiholo/wirtinger.hpp"

#include <cctype>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <utility>
#include <vector>

namespace semiholo {

namespace {

const cplx kI{0.0, 1.0};

constexpr std::array<int, 4> kConjPerm = {kXbar, kX, kYbar, kY};

cplx ipow(cplx base, int n) {
  bool invert = n < 0;
  unsigned m = invert ? static_cast<unsigned>(-(long long)n) : static_cast<unsigned>(n);
  cplx result{1.0, 0.0};
  cplx sq = base;
  while (m) {
    if (m & 1u) result *= sq;
    sq *= sq;
    m >>= 1u;
  }
  return invert ? cplx{1.0, 0.0} / result : result;
}

bool on_negative_real_axis(cplx v) { return v.imag() == 0.0 && v.real() <= 0.0; }

// psi(s) = exp(1 - 1/(1 - s^2)) on |s| < 1 and its first two derivatives.
std::array<double, 3> bump_profile(double s) {
  if (!(std::abs(s) < 1.0)) return {0.0, 0.0, 0.0};
  double q = 1.0 - s * s;
  double psi = std::exp(1.0 - 1.0 / q);
  double d1 = -2.0 * s * psi / (q * q);
  double d2 = -2.0 * psi / (q * q) - 2.0 * s * d1 / (q * q) - 8.0 * s * s * psi / (q * q * q);
  return {psi, d1, d2};
}

Expr make(Op op, cplx value, int exponent, Expr a, Expr b) {
  auto n = std::make_shared<ExprNode>();
  n->op = op;
  n->value = value;
  n->exponent = exponent;
  n->a = std::move(a);
  n->b = std::move(b);
  return Expr(std::move(n));
}

}  // namespace

SyntaxError::SyntaxError(std::string message, std::size_t offset)
    : Error("syntax error at offset " + std::to_string(offset) + ": " + message),
      offset_(offset) {}

DomainError::DomainError(std::string message, std::string subexpression)
    : Error("domain error: " + message + " in '" + subexpression + "'"),
      subexpr_(std::move(subexpression)) {}

bool is_finite(const CPoint& p) {
  return std::isfinite(p.x.real()) && std::isfinite(p.x.imag()) &&
         std::isfinite(p.y.real()) && std::isfinite(p.y.imag());
}

// ---------------------------------------------------------------------------
// Expr

Expr::Expr() = default;

Expr::Expr(std::shared_ptr<const ExprNode> node) : node_(std::move(node)) {}

Expr Expr::constant(cplx value) {
  auto n = std::make_shared<ExprNode>();
  n->op = Op::Const;
  n->value = value;
  return Expr(std::shared_ptr<const ExprNode>(std::move(n)));
}

Expr Expr::x() { return make(Op::VarX, {}, 0, Expr(), Expr()); }
Expr Expr::y() { return make(Op::VarY, {}, 0, Expr(), Expr()); }
Expr Expr::p() { return make(Op::VarP, {}, 0, Expr(), Expr()); }

Expr Expr::unary(Op op, Expr arg) { return make(op, {}, 0, std::move(arg), Expr()); }

Expr Expr::binary(Op op, Expr lhs, Expr rhs) {
  return make(op, {}, 0, std::move(lhs), std::move(rhs));
}

Expr Expr::power(Expr base, int exponent) {
  return make(Op::Pow, {}, exponent, std::move(base), Expr());
}

// a null node is the constant 0
Op Expr::op() const { return node_ ? node_->op : Op::Const; }
cplx Expr::value() const { return node_ ? node_->value : cplx{}; }
int Expr::exponent() const { return node_ ? node_->exponent : 0; }
const Expr& Expr::lhs() const { return node_->a; }
const Expr& Expr::rhs() const { return node_->b; }

namespace {

int arity(Op op) {
  switch (op) {
    case Op::Const:
    case Op::VarX:
    case Op::VarY:
    case Op::VarP:
      return 0;
    case Op::Add:
    case Op::Sub:
    case Op::Mul:
    case Op::Div:
      return 2;
    default:
      return 1;
  }
}

}  // namespace

bool operator==(const Expr& a, const Expr& b) {
  if (a.node_ == b.node_) return true;
  if (a.op() != b.op()) return false;
  switch (a.op()) {
    case Op::Const:
      return a.value() == b.value();
    case Op::Pow:
      return a.exponent() == b.exponent() && a.lhs() == b.lhs();
    default:
      break;
  }
  int n = arity(a.op());
  if (n >= 1 && !(a.lhs() == b.lhs())) return false;
  if (n == 2 && !(a.rhs() == b.rhs())) return false;
  return true;
}

Expr operator+(const Expr& a, const Expr& b) { return Expr::binary(Op::Add, a, b); }
Expr operator-(const Expr& a, const Expr& b) { return Expr::binary(Op::Sub, a, b); }
Expr operator*(const Expr& a, const Expr& b) { return Expr::binary(Op::Mul, a, b); }
Expr operator/(const Expr& a, const Expr& b) { return Expr::binary(Op::Div, a, b); }
Expr operator-(const Expr& a) { return Expr::unary(Op::Neg, a); }
Expr pow(const Expr& base, int exponent) { return Expr::power(base, exponent); }
Expr conj(const Expr& e) { return Expr::unary(Op::Conj, e); }
Expr re(const Expr& e) { return Expr::unary(Op::Re, e); }
Expr im(const Expr& e) { return Expr::unary(Op::Im, e); }
Expr sqrt(const Expr& e) { return Expr::unary(Op::Sqrt, e); }
Expr exp(const Expr& e) { return Expr::unary(Op::Exp, e); }
Expr log(const Expr& e) { return Expr::unary(Op::Log, e); }
Expr bump(const Expr& e) { return Expr::unary(Op::Bump, e); }

// ---------------------------------------------------------------------------
// Parser

namespace {

class Parser {
 public:
  explicit Parser(std::string_view text) : text_(text) {}

  Expr parse_all() {
    Expr e = parse_expr();
    skip_ws();
    if (pos_ != text_.size()) fail("unexpected trailing input");
    return e;
  }

 private:
  [[noreturn]] void fail(const std::string& what) const { throw SyntaxError(what, pos_); }

  void skip_ws() {
    while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
  }

  bool peek(char c) {
    skip_ws();
    return pos_ < text_.size() && text_[pos_] == c;
  }

  void expect(char c) {
    if (!peek(c)) fail(std::string("expected '") + c + "'");
    ++pos_;
  }

  Expr parse_expr() {
    Expr lhs = parse_term();
    while (true) {
      if (peek('+')) {
        ++pos_;
        lhs = lhs + parse_term();
      } else if (peek('-')) {
        ++pos_;
        lhs = lhs - parse_term();
      } else {
        return lhs;
      }
    }
  }

  Expr parse_term() {
    Expr lhs = parse_factor();
    while (true) {
      if (peek('*')) {
        ++pos_;
        lhs = lhs * parse_factor();
      } else if (peek('/')) {
        ++pos_;
        lhs = lhs / parse_factor();
      } else {
        return lhs;
      }
    }
  }

  Expr parse_factor() {
    Expr base = parse_base();
    if (peek('^')) {
      ++pos_;
      skip_ws();
      std::size_t start = pos_;
      bool negative = false;
      if (pos_ < text_.size() && (text_[pos_] == '-' || text_[pos_] == '+')) {
        negative = text_[pos_] == '-';
        ++pos_;
      }
      std::size_t digits = pos_;
      while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) ++pos_;
      if (pos_ == digits) {
        pos_ = start;
        fail("expected integer exponent");
      }
      long long n = std::strtoll(std::string(text_.substr(digits, pos_ - digits)).c_str(), nullptr, 10);
      if (n > 1000000) {
        pos_ = start;
        fail("exponent out of range");
      }
      return pow(base, static_cast<int>(negative ? -n : n));
    }
    return base;
  }

  Expr parse_number() {
    std::size_t start = pos_;
    while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) ++pos_;
    if (pos_ < text_.size() && text_[pos_] == '.') {
      ++pos_;
      while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) ++pos_;
    }
    if (pos_ - start == 1 && text_[start] == '.') {
      pos_ = start;
      fail("malformed number");
    }
    if (pos_ < text_.size() && (text_[pos_] == 'e' || text_[pos_] == 'E')) {
      std::size_t save = pos_;
      ++pos_;
      if (pos_ < text_.size() && (text_[pos_] == '+' || text_[pos_] == '-')) ++pos_;
      std::size_t digits = pos_;
      while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) ++pos_;
      if (pos_ == digits) {
        pos_ = save;
        fail("malformed exponent");
      }
    }
    double v = std::strtod(std::string(text_.substr(start, pos_ - start)).c_str(), nullptr);
    if (!std::isfinite(v)) {
      pos_ = start;
      fail("number out of range");
    }
    return Expr::constant(v);
  }

  Expr parse_base() {
    skip_ws();
    if (pos_ >= text_.size()) fail("unexpected end of input");
    char c = text_[pos_];
    if (c == '-') {
      ++pos_;
      return -parse_base();
    }
    if (c == '(') {
      ++pos_;
      Expr inner = parse_expr();
      expect(')');
      return inner;
    }
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') return parse_number();
    if (std::isalpha(static_cast<unsigned char>(c))) {
      std::size_t start = pos_;
      while (pos_ < text_.size() && std::isalpha(static_cast<unsigned char>(text_[pos_]))) ++pos_;
      std::string_view word = text_.substr(start, pos_ - start);
      if (word == "x") return Expr::x();
      if (word == "y") return Expr::y();
      if (word == "p") return Expr::p();
      if (word == "i") return Expr::constant(kI);
      Op op;
      if (word == "conj") {
        op = Op::Conj;
      } else if (word == "re") {
        op = Op::Re;
      } else if (word == "im") {
        op = Op::Im;
      } else if (word == "sqrt") {
        op = Op::Sqrt;
      } else if (word == "exp") {
        op = Op::Exp;
      } else if (word == "log") {
        op = Op::Log;
      } else if (word == "bump") {
        op = Op::Bump;
      } else {
        pos_ = start;
        fail("unknown identifier '" + std::string(word) + "'");
      }
      expect('(');
      Expr arg = parse_expr();
      expect(')');
      return Expr::unary(op, arg);
    }
    fail(std::string("unexpected character '") + c + "'");
  }

  std::string_view text_;
  std::size_t pos_ = 0;
};

}  // namespace

Expr parse(std::string_view text) { return Parser(text).parse_all(); }

// ---------------------------------------------------------------------------
// Printer

namespace {

// 1: expr, 2: term, 3: factor, 4: base
int level(const Expr& e) {
  switch (e.op()) {
    case Op::Add:
    case Op::Sub:
      return 1;
    case Op::Mul:
    case Op::Div:
      return 2;
    case Op::Pow:
      return 3;
    case Op::Const: {
      cplx v = e.value();
      if (v == kI || (v.imag() == 0.0 && !std::signbit(v.real()))) return 4;
      return 1;  // printed as a parenthesized sum
    }
    default:
      return 4;
  }
}

std::string number(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string print(const Expr& e);

std::string print_at(const Expr& e, int min_level) {
  std::string s = print(e);
  if (level(e) < min_level) return "(" + s + ")";
  return s;
}

std::string func_name(Op op) {
  switch (op) {
    case Op::Conj: return "conj";
    case Op::Re: return "re";
    case Op::Im: return "im";
    case Op::Sqrt: return "sqrt";
    case Op::Exp: return "exp";
    case Op::Log: return "log";
    case Op::Bump: return "bump";
    default: return "?";
  }
}

std::string print(const Expr& e) {
  switch (e.op()) {
    case Op::Const: {
      cplx v = e.value();
      if (v == kI) return "i";
      if (v.imag() == 0.0 && !std::signbit(v.real())) return number(v.real());
      std::string s = v.real() < 0 || std::signbit(v.real()) ? "-" + number(-v.real()) : number(v.real());
      if (v.imag() >= 0) return s + "+" + number(v.imag()) + "*i";
      return s + "-" + number(-v.imag()) + "*i";
    }
    case Op::VarX: return "x";
    case Op::VarY: return "y";
    case Op::VarP: return "p";
    case Op::Add: return print_at(e.lhs(), 1) + "+" + print_at(e.rhs(), 2);
    case Op::Sub: return print_at(e.lhs(), 1) + "-" + print_at(e.rhs(), 2);
    case Op::Mul: return print_at(e.lhs(), 2) + "*" + print_at(e.rhs(), 3);
    case Op::Div: return print_at(e.lhs(), 2) + "/" + print_at(e.rhs(), 3);
    case Op::Neg: return "-" + print_at(e.lhs(), 4);
    case Op::Pow: return print_at(e.lhs(), 4) + "^" + std::to_string(e.exponent());
    default: return func_name(e.op()) + "(" + print(e.lhs()) + ")";
  }
}

}  // namespace

std::string to_string(const Expr& e) { return print(e); }

// ---------------------------------------------------------------------------
// Structural queries

Expr substitute(const Expr& e, const Expr& x_repl, const Expr& y_repl) {
  switch (e.op()) {
    case Op::VarX: return x_repl;
    case Op::VarY: return y_repl;
    case Op::Const:
    case Op::VarP: return e;
    case Op::Pow: return pow(substitute(e.lhs(), x_repl, y_repl), e.exponent());
    default: break;
  }
  if (arity(e.op()) == 1) return Expr::unary(e.op(), substitute(e.lhs(), x_repl, y_repl));
  return Expr::binary(e.op(), substitute(e.lhs(), x_repl, y_repl),
                      substitute(e.rhs(), x_repl, y_repl));
}

bool depends_on(const Expr& e, Op variable) {
  if (e.op() == variable) return true;
  int n = arity(e.op());
  if (n >= 1 && depends_on(e.lhs(), variable)) return true;
  return n == 2 && depends_on(e.rhs(), variable);
}

namespace {

bool breaks_holomorphy(Op op) {
  return op == Op::Conj || op == Op::Re || op == Op::Im || op == Op::Bump;
}

}  // namespace

bool is_holomorphic(const Expr& e) {
  if (breaks_holomorphy(e.op())) return false;
  int n = arity(e.op());
  if (n >= 1 && !is_holomorphic(e.lhs())) return false;
  return n < 2 || is_holomorphic(e.rhs());
}

bool is_holomorphic_in_x(const Expr& e) {
  if (breaks_holomorphy(e.op()) && depends_on(e.lhs(), Op::VarX)) return false;
  int n = arity(e.op());
  if (n >= 1 && !is_holomorphic_in_x(e.lhs())) return false;
  return n < 2 || is_holomorphic_in_x(e.rhs());
}

std::size_t node_count(const Expr& e) {
  int n = arity(e.op());
  std::size_t count = 1;
  if (n >= 1) count += node_count(e.lhs());
  if (n == 2) count += node_count(e.rhs());
  return count;
}

// ---------------------------------------------------------------------------
// Value evaluation

cplx eval(const Expr& e, const CPoint& at, cplx slope) {
  switch (e.op()) {
    case Op::Const: return e.value();
    case Op::VarX: return at.x;
    case Op::VarY: return at.y;
    case Op::VarP: return slope;
    case Op::Add: return eval(e.lhs(), at, slope) + eval(e.rhs(), at, slope);
    case Op::Sub: return eval(e.lhs(), at, slope) - eval(e.rhs(), at, slope);
    case Op::Mul: return eval(e.lhs(), at, slope) * eval(e.rhs(), at, slope);
    case Op::Div: {
      cplx num = eval(e.lhs(), at, slope);
      cplx den = eval(e.rhs(), at, slope);
      if (den == cplx{}) throw DomainError("division by zero", to_string(e));
      return num / den;
    }
    case Op::Neg: return -eval(e.lhs(), at, slope);
    case Op::Pow: {
      cplx v = eval(e.lhs(), at, slope);
      if (e.exponent() < 0 && v == cplx{}) throw DomainError("negative power of zero", to_string(e));
      return ipow(v, e.exponent());
    }
    case Op::Conj: return std::conj(eval(e.lhs(), at, slope));
    case Op::Re: return eval(e.lhs(), at, slope).real();
    case Op::Im: return eval(e.lhs(), at, slope).imag();
    case Op::Sqrt: {
      cplx v = eval(e.lhs(), at, slope);
      if (on_negative_real_axis(v)) throw DomainError("sqrt on branch cut", to_string(e));
      return std::sqrt(v);
    }
    case Op::Exp: return std::exp(eval(e.lhs(), at, slope));
    case Op::Log: {
      cplx v = eval(e.lhs(), at, slope);
      if (on_negative_real_axis(v)) throw DomainError("log on branch cut", to_string(e));
      return std::log(v);
    }
    case Op::Bump: return bump_profile(eval(e.lhs(), at, slope).real())[0];
  }
  throw Error("corrupt expression node");
}

// ---------------------------------------------------------------------------
// Jets

WirtingerJet WirtingerJet::constant(cplx value) {
  WirtingerJet j;
  j.value_ = value;
  return j;
}

WirtingerJet WirtingerJet::variable(Dir d, cplx value) {
  WirtingerJet j;
  j.value_ = value;
  j.grad_[d] = 1.0;
  return j;
}

cplx WirtingerJet::d(int i, int j, int k, int l) const {
  const std::array<int, 4> counts = {i, j, k, l};
  int order = i + j + k + l;
  if (i < 0 || j < 0 || k < 0 || l < 0 || order > 2)
    throw std::invalid_argument("jet multi-index out of range");
  if (order == 0) return value_;
  int dirs[2] = {0, 0};
  int n = 0;
  for (int dir = 0; dir < 4; ++dir)
    for (int c = 0; c < counts[dir]; ++c) dirs[n++] = dir;
  if (order == 1) return grad_[dirs[0]];
  return hess_[dirs[0]][dirs[1]];
}

double WirtingerJet::max_abs() const {
  double m = std::abs(value_);
  for (int a = 0; a < 4; ++a) {
    m = std::max(m, std::abs(grad_[a]));
    for (int b = 0; b < 4; ++b) m = std::max(m, std::abs(hess_[a][b]));
  }
  return m;
}

WirtingerJet operator+(const WirtingerJet& a, const WirtingerJet& b) {
  WirtingerJet r;
  r.value_ = a.value_ + b.value_;
  for (int i = 0; i < 4; ++i) {
    r.grad_[i] = a.grad_[i] + b.grad_[i];
    for (int k = 0; k < 4; ++k) r.hess_[i][k] = a.hess_[i][k] + b.hess_[i][k];
  }
  return r;
}

WirtingerJet operator-(const WirtingerJet& a) { return cplx{-1.0, 0.0} * a; }

WirtingerJet operator-(const WirtingerJet& a, const WirtingerJet& b) { return a + (-b); }

WirtingerJet operator*(cplx s, const WirtingerJet& a) {
  WirtingerJet r;
  r.value_ = s * a.value_;
  for (int i = 0; i < 4; ++i) {
    r.grad_[i] = s * a.grad_[i];
    for (int k = 0; k < 4; ++k) r.hess_[i][k] = s * a.hess_[i][k];
  }
  return r;
}

WirtingerJet operator*(const WirtingerJet& a, const WirtingerJet& b) {
  WirtingerJet r;
  r.value_ = a.value_ * b.value_;
  for (int i = 0; i < 4; ++i) {
    r.grad_[i] = a.value_ * b.grad_[i] + b.value_ * a.grad_[i];
    for (int k = i; k < 4; ++k) {
      r.hess_[i][k] = a.value_ * b.hess_[i][k] + b.value_ * a.hess_[i][k] +
                      (a.grad_[i] * b.grad_[k] + b.grad_[i] * a.grad_[k]);
      r.hess_[k][i] = r.hess_[i][k];
    }
  }
  return r;
}

WirtingerJet WirtingerJet::compose(cplx g0, cplx g1, cplx g2) const {
  WirtingerJet r;
  r.value_ = g0;
  for (int i = 0; i < 4; ++i) {
    r.grad_[i] = g1 * grad_[i];
    for (int k = i; k < 4; ++k) {
      r.hess_[i][k] = g1 * hess_[i][k] + g2 * grad_[i] * grad_[k];
      r.hess_[k][i] = r.hess_[i][k];
    }
  }
  return r;
}

WirtingerJet WirtingerJet::conjugate() const {
  WirtingerJet r;
  r.value_ = std::conj(value_);
  for (int i = 0; i < 4; ++i) {
    r.grad_[i] = std::conj(grad_[kConjPerm[i]]);
    for (int k = 0; k < 4; ++k) r.hess_[i][k] = std::conj(hess_[kConjPerm[i]][kConjPerm[k]]);
  }
  return r;
}

WirtingerJet WirtingerJet::truncated() const {
  WirtingerJet r;
  r.value_ = value_;
  r.grad_ = grad_;
  return r;
}

WirtingerJet divide(const WirtingerJet& a, const WirtingerJet& b, const std::string& context) {
  cplx v = b.value();
  if (v == cplx{}) throw DomainError("division by zero", context);
  cplx inv = 1.0 / v;
  return a * b.compose(inv, -inv * inv, 2.0 * inv * inv * inv);
}

double max_deviation(const WirtingerJet& a, const WirtingerJet& b) {
  return (a - b).max_abs();
}

namespace {

WirtingerJet jet_re(const WirtingerJet& f) { return cplx{0.5, 0.0} * (f + f.conjugate()); }

WirtingerJet jet_im(const WirtingerJet& f) {
  return cplx{0.0, -0.5} * (f - f.conjugate());  // (f - fbar) / 2i
}

WirtingerJet jet_pow(const WirtingerJet& f, int n, const Expr& e) {
  cplx v = f.value();
  if (n == 0) return WirtingerJet::constant(1.0);
  if (n < 0 && v == cplx{}) throw DomainError("negative power of zero", to_string(e));
  cplx g0 = ipow(v, n);
  cplx g1 = static_cast<double>(n) * ipow(v, n - 1);
  cplx g2 = (n == 1) ? cplx{} : static_cast<double>(n) * (n - 1) * ipow(v, n - 2);
  return f.compose(g0, g1, g2);
}

}  // namespace

WirtingerJet eval_jet(const Expr& e, const CPoint& at) {
  switch (e.op()) {
    case Op::Const: return WirtingerJet::constant(e.value());
    case Op::VarX: return WirtingerJet::variable(kX, at.x);
    case Op::VarY: return WirtingerJet::variable(kY, at.y);
    case Op::VarP: throw DomainError("variable p is not bound in a point jet", "p");
    case Op::Add: return eval_jet(e.lhs(), at) + eval_jet(e.rhs(), at);
    case Op::Sub: return eval_jet(e.lhs(), at) - eval_jet(e.rhs(), at);
    case Op::Mul: return eval_jet(e.lhs(), at) * eval_jet(e.rhs(), at);
    case Op::Div: {
      WirtingerJet num = eval_jet(e.lhs(), at);
      WirtingerJet den = eval_jet(e.rhs(), at);
      if (den.value() == cplx{}) throw DomainError("division by zero", to_string(e));
      return divide(num, den);
    }
    case Op::Neg: return -eval_jet(e.lhs(), at);
    case Op::Pow: return jet_pow(eval_jet(e.lhs(), at), e.exponent(), e);
    case Op::Conj: return eval_jet(e.lhs(), at).conjugate();
    case Op::Re: return jet_re(eval_jet(e.lhs(), at));
    case Op::Im: return jet_im(eval_jet(e.lhs(), at));
    case Op::Sqrt: {
      WirtingerJet f = eval_jet(e.lhs(), at);
      cplx v = f.value();
      if (on_negative_real_axis(v)) throw DomainError("sqrt on branch cut", to_string(e));
      cplx s = std::sqrt(v);
      cplx g1 = 0.5 / s;
      return f.compose(s, g1, -0.5 * g1 / v);
    }
    case Op::Exp: {
      WirtingerJet f = eval_jet(e.lhs(), at);
      cplx v = std::exp(f.value());
      return f.compose(v, v, v);
    }
    case Op::Log: {
      WirtingerJet f = eval_jet(e.lhs(), at);
      cplx v = f.value();
      if (on_negative_real_axis(v)) throw DomainError("log on branch cut", to_string(e));
      return f.compose(std::log(v), 1.0 / v, -1.0 / (v * v));
    }
    case Op::Bump: {
      WirtingerJet s = jet_re(eval_jet(e.lhs(), at));
      auto [g0, g1, g2] = bump_profile(s.value().real());
      return s.compose(g0, g1, g2);
    }
  }
  throw Error("corrupt expression node");
}

// ---------------------------------------------------------------------------
// Finite-difference oracle

namespace {

CPoint shifted(const CPoint& p, const std::array<double, 4>& offset) {
  return {p.x + cplx{offset[0], offset[1]}, p.y + cplx{offset[2], offset[3]}};
}

WirtingerJet fd_once(const PointFunction& f, const CPoint& at, double h) {
  auto call = [&](const std::array<double, 4>& off) {
    try {
      return f(shifted(at, off));
    } catch (const DomainError& err) {
      throw DomainError("stencil point failed: " + std::string(err.what()), err.subexpression());
    }
  };
  const cplx f0 = call({0, 0, 0, 0});
  std::array<cplx, 4> first{};
  std::array<std::array<cplx, 4>, 4> second{};
  std::array<cplx, 4> plus{}, minus{};
  for (int a = 0; a < 4; ++a) {
    std::array<double, 4> off{};
    off[a] = h;
    plus[a] = call(off);
    off[a] = -h;
    minus[a] = call(off);
    first[a] = (plus[a] - minus[a]) / (2.0 * h);
    second[a][a] = (plus[a] - 2.0 * f0 + minus[a]) / (h * h);
  }
  for (int a = 0; a < 4; ++a) {
    for (int b = a + 1; b < 4; ++b) {
      std::array<double, 4> off{};
      off[a] = h;
      off[b] = h;
      cplx pp = call(off);
      off[b] = -h;
      cplx pm = call(off);
      off[a] = -h;
      cplx mm = call(off);
      off[b] = h;
      cplx mp = call(off);
      second[a][b] = second[b][a] = (pp - pm - mp + mm) / (4.0 * h * h);
    }
  }
  // d/dw_A = sum_a W[A][a] d/dr_a with r = (Re x, Im x, Re y, Im y)
  const cplx half{0.5, 0.0};
  const cplx ihalf{0.0, 0.5};
  std::array<std::array<cplx, 4>, 4> W{};
  W[kX] = {half, -ihalf, 0.0, 0.0};
  W[kXbar] = {half, ihalf, 0.0, 0.0};
  W[kY] = {0.0, 0.0, half, -ihalf};
  W[kYbar] = {0.0, 0.0, half, ihalf};

  WirtingerJet jet = WirtingerJet::constant(f0);
  for (int A = 0; A < 4; ++A) {
    cplx g{};
    for (int a = 0; a < 4; ++a) g += W[A][a] * first[a];
    jet.set_grad(A, g);
  }
  for (int A = 0; A < 4; ++A) {
    for (int B = A; B < 4; ++B) {
      cplx s{};
      for (int a = 0; a < 4; ++a)
        for (int b = 0; b < 4; ++b) s += W[A][a] * W[B][b] * second[a][b];
      jet.set_hess(A, B, s);
    }
  }
  return jet;
}

}  // namespace

WirtingerJet fd_jet(const PointFunction& f, const CPoint& at, const FdOptions& options) {
  if (!(options.h > 0)) throw std::invalid_argument("fd_jet: step must be positive");
  WirtingerJet coarse = fd_once(f, at, options.h);
  if (!options.richardson) return coarse;
  WirtingerJet fine = fd_once(f, at, 0.5 * options.h);
  return cplx{4.0 / 3.0, 0.0} * fine - cplx{1.0 / 3.0, 0.0} * coarse;
}

}  // namespace semiholo
