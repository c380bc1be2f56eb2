#pragma once

// Expression language and forward-mode Wirtinger jets for smooth functions
// C^2 -> C that need not be holomorphic.
//
// A jet carries the value of f(x, y) together with every partial derivative of
// total order <= 2 in the four Wirtinger directions (x, xbar, y, ybar). The
// directions are treated as independent variables, so holomorphic functions
// have vanishing xbar/ybar entries and conjugation simply swaps directions.

#include <array>
#include <complex>
#include <cstddef>
#include <functional>
#include <memory>
#include <stdexcept>
#include <string>
#include <string_view>

namespace semiholo {

using cplx = std::complex<double>;

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class SyntaxError : public Error {
 public:
  SyntaxError(std::string message, std::size_t offset);
  std::size_t offset() const { return offset_; }

 private:
  std::size_t offset_;
};

/// Division by zero, log/sqrt at zero or on the branch cut, unbound variable.
/// `subexpression()` holds the printed form of the failing node.
class DomainError : public Error {
 public:
  DomainError(std::string message, std::string subexpression);
  const std::string& subexpression() const { return subexpr_; }

 private:
  std::string subexpr_;
};

struct CPoint {
  cplx x;
  cplx y;
};

bool is_finite(const CPoint& p);

// ---------------------------------------------------------------------------
// Expressions

enum class Op {
  Const,
  VarX,
  VarY,
  VarP,  // slope variable of a curve system, y' = p
  Add,
  Sub,
  Mul,
  Div,
  Neg,
  Pow,  // integer exponent
  Conj,
  Re,
  Im,
  Sqrt,
  Exp,
  Log,
  Bump,  // psi(Re z) = exp(1 - 1/(1 - s^2)) for |s| < 1, else 0
};

struct ExprNode;

/// Immutable, shareable expression tree.
class Expr {
 public:
  Expr();  // the constant 0
  explicit Expr(std::shared_ptr<const ExprNode> node);

  static Expr constant(cplx value);
  static Expr x();
  static Expr y();
  static Expr p();
  static Expr unary(Op op, Expr arg);
  static Expr binary(Op op, Expr lhs, Expr rhs);
  static Expr power(Expr base, int exponent);

  Op op() const;
  cplx value() const;      // Const only
  int exponent() const;    // Pow only
  const Expr& lhs() const; // unary argument or left operand
  const Expr& rhs() const;

  const ExprNode& node() const { return *node_; }

  friend bool operator==(const Expr& a, const Expr& b);

 private:
  std::shared_ptr<const ExprNode> node_;
};

struct ExprNode {
  Op op = Op::Const;
  cplx value{};
  int exponent = 0;
  Expr a;
  Expr b;
};

Expr operator+(const Expr& a, const Expr& b);
Expr operator-(const Expr& a, const Expr& b);
Expr operator*(const Expr& a, const Expr& b);
Expr operator/(const Expr& a, const Expr& b);
Expr operator-(const Expr& a);
Expr pow(const Expr& base, int exponent);
Expr conj(const Expr& e);
Expr re(const Expr& e);
Expr im(const Expr& e);
Expr sqrt(const Expr& e);
Expr exp(const Expr& e);
Expr log(const Expr& e);
Expr bump(const Expr& e);

/// Grammar:
///   expr   := term (('+'|'-') term)*
///   term   := factor (('*'|'/') factor)*
///   factor := base ('^' integer)?
///   base   := number | 'i' | 'x' | 'y' | 'p' | func '(' expr ')'
///           | '(' expr ')' | '-' base
///   func   := conj | re | im | sqrt | exp | log | bump
/// Throws SyntaxError carrying the byte offset of the first offending token.
Expr parse(std::string_view text);

/// Minimal-parenthesis printer; parse(to_string(parse(s))) == parse(s).
/// Constants that are neither non-negative reals nor exactly i print as an
/// equivalent parenthesized sum, which re-parses to a different tree.
std::string to_string(const Expr& e);

/// Replace x and y by the given expressions.
Expr substitute(const Expr& e, const Expr& x_repl, const Expr& y_repl);

bool depends_on(const Expr& e, Op variable);

/// True when no node breaks holomorphy (conj, re, im, bump).
bool is_holomorphic(const Expr& e);

/// True when x only enters holomorphically (no conj/re/im/bump node has an
/// argument depending on x).
bool is_holomorphic_in_x(const Expr& e);

std::size_t node_count(const Expr& e);

/// Plain value. `slope` binds the variable p.
cplx eval(const Expr& e, const CPoint& at, cplx slope = {});

// ---------------------------------------------------------------------------
// Jets

/// Direction indices into the gradient/Hessian.
enum Dir : int { kX = 0, kXbar = 1, kY = 2, kYbar = 3 };

class WirtingerJet {
 public:
  WirtingerJet() = default;

  static WirtingerJet constant(cplx value);
  static WirtingerJet variable(Dir d, cplx value);

  cplx value() const { return value_; }
  cplx grad(int d) const { return grad_[d]; }
  cplx hess(int d1, int d2) const { return hess_[d1][d2]; }

  void set_value(cplx v) { value_ = v; }
  void set_grad(int d, cplx v) { grad_[d] = v; }
  void set_hess(int d1, int d2, cplx v) {
    hess_[d1][d2] = v;
    hess_[d2][d1] = v;
  }

  /// Partial derivative with multi-index (i, j, k, l) counting derivatives in
  /// (x, xbar, y, ybar); requires i + j + k + l <= 2. d(0,0,0,0) is the value.
  cplx d(int i, int j, int k, int l) const;

  /// Largest |coefficient| over all 15 entries.
  double max_abs() const;

  friend WirtingerJet operator+(const WirtingerJet& a, const WirtingerJet& b);
  friend WirtingerJet operator-(const WirtingerJet& a, const WirtingerJet& b);
  friend WirtingerJet operator*(const WirtingerJet& a, const WirtingerJet& b);
  friend WirtingerJet operator-(const WirtingerJet& a);
  friend WirtingerJet operator*(cplx s, const WirtingerJet& a);

  /// g(f) given g(v), g'(v), g''(v) at v = f.value().
  WirtingerJet compose(cplx g0, cplx g1, cplx g2) const;

  /// Jet of conj(f): swaps x<->xbar and y<->ybar and conjugates.
  WirtingerJet conjugate() const;

  /// Drop the second-order part.
  WirtingerJet truncated() const;

 private:
  cplx value_{};
  std::array<cplx, 4> grad_{};
  std::array<std::array<cplx, 4>, 4> hess_{};
};

/// Quotient a / b; throws DomainError when b.value() == 0.
WirtingerJet divide(const WirtingerJet& a, const WirtingerJet& b,
                    const std::string& context = "/");

/// Largest entrywise |a - b|.
double max_deviation(const WirtingerJet& a, const WirtingerJet& b);

/// Exact chain/product/quotient rules over the expression tree.
WirtingerJet eval_jet(const Expr& e, const CPoint& at);

struct FdOptions {
  double h = 1e-4;
  bool richardson = false;  // combine steps h and h/2
};

using PointFunction = std::function<cplx(const CPoint&)>;

/// Central-difference estimate of all order <= 2 Wirtinger partials using the
/// 4-real-variable stencil around `at`. Independent of eval_jet.
WirtingerJet fd_jet(const PointFunction& f, const CPoint& at,
                    const FdOptions& options = {});

}  // namespace semiholo
