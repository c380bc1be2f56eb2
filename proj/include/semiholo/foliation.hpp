#pragma once

// Semiholomorphic foliations given by a slope lambda, ker(dy - lambda dx), and
// the pointwise residuals of the integrability and Bott-connection identities.

#include <array>
#include <random>
#include <string>
#include <vector>

#include "semiholo/wirtinger.hpp"

namespace semiholo {

struct LeafTrace;

/// Axis-aligned region of C^2 as [lo, hi] for re x, im x, re y, im y.
struct Box {
  std::array<double, 8> bounds{-1, 1, -1, 1, -1, 1, -1, 1};

  double lo(int axis) const { return bounds[2 * axis]; }
  double hi(int axis) const { return bounds[2 * axis + 1]; }
};

struct SlopeField {
  Expr lambda;
  std::vector<Expr> guards;  // admissible iff re(g) > 0 for every guard
  std::string label;

  static SlopeField from_formula(const std::string& formula, std::vector<std::string> guards = {},
                                 std::string label = {});
};

/// Guards hold and lambda evaluates to a finite value.
bool admissible(const SlopeField& F, const CPoint& p);

cplx slope(const SlopeField& F, const CPoint& p);

/// Uniform rejection sampling of admissible points. Throws when fewer than
/// `count` admissible points turn up in 1000*count draws.
std::vector<CPoint> sample_admissible(const SlopeField& F, const Box& box, std::size_t count,
                                      std::mt19937_64& rng);

struct BottData {
  cplx a;  // d lambda / dy
  cplx b;  // d lambda / d ybar
  double metric_density = 0.0;  // |b|^2
};

double integrability_residual(const SlopeField& F, const CPoint& p);

BottData bott(const SlopeField& F, const CPoint& p);

double structural_residual(const SlopeField& F, const CPoint& p);

class DegenerateMetricError : public Error {
 public:
  using Error::Error;
};

constexpr double kDegenerateB = 1e-10;

struct CurvatureOptions {
  double h = 1e-3;
  double trace_tol = 1e-12;
};

/// |K + 4| for the leaf curvature K = -4 dd^c(log|b|)/|b|^2. The Laplacian is
/// the fourth-order nine-point stencil on the leaf through p, reached by
/// tracing to x +- h, x +- 2h, x +- ih and x +- 2ih.
double curvature_residual(const SlopeField& F, const CPoint& p, const CurvatureOptions& opt = {});

/// Curvature value itself, for reporting.
double leaf_curvature(const SlopeField& F, const CPoint& p, const CurvatureOptions& opt = {});

struct HoloMap {
  Expr X;
  Expr Y;
};

/// Compares |b~| of the pulled-back slope with |b o Phi| |X_x + lambda~ X_y|.
double pullback_metric_residual(const SlopeField& F, const HoloMap& phi, const CPoint& p);

/// Slope of Phi^*F at p.
cplx pullback_slope(const SlopeField& F, const HoloMap& phi, const CPoint& p);

constexpr double kOverflowSlope = 1e12;

/// Grid points (n per axis) where lambda fails to evaluate or |lambda| > 1e12.
std::vector<CPoint> singular_scan(const SlopeField& F, const Box& box, int n);

/// Winding number of b(x, y(x)) around 0 along a closed traced leaf.
/// `samples` is the initial sample count; refinement kicks in on large jumps.
int zero_count_winding(const SlopeField& F, const LeafTrace& leaf, int samples = 256);

struct ResidualRecord {
  CPoint point;
  double residual;
  std::string kind;
};

}  // namespace semiholo
