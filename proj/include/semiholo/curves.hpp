#pragma once

// Second-order curve systems y'' = F(x, y, y'), jet-2 lifts of foliations,
// tangency and semirank tests, and duality in the chart of affine lines.

#include <functional>
#include <random>
#include <string>
#include <vector>

#include "semiholo/foliation.hpp"

namespace semiholo {

/// y'' = F(x, y, p) where the variable p stands for y'.
struct CurveSystem2 {
  Expr F;
  std::string label;

  static CurveSystem2 from_formula(const std::string& formula, std::string label);
  cplx operator()(cplx x, cplx y, cplx p) const { return eval(F, {x, y}, p); }
};

CurveSystem2 lines_system();       // y'' = 0
CurveSystem2 parabolas_system();   // x y'' = y'
CurveSystem2 sl2_system();         // y'' = (x y' - y)^3

struct Jet2Point {
  cplx x, y, l1, l2;
};

/// l1 = lambda, l2 = dlambda/dx + lambda dlambda/dy.
Jet2Point jet2_lift(const SlopeField& F, const CPoint& p);

double tangency_residual(const SlopeField& F, const CurveSystem2& S, const CPoint& p);

struct SemirankReport {
  double statistic = 0.0;    // worst local misfit of l2, divided by the radius
  std::size_t groups = 0;    // neighbourhoods large enough to fit
  std::size_t largest = 0;   // members of the largest neighbourhood
  bool vacuous = true;       // no neighbourhood had enough members
};

/// Lifts the samples, forms neighbourhoods of radius r in (x, y, l1) space and
/// measures how far l2 is from a complex-affine function of (x, y, l1) on each
/// neighbourhood. Small values are consistent with l2 being a holomorphic
/// function of (x, y, l1), i.e. with semirank <= 2.
SemirankReport semirank2_consistency(const SlopeField& F, const std::vector<CPoint>& samples,
                                     double radius);

/// Admissible samples drawn in tight clusters (half-width radius/8 in x and
/// y) so that neighbourhoods of the given radius are populated.
std::vector<CPoint> clustered_samples(const SlopeField& F, const Box& box, std::size_t count,
                                      double radius, std::mt19937_64& rng,
                                      std::size_t cluster_size = 10);

/// The line y = a x + b.
struct DualPoint {
  cplx a, b;
};

class TangencyError : public Error {
 public:
  using Error::Error;
};

/// Parameters of the leaf line through p; requires tangency to the lines system.
DualPoint line_dual(const SlopeField& F, const CPoint& p, double tol = 1e-6);

/// Grid of n^4 points, admissible ones mapped through line_dual, deduplicated
/// at 1e-6 and sorted lexicographically.
std::vector<DualPoint> dual_surface_sample(const SlopeField& F, const Box& box, int n);

/// Real surface patch (s, t) -> C^2 with its partial derivatives.
struct RealSurface {
  std::function<CPoint(double, double)> at;
  std::function<CPoint(double, double)> ds;
  std::function<CPoint(double, double)> dt;
  double s0 = -1, s1 = 1, t0 = -1, t1 = 1;
};

RealSurface real_plane();                      // {(s, t) : s, t real}
RealSurface complex_line(cplx slope, cplx offset);  // y = slope x + offset, x = s + i t

/// True iff the line meets the surface somewhere in the patch with
/// T L + T M != C^2 (smallest singular value of the real 4x4 span below tol).
bool envelope_tangency(const DualPoint& L, const RealSurface& surf, double tol = 1e-8);

std::string to_csv(const std::vector<DualPoint>& points);

}  // namespace semiholo
