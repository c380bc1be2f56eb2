#pragma once

// Leaf tracing dy/dt = lambda(x(t), y) x'(t) over paths in the x-plane, with
// the variational linear parts phi_x(y) ~ u y + v ybar carried along.

#include <array>
#include <optional>
#include <string>
#include <vector>

#include "semiholo/foliation.hpp"

namespace semiholo {

class SingularLocusError : public Error {
 public:
  using Error::Error;
};

class BoundaryError : public Error {
 public:
  using Error::Error;
};

/// Piecewise-smooth path t in [0, 1] -> x(t). Polylines spend equal parameter
/// time on each leg.
class XPath {
 public:
  enum class Kind { Segment, Arc, Polyline };

  static XPath segment(cplx x0, cplx x1);
  static XPath arc(cplx center, double radius, double theta0, double theta1);
  static XPath polyline(std::vector<cplx> vertices);
  static XPath circle(cplx center, double radius) { return arc(center, radius, 0.0, 2.0 * M_PI); }

  Kind kind() const { return kind_; }
  cplx at(double t) const;
  cplx derivative(double t) const;
  /// Same, evaluated with the formula of piece k (one-sided at its ends).
  cplx at(double t, int k) const;
  cplx derivative(double t, int k) const;
  int piece_of(double t) const;
  double length() const;
  int pieces() const;
  /// Parameter interval of piece k.
  std::pair<double, double> piece(int k) const;

 private:
  Kind kind_ = Kind::Segment;
  std::vector<cplx> vertices_;
  cplx center_{};
  double radius_ = 0.0;
  double theta0_ = 0.0;
  double theta1_ = 0.0;
};

/// State layout: re y, im y, re u, im u, re v, im v.
using LeafState = std::array<double, 6>;

struct TraceStep {
  double t0 = 0.0;
  double dt = 0.0;
  std::array<LeafState, 5> rcont{};
};

struct LeafSample {
  double t;
  cplx x;
  cplx y;
  cplx u;
  cplx v;
};

struct LeafTrace {
  XPath path;
  std::vector<TraceStep> steps;
  std::vector<LeafSample> samples;  // the accepted step endpoints, t = 0 first
  double tolerance = 0.0;
  bool has_linear_parts = false;

  LeafState state(double t) const;
  cplx y(double t) const;
  cplx u(double t) const;
  cplx v(double t) const;
  const LeafSample& end() const { return samples.back(); }
};

struct TraceOptions {
  double tol = 1e-10;
  bool linear_parts = false;
  cplx u0{1.0, 0.0};
  cplx v0{0.0, 0.0};
  long max_steps = 1000000;
};

/// Dormand-Prince 5(4) with PI step control and continuous output.
LeafTrace trace_leaf(const SlopeField& F, cplx y0, const XPath& path, const TraceOptions& opt);
LeafTrace trace_leaf(const SlopeField& F, cplx y0, const XPath& path, double tol);

cplx transport(const SlopeField& F, cplx x0, cplx x1, cplx y0, double tol);

LeafTrace linear_parts(const SlopeField& F, cplx y0, const XPath& path, double tol);

struct LinearJet {
  cplx x, y, u, v, du, dv;  // du, dv are d/dx
};

/// u, v at the end of a linear-parts trace and their x-derivatives from a
/// four-point complex stencil of extension traces.
LinearJet linear_jet_at_end(const SlopeField& F, const LeafTrace& trace, double tol);

cplx b_from_linear_parts(cplx u, cplx v, cplx du, cplx dv);

double boundary_indicator(cplx u, cplx v);

/// Integral of |b| |x'(t)| dt over the trace (Gauss-Kronrod per step).
double geodesic_length(const SlopeField& F, const LeafTrace& trace);

struct MotionMap {
  Expr phi;  // in x, y; conj(x) not allowed
  cplx base_x;
};

MotionMap make_motion(const std::string& formula, cplx base_x);

/// lambda(x, y) = dphi/dx(x, y0) with phi_x(y0) = y solved by damped Newton.
cplx motion_to_slope(const MotionMap& m, const CPoint& p, double tol = 1e-13);

/// Sampled motion: result[i][j] is ys[j] transported from x0 to targets[i].
std::vector<std::vector<cplx>> slope_to_motion(const SlopeField& F, cplx x0,
                                               const std::vector<cplx>& targets,
                                               const std::vector<cplx>& ys, double tol);

std::string to_csv(const LeafTrace& trace);

}  // namespace semiholo
