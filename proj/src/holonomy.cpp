#include "semiholo/holonomy.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <initializer_list>
#include <sstream>

#include <boost/math/quadrature/gauss_kronrod.hpp>

namespace semiholo {

// ---------------------------------------------------------------------------
// Paths

XPath XPath::segment(cplx x0, cplx x1) {
  XPath p;
  p.kind_ = Kind::Segment;
  p.vertices_ = {x0, x1};
  return p;
}

XPath XPath::arc(cplx center, double radius, double theta0, double theta1) {
  if (!(radius > 0)) throw std::invalid_argument("arc radius must be positive");
  XPath p;
  p.kind_ = Kind::Arc;
  p.center_ = center;
  p.radius_ = radius;
  p.theta0_ = theta0;
  p.theta1_ = theta1;
  return p;
}

XPath XPath::polyline(std::vector<cplx> vertices) {
  if (vertices.size() < 2) throw std::invalid_argument("polyline needs at least two vertices");
  XPath p;
  p.kind_ = Kind::Polyline;
  p.vertices_ = std::move(vertices);
  return p;
}

int XPath::pieces() const {
  return kind_ == Kind::Arc ? 1 : static_cast<int>(vertices_.size()) - 1;
}

std::pair<double, double> XPath::piece(int k) const {
  int n = pieces();
  double a = static_cast<double>(k) / n;
  double b = (k + 1 == n) ? 1.0 : static_cast<double>(k + 1) / n;
  return {a, b};
}

int XPath::piece_of(double t) const {
  int n = pieces();
  return std::clamp(static_cast<int>(std::clamp(t, 0.0, 1.0) * n), 0, n - 1);
}

cplx XPath::at(double t, int k) const {
  if (kind_ == Kind::Arc) {
    double th = theta0_ + t * (theta1_ - theta0_);
    return center_ + radius_ * cplx{std::cos(th), std::sin(th)};
  }
  auto [a, b] = piece(k);
  if (t == b) return vertices_[k + 1];
  double local = (t - a) * pieces();
  return vertices_[k] + local * (vertices_[k + 1] - vertices_[k]);
}

cplx XPath::derivative(double t, int k) const {
  if (kind_ == Kind::Arc) {
    double w = theta1_ - theta0_;
    double th = theta0_ + t * w;
    return radius_ * w * cplx{-std::sin(th), std::cos(th)};
  }
  return static_cast<double>(pieces()) * (vertices_[k + 1] - vertices_[k]);
}

cplx XPath::at(double t) const {
  if (kind_ != Kind::Arc && t >= 1.0) return vertices_.back();
  return at(t, piece_of(t));
}

cplx XPath::derivative(double t) const { return derivative(t, piece_of(t)); }

double XPath::length() const {
  if (kind_ == Kind::Arc) return radius_ * std::abs(theta1_ - theta0_);
  double len = 0.0;
  for (std::size_t k = 0; k + 1 < vertices_.size(); ++k) len += std::abs(vertices_[k + 1] - vertices_[k]);
  return len;
}

// ---------------------------------------------------------------------------
// Dense output

namespace {

LeafState dense(const TraceStep& s, double t) {
  double th = s.dt == 0.0 ? 0.0 : (t - s.t0) / s.dt;
  double th1 = 1.0 - th;
  LeafState out;
  for (int i = 0; i < 6; ++i)
    out[i] = s.rcont[0][i] +
             th * (s.rcont[1][i] + th1 * (s.rcont[2][i] + th * (s.rcont[3][i] + th1 * s.rcont[4][i])));
  return out;
}

LeafState pack(cplx y, cplx u, cplx v) { return {y.real(), y.imag(), u.real(), u.imag(), v.real(), v.imag()}; }

}  // namespace

LeafState LeafTrace::state(double t) const {
  if (steps.empty()) return pack(samples.front().y, samples.front().u, samples.front().v);
  auto it = std::upper_bound(steps.begin(), steps.end(), t,
                             [](double value, const TraceStep& s) { return value < s.t0; });
  const TraceStep& s = (it == steps.begin()) ? steps.front() : *std::prev(it);
  return dense(s, std::clamp(t, s.t0, s.t0 + s.dt));
}

cplx LeafTrace::y(double t) const {
  LeafState s = state(t);
  return {s[0], s[1]};
}

cplx LeafTrace::u(double t) const {
  LeafState s = state(t);
  return {s[2], s[3]};
}

cplx LeafTrace::v(double t) const {
  LeafState s = state(t);
  return {s[4], s[5]};
}

// ---------------------------------------------------------------------------
// Integrator

namespace {

struct StageFailure {};

class LeafOde {
 public:
  LeafOde(const SlopeField& F, const XPath& path, bool linear) : F_(F), path_(path), linear_(linear) {}

  void set_piece(int k) { piece_ = k; }

  LeafState operator()(double t, const LeafState& s) const {
    cplx x = path_.at(t, piece_);
    cplx xp = path_.derivative(t, piece_);
    cplx y{s[0], s[1]};
    CPoint p{x, y};
    if (!is_finite(p)) throw StageFailure{};
    cplx lam, a, b;
    try {
      for (const auto& g : F_.guards)
        if (!(eval(g, p).real() > 0.0)) throw StageFailure{};
      if (linear_) {
        WirtingerJet j = eval_jet(F_.lambda, p);
        lam = j.value();
        a = j.grad(kY);
        b = j.grad(kYbar);
      } else {
        lam = eval(F_.lambda, p);
      }
    } catch (const DomainError&) {
      throw StageFailure{};
    }
    if (!std::isfinite(lam.real()) || !std::isfinite(lam.imag()) || std::abs(lam) > kOverflowSlope)
      throw StageFailure{};
    cplx dy = lam * xp;
    LeafState out{dy.real(), dy.imag(), 0, 0, 0, 0};
    if (linear_) {
      cplx u{s[2], s[3]}, v{s[4], s[5]};
      cplx du = (a * u + b * std::conj(v)) * xp;
      cplx dv = (a * v + b * std::conj(u)) * xp;
      out[2] = du.real();
      out[3] = du.imag();
      out[4] = dv.real();
      out[5] = dv.imag();
    }
    return out;
  }

  bool linear() const { return linear_; }

 private:
  const SlopeField& F_;
  const XPath& path_;
  bool linear_;
  int piece_ = 0;
};

// Dormand-Prince 5(4)
constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
constexpr double a21 = 1.0 / 5;
constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561, a54 = -212.0 / 729;
constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247, a64 = 49.0 / 176,
                 a65 = -5103.0 / 18656;
constexpr double a71 = 35.0 / 384, a73 = 500.0 / 1113, a74 = 125.0 / 192, a75 = -2187.0 / 6784,
                 a76 = 11.0 / 84;
constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920, e5 = -17253.0 / 339200,
                 e6 = 22.0 / 525, e7 = -1.0 / 40;
constexpr double d1 = -12715105075.0 / 11282082432.0, d3 = 87487479700.0 / 32700410799.0,
                 d4 = -10690763975.0 / 1880347072.0, d5 = 701980252875.0 / 199316789632.0,
                 d6 = -1453857185.0 / 822651844.0, d7 = 69997945.0 / 29380423.0;

using Term = std::pair<double, const LeafState*>;

LeafState combine(const LeafState& y, double h, std::initializer_list<Term> terms) {
  LeafState out = y;
  for (int i = 0; i < 6; ++i) {
    double acc = 0.0;
    for (const Term& term : terms) acc += term.first * (*term.second)[i];
    out[i] += h * acc;
  }
  return out;
}

struct StepResult {
  LeafState y1;
  LeafState k7;
  double err;
  TraceStep dense;
};

StepResult dopri_step(const LeafOde& f, double t, const LeafState& y, const LeafState& k1, double h,
                      double tol) {
  LeafState k2 = f(t + c2 * h, combine(y, h, {{a21, &k1}}));
  LeafState k3 = f(t + c3 * h, combine(y, h, {{a31, &k1}, {a32, &k2}}));
  LeafState k4 = f(t + c4 * h, combine(y, h, {{a41, &k1}, {a42, &k2}, {a43, &k3}}));
  LeafState k5 = f(t + c5 * h, combine(y, h, {{a51, &k1}, {a52, &k2}, {a53, &k3}, {a54, &k4}}));
  LeafState k6 = f(t + h, combine(y, h, {{a61, &k1}, {a62, &k2}, {a63, &k3}, {a64, &k4}, {a65, &k5}}));
  LeafState y1 = combine(y, h, {{a71, &k1}, {a73, &k3}, {a74, &k4}, {a75, &k5}, {a76, &k6}});
  LeafState k7 = f(t + h, y1);

  int dim = f.linear() ? 6 : 2;
  double sum = 0.0;
  for (int i = 0; i < dim; ++i) {
    double e = h * (e1 * k1[i] + e3 * k3[i] + e4 * k4[i] + e5 * k5[i] + e6 * k6[i] + e7 * k7[i]);
    double sc = tol + tol * std::max(std::abs(y[i]), std::abs(y1[i]));
    sum += (e / sc) * (e / sc);
  }
  StepResult r;
  r.y1 = y1;
  r.k7 = k7;
  r.err = std::sqrt(sum / dim);
  r.dense.t0 = t;
  r.dense.dt = h;
  for (int i = 0; i < 6; ++i) {
    double ydiff = y1[i] - y[i];
    double bspl = h * k1[i] - ydiff;
    r.dense.rcont[0][i] = y[i];
    r.dense.rcont[1][i] = ydiff;
    r.dense.rcont[2][i] = bspl;
    r.dense.rcont[3][i] = ydiff - h * k7[i] - bspl;
    r.dense.rcont[4][i] = h * (d1 * k1[i] + d3 * k3[i] + d4 * k4[i] + d5 * k5[i] + d6 * k6[i] + d7 * k7[i]);
  }
  return r;
}

LeafSample sample_of(const XPath& path, double t, const LeafState& s) {
  return {t, path.at(t), {s[0], s[1]}, {s[2], s[3]}, {s[4], s[5]}};
}

}  // namespace

LeafTrace trace_leaf(const SlopeField& F, cplx y0, const XPath& path, const TraceOptions& opt) {
  if (!(opt.tol > 0)) throw std::invalid_argument("trace tolerance must be positive");
  LeafTrace trace;
  trace.path = path;
  trace.tolerance = opt.tol;
  trace.has_linear_parts = opt.linear_parts;
  LeafState y = pack(y0, opt.u0, opt.v0);
  trace.samples.push_back(sample_of(path, 0.0, y));
  if (!admissible(F, {path.at(0.0), y0})) throw DomainError("start point is not admissible", to_string(F.lambda));
  if (path.length() == 0.0) return trace;

  LeafOde f(F, path, opt.linear_parts);
  constexpr double safe = 0.9, beta = 0.04, expo1 = 0.2 - beta * 0.75;
  constexpr double facc1 = 1.0 / 0.2, facc2 = 1.0 / 10.0;
  long nsteps = 0;
  for (int k = 0; k < path.pieces(); ++k) {
    auto [ta, tb] = path.piece(k);
    f.set_piece(k);
    double span = tb - ta;
    double t = ta;
    double h = span / 64.0;
    double facold = 1e-4;
    bool rejected = false;
    LeafState k1;
    try {
      k1 = f(t, y);
    } catch (const StageFailure&) {
      throw SingularLocusError("singular locus reached at t = " + std::to_string(t));
    }
    while (t < tb) {
      if (++nsteps > opt.max_steps) throw Error("step limit exceeded while tracing leaf");
      if (h < 1e-12 * span) throw SingularLocusError("singular locus reached near t = " + std::to_string(t));
      bool last = t + h >= tb;
      if (last) h = tb - t;
      StepResult r;
      try {
        r = dopri_step(f, t, y, k1, h, opt.tol);
      } catch (const StageFailure&) {
        h *= 0.25;
        rejected = true;
        continue;
      }
      double fac11 = std::pow(r.err, expo1);
      if (r.err <= 1.0) {
        double fac = fac11 / std::pow(facold, beta);
        fac = std::clamp(fac / safe, facc2, facc1);
        double hnew = h / fac;
        facold = std::max(r.err, 1e-4);
        if (rejected) hnew = std::min(hnew, h);
        rejected = false;
        t = last ? tb : t + h;
        y = r.y1;
        k1 = r.k7;
        trace.steps.push_back(r.dense);
        trace.samples.push_back(sample_of(path, t, y));
        h = hnew;
      } else {
        h = h / std::min(facc1, fac11 / safe);
        rejected = true;
      }
    }
  }
  return trace;
}

LeafTrace trace_leaf(const SlopeField& F, cplx y0, const XPath& path, double tol) {
  TraceOptions opt;
  opt.tol = tol;
  return trace_leaf(F, y0, path, opt);
}

cplx transport(const SlopeField& F, cplx x0, cplx x1, cplx y0, double tol) {
  if (x0 == x1) return y0;
  return trace_leaf(F, y0, XPath::segment(x0, x1), tol).end().y;
}

LeafTrace linear_parts(const SlopeField& F, cplx y0, const XPath& path, double tol) {
  TraceOptions opt;
  opt.tol = tol;
  opt.linear_parts = true;
  return trace_leaf(F, y0, path, opt);
}

LinearJet linear_jet_at_end(const SlopeField& F, const LeafTrace& trace, double tol) {
  if (!trace.has_linear_parts) throw std::invalid_argument("trace carries no linear parts");
  const LeafSample& e = trace.end();
  double delta = 1e-4 * std::max(1.0, trace.path.length());
  TraceOptions opt;
  opt.tol = tol;
  opt.linear_parts = true;
  opt.u0 = e.u;
  opt.v0 = e.v;
  auto extend = [&](cplx step) {
    return trace_leaf(F, e.y, XPath::segment(e.x, e.x + step), opt).end();
  };
  LeafSample px = extend({delta, 0.0}), mx = extend({-delta, 0.0});
  LeafSample pi = extend({0.0, delta}), mi = extend({0.0, -delta});
  const cplx I{0.0, 1.0};
  LinearJet j;
  j.x = e.x;
  j.y = e.y;
  j.u = e.u;
  j.v = e.v;
  j.du = 0.5 * ((px.u - mx.u) / (2.0 * delta) + (pi.u - mi.u) / (2.0 * I * delta));
  j.dv = 0.5 * ((px.v - mx.v) / (2.0 * delta) + (pi.v - mi.v) / (2.0 * I * delta));
  return j;
}

cplx b_from_linear_parts(cplx u, cplx v, cplx du, cplx dv) {
  double den = boundary_indicator(u, v);
  if (std::abs(den) <= 1e-12 * std::max(1.0, std::norm(u) + std::norm(v)))
    throw BoundaryError("leaf boundary |u| = |v| reached");
  return (u * dv - du * v) / den;
}

double boundary_indicator(cplx u, cplx v) { return std::norm(u) - std::norm(v); }

double geodesic_length(const SlopeField& F, const LeafTrace& trace) {
  using boost::math::quadrature::gauss_kronrod;
  double total = 0.0;
  for (const TraceStep& s : trace.steps) {
    int k = trace.path.piece_of(s.t0 + 0.5 * s.dt);
    auto density = [&](double t) {
      cplx x = trace.path.at(t, k);
      LeafState st = dense(s, t);
      return std::abs(bott(F, {x, {st[0], st[1]}}).b) * std::abs(trace.path.derivative(t, k));
    };
    total += gauss_kronrod<double, 15>::integrate(density, s.t0, s.t0 + s.dt, 5, 1e-13);
  }
  return total;
}

MotionMap make_motion(const std::string& formula, cplx base_x) {
  MotionMap m{parse(formula), base_x};
  if (!is_holomorphic_in_x(m.phi)) throw Error("motion must depend holomorphically on x");
  return m;
}

cplx motion_to_slope(const MotionMap& m, const CPoint& p, double tol) {
  if (!is_holomorphic_in_x(m.phi)) throw Error("motion must depend holomorphically on x");
  cplx y0 = p.y;
  auto residual = [&](cplx z) { return eval(m.phi, {p.x, z}) - p.y; };
  double target = tol * (1.0 + std::abs(p.y));
  for (int it = 0; it < 50; ++it) {
    WirtingerJet J = eval_jet(m.phi, {p.x, y0});
    cplx c = J.value() - p.y;
    double rc = std::abs(c);
    if (rc <= target) return J.grad(kX);
    cplx A = J.grad(kY), B = J.grad(kYbar);
    double det = std::norm(A) - std::norm(B);
    if (!(det > 0.0)) throw Error("motion is not invertible at this point");
    cplx delta = (std::conj(A) * c - B * std::conj(c)) / det;
    double s = 1.0;
    cplx next = y0 - delta;
    while (std::abs(residual(next)) > rc && s > 1e-6) {
      s *= 0.5;
      next = y0 - s * delta;
    }
    if (next == y0) break;
    y0 = next;
  }
  WirtingerJet J = eval_jet(m.phi, {p.x, y0});
  if (std::abs(J.value() - p.y) <= target) return J.grad(kX);
  throw Error("Newton inversion of the motion did not converge");
}

std::vector<std::vector<cplx>> slope_to_motion(const SlopeField& F, cplx x0,
                                               const std::vector<cplx>& targets,
                                               const std::vector<cplx>& ys, double tol) {
  std::vector<std::vector<cplx>> table;
  table.reserve(targets.size());
  for (cplx x1 : targets) {
    std::vector<cplx> row;
    row.reserve(ys.size());
    for (cplx y : ys) row.push_back(transport(F, x0, x1, y, tol));
    table.push_back(std::move(row));
  }
  return table;
}

namespace {

void put(std::ostringstream& os, double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  os << ',' << buf;
}

}  // namespace

std::string to_csv(const LeafTrace& trace) {
  std::ostringstream os;
  os << "t,re_x,im_x,re_y,im_y";
  if (trace.has_linear_parts) os << ",re_u,im_u,re_v,im_v";
  os << '\n';
  for (const LeafSample& s : trace.samples) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", s.t);
    os << buf;
    put(os, s.x.real());
    put(os, s.x.imag());
    put(os, s.y.real());
    put(os, s.y.imag());
    if (trace.has_linear_parts) {
      put(os, s.u.real());
      put(os, s.u.imag());
      put(os, s.v.real());
      put(os, s.v.imag());
    }
    os << '\n';
  }
  return os.str();
}

}  // namespace semiholo
