#include "semiholo/curves.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>
#include <sstream>
#include <unordered_map>

#include <Eigen/Dense>

namespace semiholo {

CurveSystem2 CurveSystem2::from_formula(const std::string& formula, std::string label) {
  CurveSystem2 S{parse(formula), std::move(label)};
  if (!is_holomorphic(S.F)) throw Error("curve system must be holomorphic in x, y and p");
  return S;
}

CurveSystem2 lines_system() { return CurveSystem2::from_formula("0", "lines"); }
CurveSystem2 parabolas_system() { return CurveSystem2::from_formula("p/x", "parabolas"); }
CurveSystem2 sl2_system() { return CurveSystem2::from_formula("(x*p-y)^3", "sl2"); }

Jet2Point jet2_lift(const SlopeField& F, const CPoint& p) {
  WirtingerJet j = eval_jet(F.lambda, p);
  cplx l = j.value();
  return {p.x, p.y, l, j.grad(kX) + l * j.grad(kY)};
}

double tangency_residual(const SlopeField& F, const CurveSystem2& S, const CPoint& p) {
  Jet2Point q = jet2_lift(F, p);
  return std::abs(q.l2 - S(q.x, q.y, q.l1));
}

// ---------------------------------------------------------------------------
// Semirank

namespace {

using Cell = std::array<long long, 6>;

struct CellHash {
  std::size_t operator()(const Cell& c) const {
    std::size_t h = 1469598103934665603ull;
    for (long long v : c) h = (h ^ static_cast<std::size_t>(v)) * 1099511628211ull;
    return h;
  }
};

std::array<double, 6> coords(const Jet2Point& q) {
  return {q.x.real(), q.x.imag(), q.y.real(), q.y.imag(), q.l1.real(), q.l1.imag()};
}

}  // namespace

SemirankReport semirank2_consistency(const SlopeField& F, const std::vector<CPoint>& samples,
                                     double radius) {
  if (!(radius > 0)) throw std::invalid_argument("bucket radius must be positive");
  if (samples.size() < 100) throw std::invalid_argument("semirank test needs at least 100 samples");
  std::vector<Jet2Point> lifts;
  lifts.reserve(samples.size());
  for (const CPoint& p : samples) lifts.push_back(jet2_lift(F, p));

  std::vector<std::array<double, 6>> pts;
  std::unordered_map<Cell, std::vector<std::size_t>, CellHash> grid;
  for (std::size_t i = 0; i < lifts.size(); ++i) {
    pts.push_back(coords(lifts[i]));
    Cell c;
    for (int k = 0; k < 6; ++k) c[k] = static_cast<long long>(std::floor(pts[i][k] / radius));
    grid[c].push_back(i);
  }

  SemirankReport rep;
  constexpr std::size_t kMinMembers = 6;
  std::vector<std::size_t> members;
  for (std::size_t i = 0; i < pts.size(); ++i) {
    members.clear();
    Cell base;
    for (int k = 0; k < 6; ++k) base[k] = static_cast<long long>(std::floor(pts[i][k] / radius));
    for (int code = 0; code < 729; ++code) {
      Cell c = base;
      int rest = code;
      for (int k = 0; k < 6; ++k) {
        c[k] += rest % 3 - 1;
        rest /= 3;
      }
      auto it = grid.find(c);
      if (it == grid.end()) continue;
      for (std::size_t j : it->second) {
        double d2 = 0.0;
        for (int k = 0; k < 6; ++k) d2 += (pts[j][k] - pts[i][k]) * (pts[j][k] - pts[i][k]);
        if (d2 <= radius * radius) members.push_back(j);
      }
    }
    rep.largest = std::max(rep.largest, members.size());
    if (members.size() < kMinMembers) continue;
    ++rep.groups;
    const Jet2Point& o = lifts[i];
    Eigen::MatrixXcd A(members.size(), 4);
    Eigen::VectorXcd rhs(members.size());
    for (std::size_t r = 0; r < members.size(); ++r) {
      const Jet2Point& q = lifts[members[r]];
      A(r, 0) = 1.0;
      A(r, 1) = (q.x - o.x) / radius;
      A(r, 2) = (q.y - o.y) / radius;
      A(r, 3) = (q.l1 - o.l1) / radius;
      rhs(r) = q.l2 - o.l2;
    }
    Eigen::JacobiSVD<Eigen::MatrixXcd> svd(A, Eigen::ComputeThinU | Eigen::ComputeThinV);
    svd.setThreshold(1e-9);
    Eigen::VectorXcd coef = svd.solve(rhs);
    double misfit = (A * coef - rhs).cwiseAbs().maxCoeff();
    rep.statistic = std::max(rep.statistic, misfit / radius);
  }
  rep.vacuous = rep.groups == 0;
  return rep;
}

std::vector<CPoint> clustered_samples(const SlopeField& F, const Box& box, std::size_t count,
                                      double radius, std::mt19937_64& rng,
                                      std::size_t cluster_size) {
  std::vector<CPoint> out;
  out.reserve(count);
  const double w = radius / 8.0;
  std::uniform_real_distribution<double> jitter(-w, w);
  std::size_t attempts = 0;
  while (out.size() < count) {
    if (++attempts > 1000 * count + 1000) throw Error("admissible region of '" + F.label + "' is too thin");
    CPoint c = sample_admissible(F, box, 1, rng).front();
    for (std::size_t k = 0; k < cluster_size && out.size() < count; ++k) {
      double rx = jitter(rng), ix = jitter(rng), ry = jitter(rng), iy = jitter(rng);
      CPoint p{c.x + cplx{rx, ix}, c.y + cplx{ry, iy}};
      if (admissible(F, p)) out.push_back(p);
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// Duality

DualPoint line_dual(const SlopeField& F, const CPoint& p, double tol) {
  double r = tangency_residual(F, lines_system(), p);
  if (!(r <= tol)) throw TangencyError("foliation is not tangent to the lines system here");
  cplx l = slope(F, p);
  return {l, p.y - l * p.x};
}

std::vector<DualPoint> dual_surface_sample(const SlopeField& F, const Box& box, int n) {
  if (n < 2) throw std::invalid_argument("dual_surface_sample: n must be at least 2");
  auto coord = [&](int axis, int k) {
    if (k == n - 1) return box.hi(axis);
    return box.lo(axis) + (box.hi(axis) - box.lo(axis)) * k / (n - 1);
  };
  std::map<std::array<long long, 4>, DualPoint> unique;
  auto key = [](double v) { return std::llround(v * 1e6); };
  for (int i0 = 0; i0 < n; ++i0)
    for (int i1 = 0; i1 < n; ++i1)
      for (int i2 = 0; i2 < n; ++i2)
        for (int i3 = 0; i3 < n; ++i3) {
          CPoint p{{coord(0, i0), coord(1, i1)}, {coord(2, i2), coord(3, i3)}};
          if (!admissible(F, p)) continue;
          DualPoint d = line_dual(F, p);
          unique.emplace(std::array<long long, 4>{key(d.a.real()), key(d.a.imag()), key(d.b.real()),
                                                  key(d.b.imag())},
                         d);
        }
  std::vector<DualPoint> out;
  out.reserve(unique.size());
  for (const auto& [k, d] : unique) out.push_back(d);
  return out;
}

RealSurface real_plane() {
  RealSurface s;
  s.at = [](double u, double v) { return CPoint{{u, 0.0}, {v, 0.0}}; };
  s.ds = [](double, double) { return CPoint{{1.0, 0.0}, {0.0, 0.0}}; };
  s.dt = [](double, double) { return CPoint{{0.0, 0.0}, {1.0, 0.0}}; };
  return s;
}

RealSurface complex_line(cplx slope, cplx offset) {
  RealSurface s;
  s.at = [=](double u, double v) {
    cplx x{u, v};
    return CPoint{x, slope * x + offset};
  };
  s.ds = [=](double, double) { return CPoint{{1.0, 0.0}, slope}; };
  s.dt = [=](double, double) { return CPoint{{0.0, 1.0}, cplx{0.0, 1.0} * slope}; };
  return s;
}

namespace {

Eigen::Vector4d real4(const CPoint& p) { return {p.x.real(), p.x.imag(), p.y.real(), p.y.imag()}; }

}  // namespace

bool envelope_tangency(const DualPoint& L, const RealSurface& surf, double tol) {
  auto resid = [&](double s, double t) {
    CPoint q = surf.at(s, t);
    return q.y - L.a * q.x - L.b;
  };
  const int seeds = 5;
  bool found = false;
  for (int i = 0; i < seeds; ++i) {
    for (int j = 0; j < seeds; ++j) {
      double s = surf.s0 + (surf.s1 - surf.s0) * (i + 0.5) / seeds;
      double t = surf.t0 + (surf.t1 - surf.t0) * (j + 0.5) / seeds;
      bool converged = false;
      for (int it = 0; it < 60; ++it) {
        cplx r = resid(s, t);
        if (std::abs(r) <= 1e-12 * (1.0 + std::abs(L.b))) {
          converged = true;
          break;
        }
        CPoint ds = surf.ds(s, t), dt = surf.dt(s, t);
        cplx js = ds.y - L.a * ds.x, jt = dt.y - L.a * dt.x;
        Eigen::Matrix2d J;
        J << js.real(), jt.real(), js.imag(), jt.imag();
        Eigen::Vector2d rhs(r.real(), r.imag());
        Eigen::JacobiSVD<Eigen::Matrix2d> svd(J, Eigen::ComputeFullU | Eigen::ComputeFullV);
        svd.setThreshold(1e-12);
        Eigen::Vector2d step = svd.solve(rhs);
        s -= step(0);
        t -= step(1);
        if (!std::isfinite(s) || !std::isfinite(t)) break;
      }
      const double slack = 1e-9;
      if (!converged || s < surf.s0 - slack || s > surf.s1 + slack || t < surf.t0 - slack ||
          t > surf.t1 + slack)
        continue;
      found = true;
      Eigen::Matrix4d M;
      M.col(0) = real4({{1.0, 0.0}, L.a});
      M.col(1) = real4({{0.0, 1.0}, cplx{0.0, 1.0} * L.a});
      M.col(2) = real4(surf.ds(s, t));
      M.col(3) = real4(surf.dt(s, t));
      for (int k = 0; k < 4; ++k) M.col(k).normalize();
      Eigen::JacobiSVD<Eigen::Matrix4d> svd(M);
      if (svd.singularValues()(3) < tol) return true;
    }
  }
  if (!found) throw Error("no intersection found in patch");
  return false;
}

std::string to_csv(const std::vector<DualPoint>& points) {
  std::ostringstream os;
  os << "re_a,im_a,re_b,im_b\n";
  char buf[128];
  for (const DualPoint& d : points) {
    std::snprintf(buf, sizeof buf, "%.17g,%.17g,%.17g,%.17g\n", d.a.real(), d.a.imag(), d.b.real(),
                  d.b.imag());
    os << buf;
  }
  return os.str();
}

}  // namespace semiholo
