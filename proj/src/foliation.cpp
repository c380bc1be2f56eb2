#include "semiholo/foliation.hpp"

#include <algorithm>
#include <cmath>
#include <functional>

#include "semiholo/holonomy.hpp"

namespace semiholo {

SlopeField SlopeField::from_formula(const std::string& formula, std::vector<std::string> guards,
                                    std::string label) {
  SlopeField F;
  F.lambda = parse(formula);
  for (const auto& g : guards) F.guards.push_back(parse(g));
  F.label = label.empty() ? formula : std::move(label);
  return F;
}

bool admissible(const SlopeField& F, const CPoint& p) {
  if (!is_finite(p)) return false;
  try {
    for (const auto& g : F.guards)
      if (!(eval(g, p).real() > 0.0)) return false;
    cplx l = eval(F.lambda, p);
    return std::isfinite(l.real()) && std::isfinite(l.imag()) && std::abs(l) <= kOverflowSlope;
  } catch (const DomainError&) {
    return false;
  }
}

cplx slope(const SlopeField& F, const CPoint& p) { return eval(F.lambda, p); }

std::vector<CPoint> sample_admissible(const SlopeField& F, const Box& box, std::size_t count,
                                      std::mt19937_64& rng) {
  std::vector<CPoint> out;
  out.reserve(count);
  std::array<std::uniform_real_distribution<double>, 4> axis;
  for (int k = 0; k < 4; ++k)
    axis[k] = std::uniform_real_distribution<double>(box.lo(k), box.hi(k));
  std::size_t draws = 0;
  while (out.size() < count) {
    if (++draws > 1000 * count + 1000) throw Error("admissible region of '" + F.label + "' is too thin");
    double rx = axis[0](rng), ix = axis[1](rng), ry = axis[2](rng), iy = axis[3](rng);
    CPoint p{{rx, ix}, {ry, iy}};
    if (admissible(F, p)) out.push_back(p);
  }
  return out;
}

double integrability_residual(const SlopeField& F, const CPoint& p) {
  WirtingerJet j = eval_jet(F.lambda, p);
  return std::abs(j.grad(kXbar) + std::conj(j.value()) * j.grad(kYbar));
}

BottData bott(const SlopeField& F, const CPoint& p) {
  WirtingerJet j = eval_jet(F.lambda, p);
  BottData d;
  d.a = j.grad(kY);
  d.b = j.grad(kYbar);
  d.metric_density = std::norm(d.b);
  return d;
}

double structural_residual(const SlopeField& F, const CPoint& p) {
  WirtingerJet j = eval_jet(F.lambda, p);
  cplx lbar = std::conj(j.value());
  cplx a = j.grad(kY);
  cplx b = j.grad(kYbar);
  cplx dbar_a = j.hess(kY, kXbar) + lbar * j.hess(kY, kYbar);
  cplx dbar_b = j.hess(kYbar, kXbar) + lbar * j.hess(kYbar, kYbar);
  return std::abs(dbar_a + std::conj(b) * b) + std::abs(dbar_b + std::conj(a) * b);
}

double leaf_curvature(const SlopeField& F, const CPoint& p, const CurvatureOptions& opt) {
  auto log_b = [&](const CPoint& q) {
    double m = std::abs(bott(F, q).b);
    if (m < kDegenerateB) throw DegenerateMetricError("metric degenerates on the curvature stencil");
    return std::log(m);
  };
  const double h = opt.h;
  const cplx dirs[4] = {{1.0, 0.0}, {-1.0, 0.0}, {0.0, 1.0}, {0.0, -1.0}};
  double g0 = log_b(p);
  double ring[2] = {0.0, 0.0};
  for (int r = 0; r < 2; ++r)
    for (cplx d : dirs) {
      cplx x1 = p.x + (r + 1.0) * h * d;
      cplx y1 = trace_leaf(F, p.y, XPath::segment(p.x, x1), opt.trace_tol).end().y;
      ring[r] += log_b({x1, y1});
    }
  // fourth-order Laplacian; d/dx d/dxbar is a quarter of it
  double lap = (16.0 * ring[0] - ring[1] - 60.0 * g0) / (48.0 * h * h);
  return -4.0 * lap / std::exp(2.0 * g0);
}

double curvature_residual(const SlopeField& F, const CPoint& p, const CurvatureOptions& opt) {
  return std::abs(leaf_curvature(F, p, opt) + 4.0);
}

namespace {

// first-order jet of d/d(dir) of f, from the second-order jet of f
WirtingerJet partial(const WirtingerJet& f, int dir) {
  WirtingerJet r = WirtingerJet::constant(f.grad(dir));
  for (int k = 0; k < 4; ++k) r.set_grad(k, f.hess(dir, k));
  return r;
}

struct Pullback {
  WirtingerJet lambda;
  WirtingerJet Xx, Xy;
  CPoint image;
};

Pullback pull_back(const SlopeField& F, const HoloMap& phi, const CPoint& p) {
  if (!is_holomorphic(phi.X) || !is_holomorphic(phi.Y))
    throw Error("pullback map must be holomorphic");
  WirtingerJet X = eval_jet(phi.X, p);
  WirtingerJet Y = eval_jet(phi.Y, p);
  WirtingerJet L = eval_jet(substitute(F.lambda, phi.X, phi.Y), p);
  Pullback out;
  out.Xx = partial(X, kX);
  out.Xy = partial(X, kY);
  WirtingerJet Yx = partial(Y, kX);
  WirtingerJet Yy = partial(Y, kY);
  WirtingerJet num = Yx - L * out.Xx;
  WirtingerJet den = Yy - L * out.Xy;
  double scale = std::abs(Yy.value()) + std::abs(L.value() * out.Xy.value());
  if (std::abs(den.value()) <= 1e-14 * std::max(scale, 1.0))
    throw Error("degenerate pullback: leaf direction is vertical for the map");
  out.lambda = -divide(num, den);
  out.image = {X.value(), Y.value()};
  return out;
}

}  // namespace

cplx pullback_slope(const SlopeField& F, const HoloMap& phi, const CPoint& p) {
  return pull_back(F, phi, p).lambda.value();
}

double pullback_metric_residual(const SlopeField& F, const HoloMap& phi, const CPoint& p) {
  Pullback pb = pull_back(F, phi, p);
  cplx b_tilde = pb.lambda.grad(kYbar);
  cplx b_image = bott(F, pb.image).b;
  cplx stretch = pb.Xx.value() + pb.lambda.value() * pb.Xy.value();
  return std::abs(std::abs(b_tilde) - std::abs(b_image) * std::abs(stretch));
}

std::vector<CPoint> singular_scan(const SlopeField& F, const Box& box, int n) {
  if (n < 2) throw std::invalid_argument("singular_scan: n must be at least 2");
  auto coord = [&](int axis, int k) {
    if (k == n - 1) return box.hi(axis);
    return box.lo(axis) + (box.hi(axis) - box.lo(axis)) * k / (n - 1);
  };
  std::vector<CPoint> out;
  for (int i0 = 0; i0 < n; ++i0)
    for (int i1 = 0; i1 < n; ++i1)
      for (int i2 = 0; i2 < n; ++i2)
        for (int i3 = 0; i3 < n; ++i3) {
          CPoint p{{coord(0, i0), coord(1, i1)}, {coord(2, i2), coord(3, i3)}};
          bool bad;
          try {
            cplx l = eval(F.lambda, p);
            bad = !std::isfinite(l.real()) || !std::isfinite(l.imag()) || std::abs(l) > kOverflowSlope;
          } catch (const DomainError&) {
            bad = true;
          }
          if (bad) out.push_back(p);
        }
  return out;
}

namespace {

double arg_step(cplx from, cplx to) { return std::arg(to / from); }

}  // namespace

int zero_count_winding(const SlopeField& F, const LeafTrace& leaf, int samples) {
  const XPath& path = leaf.path;
  cplx xs = path.at(0.0), xe = path.at(1.0);
  double scale = 1.0 + std::abs(xs) + path.length();
  if (std::abs(xe - xs) > 1e-9 * scale) throw Error("winding loop is not closed");
  cplx ys = leaf.y(0.0), ye = leaf.y(1.0);
  if (std::abs(ye - ys) > 1e-6 * (1.0 + std::abs(ys))) throw Error("leaf does not close along the loop");

  auto b_at = [&](double t) {
    cplx b = bott(F, {path.at(t), leaf.y(t)}).b;
    if (std::abs(b) < kDegenerateB) throw DegenerateMetricError("b vanishes on the winding contour");
    return b;
  };
  double total = 0.0;
  // accumulate arg change on [t0, t1], bisecting until every jump is small
  std::function<void(double, cplx, double, cplx, int)> walk = [&](double t0, cplx b0, double t1,
                                                                 cplx b1, int depth) {
    double d = arg_step(b0, b1);
    if (std::abs(d) <= M_PI / 2) {
      total += d;
      return;
    }
    if (depth > 40) throw DegenerateMetricError("b nearly vanishes on the winding contour");
    double tm = 0.5 * (t0 + t1);
    cplx bm = b_at(tm);
    walk(t0, b0, tm, bm, depth + 1);
    walk(tm, bm, t1, b1, depth + 1);
  };
  if (samples < 4) samples = 4;
  cplx prev = b_at(0.0);
  for (int k = 1; k <= samples; ++k) {
    double t = static_cast<double>(k) / samples;
    cplx cur = b_at(t);
    walk(static_cast<double>(k - 1) / samples, prev, t, cur, 0);
    prev = cur;
  }
  return static_cast<int>(std::lround(total / (2.0 * M_PI)));
}

}  // namespace semiholo
