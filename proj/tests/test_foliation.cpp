#include <doctest.h>

#include <cmath>
#include <random>

#include "semiholo/gallery.hpp"
#include "semiholo/holonomy.hpp"

using namespace semiholo;

namespace {

const cplx I{0.0, 1.0};

SlopeField lines_field() { return ex_lines().field; }

// x + sum of small monomials of degree 2..3 in (x - x0, y - y0)
Expr germ(std::mt19937_64& rng, const Expr& var, const CPoint& c) {
  std::uniform_real_distribution<double> u(-0.3, 0.3);
  Expr dx = Expr::x() - Expr::constant(c.x), dy = Expr::y() - Expr::constant(c.y);
  Expr out = var;
  for (int i = 0; i <= 3; ++i)
    for (int j = 0; i + j <= 3; ++j) {
      if (i + j == 0) continue;
      cplx coef{u(rng), u(rng)};
      if (i + j == 1) coef *= 0.2;
      out = out + Expr::constant(coef) * pow(dx, i) * pow(dy, j);
    }
  return out;
}

}  // namespace

TEST_SUITE("foliation") {

TEST_CASE("integrability residual examples") {
  CHECK(integrability_residual(lines_field(), {{1, 2}, {3, 1}}) <= 1e-12);
  CHECK(integrability_residual(SlopeField::from_formula("x+y"), {{0.3, -1}, {2, 0.5}}) == 0.0);
  CHECK(std::abs(integrability_residual(SlopeField::from_formula("conj(y)"), {0.0, 1.0}) - 1.0) <= 1e-15);
}

TEST_CASE("bott data examples") {
  BottData d = bott(lines_field(), {I, 0.0});
  CHECK(std::abs(d.b - I / 2.0) <= 1e-15);
  CHECK(std::abs(d.metric_density - 0.25) <= 1e-15);
  CHECK(std::abs(bott(lines_field(), {2.0 * I, 0.0}).metric_density - 1.0 / 16.0) <= 1e-15);
  BottData h = bott(SlopeField::from_formula("x*y^2-exp(y)"), {{0.1, 0.2}, {0.3, 0.4}});
  CHECK(h.b == cplx{});
  CHECK(h.metric_density == 0.0);
}

TEST_CASE("metric density vanishes exactly with b") {
  std::mt19937_64 rng(3);
  for (const auto& label : gallery_labels()) {
    GalleryEntry e = gallery_entry(label);
    if (e.report_only) continue;
    for (const CPoint& p : sample_admissible(e.field, e.box, 50, rng)) {
      BottData d = bott(e.field, p);
      CHECK(d.metric_density == std::norm(d.b));
      CHECK((d.b == cplx{}) == (d.metric_density == 0.0));
    }
  }
  BottData z = bott(gallery_entry("motion_quadratic").field, {0.0, 0.0});
  CHECK(z.b == cplx{});
  CHECK(z.metric_density == 0.0);
}

TEST_CASE("structural residual examples") {
  CHECK(structural_residual(lines_field(), {{1, 1}, {2, 3}}) <= 1e-10);
  CHECK(structural_residual(SlopeField::from_formula("x*y+y^3"), {{0.3, 0.1}, {1, -1}}) == 0.0);
  CHECK(structural_residual(SlopeField::from_formula("conj(y)"), {0.0, 1.0}) >= 1.0 - 1e-15);
}

TEST_CASE("gallery fields satisfy the pointwise identities") {
  std::mt19937_64 rng(5);
  for (const auto& label : gallery_labels()) {
    GalleryEntry e = gallery_entry(label);
    std::vector<CPoint> pts =
        e.report_only ? sl2_curve_points(100, 1) : sample_admissible(e.field, e.box, 100, rng);
    double wi = 0, ws = 0;
    for (const CPoint& p : pts) {
      wi = std::max(wi, integrability_residual(e.field, p));
      ws = std::max(ws, structural_residual(e.field, p));
    }
    if (e.report_only) {
      MESSAGE(label << ": integrability " << wi << ", structural " << ws);
      continue;
    }
    CHECK_MESSAGE(wi <= 1e-9, label);
    CHECK_MESSAGE(ws <= 1e-8, label);
  }
}

TEST_CASE("leaf curvature is -4") {
  SlopeField F = lines_field();
  CHECK(curvature_residual(F, {I + 0.3, 0.2 * I}) <= 1e-3);
  CHECK(curvature_residual(F, {2.0 * I, 0.0}) <= 1e-3);
  CHECK(std::abs(leaf_curvature(F, {2.0 * I, 0.0}) + 4.0) <= 1e-3);
  CHECK_THROWS_AS(curvature_residual(SlopeField::from_formula("y"), {0.5, 0.5}), DegenerateMetricError);
}

TEST_CASE("sl2 slope curvature at an interior point") {
  GalleryEntry e = ex_sl2();
  CPoint p = sl2_curve_points(1, 4).front();
  CHECK(curvature_residual(e.field, p) <= 1e-2);
}

TEST_CASE("curvature on gallery fields wherever the metric is not small") {
  std::mt19937_64 rng(17);
  for (const char* label : {"lines", "parabolas", "translation_motion", "motion_quadratic"}) {
    GalleryEntry e = gallery_entry(label);
    int used = 0;
    for (int k = 0; k < 2000 && used < 15; ++k) {
      CPoint p = sample_admissible(e.field, e.box, 1, rng).front();
      if (bott(e.field, p).metric_density < 1e-2) continue;
      double r;
      try {
        r = curvature_residual(e.field, p);
      } catch (const SingularLocusError&) {
        continue;  // stencil left the admissible region
      }
      CHECK_MESSAGE(r <= 1e-3, std::string(label) << " at " << p.x << "," << p.y << " density " << bott(e.field, p).metric_density);
      ++used;
    }
    CHECK(used == 15);
  }
}

TEST_CASE("pullback law examples") {
  SlopeField F = lines_field();
  HoloMap id{Expr::x(), Expr::y()};
  CHECK(pullback_metric_residual(F, id, {I + 0.2, 0.5}) == 0.0);

  HoloMap dbl{parse("2*x"), Expr::y()};
  CPoint p{I / 2.0, 0.0};
  CHECK(pullback_metric_residual(F, dbl, p) <= 1e-9);
  // lambda~ = 2 lambda(2x, y) = Im(y) / Im(x)
  CPoint q{{0.1, 0.4}, {0.3, 0.2}};
  CHECK(std::abs(pullback_slope(F, dbl, q) - 0.2 / 0.4) <= 1e-14);

  HoloMap quad{Expr::x(), parse("y+x^2*y")};
  CHECK(pullback_metric_residual(F, quad, {I + 0.1, 0.1}) <= 1e-8);
}

TEST_CASE("pullback slope defines the pulled back leaves") {
  // Phi maps leaves of Phi^*F onto leaves of F: Y(x, y(x)) solves the F leaf ODE
  SlopeField F = lines_field();
  HoloMap phi{parse("x+0.1*y^2"), parse("y+0.2*x*y")};
  CPoint p{{0.1, 1.0}, {0.2, 0.1}};
  cplx lt = pullback_slope(F, phi, p);
  WirtingerJet X = eval_jet(phi.X, p), Y = eval_jet(phi.Y, p);
  cplx dX = X.grad(kX) + lt * X.grad(kY), dY = Y.grad(kX) + lt * Y.grad(kY);
  CHECK(std::abs(dY - slope(F, {eval(phi.X, p), eval(phi.Y, p)}) * dX) <= 1e-13);
}

TEST_CASE("pullback law for random polynomial germs") {
  std::mt19937_64 rng(99);
  for (const char* label : {"lines", "parabolas", "motion_quadratic"}) {
    GalleryEntry e = gallery_entry(label);
    int done = 0;
    while (done < 20) {
      CPoint c = sample_admissible(e.field, e.box, 1, rng).front();
      HoloMap phi{germ(rng, Expr::x(), c), germ(rng, Expr::y(), c)};
      CPoint img{eval(phi.X, c), eval(phi.Y, c)};
      if (!admissible(e.field, img)) continue;
      double r;
      try {
        r = pullback_metric_residual(e.field, phi, c);
      } catch (const DomainError&) {
        continue;
      }
      CHECK_MESSAGE(r <= 1e-8, label);
      ++done;
    }
  }
}

TEST_CASE("singular scan examples") {
  Box unit;
  SlopeField L = SlopeField::from_formula("im(y)/im(x)");
  std::vector<CPoint> s = singular_scan(L, unit, 9);
  CHECK(s.size() == 729);
  for (const CPoint& p : s) CHECK(p.x.imag() == 0.0);

  CHECK(singular_scan(SlopeField::from_formula("x"), unit, 9).empty());

  SlopeField P = SlopeField::from_formula("2*x*re(y)/re(1+x^2)");
  std::vector<CPoint> sp = singular_scan(P, unit, 9);
  std::size_t expected = 0;
  for (int i = 0; i < 9; ++i)
    for (int j = 0; j < 9; ++j) {
      double a = -1.0 + 0.25 * i, b = -1.0 + 0.25 * j;
      if (1.0 + a * a - b * b == 0.0) expected += 81;
    }
  CHECK(expected == 162);
  CHECK(sp.size() == expected);
  for (const CPoint& p : sp) CHECK((1.0 + p.x * p.x).real() == 0.0);

  SlopeField O = SlopeField::from_formula("1/(x-0.5)");
  Box b2;
  b2.bounds = {0, 1, 0, 0, 0, 0, 0, 0};
  // grid 0, 1/4, 1/2, 3/4, 1: x = 0.5 divides by zero
  CHECK(singular_scan(O, b2, 5).size() == 5 * 5 * 5);
}

TEST_CASE("winding number counts zeros of b") {
  SlopeField F = lines_field();
  LeafTrace loop = trace_leaf(F, 0.0, XPath::circle(2.0 * I, 0.5), 1e-10);
  CHECK(zero_count_winding(F, loop) == 0);

  SlopeField Q = ex_motion_quadratic().field;
  for (double r : {0.3, 0.5}) {
    LeafTrace c = trace_leaf(Q, 0.0, XPath::circle(0.0, r), 1e-10);
    CHECK(zero_count_winding(Q, c) == 1);
    CHECK(zero_count_winding(Q, c, 64) == zero_count_winding(Q, c, 128));
    CHECK(zero_count_winding(Q, c, 512) == 1);
  }
  // b is constant 1/2 along y = 0
  SlopeField C = SlopeField::from_formula("0.5*conj(y)");
  LeafTrace cc = trace_leaf(C, 0.0, XPath::circle(0.0, 1.0), 1e-10);
  CHECK(zero_count_winding(C, cc) == 0);

  LeafTrace open = trace_leaf(F, 0.0, XPath::segment(I, 2.0 * I), 1e-10);
  CHECK_THROWS_AS(zero_count_winding(F, open), Error);
}

TEST_CASE("admissibility and sampling") {
  SlopeField F = lines_field();
  CHECK(admissible(F, {I, 0.0}));
  CHECK_FALSE(admissible(F, {-I, 0.0}));
  CHECK_FALSE(admissible(F, {0.0, 0.0}));
  std::mt19937_64 a(1), b(1);
  Box box = ex_lines().box;
  auto s1 = sample_admissible(F, box, 10, a), s2 = sample_admissible(F, box, 10, b);
  for (int k = 0; k < 10; ++k) CHECK(s1[k].x == s2[k].x);
  Box bad;
  bad.bounds = {-1, 1, -2, -1, -1, 1, -1, 1};
  CHECK_THROWS_AS(sample_admissible(F, bad, 5, a), Error);
}

}  // TEST_SUITE
