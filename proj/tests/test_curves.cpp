#include <doctest.h>

#include <cmath>
#include <random>

#include "semiholo/curves.hpp"
#include "semiholo/gallery.hpp"
#include "semiholo/holonomy.hpp"

using namespace semiholo;

namespace {

const cplx I{0.0, 1.0};

// Im(y)/Im(x) plus 0.1 psi(4(Re x - 0.2)): smooth, vanishes to infinite order at the
// edge of its support
SlopeField bumped_lines() {
  return SlopeField::from_formula("im(y)/im(x)+0.1*bump(4*(x-0.2))", {"im(x)"}, "bumped");
}

}  // namespace

TEST_SUITE("curves") {

TEST_CASE("system constructors") {
  CHECK(lines_system()(0.3, -1.0, 2.0) == cplx{});
  CHECK(sl2_system()(1.0, 0.0, 1.0) == cplx{1.0});
  CHECK(parabolas_system()(2.0, 5.0, 4.0) == cplx{2.0});
  CHECK(lines_system().label == "lines");
  CHECK(parabolas_system().label == "parabolas");
  CHECK(sl2_system().label == "sl2");
  CHECK_THROWS_AS(CurveSystem2::from_formula("conj(p)", "bad"), Error);
}

TEST_CASE("jet-2 lifts") {
  Jet2Point a = jet2_lift(ex_lines().field, {I, I});
  CHECK(std::abs(a.l1 - 1.0) <= 1e-15);
  CHECK(std::abs(a.l2) <= 1e-15);
  Jet2Point b = jet2_lift(SlopeField::from_formula("y"), {0.0, 2.0});
  CHECK(b.l1 == cplx{2.0});
  CHECK(b.l2 == cplx{2.0});
  SlopeField P = ex_parabolas().field;
  for (cplx x : {cplx{0.3, 0.2}, cplx{0.5, -0.4}}) {
    Jet2Point c = jet2_lift(P, {x, 1.0 + x * x});
    CHECK(std::abs(c.l2 * x - c.l1) <= 1e-10);
  }
}

TEST_CASE("tangency residual examples") {
  SlopeField L = ex_lines().field;
  CHECK(tangency_residual(L, CurveSystem2::from_formula("p", "wrong"), {I, I}) ==
        doctest::Approx(1.0).epsilon(1e-14));
  std::mt19937_64 rng(1);
  double wl = 0, wp = 0;
  for (const CPoint& p : sample_admissible(L, ex_lines().box, 500, rng))
    wl = std::max(wl, tangency_residual(L, lines_system(), p));
  GalleryEntry P = ex_parabolas();
  for (const CPoint& p : sample_admissible(P.field, P.box, 500, rng))
    wp = std::max(wp, tangency_residual(P.field, parabolas_system(), p));
  CHECK(wl <= 1e-10);
  CHECK(wp <= 1e-9);
}

TEST_CASE("gallery fields are tangent to their systems") {
  std::mt19937_64 rng(2);
  for (const auto& label : gallery_labels()) {
    GalleryEntry e = gallery_entry(label);
    if (!e.system) continue;
    double w = 0;
    for (const CPoint& p : sample_admissible(e.field, e.box, 500, rng))
      w = std::max(w, tangency_residual(e.field, *e.system, p));
    CHECK_MESSAGE(w <= 1e-9, label);
  }
}

TEST_CASE("semirank consistency") {
  std::mt19937_64 rng(3);
  GalleryEntry L = ex_lines();
  auto lines_pts = clustered_samples(L.field, L.box, 10000, 1e-3, rng);
  SemirankReport r = semirank2_consistency(L.field, lines_pts, 1e-3);
  CHECK_FALSE(r.vacuous);
  CHECK(r.groups > 100);
  CHECK(r.statistic <= 1e-2);

  // holomorphic slopes whose l2 is affine in (x, y, l1)
  for (const char* f : {"y", "2*y+x", "0.5*i*y-3"}) {
    SlopeField H = SlopeField::from_formula(f, {}, "holomorphic");
    auto hp = clustered_samples(H, L.box, 2000, 1e-3, rng);
    SemirankReport rh = semirank2_consistency(H, hp, 1e-3);
    CHECK_FALSE(rh.vacuous);
    CHECK_MESSAGE(rh.statistic <= 1e-12, f);
  }
  // a generic holomorphic slope is consistent in the limit: the statistic is O(r)
  SlopeField G = SlopeField::from_formula("y*x+y^2/4", {}, "holomorphic");
  double prev = INFINITY;
  for (double r : {1e-2, 1e-3, 1e-4}) {
    auto gp = clustered_samples(G, L.box, 2000, r, rng);
    double st = semirank2_consistency(G, gp, r).statistic;
    CHECK(st <= 0.1 * r);
    CHECK(st <= prev / 5.0);
    prev = st;
  }

  SlopeField B = bumped_lines();
  Box near;
  near.bounds = {0.15, 0.5, 0.5, 1.5, -1, 1, -1, 1};
  auto bp = clustered_samples(B, near, 10000, 1e-3, rng);
  SemirankReport rb = semirank2_consistency(B, bp, 1e-3);
  CHECK(rb.statistic >= 0.5);

  // sparse uniform samples never collide
  auto sparse = sample_admissible(L.field, L.box, 200, rng);
  SemirankReport rv = semirank2_consistency(L.field, sparse, 1e-6);
  CHECK(rv.vacuous);
  CHECK(rv.groups == 0);
  CHECK_THROWS_AS(semirank2_consistency(L.field, std::vector<CPoint>(50, CPoint{I, 0.0}), 1e-3),
                  std::invalid_argument);
}

TEST_CASE("line duals") {
  SlopeField L = ex_lines().field;
  DualPoint d = line_dual(L, {I, I});
  CHECK(std::abs(d.a - 1.0) <= 1e-15);
  CHECK(std::abs(d.b) <= 1e-15);
  DualPoint z = line_dual(L, {{0.3, 1.2}, 0.0});
  CHECK(z.a == cplx{});
  CHECK(z.b == cplx{});
  std::mt19937_64 rng(5);
  for (const CPoint& p : sample_admissible(L, ex_lines().box, 200, rng)) {
    DualPoint q = line_dual(L, p);
    CHECK(std::abs(q.a.imag()) <= 1e-9);
    CHECK(std::abs(q.b.imag()) <= 1e-9);
    CHECK(std::abs(p.y - q.a * p.x - q.b) <= 4e-16 * (1.0 + std::abs(p.y) + std::abs(q.a * p.x)));
  }
  CHECK_THROWS_AS(line_dual(ex_parabolas().field, {{0.3, 0.1}, {0.5, 0.2}}), TangencyError);
}

TEST_CASE("line duals are constant along leaves") {
  std::mt19937_64 rng(6);
  for (const char* label : {"lines", "pencil"}) {
    GalleryEntry e = gallery_entry(label);
    for (const CPoint& p : sample_admissible(e.field, e.box, 20, rng)) {
      std::uniform_real_distribution<double> re(e.box.lo(0), e.box.hi(0)), im(e.box.lo(1), e.box.hi(1));
      cplx x1{re(rng), im(rng)};
      cplx y1 = transport(e.field, p.x, x1, p.y, 1e-10);
      DualPoint a = line_dual(e.field, p), b = line_dual(e.field, {x1, y1});
      CHECK_MESSAGE(std::abs(a.a - b.a) + std::abs(a.b - b.b) <= 1e-7, label);
    }
  }
}

TEST_CASE("dual surface samples") {
  Box unit;
  auto pts = dual_surface_sample(ex_lines().field, unit, 7);
  CHECK_FALSE(pts.empty());
  for (const DualPoint& d : pts) {
    CHECK(std::abs(d.a.imag()) <= 1e-9);
    CHECK(std::abs(d.b.imag()) <= 1e-9);
  }
  for (std::size_t k = 1; k < pts.size(); ++k) {
    auto key = [](const DualPoint& d) {
      return std::array<double, 4>{d.a.real(), d.a.imag(), d.b.real(), d.b.imag()};
    };
    CHECK(key(pts[k - 1]) < key(pts[k]));
  }
  auto pencil = dual_surface_sample(ex_pencil().field, unit, 7);
  CHECK_FALSE(pencil.empty());
  for (const DualPoint& d : pencil) CHECK(std::abs(d.b) <= 1e-12);
  SlopeField none = SlopeField::from_formula("0", {"-1"});
  CHECK(dual_surface_sample(none, unit, 5).empty());
}

TEST_CASE("envelope tangency") {
  RealSurface plane = real_plane();
  CHECK(envelope_tangency({0.5, -0.25}, plane));
  CHECK(envelope_tangency({-1.0, 0.1}, plane));
  CHECK_FALSE(envelope_tangency({I, 0.0}, plane));
  RealSurface line = complex_line(2.0, 0.5);
  CHECK_FALSE(envelope_tangency({-1.0, 0.3}, line));
  CHECK_FALSE(envelope_tangency({I, {0.1, 0.2}}, line));
  // the same complex line is degenerate everywhere
  CHECK(envelope_tangency({2.0, 0.5}, line));
  CHECK_THROWS_AS(envelope_tangency({0.0, 10.0}, plane), Error);
}

TEST_CASE("sl2 dual family curves solve the leaf equation") {
  GalleryEntry e = ex_sl2();
  std::mt19937_64 rng(8);
  std::uniform_real_distribution<double> ua(0.3, 1.5), ux0(-0.5, 0.5);
  int done = 0;
  for (int k = 0; k < 200 && done < 20; ++k) {
    double a = ua(rng), x0 = ux0(rng);
    cplx x{ux0(rng), 1.0};
    cplx x1 = x + cplx{0.1, 0.1};
    CPoint p{x, sl2_curve(a, x0, x)};
    if (!admissible(e.field, p) || !admissible(e.field, {x1, sl2_curve(a, x0, x1)})) continue;
    cplx y1 = transport(e.field, x, x1, p.y, 1e-12);
    CHECK(std::abs(y1 - sl2_curve(a, x0, x1)) <= 1e-6);
    ++done;
  }
  CHECK(done == 20);
}

TEST_CASE("csv output") {
  std::string s = to_csv(std::vector<DualPoint>{{1.0, {0.0, 0.5}}});
  CHECK(s == "re_a,im_a,re_b,im_b\n1,0,0,0.5\n");
}

}  // TEST_SUITE
