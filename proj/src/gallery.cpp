#include "semiholo/gallery.hpp"

#include <cmath>
#include <random>

namespace semiholo {

namespace {

Box make_box(std::array<double, 8> b) {
  Box box;
  box.bounds = b;
  return box;
}

const char* kSl2Sqrt = "sqrt(1-im(y^2)/im(x))";

std::string sl2_slope_formula() {
  std::string S = kSl2Sqrt;
  std::string q = "im(y^2)/(2*im(x))";
  return "(" + q + ")*(conj(y)*" + S + "+y*(1-" + q + "))/(y*conj(y)*" + S + "+(re(y^2)-conj(y)^2*" + q +
         "))";
}

std::string sl2_first_integral_formula() {
  return std::string("(im(conj(x)*y^2)-y*conj(y)*im(x)*") + kSl2Sqrt + ")/im(y^2)";
}

}  // namespace

GalleryEntry ex_lines() {
  GalleryEntry e;
  e.label = "lines";
  e.field = SlopeField::from_formula("im(y)/im(x)", {"im(x)"}, "lines");
  e.system = lines_system();
  e.first_integral = parse("im(y)/im(x)");
  e.notes = "Im(x)dy - Im(y)dx; leaves are the complex lines with real parameters";
  e.box = make_box({-1, 1, 0.5, 2, -1, 1, -1, 1});
  return e;
}

GalleryEntry ex_parabolas() {
  GalleryEntry e;
  e.label = "parabolas";
  e.field = SlopeField::from_formula("2*x*re(y)/re(1+x^2)", {"re(1+x^2)^2"}, "parabolas");
  e.system = parabolas_system();
  e.first_integral = parse("re(y)/re(1+x^2)");
  e.notes = "Re(1+x^2)dy - 2xRe(y)dx; leaves are parabolas y = a(1+x^2) + ic, tangent to xy'' = y'";
  e.box = make_box({0.2, 0.7, -0.5, 0.5, -1, 1, -1, 1});
  return e;
}

GalleryEntry ex_pencil() {
  GalleryEntry e;
  e.label = "pencil";
  e.field = SlopeField::from_formula("y/x", {"x*conj(x)"}, "pencil");
  e.system = lines_system();
  e.first_integral = parse("y/x");
  e.notes = "holomorphic pencil of lines through the origin";
  e.box = make_box({0.2, 1, -1, 1, -1, 1, -1, 1});
  return e;
}

GalleryEntry ex_translation_motion() {
  GalleryEntry e = ex_lines();
  e.label = "translation_motion";
  e.field.label = e.label;
  e.motion = make_motion("re(y)+x*im(y)", {0.0, 1.0});
  e.notes = "holonomy phi_x(y) = Re(y) + x Im(y) based at x = i; same foliation as lines";
  return e;
}

GalleryEntry ex_motion_quadratic() {
  GalleryEntry e;
  e.label = "motion_quadratic";
  e.field = SlopeField::from_formula("2*x*(conj(y)-conj(x)^2*y)/(1-(x*conj(x))^2)",
                                     {"1-(x*conj(x))^2"}, "motion_quadratic");
  e.first_integral = parse("(y-x^2*conj(y))/(1-(x*conj(x))^2)");
  e.motion = make_motion("y+x^2*conj(y)", {0.0, 0.0});
  e.notes = "motion y + x^2 conj(y) based at 0; linear parts u = 1, v = x^2, b = 2x/(1-|x|^4)";
  e.box = make_box({-0.5, 0.5, -0.5, 0.5, -1, 1, -1, 1});
  return e;
}

GalleryEntry ex_sl2() {
  GalleryEntry e;
  e.label = "sl2";
  e.field = SlopeField::from_formula(sl2_slope_formula(), {"im(x)", "1-im(y^2)/im(x)"}, "sl2");
  e.first_integral = parse(sl2_first_integral_formula());
  e.notes =
      "real members of the dual family y = a(x-x0)/sqrt(1+a^2(x-x0)); residuals are reported, "
      "not asserted";
  e.box = make_box({-0.5, 0.5, 0.5, 2, -0.5, 0.5, -0.5, 0.5});
  e.report_only = true;
  return e;
}

std::vector<std::string> gallery_labels() {
  return {"lines", "parabolas", "pencil", "translation_motion", "motion_quadratic", "sl2"};
}

GalleryEntry gallery_entry(const std::string& label) {
  if (label == "lines") return ex_lines();
  if (label == "parabolas") return ex_parabolas();
  if (label == "pencil") return ex_pencil();
  if (label == "translation_motion") return ex_translation_motion();
  if (label == "motion_quadratic") return ex_motion_quadratic();
  if (label == "sl2") return ex_sl2();
  throw Error("unknown gallery label '" + label + "'");
}

double first_integral_residual(const SlopeField& F, const Expr& f, const CPoint& p) {
  cplx l = slope(F, p);
  WirtingerJet j = eval_jet(f, p);
  return std::abs(j.grad(kX) + l * j.grad(kY)) + std::abs(j.grad(kXbar) + std::conj(l) * j.grad(kYbar));
}

cplx sl2_curve(double a, double x0, cplx x) {
  cplx s = x - x0;
  return a * s / std::sqrt(1.0 + a * a * s);
}

namespace {

struct Sl2Sample {
  CPoint p;
  double a, x0;
};

std::vector<Sl2Sample> sl2_samples(std::size_t count, std::uint64_t seed) {
  GalleryEntry e = ex_sl2();
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> ua(0.3, 1.5), ux0(-0.5, 0.5), urx(-0.5, 0.5), uix(0.5, 2.0);
  std::vector<Sl2Sample> out;
  std::size_t draws = 0;
  while (out.size() < count && draws++ < 100000 * (count + 1)) {
    double a = ua(rng), x0 = ux0(rng);
    cplx x{urx(rng), uix(rng)};
    CPoint p{x, sl2_curve(a, x0, x)};
    if (!admissible(e.field, p)) continue;
    try {
      eval(*e.first_integral, p);
    } catch (const DomainError&) {
      continue;
    }
    out.push_back({p, a, x0});
  }
  return out;
}

}  // namespace

std::vector<CPoint> sl2_curve_points(std::size_t count, std::uint64_t seed) {
  std::vector<CPoint> out;
  for (const auto& s : sl2_samples(count, seed)) out.push_back(s.p);
  return out;
}

std::vector<CompanionResidual> check_companions(const GalleryEntry& e, std::size_t count,
                                                std::uint64_t seed) {
  std::vector<CompanionResidual> out;
  std::mt19937_64 rng(seed);
  std::vector<CPoint> pts = e.report_only ? sl2_curve_points(count, seed)
                                          : sample_admissible(e.field, e.box, count, rng);
  auto worst = [&](std::string kind, double tol, auto&& fn) {
    CompanionResidual r{std::move(kind), 0.0, tol, !e.report_only, 0};
    for (const CPoint& p : pts) {
      double v = fn(p);
      r.value = std::max(r.value, std::isnan(v) ? INFINITY : v);
      ++r.samples;
    }
    out.push_back(r);
  };
  worst("integrability", 1e-9, [&](const CPoint& p) { return integrability_residual(e.field, p); });
  worst("structural", 1e-8, [&](const CPoint& p) { return structural_residual(e.field, p); });
  if (e.system)
    worst("tangency", 1e-9, [&](const CPoint& p) { return tangency_residual(e.field, *e.system, p); });
  if (e.first_integral)
    worst("first_integral", 1e-9,
          [&](const CPoint& p) { return first_integral_residual(e.field, *e.first_integral, p); });
  if (e.motion) {
    const MotionMap& m = *e.motion;
    worst("motion_slope", 1e-8, [&](const CPoint& p) {
      return std::abs(motion_to_slope(m, p) - slope(e.field, p));
    });
    worst("motion_base", 1e-12, [&](const CPoint& p) {
      return std::abs(eval(m.phi, {m.base_x, p.y}) - p.y);
    });
  }
  if (e.report_only) {
    std::vector<Sl2Sample> ss = sl2_samples(count, seed);
    CompanionResidual recover{"first_integral_value", 0.0, 1e-9, false, 0};
    CompanionResidual member{"curve_membership", 0.0, 1e-6, false, 0};
    for (const auto& s : ss) {
      recover.value = std::max(recover.value, std::abs(eval(*e.first_integral, s.p) - s.x0));
      ++recover.samples;
      cplx x1 = s.p.x + cplx{0.05, 0.05};
      double dev;
      try {
        cplx y1 = transport(e.field, s.p.x, x1, s.p.y, 1e-12);
        dev = std::abs(y1 - sl2_curve(s.a, s.x0, x1));
      } catch (const Error&) {
        dev = INFINITY;
      }
      member.value = std::max(member.value, dev);
      ++member.samples;
    }
    out.push_back(recover);
    out.push_back(member);
  }
  return out;
}

}  // namespace semiholo
