#pragma once

// Reference foliations with their companion data.

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "semiholo/curves.hpp"
#include "semiholo/holonomy.hpp"

namespace semiholo {

struct GalleryEntry {
  std::string label;
  SlopeField field;
  std::optional<CurveSystem2> system;
  std::optional<Expr> first_integral;
  std::optional<MotionMap> motion;
  std::string notes;
  Box box;                   // default sampling region
  bool report_only = false;  // companion residuals are measured, not asserted
};

GalleryEntry ex_lines();
GalleryEntry ex_parabolas();
GalleryEntry ex_pencil();
GalleryEntry ex_translation_motion();
GalleryEntry ex_motion_quadratic();
GalleryEntry ex_sl2();

std::vector<std::string> gallery_labels();
/// Throws Error for unknown labels.
GalleryEntry gallery_entry(const std::string& label);

/// |d_F f| + |dbar_F f|; zero iff f is constant along the leaf through p.
double first_integral_residual(const SlopeField& F, const Expr& f, const CPoint& p);

struct CompanionResidual {
  std::string kind;
  double value = 0.0;      // worst value over the samples
  double tolerance = 0.0;
  bool asserted = true;
  std::size_t samples = 0;

  bool passed() const { return !asserted || value <= tolerance; }
};

/// Residuals of every attached companion at `count` admissible points.
std::vector<CompanionResidual> check_companions(const GalleryEntry& e, std::size_t count = 20,
                                                std::uint64_t seed = 0);

/// Points (x, y) on the curves y = a (x - x0) / sqrt(1 + a^2 (x - x0)) with
/// real a, x0 that fall in the admissible region of the sl2 entry.
std::vector<CPoint> sl2_curve_points(std::size_t count, std::uint64_t seed);

/// Returns y on the curve with parameters (a, x0) over x.
cplx sl2_curve(double a, double x0, cplx x);

}  // namespace semiholo
