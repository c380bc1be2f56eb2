#pragma once

// Fuchsian surface groups extended into PGL3(R) through a cocycle with values
// in R^2, acting on C^2 in the affine chart z = 1.

#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "semiholo/curves.hpp"
#include "semiholo/foliation.hpp"

namespace semiholo {

using Mat3 = Eigen::Matrix3d;
using Mat3c = Eigen::Matrix3cd;
using Vec2 = Eigen::Vector2d;

/// x -> (a11 x + a13) / (a31 x + a33), determinant 1.
struct Mobius2 {
  double a11 = 1, a13 = 0, a31 = 0, a33 = 1;

  static Mobius2 identity() { return {}; }
  /// Rescaled to determinant 1; throws unless det > 0.
  Mobius2 normalized() const;
  Eigen::Matrix2d matrix() const;
  static Mobius2 from_matrix(const Eigen::Matrix2d& m);
  double det() const { return a11 * a33 - a13 * a31; }
  Mobius2 inverse() const;
  friend Mobius2 operator*(const Mobius2& a, const Mobius2& b);
};

/// Divides by the real cube root of the determinant.
Mat3 normalize(const Mat3& m);

/// [[a11, c1, a13], [0, 1, 0], [a31, c2, a33]].
Mat3 embed(const Mobius2& m, const Vec2& c);

/// Relation word over generators: +k is generator k-1, -k its inverse.
struct Presentation {
  int generators = 0;
  std::vector<int> word;

  /// a1 b1 a1^-1 b1^-1 ... ag bg ag^-1 bg^-1
  static Presentation surface(int genus);
};

using Cocycle = std::vector<Vec2>;

/// Frobenius distance of the normalized relation product from the identity.
double relation_residual(const std::vector<Mat3>& gens, const Presentation& pres);

std::vector<Mat3> embed_all(const std::vector<Mobius2>& gens, const Cocycle& c);

/// Genus-2 side pairings of the regular octagon with angle sum 2 pi, moved to
/// the upper half plane, in the order a1, b1, a2, b2.
std::vector<Mobius2> octagon_generators();

CPoint act(const Mat3& M, const CPoint& p);
CPoint act(const Mat3c& M, const CPoint& p);

/// Image of the line y = a x + b.
DualPoint act_dual(const Mat3& M, const DualPoint& L);

struct InvarianceReport {
  double max_angle = 0.0;
  std::size_t used = 0;
  std::size_t skipped = 0;
};

/// Largest projective angle between the pushed-forward leaf direction and the
/// leaf direction at the image point.
InvarianceReport invariance_residual(const Mat3c& M, const SlopeField& F,
                                     const std::vector<CPoint>& samples);
InvarianceReport invariance_residual(const Mat3& M, const SlopeField& F,
                                     const std::vector<CPoint>& samples);

/// c'(g) = c(g) + t - A(g) t.
Cocycle apply_coboundary(const Cocycle& c, const std::vector<Mobius2>& gens, const Vec2& t);

/// Linear map R^{2n} -> R^2 whose kernel is the space of cocycles compatible
/// with the relation.
Eigen::MatrixXd relation_map(const std::vector<Mobius2>& gens, const Presentation& pres);

/// Orthonormal basis (columns) of the cocycle space Z^1.
Eigen::MatrixXd cocycle_basis(const std::vector<Mobius2>& gens, const Presentation& pres);

/// Orthonormal basis (columns) of coboundaries B^1.
Eigen::MatrixXd coboundary_basis(const std::vector<Mobius2>& gens);

Eigen::VectorXd flatten(const Cocycle& c);
Cocycle unflatten(const Eigen::VectorXd& v);

/// t with apply_coboundary(c1, gens, t) = c2, or nothing when the classes differ.
std::optional<Vec2> coboundary_equiv(const Cocycle& c1, const Cocycle& c2,
                                     const std::vector<Mobius2>& gens, const Presentation& pres);
std::optional<Vec2> coboundary_equiv(const Cocycle& c1, const Cocycle& c2,
                                     const std::vector<Mobius2>& gens);

}  // namespace semiholo
