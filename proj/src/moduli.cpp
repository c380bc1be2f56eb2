#include "semiholo/moduli.hpp"

#include <cmath>

namespace semiholo {

Mobius2 Mobius2::normalized() const {
  double d = det();
  if (!(d > 0)) throw Error("Mobius matrix must have positive determinant");
  double s = 1.0 / std::sqrt(d);
  return {a11 * s, a13 * s, a31 * s, a33 * s};
}

Eigen::Matrix2d Mobius2::matrix() const {
  Eigen::Matrix2d m;
  m << a11, a13, a31, a33;
  return m;
}

Mobius2 Mobius2::from_matrix(const Eigen::Matrix2d& m) { return {m(0, 0), m(0, 1), m(1, 0), m(1, 1)}; }

Mobius2 Mobius2::inverse() const {
  double d = det();
  return {a33 / d, -a13 / d, -a31 / d, a11 / d};
}

Mobius2 operator*(const Mobius2& a, const Mobius2& b) {
  return Mobius2::from_matrix(a.matrix() * b.matrix());
}

Mat3 normalize(const Mat3& m) {
  double d = m.determinant();
  if (d == 0.0 || !std::isfinite(d)) throw Error("projective matrix is not invertible");
  return m / std::cbrt(d);
}

Mat3 embed(const Mobius2& m, const Vec2& c) {
  Mat3 M;
  M << m.a11, c(0), m.a13, 0.0, 1.0, 0.0, m.a31, c(1), m.a33;
  return normalize(M);
}

Presentation Presentation::surface(int genus) {
  if (genus < 1) throw std::invalid_argument("genus must be positive");
  Presentation p;
  p.generators = 2 * genus;
  for (int i = 0; i < genus; ++i) {
    int a = 2 * i + 1, b = 2 * i + 2;
    p.word.insert(p.word.end(), {a, b, -a, -b});
  }
  return p;
}

namespace {

void check_presentation(std::size_t count, const Presentation& pres) {
  if (static_cast<int>(count) != pres.generators)
    throw std::invalid_argument("generator count does not match the presentation");
  if (pres.word.empty()) throw std::invalid_argument("relation word is empty");
  for (int w : pres.word)
    if (w == 0 || std::abs(w) > pres.generators) throw std::invalid_argument("relation letter out of range");
}

}  // namespace

double relation_residual(const std::vector<Mat3>& gens, const Presentation& pres) {
  check_presentation(gens.size(), pres);
  std::vector<Mat3> inv;
  for (const Mat3& g : gens) {
    if (std::abs(g.determinant()) < 1e-300) throw Error("generator is not invertible");
    inv.push_back(g.inverse());
  }
  Mat3 P = Mat3::Identity();
  for (int w : pres.word) P = P * (w > 0 ? gens[w - 1] : inv[-w - 1]);
  return (normalize(P) - Mat3::Identity()).norm();
}

std::vector<Mat3> embed_all(const std::vector<Mobius2>& gens, const Cocycle& c) {
  if (gens.size() != c.size()) throw std::invalid_argument("cocycle length does not match generators");
  std::vector<Mat3> out;
  for (std::size_t k = 0; k < gens.size(); ++k) out.push_back(embed(gens[k], c[k]));
  return out;
}

std::vector<Mobius2> octagon_generators() {
  using C2 = Eigen::Matrix2cd;
  const cplx I{0.0, 1.0};
  const double rho = std::acosh(1.0 / std::tan(M_PI / 8));
  C2 tau;
  tau << std::cosh(rho), std::sinh(rho), std::sinh(rho), std::cosh(rho);
  auto rot = [&](double th) {
    C2 r = C2::Zero();
    r(0, 0) = std::exp(I * (th / 2));
    r(1, 1) = std::exp(-I * (th / 2));
    return r;
  };
  auto mid = [](int k) { return (2 * k + 1) * M_PI / 8; };
  // side j to side i of the octagon in the disc
  auto pairing = [&](int j, int i) { return C2(rot(mid(i)) * tau * rot(M_PI - mid(j))); };
  C2 K;
  K << I, I, -1.0, 1.0;
  C2 Kinv = K.inverse();
  auto to_half_plane = [&](const C2& m) {
    C2 h = K * m * Kinv;
    Eigen::Matrix2d r = h.real();
    return Mobius2::from_matrix(r).normalized();
  };
  Mobius2 a = to_half_plane(pairing(2, 0));
  Mobius2 b = to_half_plane(pairing(3, 1));
  Mobius2 c = to_half_plane(pairing(6, 4));
  Mobius2 d = to_half_plane(pairing(7, 5));
  return {a, b.inverse(), c, d.inverse()};
}

CPoint act(const Mat3& M, const CPoint& p) {
  Mat3c Mc = M.cast<cplx>();
  return act(Mc, p);
}

CPoint act(const Mat3c& M, const CPoint& p) {
  cplx D = M(2, 0) * p.x + M(2, 1) * p.y + M(2, 2);
  if (D == cplx{}) throw Error("point is sent to infinity");
  return {(M(0, 0) * p.x + M(0, 1) * p.y + M(0, 2)) / D, (M(1, 0) * p.x + M(1, 1) * p.y + M(1, 2)) / D};
}

DualPoint act_dual(const Mat3& M, const DualPoint& L) {
  std::vector<CPoint> images;
  for (double x = 0.0; images.size() < 2 && x < 8.0; x += 1.0) {
    try {
      images.push_back(act(M, {x, L.a * x + L.b}));
    } catch (const Error&) {
    }
  }
  if (images.size() < 2) throw Error("line is sent to infinity");
  cplx dx = images[1].x - images[0].x;
  if (std::abs(dx) < 1e-300) throw Error("image line is vertical");
  cplx a = (images[1].y - images[0].y) / dx;
  return {a, images[0].y - a * images[0].x};
}

InvarianceReport invariance_residual(const Mat3c& M, const SlopeField& F,
                                     const std::vector<CPoint>& samples) {
  InvarianceReport rep;
  for (const CPoint& p : samples) {
    if (!admissible(F, p)) {
      ++rep.skipped;
      continue;
    }
    CPoint q;
    try {
      q = act(M, p);
    } catch (const Error&) {
      ++rep.skipped;
      continue;
    }
    if (!admissible(F, q)) {
      ++rep.skipped;
      continue;
    }
    cplx D = M(2, 0) * p.x + M(2, 1) * p.y + M(2, 2);
    cplx N[2] = {M(0, 0) * p.x + M(0, 1) * p.y + M(0, 2), M(1, 0) * p.x + M(1, 1) * p.y + M(1, 2)};
    cplx lam = slope(F, p);
    cplx w[2];
    for (int k = 0; k < 2; ++k) {
      cplx jx = (M(k, 0) * D - N[k] * M(2, 0)) / (D * D);
      cplx jy = (M(k, 1) * D - N[k] * M(2, 1)) / (D * D);
      w[k] = jx + jy * lam;
    }
    cplx s2 = slope(F, q);
    double wn = std::sqrt(std::norm(w[0]) + std::norm(w[1]));
    double angle = std::abs(w[0] * s2 - w[1]) / (wn * std::sqrt(1.0 + std::norm(s2)));
    rep.max_angle = std::max(rep.max_angle, angle);
    ++rep.used;
  }
  return rep;
}

InvarianceReport invariance_residual(const Mat3& M, const SlopeField& F,
                                     const std::vector<CPoint>& samples) {
  return invariance_residual(Mat3c(M.cast<cplx>()), F, samples);
}

Cocycle apply_coboundary(const Cocycle& c, const std::vector<Mobius2>& gens, const Vec2& t) {
  if (c.size() != gens.size()) throw std::invalid_argument("cocycle length does not match generators");
  Cocycle out;
  for (std::size_t k = 0; k < c.size(); ++k) out.push_back(c[k] + t - gens[k].matrix() * t);
  return out;
}

Eigen::MatrixXd relation_map(const std::vector<Mobius2>& gens, const Presentation& pres) {
  check_presentation(gens.size(), pres);
  const int n = static_cast<int>(gens.size());
  Eigen::MatrixXd R = Eigen::MatrixXd::Zero(2, 2 * n);
  Eigen::Matrix2d P = Eigen::Matrix2d::Identity();
  // c(gh) = c(g) + A(g) c(h), c(g^-1) = -A(g)^-1 c(g)
  for (int w : pres.word) {
    int k = std::abs(w) - 1;
    Eigen::Matrix2d A = gens[k].matrix();
    if (w > 0) {
      R.block(0, 2 * k, 2, 2) += P;
      P = P * A;
    } else {
      Eigen::Matrix2d Ainv = A.inverse();
      R.block(0, 2 * k, 2, 2) -= P * Ainv;
      P = P * Ainv;
    }
  }
  return R;
}

Eigen::MatrixXd cocycle_basis(const std::vector<Mobius2>& gens, const Presentation& pres) {
  Eigen::MatrixXd R = relation_map(gens, pres);
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(R, Eigen::ComputeFullV);
  const auto& sv = svd.singularValues();
  int rank = 0;
  for (int i = 0; i < sv.size(); ++i)
    if (sv(i) > 1e-10 * std::max(1.0, sv(0))) ++rank;
  return svd.matrixV().rightCols(R.cols() - rank);
}

Eigen::MatrixXd coboundary_basis(const std::vector<Mobius2>& gens) {
  const int n = static_cast<int>(gens.size());
  Eigen::MatrixXd B(2 * n, 2);
  for (int k = 0; k < n; ++k) B.block(2 * k, 0, 2, 2) = Eigen::Matrix2d::Identity() - gens[k].matrix();
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(B, Eigen::ComputeThinU);
  const auto& sv = svd.singularValues();
  int rank = 0;
  for (int i = 0; i < sv.size(); ++i)
    if (sv(i) > 1e-10 * std::max(1.0, sv(0))) ++rank;
  return svd.matrixU().leftCols(rank);
}

Eigen::VectorXd flatten(const Cocycle& c) {
  Eigen::VectorXd v(2 * c.size());
  for (std::size_t k = 0; k < c.size(); ++k) v.segment<2>(2 * k) = c[k];
  return v;
}

Cocycle unflatten(const Eigen::VectorXd& v) {
  Cocycle c;
  for (Eigen::Index k = 0; 2 * k + 1 < v.size(); ++k) c.push_back(v.segment<2>(2 * k));
  return c;
}

std::optional<Vec2> coboundary_equiv(const Cocycle& c1, const Cocycle& c2,
                                     const std::vector<Mobius2>& gens, const Presentation& pres) {
  constexpr double kTol = 1e-8;
  if (c1.size() != gens.size() || c2.size() != gens.size())
    throw std::invalid_argument("cocycle length does not match generators");
  for (const Cocycle* c : {&c1, &c2})
    if (relation_residual(embed_all(gens, *c), pres) > kTol) throw Error("inconsistent input cocycles");
  const int n = static_cast<int>(gens.size());
  Eigen::MatrixXd B(2 * n, 2);
  Eigen::VectorXd rhs(2 * n);
  for (int k = 0; k < n; ++k) {
    B.block(2 * k, 0, 2, 2) = Eigen::Matrix2d::Identity() - gens[k].matrix();
    rhs.segment<2>(2 * k) = c2[k] - c1[k];
  }
  Vec2 t = B.colPivHouseholderQr().solve(rhs);
  if ((B * t - rhs).norm() > kTol) return std::nullopt;
  return t;
}

std::optional<Vec2> coboundary_equiv(const Cocycle& c1, const Cocycle& c2,
                                     const std::vector<Mobius2>& gens) {
  return coboundary_equiv(c1, c2, gens, Presentation::surface(static_cast<int>(gens.size()) / 2));
}

}  // namespace semiholo
