#include "qconc/geometry.hpp"

#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

namespace qconc {

ProbVec::ProbVec(std::vector<double> p) : p_(std::move(p)) {
  if (p_.size() < 2) throw std::invalid_argument("ProbVec: need at least two outcomes");
  double s = 0.0;
  for (double x : p_) {
    if (!(x >= 0.0) || !std::isfinite(x)) throw std::invalid_argument("ProbVec: entries must be nonnegative");
    s += x;
  }
  if (std::fabs(s - 1.0) > 1e-12) throw std::invalid_argument("ProbVec: entries do not sum to one");
}

ProbVec ProbVec::normalized(std::vector<double> p) {
  double s = 0.0;
  for (double& x : p) {
    if (x < 0.0) {
      if (x < -1e-9) throw std::invalid_argument("ProbVec::normalized: negative entry");
      x = 0.0;
    }
    s += x;
  }
  if (!(s > 0.0)) throw std::invalid_argument("ProbVec::normalized: zero vector");
  for (double& x : p) x /= s;
  return ProbVec(std::move(p));
}

double kl_divergence(const std::vector<double>& p, const std::vector<double>& q) {
  if (p.size() != q.size()) throw std::invalid_argument("kl_divergence: length mismatch");
  double d = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    if (p[i] <= 0.0) continue;
    if (q[i] <= 0.0) return std::numeric_limits<double>::infinity();
    d += p[i] * std::log(p[i] / q[i]);
  }
  return d < 0.0 ? 0.0 : d;
}

HalfspaceRegion::HalfspaceRegion(std::vector<double> normal, double offset) : u(std::move(normal)), c(offset) {
  if (u.size() < 2) throw std::invalid_argument("HalfspaceRegion: need k >= 2");
  for (double x : u)
    if (!std::isfinite(x)) throw std::invalid_argument("HalfspaceRegion: non-finite normal");
  if (!std::isfinite(c)) throw std::invalid_argument("HalfspaceRegion: non-finite offset");
}

HalfspaceRegion HalfspaceRegion::at_least(std::vector<double> normal, double offset) {
  for (double& x : normal) x = -x;
  return HalfspaceRegion(std::move(normal), -offset);
}

double HalfspaceRegion::value(const std::vector<double>& p) const {
  if (p.size() != u.size()) throw std::invalid_argument("HalfspaceRegion: dimension mismatch");
  double s = 0.0;
  for (std::size_t i = 0; i < u.size(); ++i) s += u[i] * p[i];
  return s;
}

bool HalfspaceRegion::contains(const std::vector<double>& p, double tol) const {
  return value(p) <= c + tol;
}

std::vector<double> HalfspaceRegion::homogeneous_normal() const {
  std::vector<double> h = u;
  for (double& x : h) x -= c;
  return h;
}

bool HalfspaceRegion::theorem3_shaped() const {
  auto h = homogeneous_normal();
  if (!(h[0] > 0.0)) return false;
  for (std::size_t j = 1; j < h.size(); ++j)
    if (h[j] > 1e-15 * h[0]) return false;
  return true;
}

HalfspaceRegion HalfspaceRegion::theorem3_form() const {
  if (!theorem3_shaped())
    throw std::invalid_argument("HalfspaceRegion: normal is not of the form (1, -b_2, ..., -b_k) with b_j >= 0");
  auto h = homogeneous_normal();
  const double s = h[0];
  for (double& x : h) x /= s;
  for (std::size_t j = 1; j < h.size(); ++j) h[j] = std::min(h[j], 0.0);
  h[0] = 1.0;
  return HalfspaceRegion(std::move(h), 0.0);
}

bool HalfspaceRegion::nonempty() const {
  for (double x : u)
    if (x <= c + kMembershipTol) return true;
  return false;
}

std::vector<std::vector<double>> region_vertices(const HalfspaceRegion& R) {
  const std::size_t k = R.k();
  std::vector<std::vector<double>> out;
  for (std::size_t i = 0; i < k; ++i)
    if (R.u[i] <= R.c + kMembershipTol) {
      std::vector<double> v(k, 0.0);
      v[i] = 1.0;
      out.push_back(std::move(v));
    }
  for (std::size_t i = 0; i < k; ++i)
    for (std::size_t j = i + 1; j < k; ++j) {
      const double a = R.u[i] - R.c, b = R.u[j] - R.c;
      if (!((a < -kMembershipTol && b > kMembershipTol) || (a > kMembershipTol && b < -kMembershipTol))) continue;
      const double s = b / (b - a); // weight on e_i
      std::vector<double> v(k, 0.0);
      v[i] = s;
      v[j] = 1.0 - s;
      out.push_back(std::move(v));
    }
  return out;
}

HalfspaceRegion expand_region(const HalfspaceRegion& R, long long n) {
  if (n < 1) throw std::invalid_argument("expand_region: n must be positive");
  HalfspaceRegion F = R.theorem3_form();
  const double mean = std::accumulate(F.u.begin(), F.u.end(), 0.0) / static_cast<double>(F.k());
  double norm2 = 0.0;
  for (double x : F.u) norm2 += (x - mean) * (x - mean);
  F.c = std::sqrt(2.0) * std::sqrt(norm2) / static_cast<double>(n);
  return F;
}

bool neighbor_shift_lemma_check(const ProbVec& p, const ProbVec& q, const HalfspaceRegion& R, long long n) {
  (void)p;
  return expand_region(R, n).contains(q);
}

QubitMeasurementImage::QubitMeasurementImage(std::array<Eigen::Matrix2cd, 3> effects)
    : effects_(std::move(effects)) {
  Eigen::Matrix2cd total = Eigen::Matrix2cd::Zero();
  Eigen::Matrix2cd X, Y, Z;
  X << 0, 1, 1, 0;
  Y << 0, std::complex<double>(0, -1), std::complex<double>(0, 1), 0;
  Z << 1, 0, 0, -1;
  for (std::size_t i = 0; i < 3; ++i) {
    const auto& E = effects_[i];
    if ((E - E.adjoint()).cwiseAbs().maxCoeff() > 1e-12)
      throw std::invalid_argument("QubitMeasurementImage: effect is not Hermitian");
    Eigen::SelfAdjointEigenSolver<Eigen::Matrix2cd> es(E);
    if (es.eigenvalues().minCoeff() < -1e-12)
      throw std::invalid_argument("QubitMeasurementImage: effect is not positive semidefinite");
    if (std::abs((E * Y).trace()) > 1e-12)
      throw std::invalid_argument("QubitMeasurementImage: only real effects are supported");
    a_[i] = E.trace().real() / 2.0;
    B_[i] = {(E * X).trace().real() / 2.0, (E * Z).trace().real() / 2.0};
    total += E;
  }
  if ((total - Eigen::Matrix2cd::Identity()).cwiseAbs().maxCoeff() > 1e-12)
    throw std::invalid_argument("QubitMeasurementImage: effects do not sum to the identity");
}

std::vector<double> QubitMeasurementImage::image(double x, double z) const {
  std::vector<double> p(3);
  for (int i = 0; i < 3; ++i) p[i] = a_[i] + B_[i][0] * x + B_[i][1] * z;
  return p;
}

std::vector<double> QubitMeasurementImage::image(const Eigen::Matrix2cd& rho) const {
  std::vector<double> p(3);
  for (int i = 0; i < 3; ++i) p[i] = (effects_[i] * rho).trace().real();
  return p;
}

std::array<double, 2> QubitMeasurementImage::preimage(const std::vector<double>& p) const {
  if (p.size() != 3) throw std::invalid_argument("QubitMeasurementImage: expected three outcomes");
  Eigen::Matrix<double, 3, 2> B;
  Eigen::Vector3d rhs;
  for (int i = 0; i < 3; ++i) {
    B(i, 0) = B_[i][0];
    B(i, 1) = B_[i][1];
    rhs(i) = p[i] - a_[i];
  }
  Eigen::Vector2d v = (B.transpose() * B).ldlt().solve(B.transpose() * rhs);
  return {v(0), v(1)};
}

bool QubitMeasurementImage::contains(const std::vector<double>& p, double tol) const {
  if (p.size() != 3) return false;
  double s = 0.0;
  for (double x : p) {
    if (x < -tol) return false;
    s += x;
  }
  if (std::fabs(s - 1.0) > 1e-9) return false;
  auto v = preimage(p);
  auto back = image(v[0], v[1]);
  for (int i = 0; i < 3; ++i)
    if (std::fabs(back[i] - p[i]) > 1e-9) return false;
  return std::hypot(v[0], v[1]) <= 1.0 + std::max(tol, 1e-10);
}

QubitMeasurementImage toy_Q_image(double r) {
  if (!(r > 0.0 && r < 1.0)) throw std::invalid_argument("toy_Q_image: r must lie in (0, 1)");
  Eigen::Vector2cd e0(1, 0), e1(0, 1), phi0(std::sqrt(1 - r), std::sqrt(r)), phi1(std::sqrt(r), -std::sqrt(1 - r));
  std::array<Eigen::Matrix2cd, 3> E;
  E[0] = 0.5 * e1 * e1.adjoint();
  E[1] = 0.5 * phi1 * phi1.adjoint();
  E[2] = 0.5 * (e0 * e0.adjoint() + phi0 * phi0.adjoint());
  return QubitMeasurementImage(E);
}

} // namespace qconc
