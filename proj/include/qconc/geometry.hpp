#pragma once

#include <array>
#include <vector>

#include "qconc/repcore.hpp"

namespace qconc {

inline constexpr double kMembershipTol = 1e-12;

class ProbVec {
public:
  explicit ProbVec(std::vector<double> p);
  // Clips tiny negatives and rescales; for optimizer output.
  static ProbVec normalized(std::vector<double> p);

  const std::vector<double>& values() const { return p_; }
  double operator[](std::size_t i) const { return p_[i]; }
  std::size_t size() const { return p_.size(); }

private:
  std::vector<double> p_;
};

double kl_divergence(const std::vector<double>& p, const std::vector<double>& q);
inline double kl_divergence(const ProbVec& p, const ProbVec& q) {
  return kl_divergence(p.values(), q.values());
}

// {p in the simplex : u.p <= c}
struct HalfspaceRegion {
  std::vector<double> u;
  double c = 0.0;

  HalfspaceRegion() = default;
  HalfspaceRegion(std::vector<double> normal, double offset);
  // {p : u.p >= c}
  static HalfspaceRegion at_least(std::vector<double> normal, double offset);

  std::size_t k() const { return u.size(); }
  double value(const std::vector<double>& p) const;
  bool contains(const std::vector<double>& p, double tol = kMembershipTol) const;
  bool contains(const ProbVec& p, double tol = kMembershipTol) const { return contains(p.values(), tol); }

  // u - c*1, which describes the same set on the simplex with zero offset
  std::vector<double> homogeneous_normal() const;
  // homogeneous normal with first entry positive and all others nonpositive
  bool theorem3_shaped() const;
  // same set as {u'.p <= 0} with u' = (1, -b_2, ..., -b_k); throws unless theorem3_shaped
  HalfspaceRegion theorem3_form() const;
  bool nonempty() const;
};

// Vertices of the region intersected with the simplex.
std::vector<std::vector<double>> region_vertices(const HalfspaceRegion& R);

// Expanded form of R with the offset sqrt(2)*|u - (v.u)v|/n, v = 1/sqrt(k).
HalfspaceRegion expand_region(const HalfspaceRegion& R, long long n);

bool neighbor_shift_lemma_check(const ProbVec& p, const ProbVec& q, const HalfspaceRegion& R, long long n);

// Outcome distribution of a three outcome qubit measurement as an affine function
// of the Bloch vector (x, z); the effects are real so y does not enter.
class QubitMeasurementImage {
public:
  explicit QubitMeasurementImage(std::array<Eigen::Matrix2cd, 3> effects);

  const std::array<Eigen::Matrix2cd, 3>& effects() const { return effects_; }
  std::vector<double> image(double x, double z) const;
  std::vector<double> image(const Eigen::Matrix2cd& rho) const;
  std::vector<double> boundary(double theta) const { return image(std::cos(theta), std::sin(theta)); }
  // Bloch coordinates whose image is p (ignores the sum constraint).
  std::array<double, 2> preimage(const std::vector<double>& p) const;
  bool contains(const std::vector<double>& p, double tol = kMembershipTol) const;

  const std::array<double, 3>& offset() const { return a_; }
  const std::array<std::array<double, 2>, 3>& slope() const { return B_; }

private:
  std::array<Eigen::Matrix2cd, 3> effects_;
  std::array<double, 3> a_{};
  std::array<std::array<double, 2>, 3> B_{};
};

QubitMeasurementImage toy_Q_image(double r);

} // namespace qconc
