#pragma once

#include <variant>
#include <vector>

#include "qconc/geometry.hpp"

namespace qconc {

struct Singleton {
  std::vector<double> q;
};

// Sets the second argument of D(p||q) may range over.
using Region = std::variant<HalfspaceRegion, QubitMeasurementImage, Singleton>;

struct OptOptions {
  double tol = 1e-10;
  int max_iter = 10000;
  bool q_first = false; // start from a point of A and project onto B first
};

struct OptResult {
  std::vector<double> p_star;
  std::vector<double> q_star;
  double divergence = 0.0;
  double lower_bound = 0.0; // dual certificate, divergence - lower_bound is the gap
  double log_bound = 0.0;   // -n * divergence, or -n * lower_bound when not converged
  int iterations = 0;
  bool converged = false;
};

// argmin over p in A of D(p||q)
std::vector<double> i_projection(const HalfspaceRegion& A, const std::vector<double>& q, double* multiplier = nullptr);

// argmin over q in B of D(p||q)
std::vector<double> m_projection(const Region& B, const std::vector<double>& p);

// max over lambda >= 0 is min D over A x B; any lambda gives a lower bound
double dual_lower_bound(const HalfspaceRegion& A, const Region& B, double lambda);

OptResult min_kl_between_regions(const HalfspaceRegion& A, const Region& B, long long n,
                                 const OptOptions& opt = {});

struct GridResult {
  double divergence = 0.0;
  std::vector<double> p;
  std::vector<double> q;
};

// Exhaustive search for k <= 3: regions are tested for overlap on the barycentric
// grid, otherwise pairs of boundary samples are compared.
GridResult grid_oracle(const HalfspaceRegion& A, const Region& B, int resolution = 2000);

// Stationarity residual when A and B are both halfspaces and both constraints are active.
double kkt_residual(const HalfspaceRegion& A, const HalfspaceRegion& B, const std::vector<double>& p,
                    const std::vector<double>& q);

bool region_contains(const Region& B, const std::vector<double>& q, double tol = kMembershipTol);
std::size_t region_dim(const Region& B);

} // namespace qconc
