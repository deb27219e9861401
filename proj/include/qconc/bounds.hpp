#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "qconc/optimizer.hpp"

namespace qconc {

// Natural log of a failure probability, always <= 0.
using LogProb = double;

enum class Method { azuma, kato, quantum_perm, classical_iidmeas, iid };

const char* method_name(Method m);
Method parse_method(const std::string& s); // accepts the names above plus "quantum", "classical"

struct BoundSpec {
  Method method = Method::azuma;
  long long N = 1;
  std::optional<double> epsilon;
  std::optional<double> delta;
  double gamma = 1.0;
  double r = 0.01;
  double B_star = 0.0;
  double B_hat = 0.0;
  void validate() const; // exactly one of epsilon/delta, N >= 1
};

double azuma_delta(double gamma, long long N, double eps);
LogProb azuma_epsilon(double gamma, long long N, double delta);

struct KatoParams {
  double alpha = 0.0;
  double beta = 0.0;
};

// alpha*, beta* with L = ln(1/eps_half); the union bound passes eps_half = eps/2
KatoParams kato_alpha_beta(double B_star, long long N, double eps_half);

double kato_delta(double gamma, long long N, double eps, double B_star, double B_hat);
double kato_delta(double gamma, long long N, double eps, double B_hat, const KatoParams& ab);

double kato_xi(double B_hat, double B_star, long long N, double delta_prime);

struct KatoTerms {
  double log_kato;  // Kato exponent for b
  double log_azuma; // Azuma exponent for a with the remaining deviation
  bool feasible;
};
KatoTerms kato_epsilon_terms(double gamma, long long N, double delta, double B_star, double B_hat,
                             double delta_prime);

struct KatoEpsilon {
  LogProb log_eps;
  double delta_prime;
};
KatoEpsilon kato_epsilon(double gamma, long long N, double delta, double B_star, double B_hat);

struct BoundValue {
  LogProb log_eps = 0.0;
  double divergence = 0.0; // min D(p||q) behind the exponent
  std::vector<double> p_star;
  std::vector<double> q_star;
  double family_param = 0.0; // chosen member of a region family
  bool converged = true;
};

BoundValue sanov_iid_epsilon(const HalfspaceRegion& A, const Region& Q, long long N,
                             const OptOptions& opt = {});
BoundValue quantum_perm_epsilon(const HalfspaceRegion& A, const Region& Q, long long N, int d,
                                const OptOptions& opt = {});

// One-parameter family of regions R(t), t in [lo, hi]; lo == hi is a fixed region.
struct RegionFamily {
  std::function<HalfspaceRegion(double)> member;
  double lo = 0.0;
  double hi = 0.0;
  std::optional<double> hint; // start of the local search; a coarse scan is used without it

  static RegionFamily fixed(const HalfspaceRegion& R);
};

BoundValue classical_iidmeas_epsilon(const HalfspaceRegion& A, const RegionFamily& R, long long N, int k,
                                     const OptOptions& opt = {});

// Smallest delta in [lo, hi] with log_eps(delta) <= target, by bisection on a nonincreasing map.
double invert_delta(const std::function<LogProb(double)>& log_eps, LogProb target, double lo, double hi,
                    int iterations = 60);

} // namespace qconc
