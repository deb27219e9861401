#pragma once

#include <optional>
#include <string>
#include <vector>

#include "qconc/bounds.hpp"
#include "qconc/repcore.hpp"

namespace qconc {

// ---- toy estimation model ----

double m_gamma(double gamma, double r);
Eigen::Matrix2cd M_c(double gamma, double r); // 1/2 |1><1| - gamma/2 |phi_1><phi_1|

struct ToyModelParams {
  double r = 0.01;
  double gamma = 1.662;
  long long N = 1000000;
  std::optional<double> epsilon;
  std::optional<double> delta;
  double B_star = 0.0;
  double B_hat = 0.0;

  // B* = B^ = fraction * N
  static ToyModelParams preset(long long N, double B_star_fraction = 0.01);
  void validate() const;
};

// {p : p1 - gamma p2 >= m(gamma) + delta}
HalfspaceRegion toy_failure_region(double gamma, double r, double delta);

// R(g') = {p : p1 - g' p2 <= m(g')} over the admissible g'
RegionFamily toy_region_family(double r);

// g' whose boundary line touches the image Q at q
double toy_tangent_slope(double r, const std::vector<double>& q);

struct ToyResult {
  double delta = 0.0;
  LogProb log_eps = 0.0;
  std::vector<double> p_star;
  std::vector<double> q_star;
  std::optional<double> gamma_prime;
  bool converged = true;
};

ToyResult toy_epsilon(Method method, const ToyModelParams& params);
ToyResult toy_delta(Method method, const ToyModelParams& params);

// ---- three-state QKD ----

struct PBC00Operators {
  HermitianOp Pi_bit;
  HermitianOp Pi_ph;
};
PBC00Operators pbc00_operators();

struct QkdParams {
  long long N = 1000000;
  double epsilon = 0x1p-102;
  int s = 102;
  int s_prime = 50;
  double bit_error_rate = 0.01;
  std::optional<double> N_sift;     // default N/4
  std::optional<double> N_bit;      // default bit_error_rate * N/4
  std::optional<double> N_bit_star; // default N_bit
  double sift() const;
  double bit() const;
  double bit_star() const;
  void validate() const;
};

struct PhaseErrorBound {
  double U = 0.0;
  double delta = 0.0; // per-round deviation for the theorem-based methods
  LogProb log_eps = 0.0;
  bool converged = true;
};

PhaseErrorBound pbc00_phase_error_upper(Method method, const QkdParams& params);

double binary_entropy(double x);

struct KeyRate {
  double rate = 0.0;
  double U = 0.0;
  bool phase_error_overflow = false; // U > N_sift, rate is -inf
  bool converged = true;
};

KeyRate pbc00_key_rate(Method method, const QkdParams& params);
double pbc00_asymptotic_rate(double bit_error_rate);

// ---- scenario presets ----

struct ScenarioConfig {
  double r = 0.01;
  double gamma = 1.662;
  std::vector<long long> N_grid; // empty: the default grid of the figure
  std::optional<double> epsilon;
  std::optional<double> Delta;
  double B_star_fraction = 0.01;
  int s = 102;
  int s_prime = 50;
  double bit_error_rate = 0.01;
};

// throws std::invalid_argument naming the offending key
ScenarioConfig parse_scenario_config(const std::string& json_text);

std::vector<long long> log_grid(double lo, double hi, int per_decade);

} // namespace qconc
