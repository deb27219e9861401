#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <json.hpp>

#include "qconc/geometry.hpp"
#include "qconc/repcore.hpp"

namespace qconc {

// One record per check: pass iff margin >= 0.
struct CheckReport {
  std::string check;
  nlohmann::ordered_json params = nlohmann::ordered_json::object();
  double lhs = 0.0;
  double rhs = 0.0;
  double margin = 0.0;
  bool pass = true;
};

nlohmann::ordered_json to_json(const CheckReport& r);

// ---- operator inequality ----

// Random state on (C^d)^{\otimes n}, averaged over all n! permutations.
HermitianOp random_permutation_invariant_state(int n, int d, std::uint64_t seed, std::uint64_t trial);

struct Theorem1Options {
  std::int64_t max_dim = 1024;
  double tol = 1e-9; // scaled by the operator norm of the right side
  int threads = 1;
};

// Two records: "theorem1_irrep" and "theorem1_uniform"; lhs is the smallest
// eigenvalue of RHS - rho over all trials, rhs the negated threshold.
std::vector<CheckReport> check_theorem1_operator(int n, int d, int trials, std::uint64_t seed,
                                                 const Theorem1Options& opt = {});

// ---- sequential adversary ----

// Max over history dependent strategies with every conditional in conv(vertices)
// of P[type/n in A].
double dp_adversary_max(const HalfspaceRegion& A, const std::vector<std::vector<double>>& vertices, int n);
double dp_adversary_max(const HalfspaceRegion& A, const HalfspaceRegion& R, int n, int k);

// Same with the terminal event {type == m}.
double dp_type_max(const Composition& m, const std::vector<std::vector<double>>& vertices);

CheckReport check_theorem3(const HalfspaceRegion& A, const HalfspaceRegion& R, int n, int k);

// Every type of n draws; the record carries the worst ratio and the violation count.
CheckReport check_intermediate_type_bound(const HalfspaceRegion& R, int n, int k);

// ---- sweeps ----

std::vector<Composition> enumerate_compositions(int n, int k);

// f_q_irrep <= f_q_uniform and f_c_type <= f_c_uniform over the given ranges.
std::vector<CheckReport> check_lemma2_sweep(int nq_max = 60, int dq_max = 4, int nc_max = 200, int kc_max = 4);

// Dimension completeness for n <= n_max, d <= d_max; projector identities for d^n <= max_dim, d <= d_proj_max.
std::vector<CheckReport> check_schur_weyl(int n_max = 8, int d_max = 3, std::int64_t max_dim = 1024, int d_proj_max = 4,
                                          double tol = 1e-10);

std::vector<CheckReport> check_qkd_operators();

// Random sequential-bound instance: R = {p1 <= b2 p2 + b3 p3}, b_j in [0, 4]; A a nonempty halfspace.
std::pair<HalfspaceRegion, HalfspaceRegion> random_theorem3_pair(std::uint64_t seed, int n, int index);

// Named suites: lemma2, schurweyl, theorem1, theorem3, qkd-operators, all.
bool is_suite(const std::string& name);
std::vector<CheckReport> run_suite(const std::string& name, std::uint64_t seed, int threads = 1);

} // namespace qconc
