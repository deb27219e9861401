#include "qconc/verify.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <map>
#include <numeric>
#include <random>
#include <stdexcept>
#include <thread>

#include "qconc/coeffs.hpp"
#include "qconc/optimizer.hpp"
#include "qconc/scenarios.hpp"

namespace qconc {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double min_eig(const HermitianOp& M) {
  Eigen::SelfAdjointEigenSolver<HermitianOp> es(M, Eigen::EigenvaluesOnly);
  return es.eigenvalues().minCoeff();
}

double op_norm(const HermitianOp& M) {
  Eigen::SelfAdjointEigenSolver<HermitianOp> es(M, Eigen::EigenvaluesOnly);
  return es.eigenvalues().cwiseAbs().maxCoeff();
}

std::int64_t ipow(int d, int n) {
  std::int64_t v = 1;
  for (int i = 0; i < n; ++i) v *= d;
  return v;
}

void for_each_composition(int n, int k, const std::function<void(const std::vector<int>&)>& f) {
  std::vector<int> m(k, 0);
  std::function<void(int, int)> rec = [&](int i, int left) {
    if (i == k - 1) {
      m[i] = left;
      f(m);
      return;
    }
    for (int a = left; a >= 0; --a) {
      m[i] = a;
      rec(i + 1, left - a);
    }
  };
  if (k >= 1) rec(0, n);
}

CheckReport make(std::string name, double lhs, double rhs, double margin) {
  CheckReport r;
  r.check = std::move(name);
  r.lhs = lhs;
  r.rhs = rhs;
  r.margin = margin;
  r.pass = margin >= 0.0;
  return r;
}

// numbers leave the JSON layer as null when not finite
nlohmann::ordered_json num(double x) {
  if (std::isfinite(x)) return x;
  return nullptr;
}

} // namespace

nlohmann::ordered_json to_json(const CheckReport& r) {
  nlohmann::ordered_json j;
  j["check"] = r.check;
  j["params"] = r.params;
  j["lhs"] = num(r.lhs);
  j["rhs"] = num(r.rhs);
  j["margin"] = num(r.margin);
  j["pass"] = r.pass;
  return j;
}

HermitianOp random_permutation_invariant_state(int n, int d, std::uint64_t seed, std::uint64_t trial) {
  if (n < 1 || d < 1) throw std::invalid_argument("random state: n and d must be positive");
  const auto D = static_cast<Eigen::Index>(ipow(d, n));
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(trial), static_cast<std::uint32_t>(trial >> 32)};
  std::mt19937_64 rng(seq);
  std::normal_distribution<double> g;
  Eigen::MatrixXcd G(D, D);
  for (Eigen::Index j = 0; j < D; ++j)
    for (Eigen::Index i = 0; i < D; ++i) G(i, j) = {g(rng), g(rng)};
  HermitianOp rho = G * G.adjoint();
  rho /= rho.trace().real();
  std::vector<int> perm(n);
  std::iota(perm.begin(), perm.end(), 0);
  HermitianOp acc = HermitianOp::Zero(D, D);
  int count = 0;
  do {
    const HermitianOp P = permutation_operator(perm, d);
    acc += P * rho * P.adjoint();
    ++count;
  } while (std::next_permutation(perm.begin(), perm.end()));
  acc /= static_cast<double>(count);
  return 0.5 * (acc + acc.adjoint());
}

std::vector<CheckReport> check_theorem1_operator(int n, int d, int trials, std::uint64_t seed,
                                                 const Theorem1Options& opt) {
  if (n < 1 || d < 1 || trials < 1) throw std::invalid_argument("theorem1: n, d and trials must be positive");
  if (ipow(d, n) > opt.max_dim) throw std::invalid_argument("theorem1: d^n exceeds the size cap");
  const auto projectors = schur_weyl_projectors(d, n, {opt.max_dim});
  std::vector<HermitianOp> twirl;
  std::vector<double> f_irrep;
  for (const auto& P : projectors) {
    std::vector<double> t(d);
    for (int i = 0; i < d; ++i) t[i] = static_cast<double>(P.irrep[i]) / n;
    twirl.push_back(haar_twirled_iid_state(t, projectors));
    f_irrep.push_back(f_q_irrep(n, d, P.irrep).linear());
  }
  const double f_uni = f_q_uniform(n, d).linear();

  struct Acc {
    double irrep = kInf, uniform = kInf;
    double irrep_margin = kInf, uniform_margin = kInf;
  };
  auto run = [&](int begin, int end, Acc& acc) {
    for (int t = begin; t < end; ++t) {
      const HermitianOp rho = random_permutation_invariant_state(n, d, seed, static_cast<std::uint64_t>(t));
      HermitianOp mix = HermitianOp::Zero(rho.rows(), rho.cols());
      HermitianOp rhs_i = mix;
      for (std::size_t j = 0; j < projectors.size(); ++j) {
        const double w = (projectors[j].P * rho).trace().real();
        mix += w * twirl[j];
        rhs_i += f_irrep[j] * w * twirl[j];
      }
      const HermitianOp rhs_u = f_uni * mix;
      const double ei = min_eig(rhs_i - rho), eu = min_eig(rhs_u - rho);
      acc.irrep = std::min(acc.irrep, ei);
      acc.uniform = std::min(acc.uniform, eu);
      acc.irrep_margin = std::min(acc.irrep_margin, ei + opt.tol * std::max(1.0, op_norm(rhs_i)));
      acc.uniform_margin = std::min(acc.uniform_margin, eu + opt.tol * std::max(1.0, op_norm(rhs_u)));
    }
  };
  const int threads = std::clamp(opt.threads, 1, trials);
  std::vector<Acc> parts(threads);
  if (threads == 1) {
    run(0, trials, parts[0]);
  } else {
    std::vector<std::thread> pool;
    for (int i = 0; i < threads; ++i)
      pool.emplace_back(run, trials * i / threads, trials * (i + 1) / threads, std::ref(parts[i]));
    for (auto& th : pool) th.join();
  }
  Acc all;
  for (const auto& a : parts) {
    all.irrep = std::min(all.irrep, a.irrep);
    all.uniform = std::min(all.uniform, a.uniform);
    all.irrep_margin = std::min(all.irrep_margin, a.irrep_margin);
    all.uniform_margin = std::min(all.uniform_margin, a.uniform_margin);
  }
  std::vector<CheckReport> out;
  out.push_back(make("theorem1_irrep", all.irrep, all.irrep - all.irrep_margin, all.irrep_margin));
  out.push_back(make("theorem1_uniform", all.uniform, all.uniform - all.uniform_margin, all.uniform_margin));
  for (auto& r : out) r.params = {{"n", n}, {"d", d}, {"trials", trials}, {"seed", seed}};
  return out;
}

double dp_adversary_max(const HalfspaceRegion& A, const std::vector<std::vector<double>>& vertices, int n) {
  if (n < 0) throw std::invalid_argument("dp_adversary_max: n must be nonnegative");
  if (vertices.empty()) throw std::invalid_argument("dp_adversary_max: no admissible conditionals");
  const auto k = static_cast<int>(A.k());
  std::map<std::vector<int>, double> memo;
  std::vector<double> p(k);
  std::function<double(std::vector<int>&, int)> value = [&](std::vector<int>& t, int i) -> double {
    if (i == n) {
      for (int j = 0; j < k; ++j) p[j] = n > 0 ? static_cast<double>(t[j]) / n : 0.0;
      return A.contains(p) ? 1.0 : 0.0;
    }
    auto it = memo.find(t);
    if (it != memo.end()) return it->second;
    std::vector<double> next(k);
    for (int j = 0; j < k; ++j) {
      ++t[j];
      next[j] = value(t, i + 1);
      --t[j];
    }
    double best = 0.0;
    for (const auto& v : vertices) {
      double s = 0.0;
      for (int j = 0; j < k; ++j) s += v[j] * next[j];
      best = std::max(best, s);
    }
    memo.emplace(t, best);
    return best;
  };
  std::vector<int> t(k, 0);
  return value(t, 0);
}

double dp_adversary_max(const HalfspaceRegion& A, const HalfspaceRegion& R, int n, int k) {
  if (static_cast<int>(A.k()) != k || static_cast<int>(R.k()) != k)
    throw std::invalid_argument("dp_adversary_max: dimension mismatch");
  if (k > 3 || n > 14) throw std::invalid_argument("dp_adversary_max: requires k <= 3 and n <= 14");
  return dp_adversary_max(A, region_vertices(R), n);
}

double dp_type_max(const Composition& m, const std::vector<std::vector<double>>& vertices) {
  const int k = m.k(), n = m.n();
  std::map<std::vector<int>, double> memo;
  std::function<double(std::vector<int>&, int)> value = [&](std::vector<int>& t, int i) -> double {
    if (i == n) return t == m.entries() ? 1.0 : 0.0;
    auto it = memo.find(t);
    if (it != memo.end()) return it->second;
    std::vector<double> next(k, 0.0);
    for (int j = 0; j < k; ++j) {
      if (t[j] >= m[j]) continue;
      ++t[j];
      next[j] = value(t, i + 1);
      --t[j];
    }
    double best = 0.0;
    for (const auto& v : vertices) {
      double s = 0.0;
      for (int j = 0; j < k; ++j) s += v[j] * next[j];
      best = std::max(best, s);
    }
    memo.emplace(t, best);
    return best;
  };
  std::vector<int> t(k, 0);
  return value(t, 0);
}

CheckReport check_theorem3(const HalfspaceRegion& A, const HalfspaceRegion& R, int n, int k) {
  const double lhs = dp_adversary_max(A, R, n, k);
  double rhs = 0.0;
  if (A.nonempty()) {
    const auto Rp = expand_region(R, n);
    OptOptions o;
    o.tol = 1e-13;
    const auto r = min_kl_between_regions(A, Rp, n, o);
    // the certificate keeps the right side an upper bound on exp(-n D)
    rhs = std::exp(f_c_uniform(n, k).log - static_cast<double>(n) * r.lower_bound);
  }
  const double margin = lhs > 0.0 ? std::log(rhs) - std::log(lhs) : kInf;
  auto rep = make("theorem3", lhs, rhs, margin >= -1e-9 ? std::max(margin, 0.0) : margin);
  rep.params = {{"n", n}, {"k", k}, {"A_u", A.u}, {"A_c", A.c}, {"R_u", R.u}, {"R_c", R.c}};
  return rep;
}

CheckReport check_intermediate_type_bound(const HalfspaceRegion& R, int n, int k) {
  if (static_cast<int>(R.k()) != k || k > 3 || n > 14 || n < 1)
    throw std::invalid_argument("check_intermediate_type_bound: requires k <= 3 and 1 <= n <= 14");
  const auto verts = region_vertices(R);
  const auto Rp = expand_region(R, n);
  const double fc = f_c_uniform(n, k).log;
  double worst = kInf, worst_lhs = 0.0, worst_rhs = 0.0;
  int violations = 0, types = 0;
  for_each_composition(n, k, [&](const std::vector<int>& e) {
    const Composition m(e);
    const double lhs = dp_type_max(m, verts);
    std::vector<double> p(k);
    for (int j = 0; j < k; ++j) p[j] = static_cast<double>(e[j]) / n;
    const auto q = m_projection(Rp, p);
    const double rhs = std::exp(fc + log_multinomial_pmf(q, m));
    ++types;
    if (lhs <= 0.0) return;
    const double margin = std::log(rhs) - std::log(lhs);
    if (margin < -1e-9) ++violations;
    if (margin < worst) {
      worst = margin;
      worst_lhs = lhs;
      worst_rhs = rhs;
    }
  });
  auto rep = make("intermediate_type_bound", worst_lhs, worst_rhs, worst >= -1e-9 ? std::max(worst, 0.0) : worst);
  rep.params = {{"n", n}, {"k", k}, {"R_u", R.u}, {"R_c", R.c}, {"types", types}, {"violations", violations}};
  return rep;
}

std::vector<Composition> enumerate_compositions(int n, int k) {
  std::vector<Composition> out;
  for_each_composition(n, k, [&](const std::vector<int>& m) { out.emplace_back(m); });
  return out;
}

std::vector<CheckReport> check_lemma2_sweep(int nq_max, int dq_max, int nc_max, int kc_max) {
  std::vector<CheckReport> out;
  {
    long long cases = 0, violations = 0;
    double worst = kInf;
    for (int d = 1; d <= dq_max; ++d)
      for (int n = 1; n <= nq_max; ++n) {
        const double u = f_q_uniform(n, d).log;
        for (const auto& p : enumerate_partitions(n, d)) {
          const double gap = u - f_q_irrep(n, d, p).log;
          ++cases;
          if (gap < -1e-12 * std::max(1.0, std::fabs(u))) ++violations;
          worst = std::min(worst, gap);
        }
      }
    auto r = make("lemma2_quantum", static_cast<double>(violations), 0.0, 0.0 - static_cast<double>(violations));
    r.params = {{"n_max", nq_max}, {"d_max", dq_max}, {"cases", cases}, {"min_log_gap", worst}};
    out.push_back(r);
  }
  {
    long long cases = 0, violations = 0;
    double worst = kInf;
    for (int k = 1; k <= kc_max; ++k)
      for (int n = 1; n <= nc_max; ++n) {
        const double u = f_c_uniform(n, k).log;
        for_each_composition(n, k, [&](const std::vector<int>& m) {
          const double gap = u - f_c_type(n, k, Composition(m)).log;
          ++cases;
          if (gap < -1e-12 * std::max(1.0, std::fabs(u))) ++violations;
          worst = std::min(worst, gap);
        });
      }
    auto r = make("lemma2_classical", static_cast<double>(violations), 0.0, 0.0 - static_cast<double>(violations));
    r.params = {{"n_max", nc_max}, {"k_max", kc_max}, {"cases", cases}, {"min_log_gap", worst}};
    out.push_back(r);
  }
  return out;
}

std::vector<CheckReport> check_schur_weyl(int n_max, int d_max, std::int64_t max_dim, int d_proj_max, double tol) {
  std::vector<CheckReport> out;
  for (int d = 1; d <= d_max; ++d)
    for (int n = 1; n <= n_max; ++n) {
      BigInt total = 0;
      for (const auto& p : enumerate_partitions(n, d)) total += dim_ud_irrep(p, d) * dim_sn_irrep(p);
      BigInt expect = 1;
      for (int i = 0; i < n; ++i) expect *= d;
      const bool ok = total == expect;
      auto r = make("schurweyl_dimension", static_cast<double>(total), static_cast<double>(expect), ok ? 0.0 : -1.0);
      r.params = {{"n", n}, {"d", d}};
      out.push_back(r);
    }
  for (int d = 2; d <= d_proj_max; ++d)
    for (int n = 1; ipow(d, n) <= max_dim; ++n) {
      const auto P = schur_weyl_projectors(d, n, {max_dim});
      const auto D = static_cast<Eigen::Index>(ipow(d, n));
      double err = 0.0;
      HermitianOp sum = HermitianOp::Zero(D, D);
      for (std::size_t i = 0; i < P.size(); ++i) {
        const auto& A = P[i].P;
        err = std::max(err, (A - A.adjoint()).cwiseAbs().maxCoeff());
        err = std::max(err, (A * A - A).cwiseAbs().maxCoeff());
        const double rank = static_cast<double>(dim_ud_irrep(P[i].irrep, d) * dim_sn_irrep(P[i].irrep));
        err = std::max(err, std::fabs(A.trace().real() - rank));
        sum += A;
        for (std::size_t j = i + 1; j < P.size(); ++j) err = std::max(err, (A * P[j].P).cwiseAbs().maxCoeff());
      }
      err = std::max(err, (sum - HermitianOp::Identity(D, D)).cwiseAbs().maxCoeff());
      auto r = make("schurweyl_projectors", err, tol, tol - err);
      r.params = {{"n", n}, {"d", d}, {"irreps", P.size()}};
      out.push_back(r);
    }
  return out;
}

std::vector<CheckReport> check_qkd_operators() {
  const auto ops = pbc00_operators();
  std::vector<CheckReport> out;
  const double e = min_eig(1.25 * ops.Pi_bit - ops.Pi_ph);
  auto r = make("pbc00_bit_phase", e, -1e-12, e + 1e-12);
  r.params = {{"constant", 1.25}};
  out.push_back(r);
  for (const auto& [name, A] : {std::pair<std::string, const HermitianOp*>{"Pi_bit", &ops.Pi_bit},
                                std::pair<std::string, const HermitianOp*>{"Pi_ph", &ops.Pi_ph}}) {
    const double herm = (*A - A->adjoint()).cwiseAbs().maxCoeff();
    auto h = make("pbc00_hermitian", herm, 1e-12, 1e-12 - herm);
    h.params = {{"operator", name}};
    out.push_back(h);
    const double lo = min_eig(*A);
    auto p = make("pbc00_psd", lo, -1e-12, lo + 1e-12);
    p.params = {{"operator", name}};
    out.push_back(p);
    const double nrm = op_norm(*A);
    auto q = make("pbc00_norm", nrm, 1.0, 1.0 + 1e-12 - nrm);
    q.params = {{"operator", name}};
    out.push_back(q);
  }
  return out;
}

std::pair<HalfspaceRegion, HalfspaceRegion> random_theorem3_pair(std::uint64_t seed, int n, int index) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(n), static_cast<std::uint32_t>(index)};
  std::mt19937_64 rng(seq);
  std::uniform_real_distribution<double> b(0.0, 4.0), v(-1.0, 1.0), w(0.0, 1.0);
  HalfspaceRegion R({1.0, -b(rng), -b(rng)}, 0.0);
  std::vector<double> u = {v(rng), v(rng), v(rng)};
  const double lo = *std::min_element(u.begin(), u.end()), hi = *std::max_element(u.begin(), u.end());
  const double c = lo + w(rng) * (hi - lo);
  return {HalfspaceRegion::at_least(u, c), R};
}

bool is_suite(const std::string& name) {
  for (const char* s : {"lemma2", "schurweyl", "theorem1", "theorem3", "qkd-operators", "all"})
    if (name == s) return true;
  return false;
}

std::vector<CheckReport> run_suite(const std::string& name, std::uint64_t seed, int threads) {
  if (!is_suite(name)) throw std::invalid_argument("unknown suite '" + name + "'");
  std::vector<CheckReport> out;
  auto append = [&](std::vector<CheckReport> v) { out.insert(out.end(), v.begin(), v.end()); };
  const bool all = name == "all";
  if (all || name == "lemma2") append(check_lemma2_sweep());
  if (all || name == "schurweyl") append(check_schur_weyl());
  if (all || name == "theorem1") {
    Theorem1Options opt;
    opt.threads = threads;
    for (auto [n, d] : {std::pair{2, 2}, std::pair{3, 2}, std::pair{4, 2}, std::pair{5, 2}, std::pair{2, 3},
                        std::pair{3, 3}})
      append(check_theorem1_operator(n, d, 200, seed, opt));
  }
  if (all || name == "theorem3") {
    for (int n = 2; n <= 12; ++n)
      for (int i = 0; i < 50; ++i) {
        auto [A, R] = random_theorem3_pair(seed, n, i);
        out.push_back(check_theorem3(A, R, n, 3));
      }
    const HalfspaceRegion Rq({1.0, -1.25, 0.0}, 0.0);
    for (double delta : {0.0, 0.05, 0.1, 0.2, 0.3, 0.5})
      for (int n : {6, 12}) out.push_back(check_theorem3(HalfspaceRegion::at_least({1.0, -1.25, 0.0}, delta), Rq, n, 3));
    out.push_back(check_intermediate_type_bound(Rq, 10, 3));
    for (int i = 0; i < 5; ++i) out.push_back(check_intermediate_type_bound(random_theorem3_pair(seed, 10, i).second, 10, 3));
  }
  if (all || name == "qkd-operators") append(check_qkd_operators());
  return out;
}

} // namespace qconc
