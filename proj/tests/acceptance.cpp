// One PASS/FAIL line per acceptance criterion. Exit status 0 means every
// criterion was evaluated; the lines themselves carry the verdicts.
#include <chrono>
#include <cmath>
#include <cstdio>
#include <random>
#include <string>
#include <vector>

#include "qconc/bounds.hpp"
#include "qconc/coeffs.hpp"
#include "qconc/optimizer.hpp"
#include "qconc/scenarios.hpp"
#include "qconc/verify.hpp"

using namespace qconc;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

int passed = 0;

void report(int id, bool ok, const std::string& detail) {
  std::printf("criterion %2d: %s  %s\n", id, ok ? "PASS" : "FAIL", detail.c_str());
  std::fflush(stdout);
  if (ok) ++passed;
}

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

void criterion1() {
  const auto t0 = Clock::now();
  const double v = 1.662 * 0.01 + m_gamma(1.662, 0.01);
  const double dt = seconds_since(t0);
  report(1, std::fabs(v - 0.028730) < 1e-6 && dt < 1e-3, fmt("gamma*r + m(gamma) = %.9f, %.2e s", v, dt));
}

void criterion2() {
  auto P = ToyModelParams::preset(1000000);
  P.epsilon = 1e-30;
  double d[5];
  const Method ms[5] = {Method::azuma, Method::kato, Method::quantum_perm, Method::classical_iidmeas, Method::iid};
  for (int i = 0; i < 5; ++i) d[i] = toy_delta(ms[i], P).delta;
  const bool order = d[0] > d[1] && d[1] > d[2] && d[2] >= d[3] && d[3] >= d[4];
  const auto t0 = Clock::now();
  bool conv = true;
  const auto grid = log_grid(1e4, 1e8, 25);
  for (long long N : grid) {
    auto Q = ToyModelParams::preset(N);
    Q.epsilon = 1e-30;
    for (auto m : ms) conv = toy_delta(m, Q).converged && conv;
  }
  const double dt = seconds_since(t0);
  report(2, order && conv && dt < 300,
         fmt("N=1e6 Delta azuma %.6g kato %.6g q %.6g c %.6g iid %.6g; sweep %zu points x 5 in %.1f s, converged %d",
             d[0], d[1], d[2], d[3], d[4], grid.size(), dt, conv));
}

void criterion3() {
  double worst_q = 0, worst_c = 0;
  std::string detail;
  for (long long N : {100000LL, 1000000LL, 10000000LL}) {
    auto P = ToyModelParams::preset(N);
    P.delta = 0.01;
    const double iid = toy_epsilon(Method::iid, P).log_eps;
    const double gq = toy_epsilon(Method::quantum_perm, P).log_eps - iid - f_q_uniform(N, 2).log;
    const double gc = toy_epsilon(Method::classical_iidmeas, P).log_eps - iid - f_c_uniform(N, 3).log;
    worst_q = std::max(worst_q, std::fabs(gq));
    worst_c = std::max(worst_c, std::fabs(gc));
    detail += fmt("N=%lld q %.2e c %.6f; ", N, gq, gc);
  }
  report(3, worst_q < 1e-6 && worst_c < 1e-6, detail + fmt("max |q| %.2e, max |c| %.2e", worst_q, worst_c));
}

void criterion4() {
  const auto grid = log_grid(1e4, 1e10, 25);
  int bad_cq = 0, bad_qk = 0, bad_ka = 0;
  bool conv = true;
  for (long long N : grid) {
    QkdParams P;
    P.N = N;
    const auto a = pbc00_key_rate(Method::azuma, P);
    const auto k = pbc00_key_rate(Method::kato, P);
    const auto q = pbc00_key_rate(Method::quantum_perm, P);
    const auto c = pbc00_key_rate(Method::classical_iidmeas, P);
    conv = conv && q.converged && c.converged;
    bad_cq += !(c.rate >= q.rate);
    bad_qk += !(q.rate >= k.rate);
    bad_ka += !(k.rate >= a.rate);
  }
  const double asym = pbc00_asymptotic_rate(0.01);
  QkdParams big;
  big.N = 10000000000LL;
  const double g10 = pbc00_key_rate(Method::classical_iidmeas, big).rate;
  const bool ok = bad_cq == 0 && bad_qk == 0 && bad_ka == 0 && std::fabs(asym - 0.205566) < 1e-4 && conv;
  report(4, ok,
         fmt("%zu points: violations c>=q %d, q>=kato %d, kato>=azuma %d; asymptotic %.6f; G_c(1e10) %.6f", grid.size(),
             bad_cq, bad_qk, bad_ka, asym, g10));
}

void criterion5() {
  const auto t0 = Clock::now();
  const auto r = check_lemma2_sweep(60, 4, 200, 4);
  const double dt = seconds_since(t0);
  const bool ok = r[0].pass && r[1].pass && dt < 120;
  report(5, ok,
         fmt("quantum %lld cases %g violations, classical %lld cases %g violations, %.1f s",
             r[0].params["cases"].get<long long>(), r[0].lhs, r[1].params["cases"].get<long long>(), r[1].lhs, dt));
}

void criterion6() {
  const auto t0 = Clock::now();
  const auto r = check_schur_weyl(8, 3, 1024, 4, 1e-10);
  int dims = 0, projs = 0, fails = 0;
  double worst = 0;
  for (const auto& x : r) {
    if (x.check == "schurweyl_dimension") ++dims;
    else {
      ++projs;
      worst = std::max(worst, x.lhs);
    }
    fails += !x.pass;
  }
  report(6, fails == 0,
         fmt("%d dimension identities, %d projector families (d<=4, d^n<=1024), max error %.2e, %.1f s", dims, projs,
             worst, seconds_since(t0)));
}

void criterion7() {
  const auto t0 = Clock::now();
  double wi = 1e300, wu = 1e300;
  bool ok = true;
  for (auto [n, d] : {std::pair{3, 2}, std::pair{4, 2}, std::pair{5, 2}, std::pair{3, 3}}) {
    const auto r = check_theorem1_operator(n, d, 200, 20260101);
    wi = std::min(wi, r[0].lhs);
    wu = std::min(wu, r[1].lhs);
    ok = ok && r[0].lhs >= -1e-9 && r[1].lhs >= -1e-9;
  }
  const double dt = seconds_since(t0);
  report(7, ok && dt < 600, fmt("min eig per-irrep %.3e, uniform %.3e, %.1f s", wi, wu, dt));
}

void criterion8() {
  const auto t0 = Clock::now();
  int count = 0, viol = 0;
  double tight = 1e300;
  for (int n = 2; n <= 12; ++n)
    for (int i = 0; i < 50; ++i) {
      auto [A, R] = random_theorem3_pair(20260101, n, i);
      const auto r = check_theorem3(A, R, n, 3);
      ++count;
      viol += !(r.lhs <= r.rhs * (1 + 1e-12));
      if (r.lhs > 0) tight = std::min(tight, r.margin);
    }
  const HalfspaceRegion Rq({1.0, -1.25, 0.0}, 0.0);
  for (int n = 2; n <= 12; ++n)
    for (double delta : {0.0, 0.02, 0.05, 0.1, 0.2, 0.5}) {
      const auto r = check_theorem3(HalfspaceRegion::at_least({1.0, -1.25, 0.0}, delta), Rq, n, 3);
      ++count;
      viol += !(r.lhs <= r.rhs * (1 + 1e-12));
    }
  const double dt = seconds_since(t0);
  report(8, viol == 0 && dt < 300,
         fmt("%d instances, %d violations, smallest log margin %.3f, %.2f s", count, viol, tight, dt));
}

void criterion9() {
  const auto ops = pbc00_operators();
  Eigen::SelfAdjointEigenSolver<HermitianOp> es(1.25 * ops.Pi_bit - ops.Pi_ph);
  const double e = es.eigenvalues().minCoeff();
  report(9, e >= -1e-12, fmt("min eig of (5/4)Pi_bit - Pi_ph = %.6g", e));
}

void criterion10() {
  std::mt19937_64 rng(20260101);
  std::uniform_real_distribution<double> V(-1.0, 1.0), W(0.05, 0.95);
  double worst = 0, worst_order = 0;
  bool order_ok = true;
  int pairs = 0;
  OptOptions opt;
  while (pairs < 20) {
    std::vector<double> ua = {V(rng), V(rng), V(rng)}, ub = {V(rng), V(rng), V(rng)};
    auto span = [](const std::vector<double>& u, double t) {
      const double lo = std::min({u[0], u[1], u[2]}), hi = std::max({u[0], u[1], u[2]});
      return lo + t * (hi - lo);
    };
    const auto A = HalfspaceRegion::at_least(ua, span(ua, W(rng)));
    const HalfspaceRegion B(ub, span(ub, W(rng)));
    if (!A.nonempty() || !B.nonempty()) continue;
    ++pairs;
    const auto r = min_kl_between_regions(A, B, 1, opt);
    const auto g = grid_oracle(A, B, 2000);
    worst = std::max(worst, std::fabs(r.divergence - g.divergence));
    OptOptions qf = opt;
    qf.q_first = true;
    const auto s = min_kl_between_regions(A, B, 1, qf);
    const double diff = std::fabs(r.divergence - s.divergence);
    worst_order = std::max(worst_order, diff);
    order_ok = order_ok && diff <= 2 * opt.tol;
  }
  report(10, worst < 1e-4 && order_ok,
         fmt("20 pairs: max |D - D_grid| %.2e, max order difference %.2e (2 tol = %.0e)", worst, worst_order,
             2 * opt.tol));
}

} // namespace

int main() {
  const auto t0 = Clock::now();
  criterion1();
  criterion2();
  criterion3();
  criterion4();
  criterion5();
  criterion6();
  criterion7();
  criterion8();
  criterion9();
  criterion10();
  std::printf("acceptance: %d/10 PASS, %.1f s\n", passed, seconds_since(t0));
  return 0;
}
