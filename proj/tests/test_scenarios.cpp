#include "doctest.h"

#include "qconc/coeffs.hpp"
#include "qconc/scenarios.hpp"

#include <cmath>
#include <numbers>
#include <random>

using namespace qconc;

namespace {

double top_eig(const Eigen::Matrix2cd& M) {
  Eigen::SelfAdjointEigenSolver<Eigen::Matrix2cd> es(M);
  return es.eigenvalues()(1);
}

// <M> on the Bloch vector (x, y, z)
double expect(const Eigen::Matrix2cd& M, double x, double y, double z) {
  Eigen::Matrix2cd rho;
  rho << (1 + z) / 2, std::complex<double>(x, -y) / 2.0, std::complex<double>(x, y) / 2.0, (1 - z) / 2;
  return (M * rho).trace().real();
}

double h2(double x) { return x <= 0 || x >= 1 ? 0.0 : -x * std::log2(x) - (1 - x) * std::log2(1 - x); }

} // namespace

TEST_CASE("m_gamma examples") {
  CHECK(m_gamma(0.0, 0.01) == doctest::Approx(0.5).epsilon(1e-15));
  CHECK(m_gamma(1.662, 0.01) == doctest::Approx(0.012110).epsilon(5e-5));
  CHECK(1.662 * 0.01 + m_gamma(1.662, 0.01) == doctest::Approx(0.028730).epsilon(3e-5));
  CHECK(m_gamma(1.0, 0.01) == doctest::Approx(0.05).epsilon(1e-14));
  CHECK_THROWS(m_gamma(1.0, 0.0));
  CHECK_THROWS(m_gamma(1.0, 1.0));
}

TEST_CASE("m_gamma is the top eigenvalue of M_c") {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> G(-3.0, 10.0), R(1e-3, 0.999);
  double worst = 0;
  for (int i = 0; i < 100; ++i) {
    const double g = G(rng), r = R(rng);
    worst = std::max(worst, std::fabs(top_eig(M_c(g, r)) - m_gamma(g, r)));
  }
  CHECK(worst < 1e-12);
}

TEST_CASE("sup over states of <M_c> equals m_gamma") {
  for (double g : {0.5, 1.0, 1.662, 4.0}) {
    const double r = 0.01;
    const auto M = M_c(g, r);
    // Fibonacci net of 1000 points
    double best = -1e9, best_t = 0;
    const int n = 1000;
    for (int i = 0; i < n; ++i) {
      const double z = 1 - 2.0 * (i + 0.5) / n;
      const double s = std::sqrt(1 - z * z);
      const double ph = i * std::numbers::pi * (3 - std::sqrt(5.0));
      const double v = expect(M, s * std::cos(ph), s * std::sin(ph), z);
      if (v > best) {
        best = v;
        best_t = std::atan2(z, s * std::cos(ph));
      }
    }
    // M_c is real, so refine along the x-z great circle
    double a = best_t - 0.3, b = best_t + 0.3;
    for (int it = 0; it < 200; ++it) {
      const double m1 = a + (b - a) / 3, m2 = b - (b - a) / 3;
      if (expect(M, std::cos(m1), 0, std::sin(m1)) < expect(M, std::cos(m2), 0, std::sin(m2))) a = m1;
      else b = m2;
    }
    const double t = 0.5 * (a + b);
    best = std::max(best, expect(M, std::cos(t), 0, std::sin(t)));
    CHECK(std::fabs(best - m_gamma(g, r)) < 1e-9);
  }
}

TEST_CASE("toy failure region and family") {
  auto A = toy_failure_region(1.662, 0.01, 0.01);
  CHECK(A.contains(std::vector<double>{0.5, 0.0, 0.5}));
  CHECK_FALSE(A.contains(std::vector<double>{0.02, 0.0, 0.98}));
  auto fam = toy_region_family(0.01);
  CHECK(fam.lo < 0.0);
  CHECK(fam.lo > -1.0);
  for (double g : {fam.lo + 1e-9, 0.0, 1.0, 1.662, 100.0}) {
    const double m = m_gamma(g, 0.01);
    CHECK(m >= 0.0);
    CHECK(m < 1.0);
    CHECK(fam.member(g).theorem3_shaped());
  }
  // every measured distribution lies in every member
  auto Q = toy_Q_image(0.01);
  for (int i = 0; i < 64; ++i) {
    auto q = Q.boundary(2 * std::numbers::pi * i / 64);
    for (double g : {fam.lo + 1e-9, 0.0, 1.662, 50.0}) CHECK(fam.member(g).contains(q, 1e-12));
  }
}

TEST_CASE("tangent slope recovers the touching member") {
  auto Q = toy_Q_image(0.01);
  for (double g : {-0.5, 0.2, 1.0, 1.662, 6.0}) {
    // boundary point of Q where the member with slope g touches
    double best = -1e9, bt = 0;
    for (int i = 0; i < 20000; ++i) {
      const double t = 2 * std::numbers::pi * i / 20000;
      auto q = Q.boundary(t);
      if (q[0] - g * q[1] > best) {
        best = q[0] - g * q[1];
        bt = t;
      }
    }
    double a = bt - 1e-3, b = bt + 1e-3;
    auto f = [&](double t) { auto q = Q.boundary(t); return q[0] - g * q[1]; };
    for (int it = 0; it < 200; ++it) {
      const double m1 = a + (b - a) / 3, m2 = b - (b - a) / 3;
      if (f(m1) < f(m2)) a = m1;
      else b = m2;
    }
    bt = 0.5 * (a + b);
    best = f(bt);
    CHECK(best == doctest::Approx(m_gamma(g, 0.01)).epsilon(1e-10));
    CHECK(toy_tangent_slope(0.01, Q.boundary(bt)) == doctest::Approx(g).epsilon(1e-5));
  }
}

TEST_CASE("figure 2 ordering at N = 1e6") {
  auto P = ToyModelParams::preset(1000000);
  P.epsilon = 1e-30;
  const double az = toy_delta(Method::azuma, P).delta;
  const double ka = toy_delta(Method::kato, P).delta;
  const auto q = toy_delta(Method::quantum_perm, P);
  const auto c = toy_delta(Method::classical_iidmeas, P);
  const auto i = toy_delta(Method::iid, P);
  CHECK(az == doctest::Approx(0.0156445).epsilon(1e-5));
  CHECK(az > ka);
  CHECK(ka > q.delta);
  CHECK(q.delta >= c.delta);
  CHECK(c.delta >= i.delta);
  CHECK(q.converged);
  CHECK(c.converged);
  CHECK(i.converged);
  // regression fixtures
  CHECK(ka == doctest::Approx(0.00793699).epsilon(1e-5));
  CHECK(q.delta == doctest::Approx(0.00339036).epsilon(1e-5));
  CHECK(c.delta == doctest::Approx(0.00325384).epsilon(1e-5));
  CHECK(i.delta == doctest::Approx(0.00294481).epsilon(1e-5));
  REQUIRE(c.gamma_prime.has_value());
}

TEST_CASE("no deviation gives failure probability one") {
  auto P = ToyModelParams::preset(100000);
  P.delta = 0.0;
  for (auto m : {Method::azuma, Method::kato, Method::quantum_perm, Method::classical_iidmeas, Method::iid})
    CHECK(toy_epsilon(m, P).log_eps == doctest::Approx(0.0).epsilon(1e-12));
}

TEST_CASE("epsilon near one") {
  auto P = ToyModelParams::preset(100000);
  P.epsilon = 1.0;
  for (auto m : {Method::azuma, Method::quantum_perm, Method::classical_iidmeas, Method::iid})
    CHECK(toy_delta(m, P).delta == doctest::Approx(0.0).epsilon(1e-12));
  // just below one the prefactors set a floor above the iid value
  P.epsilon = 0.5;
  const double i = toy_delta(Method::iid, P).delta;
  CHECK(i > 0.0);
  CHECK(toy_delta(Method::quantum_perm, P).delta > i);
  CHECK(toy_delta(Method::classical_iidmeas, P).delta > i);
  CHECK(toy_delta(Method::azuma, P).delta == doctest::Approx(azuma_delta(1.662, 100000, 0.5)).epsilon(1e-14));
}

TEST_CASE("quantum gap in figure 3 is the prefactor") {
  for (long long N : {100000LL, 10000000LL}) {
    auto P = ToyModelParams::preset(N);
    P.delta = 0.01;
    const double q = toy_epsilon(Method::quantum_perm, P).log_eps;
    const double i = toy_epsilon(Method::iid, P).log_eps;
    CHECK(std::fabs(q - i - f_q_uniform(N, 2).log) < 1e-6);
  }
}

TEST_CASE("small N crossover") {
  bool crossed = false;
  for (long long N : {1000LL, 3000LL, 10000LL}) {
    auto P = ToyModelParams::preset(N);
    P.delta = 0.01;
    const double az = toy_epsilon(Method::azuma, P).log_eps;
    const double ka = toy_epsilon(Method::kato, P).log_eps;
    const double q = toy_epsilon(Method::quantum_perm, P).log_eps;
    crossed = crossed || std::min(az, ka) < q;
  }
  CHECK(crossed);
  auto P = ToyModelParams::preset(10000000);
  P.delta = 0.01;
  CHECK(toy_epsilon(Method::quantum_perm, P).log_eps < toy_epsilon(Method::kato, P).log_eps);
}

TEST_CASE("toy params validation") {
  ToyModelParams P;
  P.r = 1.0;
  CHECK_THROWS(P.validate());
  P = ToyModelParams::preset(100);
  P.B_star = 1000;
  CHECK_THROWS(P.validate());
  P = ToyModelParams::preset(100);
  CHECK_THROWS(toy_epsilon(Method::iid, P)); // no Delta
  CHECK_THROWS(toy_delta(Method::iid, P));   // no epsilon
}

TEST_CASE("pbc00 operators") {
  auto ops = pbc00_operators();
  for (const auto* A : {&ops.Pi_bit, &ops.Pi_ph}) {
    CHECK((*A - A->adjoint()).norm() < 1e-14);
    Eigen::SelfAdjointEigenSolver<HermitianOp> es(*A);
    CHECK(es.eigenvalues().minCoeff() > -1e-14);
    CHECK(es.eigenvalues().maxCoeff() <= 1.0 + 1e-14);
    CHECK(A->trace().real() == doctest::Approx(4.0 / 3.0).epsilon(1e-14));
  }
  Eigen::SelfAdjointEigenSolver<HermitianOp> es(1.25 * ops.Pi_bit - ops.Pi_ph);
  CHECK(es.eigenvalues().minCoeff() >= -1e-12);
  CHECK(es.eigenvalues().minCoeff() == doctest::Approx(0.0416667).epsilon(1e-5));
  // the constant is not loose by more than the slack: c = 1 still holds, c = 0.99 does not
  Eigen::SelfAdjointEigenSolver<HermitianOp> e1(ops.Pi_bit - ops.Pi_ph), e2(0.99 * ops.Pi_bit - ops.Pi_ph);
  CHECK(e1.eigenvalues().minCoeff() > -1e-12);
  CHECK(e2.eigenvalues().minCoeff() < 0.0);
}

TEST_CASE("phase error upper bounds") {
  QkdParams P;
  P.N = 1000000;
  const double n = 1e6, bit = 0.01 * n / 4;
  const auto az = pbc00_phase_error_upper(Method::azuma, P);
  CHECK(az.U == doctest::Approx(1.25 * bit + 2.25 * std::sqrt(n * 102 * std::log(2.0) / 2)).epsilon(1e-12));
  const auto ka = pbc00_phase_error_upper(Method::kato, P);
  const auto q = pbc00_phase_error_upper(Method::quantum_perm, P);
  const auto c = pbc00_phase_error_upper(Method::classical_iidmeas, P);
  const auto i = pbc00_phase_error_upper(Method::iid, P);
  CHECK(ka.U < az.U);
  CHECK(c.U < q.U);
  CHECK(i.U <= c.U);
  CHECK(q.converged);
  CHECK(c.converged);
  CHECK(q.delta > 0.0);
  CHECK(q.delta < 1.0);
}

TEST_CASE("phase error bound approaches the mean") {
  const double base = 1.25 * 0.01 / 4;
  for (auto m : {Method::azuma, Method::kato, Method::quantum_perm, Method::classical_iidmeas, Method::iid}) {
    QkdParams P;
    P.N = 1000000;
    const double u6 = pbc00_phase_error_upper(m, P).U / 1e6 - base;
    P.N = 10000000000LL;
    const double u10 = pbc00_phase_error_upper(m, P).U / 1e10 - base;
    CHECK(u10 >= 0.0);
    CHECK(u10 < 0.02 * u6);
  }
}

TEST_CASE("binary entropy") {
  CHECK(binary_entropy(0.5) == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(binary_entropy(0.0) == 0.0);
  CHECK(binary_entropy(1.0) == 0.0);
  CHECK(binary_entropy(-0.1) == 0.0);
  CHECK(binary_entropy(0.11) == doctest::Approx(h2(0.11)).epsilon(1e-15));
}

TEST_CASE("key rate") {
  CHECK(pbc00_asymptotic_rate(0.01) == doctest::Approx(0.205566).epsilon(5e-6));
  CHECK(pbc00_asymptotic_rate(0.01) == doctest::Approx(0.25 * (1 - h2(0.01) - h2(0.0125))).epsilon(1e-15));

  QkdParams small;
  small.N = 1000;
  const auto k = pbc00_key_rate(Method::azuma, small);
  CHECK(k.phase_error_overflow);
  CHECK(std::isinf(k.rate));
  CHECK(k.rate < 0);

  QkdParams big;
  big.N = 10000000000LL;
  for (auto m : {Method::azuma, Method::kato, Method::quantum_perm, Method::classical_iidmeas}) {
    const double g = pbc00_key_rate(m, big).rate;
    CHECK(std::fabs(g - pbc00_asymptotic_rate(0.01)) < 2e-3);
  }
}

TEST_CASE("key rate is nondecreasing in N") {
  for (auto m : {Method::azuma, Method::kato, Method::quantum_perm, Method::classical_iidmeas}) {
    double prev = -INFINITY;
    for (long long N : log_grid(1e5, 1e9, 4)) {
      QkdParams P;
      P.N = N;
      const double g = pbc00_key_rate(m, P).rate;
      CHECK(g >= prev);
      prev = g;
    }
  }
}

TEST_CASE("iid U never beaten by the theorem-based rates") {
  for (long long N : {1000000LL, 100000000LL}) {
    QkdParams P;
    P.N = N;
    const double gi = pbc00_key_rate(Method::iid, P).rate;
    for (auto m : {Method::azuma, Method::quantum_perm, Method::classical_iidmeas})
      CHECK(pbc00_key_rate(m, P).rate <= gi);
  }
}

TEST_CASE("qkd params validation") {
  QkdParams P;
  P.N = 0;
  CHECK_THROWS(P.validate());
  P = QkdParams{};
  P.N_sift = 2e6;
  CHECK_THROWS(P.validate());
  P = QkdParams{};
  P.bit_error_rate = 1.5;
  CHECK_THROWS(P.validate());
  P = QkdParams{};
  CHECK(P.sift() == 250000.0);
  CHECK(P.bit() == 2500.0);
  CHECK(P.bit_star() == 2500.0);
}

TEST_CASE("config parsing") {
  auto c = parse_scenario_config("{}");
  CHECK(c.r == 0.01);
  CHECK(c.gamma == 1.662);
  CHECK(c.N_grid.empty());
  CHECK(c.s == 102);
  c = parse_scenario_config(R"({"r":0.02,"gamma":2,"N_grid":[1e4,100000],"epsilon":1e-20,"Delta":0.02,)"
                            R"("B_star_fraction":0.05,"s":10,"s_prime":5,"bit_error_rate":0.02})");
  CHECK(c.r == 0.02);
  CHECK(c.N_grid == std::vector<long long>{10000, 100000});
  CHECK(*c.epsilon == 1e-20);
  CHECK(*c.Delta == 0.02);
  CHECK(c.s_prime == 5);
  auto msg = [](const char* text) {
    try {
      parse_scenario_config(text);
    } catch (const std::invalid_argument& e) {
      return std::string(e.what());
    }
    return std::string();
  };
  CHECK(msg(R"({"bogus":1})").find("bogus") != std::string::npos);
  CHECK(msg(R"({"r":1.5})").find("'r'") != std::string::npos);
  CHECK(msg(R"({"gamma":"x"})").find("gamma") != std::string::npos);
  CHECK(msg(R"({"s":1.5})").find("'s'") != std::string::npos);
  CHECK(msg(R"({"N_grid":[0]})").find("N_grid") != std::string::npos);
  CHECK(msg("{").find("malformed") != std::string::npos);
  CHECK(msg("[1]").find("object") != std::string::npos);
}

TEST_CASE("log grid") {
  auto g = log_grid(1e4, 1e8, 25);
  CHECK(g.size() == 101);
  CHECK(g.front() == 10000);
  CHECK(g.back() == 100000000);
  for (std::size_t i = 1; i < g.size(); ++i) CHECK(g[i] > g[i - 1]);
  CHECK(g[25] == 100000);
  CHECK_THROWS(log_grid(0.5, 10, 3));
}
