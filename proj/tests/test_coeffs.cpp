#include "doctest.h"

#include "qconc/coeffs.hpp"

#include <cmath>
#include <functional>
#include <numbers>

using namespace qconc;

namespace {

void for_each_composition(int n, int k, const std::function<void(const Composition&)>& f) {
  std::vector<int> m(k, 0);
  std::function<void(int, int)> rec = [&](int i, int left) {
    if (i == k - 1) {
      m[i] = left;
      f(Composition(m));
      return;
    }
    for (int a = 0; a <= left; ++a) {
      m[i] = a;
      rec(i + 1, left - a);
    }
  };
  rec(0, n);
}

double lse_add(double a, double b) {
  if (std::isinf(a) && a < 0) return b;
  if (std::isinf(b) && b < 0) return a;
  double mx = std::max(a, b);
  return mx + std::log(std::exp(a - mx) + std::exp(b - mx));
}

} // namespace

TEST_CASE("Barnes G at integers") {
  CHECK(barnes_g(2) == 1);
  CHECK(barnes_g(3) == 1);
  CHECK(barnes_g(4) == 2);
  CHECK(barnes_g(5) == 12);
  CHECK(barnes_g(6) == 288);
  CHECK_THROWS(barnes_g(1));
  for (int m = 2; m <= 12; ++m)
    CHECK(std::exp(log_barnes_g(m)) == doctest::Approx(static_cast<double>(barnes_g(m))).epsilon(1e-12));
}

TEST_CASE("multinomial pmf") {
  CHECK(log_multinomial_pmf({0.5, 0.5}, Composition({1, 1})) == doctest::Approx(std::log(0.5)));
  CHECK(log_multinomial_pmf({1.0, 0.0}, Composition({2, 0})) == doctest::Approx(0.0));
  CHECK(log_multinomial_pmf({1.0 / 3, 1.0 / 3, 1.0 / 3}, Composition({1, 1, 1})) ==
        doctest::Approx(std::log(6.0 / 27)));
  double z = log_multinomial_pmf({0.0, 1.0}, Composition({1, 1}));
  CHECK((std::isinf(z) && z < 0));
  CHECK_THROWS(log_multinomial_pmf({0.5, 0.5}, Composition({1, 1, 0})));

  std::vector<std::vector<double>> ts{{0.3, 0.7}, {0.2, 0.5, 0.3}, {1.0, 0.0, 0.0}};
  for (const auto& t : ts)
    for (int n = 0; n <= 50; n += 7) {
      double acc = -INFINITY;
      for_each_composition(n, static_cast<int>(t.size()),
                           [&](const Composition& m) { acc = lse_add(acc, log_multinomial_pmf(t, m)); });
      CHECK(acc == doctest::Approx(0.0).epsilon(1e-12).scale(1.0));
    }
}

TEST_CASE("classical prefactors") {
  CHECK(f_c_type(3, 3, Composition({1, 1, 1})).linear() == doctest::Approx(4.5));
  CHECK(f_c_type(4, 2, Composition({2, 2})).linear() == doctest::Approx(8.0 / 3));
  CHECK(f_c_type(5, 3, Composition({0, 5, 0})).linear() == doctest::Approx(1.0));
  CHECK_THROWS(f_c_type(4, 2, Composition({2, 1})));
  const double sq2pi = std::sqrt(2 * std::numbers::pi);
  CHECK(f_c_uniform(4, 2).linear() == doctest::Approx(std::exp(2.0) / sq2pi));
  CHECK(f_c_uniform(4, 2).linear() == doctest::Approx(2.9478).epsilon(1e-4));
  CHECK(f_c_uniform(1, 1).linear() == doctest::Approx(std::exp(1.0) / sq2pi));
  // independent form: n^{(k-1)/2} / sqrt(2 pi (k/e^2)^k)
  for (int n : {1, 7, 100, 12345})
    for (int k = 1; k <= 5; ++k)
      CHECK(f_c_uniform(n, k).linear() ==
            doctest::Approx(std::pow(n, (k - 1) / 2.0) /
                            std::sqrt(2 * std::numbers::pi * std::pow(k / std::exp(2.0), k))).epsilon(1e-12));
}

TEST_CASE("quantum prefactors") {
  CHECK(f_q_irrep(3, 2, Partition({2, 1})).linear() == doctest::Approx(4.5));
  CHECK(f_q_irrep(2, 2, Partition({1, 1})).linear() == doctest::Approx(4.0));
  for (int n = 1; n <= 20; ++n)
    for (int d = 1; d <= 4; ++d)
      CHECK(f_q_irrep(n, d, Partition({n}, d)).linear() ==
            doctest::Approx(std::exp(log_binomial(n + d - 1, n))).epsilon(1e-10));
  CHECK_THROWS(f_q_irrep(3, 2, Partition({2, 2})));
  CHECK_THROWS(f_q_irrep(3, 2, Partition({1, 1, 1})));
  for (int n : {1, 5, 80, 100000}) {
    double closed = 1.5 * std::log(n + 1.0) + 2.0 - std::log(std::sqrt(8 * std::numbers::pi));
    CHECK(f_q_uniform(n, 2).log == doctest::Approx(closed).epsilon(1e-13));
  }
  // f_q_uniform(n, 2) / n^1.5 settles
  double prev = 0;
  for (int n = 1000; n <= 1024000; n *= 4) {
    double r = std::exp(f_q_uniform(n, 2).log - 1.5 * std::log(n));
    if (prev > 0) CHECK(std::fabs(r - prev) < 3e-3 * prev);
    prev = r;
  }
  CHECK(prev == doctest::Approx(std::exp(2.0) / std::sqrt(8 * std::numbers::pi)).epsilon(1e-4));
}

TEST_CASE("linear accessor saturates") {
  CHECK(std::isinf(LogValue{701.0}.linear()));
  CHECK(std::isfinite(LogValue{699.0}.linear()));
  CHECK(std::isinf(f_q_uniform(10000000, 30).linear()));
}

TEST_CASE("per-irrep and per-type factors below uniform, reduced sweep") {
  for (int n = 1; n <= 30; ++n)
    for (int d = 1; d <= 4; ++d) {
      const double u = f_q_uniform(n, d).log;
      for (const auto& p : enumerate_partitions(n, d)) CHECK(f_q_irrep(n, d, p).log <= u + 1e-12);
    }
  for (int n = 1; n <= 60; ++n)
    for (int k = 1; k <= 4; ++k) {
      const double u = f_c_uniform(n, k).log;
      for_each_composition(n, k, [&](const Composition& m) { CHECK(f_c_type(n, k, m).log <= u + 1e-12); });
    }
}

TEST_CASE("quantum block prefactor") {
  auto t1 = theorem2_prefactor(5, 1, Composition({5}), {Block{Partition({3, 2}), 2}});
  CHECK(t1.per_irrep.log == doctest::Approx(f_q_irrep(5, 2, Partition({3, 2})).log));
  auto t2 = theorem2_prefactor(6, 3, Composition({1, 2, 3}),
                               {Block{Partition({1}), 1}, Block{Partition({2}), 1}, Block{Partition({3}), 1}});
  CHECK(t2.per_irrep.log == doctest::Approx(f_c_type(6, 3, Composition({1, 2, 3})).log));
  CHECK_THROWS(theorem2_prefactor(6, 2, Composition({3, 3}), {Block{Partition({2}), 2}, Block{Partition({3}), 2}}));
  CHECK_THROWS(theorem2_prefactor(6, 2, Composition({3, 3}), {Block{Partition({3}), 2}}));

  // U(1) blocks of equal size d/k: exponent (d^2/k - 1)/2
  const int d = 4, k = 2;
  auto uni = [&](int n) {
    return theorem2_prefactor(n, k, Composition({n / 2, n / 2}),
                              {Block{Partition({n / 2}, 2), 2}, Block{Partition({n / 2}, 2), 2}})
        .uniform.log;
  };
  double slope = (uni(2000000) - uni(20000)) / std::log(100.0);
  CHECK(slope == doctest::Approx((d * d / static_cast<double>(k) - 1) / 2).epsilon(1e-3));
}
