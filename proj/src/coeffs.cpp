#include "qconc/coeffs.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

namespace qconc {

double LogValue::linear() const {
  if (log > 700.0) return std::numeric_limits<double>::infinity();
  return std::exp(log);
}

BigInt barnes_g(int m) {
  if (m < 2) throw std::invalid_argument("barnes_g: argument must be at least 2");
  BigInt g = 1, f = 1;
  for (int i = 1; i <= m - 2; ++i) {
    f *= i;
    g *= f;
  }
  return g;
}

double log_barnes_g(int m) {
  if (m < 2) throw std::invalid_argument("log_barnes_g: argument must be at least 2");
  double s = 0.0;
  for (int i = 2; i <= m - 2; ++i) s += std::lgamma(i + 1.0);
  return s;
}

double log_factorial(int n) {
  if (n < 0) throw std::invalid_argument("log_factorial: negative argument");
  return std::lgamma(n + 1.0);
}

double log_binomial(int n, int k) {
  if (k < 0 || k > n) return -std::numeric_limits<double>::infinity();
  return log_factorial(n) - log_factorial(k) - log_factorial(n - k);
}

double log_multinomial_pmf(const std::vector<double>& t, const Composition& m) {
  if (t.size() != m.entries().size())
    throw std::invalid_argument("log_multinomial_pmf: length mismatch");
  double s = log_factorial(m.n());
  for (std::size_t i = 0; i < t.size(); ++i) {
    if (!(t[i] >= 0.0)) throw std::invalid_argument("log_multinomial_pmf: negative probability");
    s -= log_factorial(m[i]);
    if (m[i] == 0) continue;
    if (t[i] == 0.0) return -std::numeric_limits<double>::infinity();
    s += m[i] * std::log(t[i]);
  }
  return s;
}

LogValue f_c_type(int n, int k, const Composition& m) {
  if (m.k() != k || m.n() != n) throw std::invalid_argument("f_c_type: m is not in Z_n^k");
  if (n == 0) return {0.0};
  std::vector<double> t(k);
  for (int i = 0; i < k; ++i) t[i] = static_cast<double>(m[i]) / n;
  return {-log_multinomial_pmf(t, m)};
}

LogValue f_c_uniform(long long n, int k) {
  if (n < 1 || k < 1) throw std::invalid_argument("f_c_uniform: n and k must be positive");
  const double two_pi = 2.0 * std::numbers::pi;
  return {0.5 * (k - 1) * std::log(static_cast<double>(n)) -
          0.5 * (std::log(two_pi) + k * (std::log(static_cast<double>(k)) - 2.0))};
}

LogValue f_q_irrep(int n, int d, const Partition& p) {
  if (p.n() != n) throw std::invalid_argument("f_q_irrep: partition size differs from n");
  if (d < 1 || p.length() > d) throw std::invalid_argument("f_q_irrep: partition has more than d rows");
  if (n == 0) return {0.0};
  Partition q(p.parts(), d);
  std::vector<double> t(d);
  for (int i = 0; i < d; ++i) t[i] = static_cast<double>(q[i]) / n;
  return {log_dim_ratio(q, d) - log_schur_poly(q, t)};
}

LogValue f_q_uniform(long long n, int d) {
  if (n < 1 || d < 1) throw std::invalid_argument("f_q_uniform: n and d must be positive");
  const double two_pi = 2.0 * std::numbers::pi;
  const double lg = d + 1 >= 2 ? log_barnes_g(d + 1) : 0.0;
  return {0.5 * (static_cast<double>(d) * d - 1) * std::log(static_cast<double>(n) + d - 1) -
          0.5 * (std::log(two_pi) + d * (std::log(static_cast<double>(d)) - 2.0)) - lg};
}

Theorem2Prefactor theorem2_prefactor(int n, int k, const Composition& m, const std::vector<Block>& blocks) {
  if (static_cast<int>(blocks.size()) != k)
    throw std::invalid_argument("theorem2_prefactor: need one block per classical outcome");
  Theorem2Prefactor out;
  out.per_irrep = f_c_type(n, k, m);
  out.uniform = f_c_uniform(n, k);
  for (int j = 0; j < k; ++j) {
    if (blocks[j].irrep.n() != m[j])
      throw std::invalid_argument("theorem2_prefactor: block partition size differs from m_j");
    out.per_irrep.log += f_q_irrep(m[j], blocks[j].d, blocks[j].irrep).log;
    if (m[j] > 0) out.uniform.log += f_q_uniform(m[j], blocks[j].d).log;
  }
  return out;
}

} // namespace qconc
