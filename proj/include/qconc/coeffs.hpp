#pragma once

#include <vector>

#include "qconc/repcore.hpp"

namespace qconc {

// A positive quantity held as its natural log.
struct LogValue {
  double log = 0.0;
  // exp(log), or +inf when log > 700
  double linear() const;
};

BigInt barnes_g(int m);     // G(m) = prod_{i=0}^{m-2} i!, m >= 2
double log_barnes_g(int m);

double log_factorial(int n);
double log_binomial(int n, int k);

// log of n!/prod m_i! * prod t_i^{m_i}, with 0^0 = 1
double log_multinomial_pmf(const std::vector<double>& t, const Composition& m);

LogValue f_c_type(int n, int k, const Composition& m);
LogValue f_c_uniform(long long n, int k);
LogValue f_q_irrep(int n, int d, const Partition& p);
LogValue f_q_uniform(long long n, int d);

struct Block {
  Partition irrep;
  int d = 1;
};

struct Theorem2Prefactor {
  LogValue per_irrep;
  LogValue uniform;
};

Theorem2Prefactor theorem2_prefactor(int n, int k, const Composition& m,
                                     const std::vector<Block>& blocks);

} // namespace qconc
