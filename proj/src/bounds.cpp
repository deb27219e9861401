#include "qconc/bounds.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "qconc/coeffs.hpp"

namespace qconc {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double log_add(double a, double b) {
  if (a == -kInf) return b;
  if (b == -kInf) return a;
  const double m = std::max(a, b);
  return m + std::log1p(std::exp(std::min(a, b) - m));
}

template <class F>
double golden_min(F&& f, double a, double b, int iters) {
  const double g = (std::sqrt(5.0) - 1.0) / 2.0;
  double x1 = b - g * (b - a), x2 = a + g * (b - a);
  double f1 = f(x1), f2 = f(x2);
  for (int it = 0; it < iters; ++it) {
    if (f1 <= f2) {
      b = x2;
      x2 = x1;
      f2 = f1;
      x1 = b - g * (b - a);
      f1 = f(x1);
    } else {
      a = x1;
      x1 = x2;
      f1 = f2;
      x2 = a + g * (b - a);
      f2 = f(x2);
    }
  }
  return f1 <= f2 ? x1 : x2;
}

// scan then golden refinement between the neighbours of the best sample
template <class F>
double scan_min(F&& f, double lo, double hi, int samples, int iters, double* fbest) {
  double best_x = lo, best_f = f(lo);
  int best_i = 0;
  for (int i = 1; i <= samples; ++i) {
    const double x = lo + (hi - lo) * i / samples;
    const double v = f(x);
    if (v < best_f) {
      best_f = v;
      best_x = x;
      best_i = i;
    }
  }
  const double a = lo + (hi - lo) * std::max(0, best_i - 1) / samples;
  const double b = lo + (hi - lo) * std::min(samples, best_i + 1) / samples;
  if (b > a) {
    const double x = golden_min(f, a, b, iters);
    const double v = f(x);
    if (v < best_f) {
      best_f = v;
      best_x = x;
    }
  }
  if (fbest) *fbest = best_f;
  return best_x;
}

OptOptions scaled(const OptOptions& opt, long long N) {
  OptOptions o = opt;
  o.tol = std::max(std::min(opt.tol, 1e-8 / static_cast<double>(N)), 2e-16);
  return o;
}

void check_N(long long N) {
  if (N < 1) throw std::invalid_argument("N must be at least 1");
}

void check_eps(double eps) {
  if (!(eps > 0.0 && eps <= 1.0)) throw std::invalid_argument("epsilon must lie in (0, 1]");
}

} // namespace

const char* method_name(Method m) {
  switch (m) {
  case Method::azuma: return "azuma";
  case Method::kato: return "kato";
  case Method::quantum_perm: return "quantum_perm";
  case Method::classical_iidmeas: return "classical_iidmeas";
  case Method::iid: return "iid";
  }
  return "?";
}

Method parse_method(const std::string& s) {
  if (s == "azuma") return Method::azuma;
  if (s == "kato") return Method::kato;
  if (s == "quantum_perm" || s == "quantum") return Method::quantum_perm;
  if (s == "classical_iidmeas" || s == "classical") return Method::classical_iidmeas;
  if (s == "iid") return Method::iid;
  throw std::invalid_argument("unknown method '" + s + "'");
}

void BoundSpec::validate() const {
  check_N(N);
  if (epsilon.has_value() == delta.has_value())
    throw std::invalid_argument("BoundSpec: fix exactly one of epsilon and delta");
  if (epsilon) check_eps(*epsilon);
  if (delta && !(*delta >= 0.0)) throw std::invalid_argument("BoundSpec: delta must be nonnegative");
  if (!(gamma > 0.0)) throw std::invalid_argument("BoundSpec: gamma must be positive");
}

double azuma_delta(double gamma, long long N, double eps) {
  check_N(N);
  check_eps(eps);
  return (1.0 + gamma) * std::sqrt(std::log(1.0 / eps) / (2.0 * static_cast<double>(N)));
}

LogProb azuma_epsilon(double gamma, long long N, double delta) {
  check_N(N);
  return -2.0 * static_cast<double>(N) * delta * delta / ((1.0 + gamma) * (1.0 + gamma));
}

KatoParams kato_alpha_beta(double B_star, long long N, double eps_half) {
  check_N(N);
  check_eps(eps_half);
  const double n = static_cast<double>(N);
  if (!(B_star >= 0.0 && B_star <= n)) throw std::invalid_argument("kato_alpha_beta: B* must lie in [0, N]");
  const double L = std::log(1.0 / eps_half);
  const double sn = std::sqrt(n);
  const double BB = B_star * (n - B_star);
  const double den = (9.0 * n + 8.0 * L) * (9.0 * BB + 2.0 * n * L);
  const double t1 = 27.0 * std::sqrt(2.0) * n * (n - 2.0 * B_star) * std::sqrt(L * (9.0 * BB + 2.0 * n * L)) / (4.0 * den);
  const double t2 = (54.0 * sn * BB * L + 12.0 * n * sn * L * L) / den;
  KatoParams out;
  out.alpha = t1 - t2;
  const double s = 1.0 + 4.0 * out.alpha / (3.0 * sn);
  out.beta = std::sqrt(out.alpha * out.alpha + 0.5 * L * s * s);
  return out;
}

double kato_delta(double gamma, long long N, double eps, double B_hat, const KatoParams& ab) {
  check_N(N);
  check_eps(eps);
  const double n = static_cast<double>(N);
  return gamma / std::sqrt(n) * (ab.beta - ab.alpha * (1.0 - 2.0 * B_hat / n)) +
         std::sqrt(std::log(2.0 / eps) / (2.0 * n));
}

double kato_delta(double gamma, long long N, double eps, double B_star, double B_hat) {
  return kato_delta(gamma, N, eps, B_hat, kato_alpha_beta(B_star, N, eps / 2.0));
}

double kato_xi(double B_hat, double B_star, long long N, double delta_prime) {
  const double n = static_cast<double>(N);
  const double t = 1.0 - B_star / n - 4.0 * delta_prime / 3.0;
  return (1.0 - (1.0 - 2.0 * B_hat / n) * t) / (1.0 - (1.0 - 2.0 * B_star / n) * t);
}

KatoTerms kato_epsilon_terms(double gamma, long long N, double delta, double B_star, double B_hat,
                             double delta_prime) {
  const double n = static_cast<double>(N);
  KatoTerms t{0.0, 0.0, false};
  const double x = 1.0 - 2.0 * B_star / n - 4.0 * delta_prime / 3.0;
  const double den = 1.0 - x * x;
  const double xi = kato_xi(B_hat, B_star, N, delta_prime);
  const double shift = gamma * xi * delta_prime;
  t.feasible = delta_prime >= 0.0 && den > 0.0 && std::isfinite(xi) && shift <= delta && shift >= 0.0;
  t.log_kato = den > 0.0 ? -2.0 * n * delta_prime * delta_prime / den : 0.0;
  t.log_azuma = -2.0 * n * (delta - shift) * (delta - shift);
  return t;
}

KatoEpsilon kato_epsilon(double gamma, long long N, double delta, double B_star, double B_hat) {
  check_N(N);
  if (!(delta > 0.0)) return {0.0, 0.0};
  auto total = [&](double dp) {
    auto t = kato_epsilon_terms(gamma, N, delta, B_star, B_hat, dp);
    return t.feasible ? log_add(t.log_kato, t.log_azuma) : kInf;
  };
  const double n = static_cast<double>(N);
  const double cap = 1.5 * (1.0 - B_star / n);
  double hi = std::min(delta / gamma, cap);
  while (2.0 * hi < cap && total(2.0 * hi) < kInf) hi *= 2.0;
  while (hi > 0.0 && total(hi) == kInf) hi *= 0.999;
  KatoEpsilon out{total(0.0), 0.0};
  if (hi > 0.0) {
    double f = kInf;
    const double x = scan_min(total, 0.0, hi, 400, 120, &f);
    if (f < out.log_eps) out = {f, x};
  }
  out.log_eps = std::min(out.log_eps, 0.0);
  return out;
}

BoundValue sanov_iid_epsilon(const HalfspaceRegion& A, const Region& Q, long long N, const OptOptions& opt) {
  check_N(N);
  BoundValue out;
  if (!A.nonempty()) {
    out.log_eps = -kInf;
    return out;
  }
  auto r = min_kl_between_regions(A, Q, N, scaled(opt, N));
  out.log_eps = std::min(0.0, r.log_bound);
  out.divergence = r.divergence;
  out.p_star = r.p_star;
  out.q_star = r.q_star;
  out.converged = r.converged;
  return out;
}

BoundValue quantum_perm_epsilon(const HalfspaceRegion& A, const Region& Q, long long N, int d, const OptOptions& opt) {
  check_N(N);
  BoundValue out;
  if (!A.nonempty()) {
    out.log_eps = -kInf;
    return out;
  }
  auto r = min_kl_between_regions(A, Q, N, scaled(opt, N));
  out.log_eps = std::min(0.0, r.log_bound + f_q_uniform(N, d).log);
  out.divergence = r.divergence;
  out.p_star = r.p_star;
  out.q_star = r.q_star;
  out.converged = r.converged;
  return out;
}

RegionFamily RegionFamily::fixed(const HalfspaceRegion& R) {
  RegionFamily f;
  f.member = [R](double) { return R; };
  f.lo = f.hi = 0.0;
  return f;
}

BoundValue classical_iidmeas_epsilon(const HalfspaceRegion& A, const RegionFamily& R, long long N, int k,
                                     const OptOptions& opt) {
  check_N(N);
  if (!(R.hi >= R.lo)) throw std::invalid_argument("classical_iidmeas_epsilon: empty parameter range");
  BoundValue out;
  if (!A.nonempty()) {
    out.log_eps = -kInf;
    return out;
  }
  const OptOptions o = scaled(opt, N);
  OptResult best;
  bool have = false;
  auto eval = [&](double t) {
    t = std::clamp(t, R.lo, R.hi);
    auto Rp = expand_region(R.member(t), N);
    auto r = min_kl_between_regions(A, Rp, N, o);
    if (!have || r.divergence > best.divergence) {
      best = r;
      out.family_param = t;
      have = true;
    }
    return -r.divergence;
  };
  if (R.hi > R.lo) {
    double t0 = R.hint ? std::clamp(*R.hint, R.lo, R.hi) : 0.0;
    double f0 = R.hint ? eval(t0) : 0.0;
    if (!R.hint || f0 == 0.0) {
      t0 = scan_min(eval, R.lo, R.hi, 64, 0, &f0);
      t0 = out.family_param;
      f0 = -best.divergence;
    }
    if (f0 < 0.0) {
      // bracket the peak around t0, then refine
      double w = 1e-3 * (1.0 + std::fabs(t0));
      double a = t0, b = t0;
      while (a > R.lo) {
        a = std::max(R.lo, t0 - w);
        if (eval(a) > f0) break;
        w *= 2.0;
      }
      w = 1e-3 * (1.0 + std::fabs(t0));
      while (b < R.hi) {
        b = std::min(R.hi, t0 + w);
        if (eval(b) > f0) break;
        w *= 2.0;
      }
      golden_min(eval, a, b, 90);
    }
  } else {
    eval(R.lo);
  }
  out.log_eps = std::min(0.0, best.log_bound + f_c_uniform(N, k).log);
  out.divergence = best.divergence;
  out.p_star = best.p_star;
  out.q_star = best.q_star;
  out.converged = best.converged;
  return out;
}

double invert_delta(const std::function<LogProb(double)>& log_eps, LogProb target, double lo, double hi,
                    int iterations) {
  if (log_eps(lo) <= target) return lo;
  if (log_eps(hi) > target) return hi;
  for (int it = 0; it < iterations; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (log_eps(mid) <= target) hi = mid;
    else lo = mid;
  }
  return hi;
}

} // namespace qconc
