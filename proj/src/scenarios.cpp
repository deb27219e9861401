#include "qconc/scenarios.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

#include <json.hpp>

#include "qconc/geometry.hpp"

namespace qconc {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kGammaCap = 1e4;

template <class F>
double golden_max(F&& f, double a, double b, int iters) {
  const double g = (std::sqrt(5.0) - 1.0) / 2.0;
  double x1 = b - g * (b - a), x2 = a + g * (b - a);
  double f1 = f(x1), f2 = f(x2);
  for (int it = 0; it < iters; ++it) {
    if (f1 >= f2) {
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
  return f1 >= f2 ? x1 : x2;
}

bool admissible(double gp, double r) {
  const double m = m_gamma(gp, r);
  return m >= 0.0 && m < 1.0 && HalfspaceRegion({1.0, -gp, 0.0}, m).theorem3_shaped();
}

double family_lower_end(double r) {
  double lo = -2.0, hi = 0.0; // inadmissible, admissible
  for (int it = 0; it < 200 && hi - lo > 1e-15; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (admissible(mid, r)) hi = mid;
    else lo = mid;
  }
  return hi;
}

Eigen::Matrix2cd ry(double theta) {
  Eigen::Matrix2cd R;
  R << std::cos(theta / 2), -std::sin(theta / 2), std::sin(theta / 2), std::cos(theta / 2);
  return R;
}

HermitianOp kron(const Eigen::Matrix2cd& a, const Eigen::Matrix2cd& b) {
  HermitianOp out(4, 4);
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j) out.block(2 * i, 2 * j, 2, 2) = a(i, j) * b;
  return out;
}

HalfspaceRegion qkd_failure_region(double delta) { return HalfspaceRegion::at_least({1.0, -1.25, 0.0}, delta); }
HalfspaceRegion qkd_region() { return HalfspaceRegion({1.0, -1.25, 0.0}, 0.0); }

} // namespace

double m_gamma(double gamma, double r) {
  if (!(r > 0.0 && r < 1.0)) throw std::invalid_argument("m_gamma: r must lie in (0, 1)");
  return (1.0 - gamma + std::sqrt((1.0 - gamma) * (1.0 - gamma) + 4.0 * r * gamma)) / 4.0;
}

Eigen::Matrix2cd M_c(double gamma, double r) {
  if (!(r > 0.0 && r < 1.0)) throw std::invalid_argument("M_c: r must lie in (0, 1)");
  Eigen::Vector2cd e1(0, 1), phi1(std::sqrt(r), -std::sqrt(1 - r));
  return 0.5 * e1 * e1.adjoint() - 0.5 * gamma * phi1 * phi1.adjoint();
}

ToyModelParams ToyModelParams::preset(long long N, double B_star_fraction) {
  ToyModelParams p;
  p.N = N;
  p.B_star = p.B_hat = B_star_fraction * static_cast<double>(N);
  return p;
}

void ToyModelParams::validate() const {
  if (!(r > 0.0 && r < 1.0)) throw std::invalid_argument("toy model: r must lie in (0, 1)");
  if (!(gamma > 0.0)) throw std::invalid_argument("toy model: gamma must be positive");
  if (N < 1) throw std::invalid_argument("toy model: N must be at least 1");
  if (epsilon && !(*epsilon > 0.0 && *epsilon <= 1.0)) throw std::invalid_argument("toy model: epsilon must lie in (0, 1]");
  if (delta && !(*delta >= 0.0)) throw std::invalid_argument("toy model: Delta must be nonnegative");
  const double n = static_cast<double>(N);
  if (!(B_star >= 0.0 && B_star <= n && B_hat >= 0.0 && B_hat <= n))
    throw std::invalid_argument("toy model: B* and B^ must lie in [0, N]");
}

HalfspaceRegion toy_failure_region(double gamma, double r, double delta) {
  return HalfspaceRegion::at_least({1.0, -gamma, 0.0}, m_gamma(gamma, r) + delta);
}

RegionFamily toy_region_family(double r) {
  RegionFamily f;
  f.member = [r](double gp) { return HalfspaceRegion({1.0, -gp, 0.0}, m_gamma(gp, r)); };
  f.lo = family_lower_end(r);
  f.hi = kGammaCap;
  return f;
}

double toy_tangent_slope(double r, const std::vector<double>& q) {
  if (q.size() != 3) throw std::invalid_argument("toy_tangent_slope: expected three outcomes");
  // q1 - g q2 - m(g) is concave in g and vanishes at the touching member
  const double lo = family_lower_end(r);
  return golden_max([&](double g) { return q[0] - g * q[1] - m_gamma(g, r); }, lo, kGammaCap, 160);
}

ToyResult toy_epsilon(Method method, const ToyModelParams& P) {
  P.validate();
  if (!P.delta) throw std::invalid_argument("toy_epsilon: Delta is required");
  const double delta = *P.delta;
  ToyResult out;
  out.delta = delta;
  switch (method) {
  case Method::azuma:
    out.log_eps = std::min(0.0, azuma_epsilon(P.gamma, P.N, delta));
    return out;
  case Method::kato:
    out.log_eps = kato_epsilon(P.gamma, P.N, delta, P.B_star, P.B_hat).log_eps;
    return out;
  default:
    break;
  }
  const auto A = toy_failure_region(P.gamma, P.r, delta);
  const auto Q = toy_Q_image(P.r);
  BoundValue b;
  if (method == Method::iid) {
    b = sanov_iid_epsilon(A, Q, P.N);
  } else if (method == Method::quantum_perm) {
    b = quantum_perm_epsilon(A, Q, P.N, 2);
  } else {
    auto fam = toy_region_family(P.r);
    if (A.nonempty()) {
      auto iid = sanov_iid_epsilon(A, Q, P.N);
      if (iid.divergence > 0.0) fam.hint = toy_tangent_slope(P.r, iid.q_star);
    }
    b = classical_iidmeas_epsilon(A, fam, P.N, 3);
    out.gamma_prime = b.family_param;
  }
  out.log_eps = b.log_eps;
  out.p_star = b.p_star;
  out.q_star = b.q_star;
  out.converged = b.converged;
  return out;
}

ToyResult toy_delta(Method method, const ToyModelParams& P) {
  P.validate();
  if (!P.epsilon) throw std::invalid_argument("toy_delta: epsilon is required");
  const double eps = *P.epsilon;
  ToyResult out;
  out.log_eps = std::log(eps);
  if (method == Method::azuma) {
    out.delta = azuma_delta(P.gamma, P.N, eps);
    return out;
  }
  if (method == Method::kato) {
    out.delta = kato_delta(P.gamma, P.N, eps, P.B_star, P.B_hat);
    return out;
  }
  ToyModelParams Q = P;
  Q.epsilon.reset();
  bool converged = true;
  auto f = [&](double d) {
    Q.delta = d;
    auto r = toy_epsilon(method, Q);
    converged = converged && r.converged;
    return r.log_eps;
  };
  const double hi = 1.0 - m_gamma(P.gamma, P.r);
  const double d = invert_delta(f, std::log(eps), 0.0, hi);
  Q.delta = d;
  out = toy_epsilon(method, Q);
  out.converged = out.converged && converged;
  return out;
}

PBC00Operators pbc00_operators() {
  Eigen::Vector2cd k0(1, 0), k1(0, 1);
  Eigen::Vector2cd kp = (k0 + k1) / std::sqrt(2.0), km = (k0 - k1) / std::sqrt(2.0);
  Eigen::Matrix2cd F = Eigen::Matrix2cd::Zero();
  F(0, 0) = 1.0;
  F(1, 1) = 1.0 / std::sqrt(3.0);
  auto proj = [](const Eigen::Vector2cd& v) -> Eigen::Matrix2cd { return v * v.adjoint(); };
  auto leg = [&](const Eigen::Vector2cd& b, int r) -> Eigen::Matrix2cd {
    const Eigen::Matrix2cd R = ry(2.0 * std::numbers::pi * r / 3.0);
    return F * R * proj(b) * R.adjoint() * F;
  };
  PBC00Operators out{HermitianOp::Zero(4, 4), HermitianOp::Zero(4, 4)};
  for (int r = 0; r < 3; ++r) {
    out.Pi_bit += kron(proj(k0), leg(k1, r)) + kron(proj(k1), leg(k0, r));
    out.Pi_ph += kron(proj(kp), leg(km, r)) + kron(proj(km), leg(kp, r));
  }
  out.Pi_bit /= 3.0;
  out.Pi_ph /= 3.0;
  return out;
}

double QkdParams::sift() const { return N_sift ? *N_sift : static_cast<double>(N) / 4.0; }
double QkdParams::bit() const { return N_bit ? *N_bit : bit_error_rate * static_cast<double>(N) / 4.0; }
double QkdParams::bit_star() const { return N_bit_star ? *N_bit_star : bit(); }

void QkdParams::validate() const {
  if (N < 1) throw std::invalid_argument("qkd: N must be at least 1");
  if (!(epsilon > 0.0 && epsilon <= 1.0)) throw std::invalid_argument("qkd: epsilon must lie in (0, 1]");
  if (s < 0 || s_prime < 0) throw std::invalid_argument("qkd: s and s_prime must be nonnegative");
  if (!(bit_error_rate >= 0.0 && bit_error_rate <= 1.0)) throw std::invalid_argument("qkd: bit_error_rate must lie in [0, 1]");
  const double n = static_cast<double>(N);
  if (!(sift() > 0.0 && sift() <= n)) throw std::invalid_argument("qkd: N_sift must lie in (0, N]");
  if (!(bit() >= 0.0 && bit() <= n - sift())) throw std::invalid_argument("qkd: N_bit must lie in [0, N - N_sift]");
  if (!(bit_star() >= 0.0 && bit_star() <= n)) throw std::invalid_argument("qkd: N_bit_star must lie in [0, N]");
}

PhaseErrorBound pbc00_phase_error_upper(Method method, const QkdParams& P) {
  P.validate();
  const double n = static_cast<double>(P.N);
  const double base = 1.25 * P.bit();
  PhaseErrorBound out;
  out.log_eps = std::log(P.epsilon);
  switch (method) {
  case Method::azuma:
    out.U = base + 2.25 * std::sqrt(n * std::log(1.0 / P.epsilon) / 2.0);
    return out;
  case Method::kato: {
    auto ab = kato_alpha_beta(P.bit_star(), P.N, P.epsilon / 2.0);
    out.U = base + std::sqrt(n * std::log(2.0 / P.epsilon) / 2.0) +
            1.25 * std::sqrt(n) * (ab.beta - ab.alpha * (1.0 - 2.0 * P.bit() / n));
    return out;
  }
  default:
    break;
  }
  const auto Q = qkd_region();
  const auto fam = RegionFamily::fixed(qkd_region());
  bool converged = true;
  auto f = [&](double d) {
    const auto A = qkd_failure_region(d);
    BoundValue b;
    if (method == Method::iid) b = sanov_iid_epsilon(A, Q, P.N);
    else if (method == Method::quantum_perm) b = quantum_perm_epsilon(A, Q, P.N, 4);
    else b = classical_iidmeas_epsilon(A, fam, P.N, 3);
    converged = converged && b.converged;
    return b.log_eps;
  };
  out.delta = invert_delta(f, std::log(P.epsilon), 0.0, 1.0);
  out.U = base + n * out.delta;
  out.converged = converged;
  return out;
}

double binary_entropy(double x) {
  x = std::clamp(x, 0.0, 1.0);
  if (x == 0.0 || x == 1.0) return 0.0;
  return -x * std::log2(x) - (1.0 - x) * std::log2(1.0 - x);
}

KeyRate pbc00_key_rate(Method method, const QkdParams& P) {
  auto U = pbc00_phase_error_upper(method, P);
  KeyRate out;
  out.U = U.U;
  out.converged = U.converged;
  const double sift = P.sift();
  const double x = U.U / sift;
  if (x > 1.0) {
    out.phase_error_overflow = true;
    out.rate = -kInf;
    return out;
  }
  // h is decreasing past 1/2, a larger U must not raise the rate
  const double hph = binary_entropy(std::min(x, 0.5));
  out.rate = (sift * (1.0 - binary_entropy(P.bit() / sift) - hph) - P.s - P.s_prime) / static_cast<double>(P.N);
  return out;
}

double pbc00_asymptotic_rate(double e) { return 0.25 * (1.0 - binary_entropy(e) - binary_entropy(1.25 * e)); }

std::vector<long long> log_grid(double lo, double hi, int per_decade) {
  if (!(lo >= 1.0 && hi >= lo) || per_decade < 1) throw std::invalid_argument("log_grid: bad range");
  std::vector<long long> out;
  const double a = std::log10(lo), b = std::log10(hi);
  const int steps = static_cast<int>(std::lround((b - a) * per_decade));
  for (int i = 0; i <= steps; ++i) {
    const long long v = std::llround(std::pow(10.0, a + (b - a) * i / std::max(steps, 1)));
    if (out.empty() || v != out.back()) out.push_back(v);
  }
  return out;
}

ScenarioConfig parse_scenario_config(const std::string& text) {
  using nlohmann::json;
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw std::invalid_argument(std::string("config: malformed JSON: ") + e.what());
  }
  if (!j.is_object()) throw std::invalid_argument("config: top level must be an object");
  ScenarioConfig c;
  auto num = [&](const std::string& key, double lo, double hi, bool open_lo) {
    const auto& v = j.at(key);
    if (!v.is_number()) throw std::invalid_argument("config: key '" + key + "' must be a number");
    const double x = v.get<double>();
    if (!std::isfinite(x) || x > hi || (open_lo ? x <= lo : x < lo))
      throw std::invalid_argument("config: key '" + key + "' is out of range");
    return x;
  };
  auto integer = [&](const std::string& key, double v) {
    if (v != std::floor(v)) throw std::invalid_argument("config: key '" + key + "' must be an integer");
    return static_cast<long long>(v);
  };
  for (auto it = j.begin(); it != j.end(); ++it) {
    const std::string& key = it.key();
    if (key == "r") {
      c.r = num(key, 0.0, 1.0, true);
      if (c.r >= 1.0) throw std::invalid_argument("config: key 'r' is out of range");
    } else if (key == "gamma") {
      c.gamma = num(key, 0.0, 1e6, true);
    } else if (key == "N_grid") {
      if (!it.value().is_array() || it.value().empty())
        throw std::invalid_argument("config: key 'N_grid' must be a non-empty array");
      for (const auto& v : it.value()) {
        if (!v.is_number()) throw std::invalid_argument("config: key 'N_grid' must hold numbers");
        const double x = v.get<double>();
        if (!(x >= 1.0 && x <= 9e18)) throw std::invalid_argument("config: key 'N_grid' is out of range");
        c.N_grid.push_back(integer(key, x));
      }
    } else if (key == "epsilon") {
      c.epsilon = num(key, 0.0, 1.0, true);
    } else if (key == "Delta") {
      c.Delta = num(key, 0.0, 1.0, false);
    } else if (key == "B_star_fraction") {
      c.B_star_fraction = num(key, 0.0, 1.0, false);
    } else if (key == "s") {
      c.s = static_cast<int>(integer(key, num(key, 0.0, 1e6, false)));
    } else if (key == "s_prime") {
      c.s_prime = static_cast<int>(integer(key, num(key, 0.0, 1e6, false)));
    } else if (key == "bit_error_rate") {
      c.bit_error_rate = num(key, 0.0, 0.5, false);
    } else {
      throw std::invalid_argument("config: unknown key '" + key + "'");
    }
  }
  return c;
}

} // namespace qconc
