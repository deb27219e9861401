#include "qconc/repcore.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numeric>
#include <stdexcept>
#include <string>
#include <unordered_map>

namespace qconc {

Partition::Partition(std::vector<int> parts) : parts_(std::move(parts)) {
  for (std::size_t i = 0; i < parts_.size(); ++i) {
    if (parts_[i] < 0) throw std::invalid_argument("Partition: negative part");
    if (i > 0 && parts_[i] > parts_[i - 1])
      throw std::invalid_argument("Partition: parts must be weakly decreasing");
    n_ += parts_[i];
  }
}

Partition::Partition(std::vector<int> parts, int d) {
  if (d < 0) throw std::invalid_argument("Partition: negative row count");
  while (static_cast<int>(parts.size()) > d && !parts.empty() && parts.back() == 0)
    parts.pop_back();
  if (static_cast<int>(parts.size()) > d)
    throw std::invalid_argument("Partition: more nonzero parts than rows");
  parts.resize(d, 0);
  *this = Partition(std::move(parts));
}

int Partition::length() const {
  return static_cast<int>(std::count_if(parts_.begin(), parts_.end(), [](int x) { return x > 0; }));
}

Composition::Composition(std::vector<int> entries) : entries_(std::move(entries)) {
  for (int e : entries_) {
    if (e < 0) throw std::invalid_argument("Composition: negative entry");
    n_ += e;
  }
}

static void partitions_rec(int remaining, int maxpart, int rows, std::vector<int>& cur,
                           std::vector<Partition>& out, int d) {
  if (remaining == 0) {
    std::vector<int> p = cur;
    p.resize(d, 0);
    out.emplace_back(std::move(p));
    return;
  }
  if (rows == 0) return;
  for (int a = std::min(remaining, maxpart); a >= 1; --a) {
    if (static_cast<long>(a) * rows < remaining) break;
    cur.push_back(a);
    partitions_rec(remaining - a, a, rows - 1, cur, out, d);
    cur.pop_back();
  }
}

std::vector<Partition> enumerate_partitions(int n, int d) {
  if (d <= 0) throw std::invalid_argument("enumerate_partitions: d must be positive");
  if (n < 0) throw std::invalid_argument("enumerate_partitions: n must be nonnegative");
  std::vector<Partition> out;
  std::vector<int> cur;
  partitions_rec(n, n, d, cur, out, d);
  return out;
}

std::vector<std::vector<int>> hook_lengths(const Partition& p) {
  const auto& lam = p.parts();
  std::vector<std::vector<int>> h;
  for (int i = 0; i < p.length(); ++i) {
    std::vector<int> row(lam[i]);
    for (int j = 0; j < lam[i]; ++j) {
      int leg = 0;
      for (int r = i + 1; r < p.d() && lam[r] > j; ++r) ++leg;
      row[j] = lam[i] - j - 1 + leg + 1;
    }
    h.push_back(std::move(row));
  }
  return h;
}

BigInt factorial(int n) {
  if (n < 0) throw std::invalid_argument("factorial: negative argument");
  BigInt f = 1;
  for (int i = 2; i <= n; ++i) f *= i;
  return f;
}

BigInt dim_sn_irrep(const Partition& p) {
  BigInt den = 1;
  for (const auto& row : hook_lengths(p))
    for (int h : row) den *= h;
  BigInt num = factorial(p.n());
  if (num % den != 0) throw std::logic_error("dim_sn_irrep: hook product does not divide n!");
  return num / den;
}

BigInt dim_ud_irrep(const Partition& p, int d) {
  if (p.length() > d) return 0;
  BigInt num = 1, den = 1;
  auto hooks = hook_lengths(p);
  for (int i = 0; i < p.length(); ++i)
    for (int j = 0; j < p[i]; ++j) {
      num *= (d - i + j);
      den *= hooks[i][j];
    }
  if (num % den != 0) throw std::logic_error("dim_ud_irrep: non-integral result");
  return num / den;
}

double log_dim_ratio(const Partition& p, int d) {
  if (p.length() > d) throw std::invalid_argument("log_dim_ratio: too many rows");
  double s = -std::lgamma(p.n() + 1.0);
  for (int i = 0; i < p.length(); ++i)
    for (int j = 0; j < p[i]; ++j) s += std::log(static_cast<double>(d - i + j));
  return s;
}

// Branching rule s_lam(t_1..t_k) = sum_{mu interlacing lam} t_k^{|lam|-|mu|} s_mu(t_1..t_{k-1}).
// Level k holds every mu with k parts and lam[i+d-k] <= mu[i] <= lam[i].
namespace {

struct LinearRing {
  static double zero() { return 0.0; }
  static double add(double a, double b) { return a + b; }
  static double mul(double a, double b) { return a * b; }
  static double pw(double t, int e) { return e == 0 ? 1.0 : std::pow(t, e); }
};

struct LogRing {
  static double zero() { return -std::numeric_limits<double>::infinity(); }
  static double add(double a, double b) {
    if (a == zero()) return b;
    if (b == zero()) return a;
    double m = std::max(a, b);
    return m + std::log1p(std::exp(-std::fabs(a - b)));
  }
  static double mul(double a, double b) { return a + b; }
  static double pw(double t, int e) {
    if (e == 0) return 0.0;
    return t > 0 ? e * std::log(t) : zero();
  }
};

template <class Ring>
double branching_schur(const std::vector<int>& lam, const std::vector<double>& t) {
  const int d = static_cast<int>(lam.size());
  int n = 0;
  for (int x : lam) n += x;
  std::vector<double> prev, cur;
  std::vector<int> prev_lo, prev_ext;
  std::vector<std::int64_t> prev_stride;

  for (int k = 1; k <= d; ++k) {
    std::vector<int> lo(k), ext(k);
    std::vector<std::int64_t> stride(k);
    std::int64_t size = 1;
    for (int i = k - 1; i >= 0; --i) {
      lo[i] = lam[i + d - k];
      ext[i] = lam[i] - lo[i] + 1;
      stride[i] = size;
      size *= ext[i];
    }
    std::vector<double> pw(n + 1);
    for (int e = 0; e <= n; ++e) pw[e] = Ring::pw(t[k - 1], e);

    cur.assign(size, Ring::zero());
    std::vector<int> mu(k);
    for (std::int64_t idx = 0; idx < size; ++idx) {
      std::int64_t rem = idx;
      int mu_sum = 0;
      bool ok = true;
      for (int i = 0; i < k; ++i) {
        mu[i] = lo[i] + static_cast<int>(rem / stride[i]);
        rem %= stride[i];
        mu_sum += mu[i];
        if (i > 0 && mu[i] > mu[i - 1]) ok = false;
      }
      if (!ok) continue;
      if (k == 1) {
        cur[idx] = pw[mu[0]];
        continue;
      }
      // nu[i] in [mu[i+1], mu[i]], i < k-1
      std::vector<int> nu(k - 1);
      for (int i = 0; i < k - 1; ++i) nu[i] = mu[i + 1];
      double total = Ring::zero();
      while (true) {
        std::int64_t pidx = 0;
        int nu_sum = 0;
        for (int i = 0; i < k - 1; ++i) {
          pidx += (nu[i] - prev_lo[i]) * prev_stride[i];
          nu_sum += nu[i];
        }
        double v = prev[pidx];
        if (v != Ring::zero()) total = Ring::add(total, Ring::mul(pw[mu_sum - nu_sum], v));
        int i = k - 2;
        while (i >= 0) {
          if (nu[i] < mu[i]) {
            ++nu[i];
            break;
          }
          nu[i] = mu[i + 1];
          --i;
        }
        if (i < 0) break;
      }
      cur[idx] = total;
    }
    prev.swap(cur);
    prev_lo = lo;
    prev_ext = ext;
    prev_stride = stride;
  }
  return prev.empty() ? Ring::zero() : prev[0];
}

std::vector<int> fit_rows(const Partition& p, std::size_t nvars, bool& vanishes) {
  vanishes = p.length() > static_cast<int>(nvars);
  std::vector<int> lam = p.parts();
  lam.resize(nvars, 0);
  return lam;
}

void check_nonnegative(const std::vector<double>& t) {
  if (t.empty()) throw std::invalid_argument("schur_poly: no variables");
  for (double x : t)
    if (!(x >= 0.0) || !std::isfinite(x))
      throw std::invalid_argument("schur_poly: entries must be finite and nonnegative");
}

} // namespace

double schur_poly(const Partition& p, const std::vector<double>& t) {
  check_nonnegative(t);
  bool vanishes = false;
  auto lam = fit_rows(p, t.size(), vanishes);
  if (vanishes) return 0.0;
  return branching_schur<LinearRing>(lam, t);
}

double log_schur_poly(const Partition& p, const std::vector<double>& t) {
  check_nonnegative(t);
  bool vanishes = false;
  auto lam = fit_rows(p, t.size(), vanishes);
  if (vanishes) return -std::numeric_limits<double>::infinity();
  double tmax = *std::max_element(t.begin(), t.end());
  if (tmax == 0.0)
    return p.n() == 0 ? 0.0 : -std::numeric_limits<double>::infinity();
  std::vector<double> s(t.size());
  for (std::size_t i = 0; i < t.size(); ++i) s[i] = t[i] / tmax;
  double v = branching_schur<LinearRing>(lam, s);
  if (v > 0.0 && std::isfinite(v) && v > 1e-280) return p.n() * std::log(tmax) + std::log(v);
  return p.n() * std::log(tmax) + branching_schur<LogRing>(lam, s);
}

namespace {

using Memo = std::map<std::pair<std::vector<int>, std::size_t>, BigInt>;

BigInt mn_rec(const std::vector<int>& beta, const std::vector<int>& mu, std::size_t idx, Memo& memo) {
  if (idx == mu.size()) return 1;
  auto key = std::make_pair(beta, idx);
  if (auto it = memo.find(key); it != memo.end()) return it->second;
  const int r = mu[idx];
  BigInt total = 0;
  for (std::size_t a = 0; a < beta.size(); ++a) {
    int b = beta[a];
    int target = b - r;
    if (target < 0) continue;
    if (std::binary_search(beta.begin(), beta.end(), target)) continue;
    int between = 0;
    for (int x : beta)
      if (x > target && x < b) ++between;
    std::vector<int> next = beta;
    next[a] = target;
    std::sort(next.begin(), next.end());
    BigInt sub = mn_rec(next, mu, idx + 1, memo);
    if (between % 2) total -= sub;
    else total += sub;
  }
  memo.emplace(std::move(key), total);
  return total;
}

} // namespace

BigInt sn_character(const Partition& lambda, const Partition& mu) {
  if (lambda.n() != mu.n())
    throw std::invalid_argument("sn_character: lambda and mu have different sizes");
  const int L = lambda.length();
  std::vector<int> beta(L);
  for (int i = 0; i < L; ++i) beta[i] = lambda[i] + L - 1 - i;
  std::sort(beta.begin(), beta.end());
  std::vector<int> cyc;
  for (int x : mu.parts())
    if (x > 0) cyc.push_back(x);
  Memo memo;
  return mn_rec(beta, cyc, 0, memo);
}

BigInt class_size(const Partition& mu) {
  std::map<int, int> mult;
  for (int x : mu.parts())
    if (x > 0) ++mult[x];
  BigInt z = 1;
  for (auto [len, m] : mult) {
    for (int i = 0; i < m; ++i) z *= len;
    z *= factorial(m);
  }
  return factorial(mu.n()) / z;
}

CharacterTable character_table(int n) {
  CharacterTable tab;
  tab.n = n;
  tab.irreps = enumerate_partitions(n, std::max(n, 1));
  tab.classes = tab.irreps;
  for (const auto& c : tab.classes) tab.class_sizes.push_back(class_size(c));
  for (const auto& l : tab.irreps) {
    std::vector<BigInt> row;
    for (const auto& c : tab.classes) row.push_back(sn_character(l, c));
    tab.chi.push_back(std::move(row));
  }
  return tab;
}

namespace {

std::int64_t checked_dim(int d, int n, std::int64_t cap) {
  if (d < 1) throw std::invalid_argument("projector: d must be positive");
  if (n < 0) throw std::invalid_argument("projector: n must be nonnegative");
  std::int64_t D = 1;
  for (int i = 0; i < n; ++i) {
    D *= d;
    if (D > cap) throw std::length_error("projector: d^n exceeds the configured cap");
  }
  return D;
}

std::uint64_t cycle_key(const std::vector<int>& perm, std::vector<char>& seen) {
  const int n = static_cast<int>(perm.size());
  std::fill(seen.begin(), seen.end(), 0);
  std::uint64_t key = 0;
  for (int i = 0; i < n; ++i) {
    if (seen[i]) continue;
    int len = 0;
    for (int j = i; !seen[j]; j = perm[j]) {
      seen[j] = 1;
      ++len;
    }
    key += std::uint64_t{1} << (4 * (len - 1));
  }
  return key;
}

std::uint64_t cycle_key(const Partition& mu) {
  std::uint64_t key = 0;
  for (int x : mu.parts())
    if (x > 0) key += std::uint64_t{1} << (4 * (x - 1));
  return key;
}

} // namespace

HermitianOp permutation_operator(const std::vector<int>& perm, int d) {
  const int n = static_cast<int>(perm.size());
  const std::int64_t D = checked_dim(d, n, std::numeric_limits<std::int64_t>::max() / d);
  std::vector<std::int64_t> pw(n);
  for (int i = 0; i < n; ++i) {
    pw[i] = 1;
    for (int j = i + 1; j < n; ++j) pw[i] *= d;
  }
  HermitianOp V = HermitianOp::Zero(D, D);
  for (std::int64_t x = 0; x < D; ++x) {
    std::int64_t y = 0;
    for (int i = 0; i < n; ++i) y += ((x / pw[i]) % d) * pw[perm[i]];
    V(y, x) = 1.0;
  }
  return V;
}

std::vector<IsotypicProjector> schur_weyl_projectors(int d, int n, const ProjectorOptions& opt) {
  const std::int64_t D = checked_dim(d, n, opt.max_dim);
  if (n > 15) throw std::length_error("projector: n too large for permutation enumeration");
  auto irreps = enumerate_partitions(n, d);
  const std::size_t nl = irreps.size();

  // characters of each irrep by cycle-type key
  std::unordered_map<std::uint64_t, std::vector<std::int64_t>> chi;
  for (const auto& c : enumerate_partitions(n, std::max(n, 1))) {
    std::vector<std::int64_t> v(nl);
    for (std::size_t l = 0; l < nl; ++l) v[l] = static_cast<std::int64_t>(sn_character(irreps[l], c));
    chi.emplace(cycle_key(c), std::move(v));
  }

  std::vector<std::int64_t> pw(n);
  for (int i = 0; i < n; ++i) {
    pw[i] = 1;
    for (int j = i + 1; j < n; ++j) pw[i] *= d;
  }
  auto digits = [&](std::int64_t x) {
    std::vector<int> dg(n);
    for (int i = 0; i < n; ++i) dg[i] = static_cast<int>((x / pw[i]) % d);
    return dg;
  };
  auto index_of = [&](const std::vector<int>& dg) {
    std::int64_t x = 0;
    for (int i = 0; i < n; ++i) x += dg[i] * pw[i];
    return x;
  };

  // one canonical (sorted) basis vector per weight type
  std::map<std::vector<int>, std::size_t> type_id;
  std::vector<std::vector<int>> canon;
  for (std::int64_t x = 0; x < D; ++x) {
    auto dg = digits(x);
    std::sort(dg.begin(), dg.end());
    if (type_id.emplace(dg, canon.size()).second) canon.push_back(dg);
  }
  const std::size_t nt = canon.size();

  // col[t][l][y] = sum of chi_l(sigma) over sigma with V_sigma canon_t = y
  std::vector<std::vector<std::vector<std::int64_t>>> col(
      nt, std::vector<std::vector<std::int64_t>>(nl, std::vector<std::int64_t>(D, 0)));
  std::vector<int> perm(n);
  std::iota(perm.begin(), perm.end(), 0);
  std::vector<char> seen(n);
  do {
    const auto& ch = chi.at(cycle_key(perm, seen));
    for (std::size_t t = 0; t < nt; ++t) {
      std::int64_t y = 0;
      for (int i = 0; i < n; ++i) y += canon[t][i] * pw[perm[i]];
      for (std::size_t l = 0; l < nl; ++l) col[t][l][y] += ch[l];
    }
  } while (std::next_permutation(perm.begin(), perm.end()));

  std::vector<Eigen::MatrixXd> P(nl, Eigen::MatrixXd::Zero(D, D));
  std::vector<double> coef(nl);
  for (std::size_t l = 0; l < nl; ++l)
    coef[l] = static_cast<double>(dim_sn_irrep(irreps[l])) / static_cast<double>(factorial(n));

  std::vector<int> pi(n), ydg(n), zdg(n);
  for (std::int64_t x = 0; x < D; ++x) {
    auto xd = digits(x);
    auto sorted = xd;
    std::sort(sorted.begin(), sorted.end());
    const std::size_t t = type_id.at(sorted);
    // pi maps canonical positions to positions of x holding the same digit
    std::vector<int> next_pos(d, 0);
    std::vector<std::vector<int>> where(d);
    for (int i = 0; i < n; ++i) where[xd[i]].push_back(i);
    for (int i = 0; i < n; ++i) pi[i] = where[canon[t][i]][next_pos[canon[t][i]]++];
    for (std::int64_t y = 0; y < D; ++y) {
      ydg = digits(y);
      for (int i = 0; i < n; ++i) zdg[i] = ydg[pi[i]];
      const std::int64_t z = index_of(zdg);
      for (std::size_t l = 0; l < nl; ++l) {
        const std::int64_t c = col[t][l][z];
        if (c != 0) P[l](y, x) = coef[l] * static_cast<double>(c);
      }
    }
  }

  std::vector<IsotypicProjector> out;
  for (std::size_t l = 0; l < nl; ++l)
    out.push_back({irreps[l], P[l].cast<std::complex<double>>()});
  return out;
}

HermitianOp schur_weyl_projector(const Partition& p, int d, int n, const ProjectorOptions& opt) {
  Partition target(p.parts(), d);
  if (target.n() != n) throw std::invalid_argument("schur_weyl_projector: |p| != n");
  for (auto& ip : schur_weyl_projectors(d, n, opt))
    if (ip.irrep == target) return std::move(ip.P);
  throw std::logic_error("schur_weyl_projector: irrep not found");
}

static void check_distribution(const std::vector<double>& t) {
  double s = 0.0;
  for (double x : t) {
    if (!(x >= 0.0)) throw std::invalid_argument("haar_twirled_iid_state: negative entry");
    s += x;
  }
  if (std::fabs(s - 1.0) > 1e-12)
    throw std::invalid_argument("haar_twirled_iid_state: t is not normalized");
}

HermitianOp haar_twirled_iid_state(const std::vector<double>& t,
                                   const std::vector<IsotypicProjector>& projectors) {
  check_distribution(t);
  if (projectors.empty()) throw std::invalid_argument("haar_twirled_iid_state: no projectors");
  const int d = static_cast<int>(t.size());
  HermitianOp rho = HermitianOp::Zero(projectors[0].P.rows(), projectors[0].P.cols());
  for (const auto& ip : projectors) {
    if (ip.irrep.d() != d) throw std::invalid_argument("haar_twirled_iid_state: dimension mismatch");
    const double alpha = schur_poly(ip.irrep, t) / static_cast<double>(dim_ud_irrep(ip.irrep, d));
    rho += alpha * ip.P;
  }
  return rho;
}

HermitianOp haar_twirled_iid_state(const std::vector<double>& t, int n, const ProjectorOptions& opt) {
  check_distribution(t);
  return haar_twirled_iid_state(t, schur_weyl_projectors(static_cast<int>(t.size()), n, opt));
}

} // namespace qconc
