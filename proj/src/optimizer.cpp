#include "qconc/optimizer.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <optional>
#include <stdexcept>

namespace qconc {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

std::vector<double> centroid(const std::vector<std::vector<double>>& pts) {
  std::vector<double> c(pts.at(0).size(), 0.0);
  for (const auto& p : pts)
    for (std::size_t i = 0; i < c.size(); ++i) c[i] += p[i] / static_cast<double>(pts.size());
  return c;
}

void normalize(std::vector<double>& v) {
  double s = 0.0;
  for (double& x : v) {
    if (x < 0.0) x = 0.0;
    s += x;
  }
  for (double& x : v) x /= s;
}

// exponential tilt of q by lambda*a, computed with the max shifted out
std::vector<double> tilt(const std::vector<double>& q, const std::vector<double>& a, double lambda, double amax) {
  std::vector<double> p(q.size(), 0.0);
  for (std::size_t i = 0; i < q.size(); ++i)
    if (q[i] > 0.0) p[i] = q[i] * std::exp(lambda * (a[i] - amax));
  normalize(p);
  return p;
}

std::vector<double> project_halfspace(const HalfspaceRegion& B, const std::vector<double>& p) {
  const std::size_t k = p.size();
  std::vector<double> w(k);
  double hp = 0.0;
  for (std::size_t i = 0; i < k; ++i) {
    w[i] = B.u[i] - B.c;
    hp += p[i] * w[i];
  }
  if (hp <= 0.0) return p;
  const double wmin = *std::min_element(w.begin(), w.end());
  if (wmin >= -kMembershipTol) {
    // only the face {w == 0} is feasible
    std::vector<double> q(k, 0.0);
    double mass = 0.0;
    int zeros = 0;
    for (std::size_t i = 0; i < k; ++i)
      if (std::fabs(w[i]) <= kMembershipTol) {
        q[i] = p[i];
        mass += p[i];
        ++zeros;
      }
    if (zeros == 0) throw std::invalid_argument("m_projection: region is empty");
    if (mass == 0.0)
      for (std::size_t i = 0; i < k; ++i)
        if (std::fabs(w[i]) <= kMembershipTol) q[i] = 1.0;
    normalize(q);
    return q;
  }
  const double cap = -1.0 / wmin;
  std::size_t jstar = k;
  bool in_support = false;
  for (std::size_t i = 0; i < k; ++i)
    if (w[i] == wmin) {
      if (p[i] > 0.0) in_support = true;
      if (jstar == k) jstar = i;
    }
  auto h = [&](double lam) {
    double s = 0.0;
    for (std::size_t i = 0; i < k; ++i)
      if (p[i] > 0.0) s += p[i] * w[i] / (1.0 + lam * w[i]);
    return s;
  };
  auto dh = [&](double lam) {
    double s = 0.0;
    for (std::size_t i = 0; i < k; ++i)
      if (p[i] > 0.0) {
        const double den = 1.0 + lam * w[i];
        s -= p[i] * w[i] * w[i] / (den * den);
      }
    return s;
  };
  double lam;
  if (!in_support && h(cap) >= 0.0) {
    lam = cap;
  } else {
    double lo = 0.0, hi = cap;
    lam = 0.5 * cap;
    for (int it = 0; it < 300; ++it) {
      const double v = h(lam);
      if (v > 0.0) lo = lam;
      else hi = lam;
      if (v == 0.0 || hi - lo <= 1e-17 * cap) break;
      double next = lam - v / dh(lam);
      if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
      lam = next;
    }
  }
  std::vector<double> q(k, 0.0);
  double s = 0.0;
  for (std::size_t i = 0; i < k; ++i)
    if (p[i] > 0.0) {
      q[i] = p[i] / (1.0 + lam * w[i]);
      s += q[i];
    }
  if (!in_support && lam == cap) {
    q[jstar] = std::max(0.0, 1.0 - s);
  }
  normalize(q);
  return q;
}

double cross_entropy(const std::vector<double>& p, const std::vector<double>& q) {
  double f = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    if (p[i] <= 0.0) continue;
    if (q[i] <= 0.0) return kInf;
    f -= p[i] * std::log(q[i]);
  }
  return f;
}

std::vector<double> project_qubit(const QubitMeasurementImage& Q, const std::vector<double>& p) {
  if (p.size() != 3) throw std::invalid_argument("m_projection: qubit image has three outcomes");
  if (Q.contains(p)) return p;
  // the minimum over the Bloch disk sits on its boundary when p is outside the image
  auto f = [&](double th) { return cross_entropy(p, Q.boundary(th)); };
  constexpr int samples = 360;
  const double step = 2.0 * std::numbers::pi / samples;
  int best = 0;
  double fbest = kInf;
  for (int i = 0; i < samples; ++i) {
    const double v = f(i * step);
    if (v < fbest) {
      fbest = v;
      best = i;
    }
  }
  if (!std::isfinite(fbest)) return Q.boundary(best * step);
  const double g = (std::sqrt(5.0) - 1.0) / 2.0;
  double a = (best - 1) * step, b = (best + 1) * step;
  double x1 = b - g * (b - a), x2 = a + g * (b - a);
  double f1 = f(x1), f2 = f(x2);
  for (int it = 0; it < 80 && b - a > 1e-15; ++it) {
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
  auto q = Q.boundary(0.5 * (a + b));
  normalize(q);
  return q;
}

std::vector<std::vector<double>> boundary_samples(const HalfspaceRegion& H, int res) {
  auto verts = region_vertices(H);
  std::vector<std::vector<double>> cut;
  for (const auto& v : verts)
    if (std::fabs(H.value(v) - H.c) <= 1e-12) cut.push_back(v);
  if (cut.empty()) return verts;
  if (cut.size() == 1) return cut;
  std::vector<std::vector<double>> out;
  for (std::size_t a = 0; a < cut.size(); ++a)
    for (std::size_t b = a + 1; b < cut.size(); ++b)
      for (int i = 0; i <= res; ++i) {
        const double s = static_cast<double>(i) / res;
        std::vector<double> x(cut[a].size());
        for (std::size_t j = 0; j < x.size(); ++j) x[j] = (1 - s) * cut[a][j] + s * cut[b][j];
        out.push_back(std::move(x));
      }
  return out;
}

std::vector<std::vector<double>> boundary_samples(const Region& B, int res) {
  return std::visit(overloaded{[&](const HalfspaceRegion& H) { return boundary_samples(H, res); },
                               [&](const QubitMeasurementImage& Q) {
                                 std::vector<std::vector<double>> out;
                                 for (int i = 0; i < res; ++i)
                                   out.push_back(Q.boundary(2.0 * std::numbers::pi * i / res));
                                 return out;
                               },
                               [&](const Singleton& s) { return std::vector<std::vector<double>>{s.q}; }},
                    B);
}

} // namespace

std::size_t region_dim(const Region& B) {
  return std::visit(overloaded{[](const HalfspaceRegion& H) { return H.k(); },
                               [](const QubitMeasurementImage&) { return std::size_t{3}; },
                               [](const Singleton& s) { return s.q.size(); }},
                    B);
}

bool region_contains(const Region& B, const std::vector<double>& q, double tol) {
  return std::visit(overloaded{[&](const HalfspaceRegion& H) { return H.contains(q, tol); },
                               [&](const QubitMeasurementImage& Q) { return Q.contains(q, tol); },
                               [&](const Singleton& s) {
                                 for (std::size_t i = 0; i < q.size(); ++i)
                                   if (std::fabs(q[i] - s.q[i]) > tol) return false;
                                 return true;
                               }},
                    B);
}

std::vector<double> i_projection(const HalfspaceRegion& A, const std::vector<double>& q, double* multiplier) {
  if (q.size() != A.k()) throw std::invalid_argument("i_projection: dimension mismatch");
  if (multiplier) *multiplier = 0.0;
  if (A.value(q) <= A.c) return q;
  const std::size_t k = q.size();
  std::vector<double> a(k);
  for (std::size_t i = 0; i < k; ++i) a[i] = -A.u[i];
  const double alpha = -A.c;
  double amax = -kInf;
  for (std::size_t i = 0; i < k; ++i)
    if (q[i] > 0.0) amax = std::max(amax, a[i]);
  if (amax < alpha - kMembershipTol) return {};
  if (amax <= alpha) {
    std::vector<double> p(k, 0.0);
    for (std::size_t i = 0; i < k; ++i)
      if (q[i] > 0.0 && a[i] == amax) p[i] = q[i];
    normalize(p);
    if (multiplier) *multiplier = kInf;
    return p;
  }
  auto moments = [&](double lam, double& mean, double& var) {
    auto p = tilt(q, a, lam, amax);
    mean = 0.0;
    for (std::size_t i = 0; i < k; ++i) mean += p[i] * a[i];
    var = 0.0;
    for (std::size_t i = 0; i < k; ++i) var += p[i] * (a[i] - mean) * (a[i] - mean);
  };
  double mean, var;
  double lo = 0.0, hi = 1.0;
  moments(hi, mean, var);
  while (mean < alpha && hi < 1e300) {
    lo = hi;
    hi *= 2.0;
    moments(hi, mean, var);
  }
  double lam = hi;
  for (int it = 0; it < 300; ++it) {
    moments(lam, mean, var);
    const double f = mean - alpha;
    if (f < 0.0) lo = lam;
    else hi = lam;
    if (f == 0.0 || hi - lo <= 4e-16 * hi) break;
    double next = var > 0.0 ? lam - f / var : 0.5 * (lo + hi);
    if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
    lam = next;
  }
  lam = hi; // feasible side
  if (multiplier) *multiplier = lam;
  return tilt(q, a, lam, amax);
}

std::vector<double> m_projection(const Region& B, const std::vector<double>& p) {
  if (p.size() != region_dim(B)) throw std::invalid_argument("m_projection: dimension mismatch");
  return std::visit(overloaded{[&](const HalfspaceRegion& H) { return project_halfspace(H, p); },
                               [&](const QubitMeasurementImage& Q) { return project_qubit(Q, p); },
                               [&](const Singleton& s) { return s.q; }},
                    B);
}

namespace {

// max over q in B of sum_i q_i w_i, for w >= 0
double support(const Region& B, const std::vector<double>& w) {
  const std::size_t k = w.size();
  return std::visit(overloaded{[&](const HalfspaceRegion& H) {
                                 double best = 0.0;
                                 for (const auto& v : region_vertices(H)) {
                                   double s = 0.0;
                                   for (std::size_t i = 0; i < k; ++i) s += v[i] * w[i];
                                   best = std::max(best, s);
                                 }
                                 return best;
                               },
                               [&](const QubitMeasurementImage& Q) {
                                 double c0 = 0.0, wx = 0.0, wz = 0.0;
                                 for (std::size_t i = 0; i < 3; ++i) {
                                   c0 += Q.offset()[i] * w[i];
                                   wx += Q.slope()[i][0] * w[i];
                                   wz += Q.slope()[i][1] * w[i];
                                 }
                                 return c0 + std::hypot(wx, wz);
                               },
                               [&](const Singleton& s) {
                                 double t = 0.0;
                                 for (std::size_t i = 0; i < k; ++i) t += s.q[i] * w[i];
                                 return t;
                               }},
                    B);
}

// lambda -> infinity limit, finite only when A meets the simplex in a face
double face_lower_bound(const HalfspaceRegion& A, const Region& B) {
  const std::size_t k = A.k();
  double amax = -kInf;
  for (std::size_t i = 0; i < k; ++i) amax = std::max(amax, -A.u[i]);
  if (amax > -A.c + kMembershipTol) return 0.0;
  std::vector<double> w(k);
  for (std::size_t i = 0; i < k; ++i) w[i] = -A.u[i] >= amax - kMembershipTol ? 1.0 : 0.0;
  const double M = support(B, w);
  return M > 0.0 ? -std::log(std::min(M, 1.0)) : kInf;
}

} // namespace

double dual_lower_bound(const HalfspaceRegion& A, const Region& B, double lambda) {
  if (!(lambda >= 0.0) || !std::isfinite(lambda)) return 0.0;
  const std::size_t k = A.k();
  std::vector<double> a(k), e(k);
  double amax = -kInf;
  for (std::size_t i = 0; i < k; ++i) {
    a[i] = -A.u[i];
    amax = std::max(amax, a[i]);
  }
  for (std::size_t i = 0; i < k; ++i) e[i] = std::exp(lambda * (a[i] - amax));
  const double M = support(B, e);
  if (!(M > 0.0)) return kInf;
  return lambda * (-A.c) - (lambda * amax + std::log(M));
}

namespace {

// A point of A inside B, when the two meet.
std::optional<std::vector<double>> common_point(const HalfspaceRegion& A, const Region& B) {
  return std::visit(
      overloaded{[&](const HalfspaceRegion& H) -> std::optional<std::vector<double>> {
                   auto verts = region_vertices(H);
                   if (verts.empty()) throw std::invalid_argument("min_kl_between_regions: region B is empty");
                   for (const auto& v : verts)
                     if (A.contains(v)) return v;
                   return std::nullopt;
                 },
                 [&](const QubitMeasurementImage& Q) -> std::optional<std::vector<double>> {
                   double wx = 0.0, wz = 0.0;
                   for (std::size_t i = 0; i < 3; ++i) {
                     wx -= A.u[i] * Q.slope()[i][0];
                     wz -= A.u[i] * Q.slope()[i][1];
                   }
                   const double nrm = std::hypot(wx, wz);
                   auto q = nrm > 0 ? Q.image(wx / nrm, wz / nrm) : Q.image(0.0, 0.0);
                   if (A.contains(q)) return q;
                   return std::nullopt;
                 },
                 [&](const Singleton& s) -> std::optional<std::vector<double>> {
                   if (A.contains(s.q)) return s.q;
                   return std::nullopt;
                 }},
      B);
}

// Points of B maximizing E_q exp(lambda a): one point, or the vertices of a face.
std::vector<std::vector<double>> dual_argmax(const HalfspaceRegion& A, const Region& B, double lambda) {
  const std::size_t k = A.k();
  std::vector<double> e(k);
  double amax = -kInf;
  for (std::size_t i = 0; i < k; ++i) amax = std::max(amax, -A.u[i]);
  for (std::size_t i = 0; i < k; ++i) e[i] = std::exp(lambda * (-A.u[i] - amax));
  return std::visit(
      overloaded{[&](const HalfspaceRegion& H) {
                   auto verts = region_vertices(H);
                   std::vector<double> val;
                   double best = 0.0;
                   for (const auto& v : verts) {
                     double s = 0.0;
                     for (std::size_t i = 0; i < k; ++i) s += v[i] * e[i];
                     val.push_back(s);
                     best = std::max(best, s);
                   }
                   std::vector<std::vector<double>> face;
                   for (std::size_t j = 0; j < verts.size(); ++j)
                     if (val[j] >= best * (1.0 - 1e-12)) face.push_back(verts[j]);
                   return face;
                 },
                 [&](const QubitMeasurementImage& Q) {
                   double wx = 0.0, wz = 0.0;
                   for (std::size_t i = 0; i < 3; ++i) {
                     wx += Q.slope()[i][0] * e[i];
                     wz += Q.slope()[i][1] * e[i];
                   }
                   const double nrm = std::hypot(wx, wz);
                   return std::vector<std::vector<double>>{nrm > 0 ? Q.image(wx / nrm, wz / nrm)
                                                                    : Q.image(0.0, 0.0)};
                 },
                 [&](const Singleton& s) { return std::vector<std::vector<double>>{s.q}; }},
      B);
}

// min over p in A of D(p||q)
double phi(const HalfspaceRegion& A, const std::vector<double>& q) {
  auto p = i_projection(A, q);
  return p.empty() ? kInf : kl_divergence(p, q);
}

template <class F>
double golden_min(F&& f, double a, double b, int iters) {
  const double g = (std::sqrt(5.0) - 1.0) / 2.0;
  double x1 = b - g * (b - a), x2 = a + g * (b - a);
  double f1 = f(x1), f2 = f(x2);
  for (int it = 0; it < iters && b - a > 1e-16 * (1.0 + std::fabs(a) + std::fabs(b)); ++it) {
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
  return 0.5 * (a + b);
}

} // namespace

OptResult min_kl_between_regions(const HalfspaceRegion& A, const Region& B, long long n, const OptOptions& opt) {
  if (A.k() != region_dim(B)) throw std::invalid_argument("min_kl_between_regions: dimension mismatch");
  if (!A.nonempty()) throw std::invalid_argument("min_kl_between_regions: region A is empty");
  OptResult res;
  res.divergence = kInf;
  auto record = [&](const std::vector<double>& p, const std::vector<double>& q) {
    if (p.empty()) return;
    const double d = kl_divergence(p, q);
    if (d < res.divergence) {
      res.divergence = d;
      res.p_star = p;
      res.q_star = q;
    }
  };

  if (auto x = common_point(A, B)) {
    res.p_star = res.q_star = *x;
    res.divergence = 0.0;
    res.lower_bound = 0.0;
    res.converged = true;
    res.iterations = 0;
    res.log_bound = 0.0;
    return res;
  }

  // concave dual in the multiplier of A
  auto L = [&](double lam) { return dual_lower_bound(A, B, lam); };
  double hi = 1.0;
  while (hi < 1e12 && L(2.0 * hi) > L(hi)) hi *= 2.0;
  const double lo = hi > 1.0 ? 0.25 * hi : 0.0;
  double lam = golden_min([&](double x) { return -L(x); }, lo, 2.0 * hi, 200);
  double lb = std::max({0.0, L(lam), L(2.0 * hi), L(lo), face_lower_bound(A, B)});
  if (L(2.0 * hi) >= L(lam)) lam = 2.0 * hi;
  res.iterations = 1;

  // primal pair from the maximizing face of B
  auto face = dual_argmax(A, B, lam);
  std::vector<double> q;
  if (face.size() == 1) {
    q = face[0];
  } else if (face.size() == 2) {
    auto seg = [&](double s) {
      std::vector<double> x(face[0].size());
      for (std::size_t i = 0; i < x.size(); ++i) x[i] = (1 - s) * face[0][i] + s * face[1][i];
      return x;
    };
    double s = golden_min([&](double t) { return phi(A, seg(t)); }, 0.0, 1.0, 200);
    q = seg(s);
    for (double t : {0.0, 1.0})
      if (phi(A, seg(t)) < phi(A, q)) q = seg(t);
  } else {
    // fan of triangles from face[0]; phi is convex in q
    q = centroid(face);
    for (std::size_t j = 1; j + 1 < face.size(); ++j) {
      auto tri = [&](double s, double t) {
        std::vector<double> x(face[0].size());
        for (std::size_t i = 0; i < x.size(); ++i)
          x[i] = (1 - s) * face[0][i] + s * ((1 - t) * face[j][i] + t * face[j + 1][i]);
        return x;
      };
      auto inner = [&](double s) {
        return golden_min([&](double t) { return phi(A, tri(s, t)); }, 0.0, 1.0, 80);
      };
      const double s = golden_min([&](double s) { return phi(A, tri(s, inner(s))); }, 0.0, 1.0, 80);
      auto x = tri(s, inner(s));
      if (phi(A, x) < phi(A, q)) q = x;
    }
  }
  if (opt.q_first) {
    q = m_projection(B, i_projection(A, q).empty() ? centroid(region_vertices(A)) : i_projection(A, q));
  }

  // alternating polish
  for (int it = 0; it < opt.max_iter; ++it) {
    ++res.iterations;
    double mult = 0.0;
    auto p = i_projection(A, q, &mult);
    if (p.empty()) {
      q = m_projection(B, centroid(region_vertices(A)));
      continue;
    }
    record(p, q);
    lb = std::max(lb, dual_lower_bound(A, B, mult));
    if (res.divergence - lb <= opt.tol) break;
    q = m_projection(B, p);
    record(p, q);
    if (res.divergence - lb <= opt.tol) break;
  }
  res.converged = res.divergence - lb <= opt.tol;
  res.lower_bound = std::min(lb, res.divergence);
  // an unconverged primal may overstate D; fall back to the certificate
  res.log_bound = -static_cast<double>(n) * (res.converged ? res.divergence : res.lower_bound);
  return res;
}

GridResult grid_oracle(const HalfspaceRegion& A, const Region& B, int resolution) {
  const std::size_t k = A.k();
  if (k > 3) throw std::invalid_argument("grid_oracle: only k <= 3 is supported");
  if (region_dim(B) != k) throw std::invalid_argument("grid_oracle: dimension mismatch");
  if (resolution < 1) throw std::invalid_argument("grid_oracle: resolution must be positive");

  GridResult best;
  best.divergence = kInf;
  auto try_overlap = [&](const std::vector<double>& x) {
    if (A.contains(x) && region_contains(B, x)) {
      best = {0.0, x, x};
      return true;
    }
    return false;
  };
  std::vector<double> x(k);
  for (int i = 0; i <= resolution; ++i) {
    if (k == 2) {
      x = {static_cast<double>(i) / resolution, static_cast<double>(resolution - i) / resolution};
      if (try_overlap(x)) return best;
      continue;
    }
    for (int j = 0; i + j <= resolution; ++j) {
      x = {static_cast<double>(i) / resolution, static_cast<double>(j) / resolution,
           static_cast<double>(resolution - i - j) / resolution};
      if (try_overlap(x)) return best;
    }
  }
  auto ca = boundary_samples(A, resolution);
  auto cb = boundary_samples(B, resolution);
  for (const auto& p : ca)
    if (try_overlap(p)) return best;
  for (const auto& q : cb)
    if (try_overlap(q)) return best;
  for (const auto& p : ca) {
    if (!A.contains(p)) continue;
    for (const auto& q : cb) {
      const double d = kl_divergence(p, q);
      if (d < best.divergence) best = {d, p, q};
    }
  }
  return best;
}

double kkt_residual(const HalfspaceRegion& A, const HalfspaceRegion& B, const std::vector<double>& p,
                    const std::vector<double>& q) {
  const std::size_t k = p.size();
  std::vector<std::size_t> S;
  for (std::size_t i = 0; i < k; ++i)
    if (p[i] > 0.0 && q[i] > 0.0) S.push_back(i);
  const auto m = static_cast<Eigen::Index>(S.size());
  // log(p/q) = nu + lambda * (-u_A);  p/q = eta + mu * u_B
  Eigen::MatrixXd M1(m, 2), M2(m, 2);
  Eigen::VectorXd r1(m), r2(m);
  for (Eigen::Index r = 0; r < m; ++r) {
    const std::size_t i = S[r];
    M1(r, 0) = 1.0;
    M1(r, 1) = -A.u[i];
    r1(r) = std::log(p[i] / q[i]);
    M2(r, 0) = 1.0;
    M2(r, 1) = B.u[i];
    r2(r) = p[i] / q[i];
  }
  Eigen::Vector2d c1 = M1.colPivHouseholderQr().solve(r1);
  Eigen::Vector2d c2 = M2.colPivHouseholderQr().solve(r2);
  double res = std::max((M1 * c1 - r1).cwiseAbs().maxCoeff(), (M2 * c2 - r2).cwiseAbs().maxCoeff());
  res = std::max(res, std::max(0.0, -c1(1)));
  res = std::max(res, std::max(0.0, -c2(1)));
  res = std::max(res, std::fabs(A.value(p) - A.c));
  res = std::max(res, std::fabs(B.value(q) - B.c));
  return res;
}

} // namespace qconc
