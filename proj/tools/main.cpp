#include <charconv>
#include <chrono>
#include <cmath>
#include <ctime>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <mutex>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <variant>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>
#include <openssl/evp.h>

#include "qconc/bounds.hpp"
#include "qconc/coeffs.hpp"
#include "qconc/scenarios.hpp"
#include "qconc/verify.hpp"

using namespace qconc;
using ojson = nlohmann::ordered_json;

namespace {

constexpr const char* kVersion = "0.1.0";

enum Exit { ok = 0, check_failed = 1, usage = 2, nonconverged = 3 };

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

using Cell = std::variant<long long, double, std::string, bool>;

struct Table {
  std::vector<std::string> columns;
  std::vector<std::vector<Cell>> rows;
};

std::string fmt(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, res.ptr);
}

std::string csv_cell(const Cell& c) {
  return std::visit(
      [](const auto& v) -> std::string {
        using T = std::decay_t<decltype(v)>;
        if constexpr (std::is_same_v<T, double>) return fmt(v);
        else if constexpr (std::is_same_v<T, bool>) return v ? "true" : "false";
        else if constexpr (std::is_same_v<T, long long>) return std::to_string(v);
        else return v;
      },
      c);
}

ojson json_num(double x) {
  if (std::isfinite(x)) return x;
  return nullptr;
}

ojson json_cell(const Cell& c) {
  return std::visit(
      [](const auto& v) -> ojson {
        using T = std::decay_t<decltype(v)>;
        if constexpr (std::is_same_v<T, double>) return json_num(v);
        else return v;
      },
      c);
}

std::string sha256_hex(const std::string& data) {
  unsigned char md[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  EVP_Digest(data.data(), data.size(), md, &len, EVP_sha256(), nullptr);
  std::ostringstream os;
  for (unsigned int i = 0; i < len; ++i) os << std::hex << std::setw(2) << std::setfill('0') << int(md[i]);
  return os.str();
}

std::string utc_now() {
  const auto t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

struct Globals {
  std::string config;
  std::string output;
  std::string format = "csv";
  int threads = 1;
  std::uint64_t seed = 1;
};

struct Context {
  Globals g;
  ScenarioConfig cfg;
  std::optional<std::string> digest;
  std::chrono::steady_clock::time_point start = std::chrono::steady_clock::now();

  ojson manifest(const std::string& sub, const ojson& params) const {
    ojson m;
    m["subcommand"] = sub;
    m["parameters"] = params;
    m["tool_version"] = kVersion;
    m["config_digest"] = digest ? ojson(*digest) : ojson(nullptr);
    // the only run-dependent fields
    m["timing"] = {{"timestamp", utc_now()},
                   {"wall_clock_seconds",
                    std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count()}};
    return m;
  }
};

void load_config(Context& ctx) {
  if (ctx.g.config.empty()) return;
  std::ifstream in(ctx.g.config, std::ios::binary);
  if (!in) throw UsageError("cannot read config file '" + ctx.g.config + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  const std::string text = ss.str();
  ctx.digest = sha256_hex(text);
  try {
    ctx.cfg = parse_scenario_config(text);
  } catch (const std::invalid_argument& e) {
    throw UsageError(e.what());
  }
}

ojson config_json(const ScenarioConfig& c) {
  ojson j;
  j["r"] = c.r;
  j["gamma"] = c.gamma;
  j["N_grid"] = c.N_grid;
  j["epsilon"] = c.epsilon ? ojson(*c.epsilon) : ojson(nullptr);
  j["Delta"] = c.Delta ? ojson(*c.Delta) : ojson(nullptr);
  j["B_star_fraction"] = c.B_star_fraction;
  j["s"] = c.s;
  j["s_prime"] = c.s_prime;
  j["bit_error_rate"] = c.bit_error_rate;
  return j;
}

// Runs f(i) for i < n on up to `threads` workers; results kept in index order.
template <class T, class F>
std::vector<T> parallel_map(std::size_t n, int threads, F&& f) {
  std::vector<T> out(n);
  std::vector<std::exception_ptr> errs(n);
  std::size_t next = 0;
  std::mutex mu;
  auto worker = [&] {
    for (;;) {
      std::size_t i;
      {
        std::lock_guard<std::mutex> lock(mu);
        if (next >= n) return;
        i = next++;
      }
      try {
        out[i] = f(i);
      } catch (...) {
        errs[i] = std::current_exception();
      }
    }
  };
  const int t = std::max(1, std::min<int>(threads, static_cast<int>(n)));
  if (t == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (int i = 0; i < t; ++i) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }
  for (auto& e : errs)
    if (e) std::rethrow_exception(e);
  return out;
}

void write_text(const Globals& g, const std::string& text) {
  if (g.output.empty()) {
    std::cout << text;
    std::cout.flush();
    return;
  }
  std::ofstream out(g.output, std::ios::binary);
  if (!out) throw UsageError("cannot write output file '" + g.output + "'");
  out << text;
}

void emit_table(const Context& ctx, const Table& t, const ojson& manifest) {
  if (ctx.g.format == "json") {
    ojson j;
    j["manifest"] = manifest;
    j["columns"] = t.columns;
    ojson rows = ojson::array();
    for (const auto& r : t.rows) {
      ojson o;
      for (std::size_t i = 0; i < r.size(); ++i) o[t.columns[i]] = json_cell(r[i]);
      rows.push_back(o);
    }
    j["rows"] = rows;
    write_text(ctx.g, j.dump(2) + "\n");
    return;
  }
  std::string s;
  for (std::size_t i = 0; i < t.columns.size(); ++i) s += (i ? "," : "") + t.columns[i];
  s += "\n";
  for (const auto& r : t.rows) {
    for (std::size_t i = 0; i < r.size(); ++i) s += (i ? "," : "") + csv_cell(r[i]);
    s += "\n";
  }
  write_text(ctx.g, s);
  if (ctx.g.output.empty()) {
    std::cerr << manifest.dump() << "\n";
  } else {
    std::ofstream m(ctx.g.output + ".manifest.json", std::ios::binary);
    m << manifest.dump(2) << "\n";
  }
}

const std::vector<Method> kToyMethods = {Method::azuma, Method::kato, Method::quantum_perm, Method::classical_iidmeas,
                                         Method::iid};
const std::vector<Method> kQkdMethods = {Method::azuma, Method::kato, Method::quantum_perm,
                                         Method::classical_iidmeas};

int cmd_figure(Context& ctx, const std::string& which) {
  const auto& c = ctx.cfg;
  std::vector<long long> grid = c.N_grid;
  if (grid.empty()) grid = which == "fig4" ? log_grid(1e4, 1e10, 25) : log_grid(1e4, 1e8, 25);
  Table t;
  bool converged = true;
  ojson params = config_json(c);
  params["figure"] = which;
  params["N_grid"] = grid;
  params["threads"] = ctx.g.threads;

  if (which == "fig2" || which == "fig3") {
    const bool fig2 = which == "fig2";
    const double eps = c.epsilon.value_or(1e-30);
    const double Delta = c.Delta.value_or(0.01);
    if (fig2) params["epsilon"] = eps;
    else params["Delta"] = Delta;
    t.columns = {"N", "method", "Delta", "ln_eps", "log10_eps", "converged"};
    struct Point {
      std::vector<ToyResult> r;
    };
    auto pts = parallel_map<Point>(grid.size(), ctx.g.threads, [&](std::size_t i) {
      auto P = ToyModelParams::preset(grid[i], c.B_star_fraction);
      P.r = c.r;
      P.gamma = c.gamma;
      if (fig2) P.epsilon = eps;
      else P.delta = Delta;
      Point p;
      for (auto m : kToyMethods) p.r.push_back(fig2 ? toy_delta(m, P) : toy_epsilon(m, P));
      return p;
    });
    for (std::size_t i = 0; i < grid.size(); ++i)
      for (std::size_t j = 0; j < kToyMethods.size(); ++j) {
        const auto& r = pts[i].r[j];
        converged = converged && r.converged;
        t.rows.push_back({grid[i], std::string(method_name(kToyMethods[j])), r.delta, r.log_eps,
                          r.log_eps / std::log(10.0), r.converged});
      }
  } else {
    const double eps = c.epsilon.value_or(0x1p-102);
    params["epsilon"] = eps;
    t.columns = {"N", "method", "U", "rate", "phase_error_overflow", "ln_eps", "log10_eps", "converged"};
    auto pts = parallel_map<std::vector<KeyRate>>(grid.size(), ctx.g.threads, [&](std::size_t i) {
      QkdParams P;
      P.N = grid[i];
      P.epsilon = eps;
      P.s = c.s;
      P.s_prime = c.s_prime;
      P.bit_error_rate = c.bit_error_rate;
      std::vector<KeyRate> v;
      for (auto m : kQkdMethods) v.push_back(pbc00_key_rate(m, P));
      return v;
    });
    for (std::size_t i = 0; i < grid.size(); ++i)
      for (std::size_t j = 0; j < kQkdMethods.size(); ++j) {
        const auto& r = pts[i][j];
        converged = converged && r.converged;
        t.rows.push_back({grid[i], std::string(method_name(kQkdMethods[j])), r.U, r.rate, r.phase_error_overflow,
                          std::log(eps), std::log10(eps), r.converged});
      }
  }
  emit_table(ctx, t, ctx.manifest("figure", params));
  if (!converged) {
    std::cerr << "error: optimizer did not converge at some grid point\n";
    return nonconverged;
  }
  return ok;
}

struct BoundArgs {
  std::string method, scenario;
  std::optional<double> N, eps, delta, gamma, r, B_star, B_hat, bit_error_rate, N_bit;
  std::optional<int> s, s_prime;
};

long long to_count(double x, const char* name) {
  if (!(x >= 1.0 && x <= 9e18) || x != std::floor(x))
    throw UsageError(std::string("--") + name + " must be a positive integer");
  return static_cast<long long>(x);
}

ojson vec_json(const std::vector<double>& v) {
  ojson a = ojson::array();
  for (double x : v) a.push_back(json_num(x));
  return a;
}

int cmd_bound(Context& ctx, const BoundArgs& a) {
  Method m;
  try {
    m = parse_method(a.method);
  } catch (const std::invalid_argument& e) {
    throw UsageError(e.what());
  }
  if (!a.N) throw UsageError("--N is required");
  const long long N = to_count(*a.N, "N");
  const auto& c = ctx.cfg;
  ojson rec;
  rec["method"] = method_name(m);
  rec["scenario"] = a.scenario;
  rec["N"] = N;
  bool converged = true;
  ojson params;
  if (a.scenario == "toy") {
    if (a.eps.has_value() == a.delta.has_value()) throw UsageError("toy: give exactly one of --eps and --delta");
    auto P = ToyModelParams::preset(N, c.B_star_fraction);
    P.r = a.r.value_or(c.r);
    P.gamma = a.gamma.value_or(c.gamma);
    if (a.B_star) P.B_star = *a.B_star;
    P.B_hat = a.B_hat.value_or(P.B_star);
    P.epsilon = a.eps;
    P.delta = a.delta;
    try {
      P.validate();
    } catch (const std::invalid_argument& e) {
      throw UsageError(e.what());
    }
    params = {{"r", P.r}, {"gamma", P.gamma}, {"B_star", P.B_star}, {"B_hat", P.B_hat}};
    const auto r = P.epsilon ? toy_delta(m, P) : toy_epsilon(m, P);
    converged = r.converged;
    rec["Delta"] = json_num(r.delta);
    rec["ln_eps"] = json_num(r.log_eps);
    rec["log10_eps"] = json_num(r.log_eps / std::log(10.0));
    if (!r.p_star.empty()) {
      rec["p_star"] = vec_json(r.p_star);
      rec["q_star"] = vec_json(r.q_star);
    }
    if (r.gamma_prime) rec["gamma_prime"] = *r.gamma_prime;
  } else {
    if (a.delta) throw UsageError("qkd: --delta is not accepted, the bound is solved for epsilon");
    QkdParams P;
    P.N = N;
    P.epsilon = a.eps.value_or(c.epsilon.value_or(0x1p-102));
    P.s = a.s.value_or(c.s);
    P.s_prime = a.s_prime.value_or(c.s_prime);
    P.bit_error_rate = a.bit_error_rate.value_or(c.bit_error_rate);
    P.N_bit = a.N_bit;
    try {
      P.validate();
    } catch (const std::invalid_argument& e) {
      throw UsageError(e.what());
    }
    params = {{"epsilon", P.epsilon}, {"s", P.s}, {"s_prime", P.s_prime}, {"bit_error_rate", P.bit_error_rate},
              {"N_sift", P.sift()}, {"N_bit", P.bit()}};
    const auto U = pbc00_phase_error_upper(m, P);
    const auto k = pbc00_key_rate(m, P);
    converged = U.converged && k.converged;
    rec["U"] = U.U;
    rec["delta"] = U.delta;
    rec["rate"] = json_num(k.rate);
    rec["phase_error_overflow"] = k.phase_error_overflow;
    rec["ln_eps"] = std::log(P.epsilon);
    rec["log10_eps"] = std::log10(P.epsilon);
  }
  rec["converged"] = converged;
  params["method"] = method_name(m);
  params["scenario"] = a.scenario;
  params["N"] = N;
  rec["manifest"] = ctx.manifest("bound", params);
  write_text(ctx.g, rec.dump() + "\n");
  if (!converged) {
    std::cerr << "error: optimizer did not converge\n";
    return nonconverged;
  }
  return ok;
}

int cmd_verify(Context& ctx, const std::string& suite) {
  const auto reports = run_suite(suite, ctx.g.seed, ctx.g.threads);
  std::string s;
  bool pass = true;
  for (const auto& r : reports) {
    s += to_json(r).dump() + "\n";
    if (!r.pass) {
      pass = false;
      std::cerr << "FAILED " << to_json(r).dump() << "\n";
    }
  }
  ojson summary;
  summary["check"] = "summary";
  summary["params"] = {{"suite", suite}, {"seed", ctx.g.seed}, {"records", reports.size()}};
  summary["pass"] = pass;
  s += summary.dump() + "\n";
  write_text(ctx.g, s);
  ojson params = {{"suite", suite}, {"seed", ctx.g.seed}, {"threads", ctx.g.threads}};
  const auto man = ctx.manifest("verify", params);
  if (ctx.g.output.empty()) {
    std::cerr << man.dump() << "\n";
  } else {
    std::ofstream m(ctx.g.output + ".manifest.json", std::ios::binary);
    m << man.dump(2) << "\n";
  }
  return pass ? ok : check_failed;
}

const char* kFooter = R"(Columns
  figure fig2|fig3 (csv, or json rows with the same keys):
    N,method,Delta,ln_eps,log10_eps,converged
  figure fig4:
    N,method,U,rate,phase_error_overflow,ln_eps,log10_eps,converged
  methods, in row order per N: azuma,kato,quantum_perm,classical_iidmeas[,iid for fig2/fig3]
  rate is -inf (csv) or null (json) when phase_error_overflow is true.
  bound prints one JSON object; verify streams JSON records
    {check, params, lhs, rhs, margin, pass} and a final summary record.
Manifest
  json output embeds it under "manifest"; csv/verify output to a file writes
  <output>.manifest.json, otherwise it goes to stderr. Only manifest.timing
  changes between identical runs.
Exit codes
  0 success, 1 failed verification check, 2 bad flags or config,
  3 optimizer non-convergence.)";

} // namespace

int main(int argc, char** argv) {
  CLI::App app{"Concentration bounds for permutation-invariant and adversarial sequential settings"};
  app.footer(kFooter);
  app.set_version_flag("--version", kVersion);
  app.require_subcommand(1);
  Context ctx;
  app.add_option("--config", ctx.g.config, "JSON scenario config (keys: r, gamma, N_grid, epsilon, Delta, "
                                           "B_star_fraction, s, s_prime, bit_error_rate)");
  app.add_option("--output", ctx.g.output, "Output path (default stdout)");
  app.add_option("--format", ctx.g.format, "csv or json")->check(CLI::IsMember({"csv", "json"}));
  app.add_option("--threads", ctx.g.threads, "Worker threads")->check(CLI::Range(1, 1024));
  app.add_option("--seed", ctx.g.seed, "Seed for randomized checks");

  std::string which;
  auto* fig = app.add_subcommand("figure", "Reproduce a figure's data");
  fig->add_option("which", which, "fig2 | fig3 | fig4")->required()->check(CLI::IsMember({"fig2", "fig3", "fig4"}));

  BoundArgs ba;
  auto* bound = app.add_subcommand("bound", "Evaluate one bound");
  bound->add_option("method", ba.method, "azuma | kato | quantum_perm | classical_iidmeas | iid")->required();
  bound->add_option("scenario", ba.scenario, "toy | qkd")->required()->check(CLI::IsMember({"toy", "qkd"}));
  bound->add_option("--N", ba.N, "Number of rounds");
  bound->add_option("--eps", ba.eps, "Failure probability (solve for the deviation)");
  bound->add_option("--delta", ba.delta, "Deviation (solve for the failure probability)");
  bound->add_option("--gamma", ba.gamma, "toy: gamma");
  bound->add_option("--r", ba.r, "toy: r");
  bound->add_option("--B-star", ba.B_star, "toy: B*");
  bound->add_option("--B-hat", ba.B_hat, "toy: observed B");
  bound->add_option("--bit-error-rate", ba.bit_error_rate, "qkd: bit error rate");
  bound->add_option("--N-bit", ba.N_bit, "qkd: observed bit errors");
  bound->add_option("--s", ba.s, "qkd: s");
  bound->add_option("--s-prime", ba.s_prime, "qkd: s'");

  std::string suite;
  auto* ver = app.add_subcommand("verify", "Run a verification suite");
  ver->add_option("suite", suite, "lemma2 | schurweyl | theorem1 | theorem3 | qkd-operators | all")
      ->required()
      ->check(CLI::IsMember({"lemma2", "schurweyl", "theorem1", "theorem3", "qkd-operators", "all"}));

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return usage;
  }

  try {
    load_config(ctx);
    if (*fig) return cmd_figure(ctx, which);
    if (*bound) return cmd_bound(ctx, ba);
    return cmd_verify(ctx, suite);
  } catch (const UsageError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return usage;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return usage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return check_failed;
  }
}
