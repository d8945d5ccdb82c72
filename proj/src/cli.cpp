#include "lsieve/cli.hpp"

#include <CLI11.hpp>
#include <algorithm>
#include <chrono>
#include <cmath>
#include <complex>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <json.hpp>
#include <random>
#include <sstream>

#include "lsieve/characters.hpp"
#include "lsieve/expsum.hpp"
#include "lsieve/power_fraction.hpp"
#include "lsieve/sieve_lab.hpp"
#include "lsieve/spacing.hpp"

namespace lsieve::cli {
namespace {

using json = nlohmann::ordered_json;
namespace fs = std::filesystem;

struct SubcommandInfo {
  const char* name;
  const char* description;
};

const SubcommandInfo kSubcommands[] = {
    {"table1", "M(Q) for Q = 1..q-max against the reference table"},
    {"spacing", "max neighbour count in S_{Q,k} at scale 1/(2N)"},
    {"conjecture", "M_k(Q, Q^{k+1}) over a range of Q with a log fit"},
    {"sieve-ratio", "largest Gram eigenvalue against the bound catalog"},
    {"bounds", "closed-form large-sieve bounds at (Q, N, k)"},
    {"weyl", "|S|^kappa against the Weyl shift bound, n = 1..N"},
    {"poisson", "Fejer-kernel Poisson identity with a tail bound"},
    {"gauss", "characters mod q^k and their Gauss sums"},
    {"transfer", "additive to multiplicative large-sieve transfer"},
};

class UsageError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

struct Table {
  std::vector<std::string> columns;
  std::vector<std::vector<std::string>> rows;
};

struct Report {
  json result = json::object();
  Table table;
  bool assertions_hold = true;
  std::vector<std::string> failures;
};

std::string fmt(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

std::string fmt(std::int64_t x) { return std::to_string(x); }
std::string fmt(std::uint64_t x) { return std::to_string(x); }
std::string fmt(bool x) { return x ? "true" : "false"; }

std::int64_t require(const std::optional<std::int64_t>& v, const char* flag) {
  if (!v) throw UsageError(std::string("missing required flag ") + flag);
  return *v;
}

void require_positive(std::int64_t v, const char* flag) {
  if (v < 1) throw UsageError(std::string(flag) + " must be >= 1, got " + std::to_string(v));
}

std::pair<std::int64_t, std::int64_t> q_range(const RunConfig& c, std::int64_t default_min) {
  std::int64_t lo = c.q_min.value_or(default_min);
  std::int64_t hi = require(c.q_max ? c.q_max : c.Q, "--q-max");
  if (!c.q_max && c.Q) lo = c.q_min.value_or(*c.Q);
  require_positive(lo, "--q-min");
  require_positive(hi, "--q-max");
  if (lo > hi) throw UsageError("--q-min must not exceed --q-max");
  return {lo, hi};
}

json config_json(const RunConfig& c) {
  json j;
  j["subcommand"] = c.subcommand;
  auto opt = [&](const char* key, const std::optional<std::int64_t>& v) {
    j[key] = v ? json(*v) : json(nullptr);
  };
  opt("Q", c.Q);
  opt("q_min", c.q_min);
  opt("q_max", c.q_max);
  j["k"] = c.k;
  opt("N", c.N);
  j["epsilon"] = c.epsilon;
  j["tol"] = c.tol;
  j["seed"] = c.seed;
  j["format"] = c.format == Format::kJson ? "json" : "csv";
  j["cache_dir"] = c.cache_dir;
  j["method"] = c.method;
  j["alpha"] = c.alpha;
  j["tail"] = c.tail;
  j["values"] = c.values;
  return j;
}

// Fraction sets cached on disk as <dir>/set_Q<Q>_k<k>.bin.
SetProvider make_provider(const std::string& dir) {
  if (dir.empty()) return enumerate_set;
  return [dir](std::int64_t Q, int k) {
    const fs::path path =
        fs::path(dir) / ("set_Q" + std::to_string(Q) + "_k" + std::to_string(k) + ".bin");
    if (std::ifstream in{path, std::ios::binary}) {
      try {
        return read_binary(in);
      } catch (const std::exception&) {
        // Corrupt or stale entry: rebuild below.
      }
    }
    FractionSet set = enumerate_set(Q, k);
    std::error_code ec;
    fs::create_directories(dir, ec);
    const fs::path tmp = path.string() + ".tmp";
    {
      std::ofstream o{tmp, std::ios::binary};
      if (o) write_binary(o, set);
    }
    fs::rename(tmp, path, ec);
    return set;
  };
}

std::vector<std::complex<double>> random_sequence(std::uint64_t seed, std::int64_t n) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss;
  std::vector<std::complex<double>> a(static_cast<std::size_t>(n));
  for (auto& x : a) {
    const double re = gauss(rng);
    x = {re, gauss(rng)};
  }
  return a;
}

Report run_table1(const RunConfig& c) {
  const auto [lo, hi] = q_range(c, 1);
  ScanOptions opts;
  opts.threads = c.threads;
  opts.provider = make_provider(c.cache_dir);
  const ScanReport scan = conjecture_scan(lo, hi, 2, opts);
  const auto& ref = table1_reference();

  Report r;
  r.table.columns = {"Q", "M"};
  json rows = json::array();
  for (const ScanRow& row : scan.rows) {
    r.table.rows.push_back({fmt(row.Q), fmt(row.M)});
    json j{{"Q", row.Q}, {"M", row.M}};
    if (row.Q <= static_cast<std::int64_t>(ref.size())) {
      const int expected = ref[static_cast<std::size_t>(row.Q - 1)];
      j["reference"] = expected;
      if (static_cast<std::uint64_t>(expected) != row.M) {
        r.assertions_hold = false;
        r.failures.push_back("Q=" + fmt(row.Q) + ": M=" + fmt(row.M) + ", reference " +
                             std::to_string(expected));
      }
    }
    rows.push_back(std::move(j));
  }
  r.result["rows"] = std::move(rows);
  r.result["matches_reference"] = r.assertions_hold;
  return r;
}

Report run_spacing(const RunConfig& c) {
  SpacingQuery q;
  q.Q = require(c.Q, "--Q");
  q.k = c.k;
  q.N = require(c.N, "--N");
  require_positive(q.Q, "--Q");
  require_positive(q.N, "--N");
  std::size_t size = 0;
  const SpacingResult res = [&] {
    if (c.method == "bruteforce") {
      size = expected_cardinality(q.Q, q.k);
      return spacing_count_bruteforce(q, Audit::kNone);
    }
    const FractionSet set = make_provider(c.cache_dir)(q.Q, q.k);
    size = set.size();
    return spacing_count_fast(set, q.N);
  }();
  Report r;
  r.result = json{{"Q", q.Q},
                  {"k", q.k},
                  {"N", q.N},
                  {"set_size", size},
                  {"M", res.count},
                  {"witness", {{"a", res.witness.a()}, {"q", res.witness.q()}}}};
  r.table.columns = {"Q", "k", "N", "set_size", "M", "witness_a", "witness_q"};
  r.table.rows.push_back({fmt(q.Q), std::to_string(q.k), fmt(q.N), fmt(std::uint64_t{size}),
                          fmt(res.count), fmt(res.witness.a()), fmt(res.witness.q())});
  return r;
}

Report run_conjecture(const RunConfig& c) {
  const auto [lo, hi] = q_range(c, 1);
  ScanOptions opts;
  opts.epsilon = c.epsilon;
  opts.threads = c.threads;
  opts.provider = make_provider(c.cache_dir);
  const ScanReport scan = conjecture_scan(lo, hi, c.k, opts);
  Report r;
  r.table.columns = {"Q", "M", "M_unhalved", "witness_a", "witness_q", "ratio", "running_max"};
  json rows = json::array();
  for (const ScanRow& row : scan.rows) {
    r.table.rows.push_back({fmt(row.Q), fmt(row.M), fmt(row.M_unhalved), fmt(row.witness_a),
                            fmt(row.witness_q), fmt(row.ratio), fmt(row.running_max)});
    rows.push_back({{"Q", row.Q},
                    {"M", row.M},
                    {"M_unhalved", row.M_unhalved},
                    {"witness", {{"a", row.witness_a}, {"q", row.witness_q}}},
                    {"ratio", row.ratio},
                    {"running_max", row.running_max}});
  }
  r.result["k"] = scan.k;
  r.result["rows"] = std::move(rows);
  r.result["fit"] = {{"slope", scan.fit_slope}, {"intercept", scan.fit_intercept}};
  return r;
}

Report run_sieve_ratio(const RunConfig& c) {
  const auto [lo, hi] = q_range(c, 1);
  PowerIterationOptions opts;
  opts.tol = c.tol;
  opts.seed = c.seed;
  Report r;
  r.table.columns = {"Q", "N", "k", "points", "lambda_max", "bound", "value", "ratio", "assertable"};
  json rows = json::array();
  for (std::int64_t Q = lo; Q <= hi; ++Q) {
    const std::int64_t N = c.N ? *c.N : checked_power(Q, c.k + 1);
    require_positive(N, "--N");
    const ExperimentRecord rec = sieve_ratio_experiment(Q, N, c.k, opts, c.epsilon);
    json bounds = json::array();
    for (const auto& b : rec.bounds) {
      r.table.rows.push_back({fmt(Q), fmt(N), std::to_string(c.k), fmt(std::uint64_t{rec.points}),
                              fmt(rec.lambda_max), b.name, fmt(b.value), fmt(b.ratio),
                              fmt(b.assertable)});
      bounds.push_back(
          {{"name", b.name}, {"value", b.value}, {"ratio", b.ratio}, {"assertable", b.assertable}});
      if (b.assertable && rec.lambda_max > b.value * (1 + 1e-12) + 1e-6) {
        r.failures.push_back("Q=" + fmt(Q) + ": lambda_max " + fmt(rec.lambda_max) + " > " +
                             b.name + " " + fmt(b.value));
      }
    }
    if (!rec.assertions_hold) r.assertions_hold = false;
    rows.push_back({{"Q", Q},
                    {"N", N},
                    {"k", c.k},
                    {"points", rec.points},
                    {"lambda_max", rec.lambda_max},
                    {"iterations", rec.iterations},
                    {"residual", rec.residual},
                    {"bounds", std::move(bounds)},
                    {"assertions_hold", rec.assertions_hold}});
  }
  r.result["rows"] = std::move(rows);
  return r;
}

Report run_bounds(const RunConfig& c) {
  const std::int64_t Q = require(c.Q, "--Q");
  require_positive(Q, "--Q");
  const std::int64_t N = c.N ? *c.N : checked_power(Q, c.k + 1);
  require_positive(N, "--N");
  Report r;
  r.table.columns = {"name", "value", "assertable"};
  json rows = json::array();
  for (const BoundValue& b : bound_catalog(Q, N, c.k, c.epsilon)) {
    r.table.rows.push_back({b.name, fmt(b.value), fmt(b.assertable)});
    rows.push_back({{"name", b.name}, {"value", b.value}, {"assertable", b.assertable}});
  }
  r.result = {{"Q", Q}, {"N", N}, {"k", c.k}, {"epsilon", c.epsilon}, {"bounds", std::move(rows)}};
  return r;
}

Report run_weyl(const RunConfig& c) {
  const std::int64_t N = require(c.N, "--N");
  require_positive(N, "--N");
  if (c.k < 2 || c.k > 6) throw UsageError("--k must be in [2, 6] for weyl");
  const Rational alpha = Rational::parse(c.alpha);
  if (alpha.num == 0) throw UsageError("--alpha must be nonzero");
  std::vector<Rational> coeffs(static_cast<std::size_t>(c.k) + 1, Rational{0, 1});
  coeffs.back() = alpha;
  const PolynomialPhase phase(std::move(coeffs));
  const double kappa = static_cast<double>(weyl_params(c.k, Interval{1, 1}).kappa);

  Report r;
  r.table.columns = {"N", "abs_S_pow_kappa", "bound", "ratio"};
  json rows = json::array();
  for (std::int64_t n = 1; n <= N; ++n) {
    const Interval iv{1, n};
    const double s = std::pow(std::abs(exp_sum(phase, iv)), kappa);
    const double bound = weyl_bound(phase, iv);
    const double ratio = s / bound;
    if (s > bound * (1 + 1e-12)) {
      r.assertions_hold = false;
      r.failures.push_back("N=" + fmt(n) + ": |S|^kappa " + fmt(s) + " > " + fmt(bound));
    }
    r.table.rows.push_back({fmt(n), fmt(s), fmt(bound), fmt(ratio)});
    rows.push_back({{"N", n}, {"abs_S_pow_kappa", s}, {"bound", bound}, {"ratio", ratio}});
  }
  r.result = {{"alpha", {{"num", alpha.num}, {"den", alpha.den}}},
              {"k", c.k},
              {"kappa", kappa},
              {"rows", std::move(rows)}};
  return r;
}

Report run_poisson(const RunConfig& c) {
  const std::int64_t N = require(c.N, "--N");
  require_positive(N, "--N");
  if (c.tail < 1000) throw UsageError("--tail must be >= 1000");
  const PoissonCheck p = poisson_identity_check(N, c.tail);
  Report r;
  r.assertions_hold = std::abs(p.gap) <= p.tail_bound;
  if (!r.assertions_hold) r.failures.push_back("gap " + fmt(p.gap) + " exceeds tail majorant");
  r.result = {{"N", N},
              {"terms", p.terms},
              {"lhs", p.lhs},
              {"rhs", p.rhs},
              {"gap", p.gap},
              {"tail_bound", p.tail_bound},
              {"within_bound", r.assertions_hold}};
  r.table.columns = {"N", "terms", "lhs", "rhs", "gap", "tail_bound"};
  r.table.rows.push_back(
      {fmt(N), fmt(p.terms), fmt(p.lhs), fmt(p.rhs), fmt(p.gap), fmt(p.tail_bound)});
  return r;
}

Report run_gauss(const RunConfig& c) {
  const std::int64_t q = require(c.Q, "--Q");
  require_positive(q, "--Q");
  const CharacterTable table = build_character_table(q, c.k);
  const double root_m = std::sqrt(static_cast<double>(table.modulus()));
  const double tol = c.tol * std::max(1.0, root_m);

  Report r;
  r.table.columns = {"chi", "order", "primitive", "re", "im", "abs", "deviation"};
  json chars = json::array();
  for (std::size_t chi = 0; chi < table.size(); ++chi) {
    const bool prim = table.primitive(chi);
    json j{{"index", chi}, {"order", table.order(chi)}, {"primitive", prim}};
    if (prim) {
      const auto g = gauss_sum(table, chi).value;
      const double dev = std::abs(std::abs(g) - root_m);
      if (dev > tol) {
        r.assertions_hold = false;
        r.failures.push_back("chi=" + std::to_string(chi) + ": |G| deviates by " + fmt(dev));
      }
      j["gauss_sum"] = {g.real(), g.imag()};
      j["deviation"] = dev;
      r.table.rows.push_back({std::to_string(chi), fmt(table.order(chi)), "true", fmt(g.real()),
                              fmt(g.imag()), fmt(std::abs(g)), fmt(dev)});
    }
    if (c.values) {
      json vals = json::array();
      for (const auto& v : table.values(chi)) vals.push_back({v.real(), v.imag()});
      j["values"] = std::move(vals);
    }
    chars.push_back(std::move(j));
  }
  r.result = {{"modulus", table.modulus()},
              {"q", q},
              {"k", c.k},
              {"characters", table.size()},
              {"primitive", table.primitive_count()},
              {"table", std::move(chars)}};
  return r;
}

Report run_transfer(const RunConfig& c) {
  const std::int64_t q = require(c.Q, "--Q");
  const std::int64_t N = require(c.N, "--N");
  require_positive(q, "--Q");
  require_positive(N, "--N");
  const auto a = random_sequence(c.seed, N);
  const CharacterTable table = build_character_table(q, c.k);
  const TransferCheck t = mult_transfer_check(table, a);
  const double cor = corollary_lhs(q, c.k, a);
  const double add = additive_lhs(q, c.k, a);
  const double rel = c.tol;

  Report r;
  auto check = [&](bool ok, const std::string& what) {
    if (!ok) {
      r.assertions_hold = false;
      r.failures.push_back(what);
    }
  };
  check(t.lhs <= t.middle * (1 + rel) + rel, "primitive sum exceeds the full character sum");
  check(std::abs(t.middle - t.rhs) <= rel * std::max(1.0, t.rhs), "orthogonality identity fails");
  check(cor <= add * (1 + rel) + rel, "multiplicative side exceeds additive side");
  r.result = {{"q", q},
              {"k", c.k},
              {"N", N},
              {"seed", c.seed},
              {"modulus", {{"lhs", t.lhs}, {"middle", t.middle}, {"rhs", t.rhs}}},
              {"aggregate", {{"multiplicative", cor}, {"additive", add}}},
              {"holds", r.assertions_hold}};
  r.table.columns = {"q", "k", "N", "lhs", "middle", "rhs", "multiplicative", "additive"};
  r.table.rows.push_back({fmt(q), std::to_string(c.k), fmt(N), fmt(t.lhs), fmt(t.middle),
                          fmt(t.rhs), fmt(cor), fmt(add)});
  return r;
}

Report dispatch(const RunConfig& c) {
  if (c.k < 2) throw UsageError("--k must be >= 2");
  const std::string& s = c.subcommand;
  if (s == "table1") return run_table1(c);
  if (s == "spacing") return run_spacing(c);
  if (s == "conjecture") return run_conjecture(c);
  if (s == "sieve-ratio") return run_sieve_ratio(c);
  if (s == "bounds") return run_bounds(c);
  if (s == "weyl") return run_weyl(c);
  if (s == "poisson") return run_poisson(c);
  if (s == "gauss") return run_gauss(c);
  if (s == "transfer") return run_transfer(c);
  throw UsageError("unknown subcommand '" + s + "'");
}

void emit(const RunConfig& c, const Report& r, double wall, std::ostream& out) {
  if (c.format == Format::kJson) {
    json doc;
    doc["tool"] = "lsieve";
    doc["version"] = kToolVersion;
    doc["config"] = config_json(c);
    doc["wall_time_s"] = wall;
    doc["assertions_hold"] = r.assertions_hold;
    doc["result"] = r.result;
    out << doc.dump(2) << '\n';
    return;
  }
  out << "# tool=lsieve version=" << kToolVersion << '\n';
  out << "# config=" << config_json(c).dump() << '\n';
  out << "# wall_time_s=" << fmt(wall) << '\n';
  for (std::size_t i = 0; i < r.table.columns.size(); ++i) {
    out << (i ? "," : "") << r.table.columns[i];
  }
  out << '\n';
  for (const auto& row : r.table.rows) {
    for (std::size_t i = 0; i < row.size(); ++i) out << (i ? "," : "") << row[i];
    out << '\n';
  }
}

}  // namespace

ParseResult parse_args(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  RunConfig c;
  if (const char* env = std::getenv(kCacheDirEnv)) c.cache_dir = env;

  CLI::App app{"Large-sieve and spacing experiments for power-denominator fractions", "lsieve"};
  app.require_subcommand(1);
  std::string format = "json";
  std::int64_t Q = 0, q_min = 0, q_max = 0, N = 0;

  for (const auto& [name, description] : kSubcommands) {
    CLI::App* sub = app.add_subcommand(name, description);
    sub->add_option("--Q", Q, "Q, or the modulus base q");
    sub->add_option("--q-min", q_min, "first Q of a range");
    sub->add_option("--q-max", q_max, "last Q of a range");
    sub->add_option("--k", c.k, "exponent k")->capture_default_str();
    sub->add_option("--N", N, "window length N");
    sub->add_option("--epsilon", c.epsilon)->capture_default_str();
    sub->add_option("--tol", c.tol)->capture_default_str();
    sub->add_option("--seed", c.seed)->capture_default_str();
    sub->add_option("--format", format)->check(CLI::IsMember({"json", "csv"}))->capture_default_str();
    sub->add_option("--cache-dir", c.cache_dir, "fraction-set cache (env LSIEVE_CACHE_DIR)");
    sub->add_option("--out", c.out, "write the report here instead of stdout");
    sub->add_option("--threads", c.threads, "worker threads, 0 = all cores");
    if (std::string(name) == "spacing") {
      sub->add_option("--method", c.method)->check(CLI::IsMember({"fast", "bruteforce"}));
    }
    if (std::string(name) == "weyl") sub->add_option("--alpha", c.alpha, "leading coefficient p/d");
    if (std::string(name) == "poisson") sub->add_option("--tail", c.tail)->capture_default_str();
    if (std::string(name) == "gauss") sub->add_flag("--values", c.values, "include character values");
  }

  if (argc > 1 && argv[1][0] != '-' &&
      std::none_of(std::begin(kSubcommands), std::end(kSubcommands),
                   [&](const SubcommandInfo& s) { return std::string(s.name) == argv[1]; })) {
    err << "lsieve: unknown subcommand '" << argv[1] << "'; expected one of";
    for (const auto& s : kSubcommands) err << ' ' << s.name;
    err << '\n';
    return {std::nullopt, static_cast<int>(ExitCode::kUsage)};
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    out << app.help();
    return {std::nullopt, 0};
  } catch (const CLI::CallForAllHelp& e) {
    out << app.help("", CLI::AppFormatMode::All);
    return {std::nullopt, 0};
  } catch (const CLI::ParseError& e) {
    err << "lsieve: " << e.what() << " (see --help)\n";
    return {std::nullopt, static_cast<int>(ExitCode::kUsage)};
  }

  CLI::App* sub = app.get_subcommands().front();
  c.subcommand = sub->get_name();
  auto take = [&](const char* flag, std::int64_t value) -> std::optional<std::int64_t> {
    return sub->count(flag) > 0 ? std::optional<std::int64_t>(value) : std::nullopt;
  };
  c.Q = take("--Q", Q);
  c.q_min = take("--q-min", q_min);
  c.q_max = take("--q-max", q_max);
  c.N = take("--N", N);
  c.format = format == "csv" ? Format::kCsv : Format::kJson;
  return {c, 0};
}

int run(const RunConfig& config, std::ostream& out, std::ostream& err) {
  const auto start = std::chrono::steady_clock::now();
  Report report;
  try {
    report = dispatch(config);
  } catch (const ConvergenceError& e) {
    err << "lsieve: " << e.what() << " (residual " << e.residual() << " after " << e.iterations()
        << " iterations; raise --tol)\n";
    return static_cast<int>(ExitCode::kUsage);
  } catch (const std::exception& e) {
    err << "lsieve " << config.subcommand << ": " << e.what() << '\n';
    return static_cast<int>(ExitCode::kUsage);
  }
  const double wall =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();

  if (config.out.empty()) {
    emit(config, report, wall, out);
  } else {
    std::ofstream file(config.out);
    if (!file) {
      err << "lsieve: cannot open --out file '" << config.out << "'\n";
      return static_cast<int>(ExitCode::kUsage);
    }
    emit(config, report, wall, file);
  }
  for (const auto& f : report.failures) err << "lsieve " << config.subcommand << ": " << f << '\n';
  return static_cast<int>(report.assertions_hold ? ExitCode::kOk : ExitCode::kAssertion);
}

int main_entry(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  ParseResult parsed = parse_args(argc, argv, out, err);
  if (!parsed.config) return parsed.exit_code;
  return run(*parsed.config, out, err);
}

}  // namespace lsieve::cli
