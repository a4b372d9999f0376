#include "walklab/harness.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <ctime>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>

#include "walklab/errors.hpp"
#include "walklab/logs.hpp"
#include "walklab/parallel.hpp"
#include "walklab/tanpoint.hpp"
#include "walklab/walk.hpp"

namespace walklab {

namespace {

// Flag names double as config-file keys, in echo order.
const std::vector<std::string> kKeys = {"preset", "epsilon", "n",           "m",       "replicas",
                                        "seed",   "variant", "coupling",    "cookies", "halfplane-x",
                                        "workers", "format", "out"};

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r\n");
  return std::string(s.substr(b, e - b + 1));
}

std::vector<std::string> split_list(std::string_view s) {
  std::vector<std::string> out;
  std::size_t pos = 0;
  while (pos <= s.size()) {
    const auto comma = s.find(',', pos);
    const auto end = comma == std::string_view::npos ? s.size() : comma;
    std::string item = trim(s.substr(pos, end - pos));
    if (!item.empty()) out.push_back(std::move(item));
    if (comma == std::string_view::npos) break;
    pos = comma + 1;
  }
  return out;
}

template <typename T>
std::string join(const std::vector<T>& items) {
  std::ostringstream os;
  for (std::size_t i = 0; i < items.size(); ++i) os << (i ? "," : "") << items[i];
  return os.str();
}

Preset parse_preset(std::string_view s) {
  if (s == "speed") return Preset::Speed;
  if (s == "tan-exponent") return Preset::TanExponent;
  if (s == "coupling-audit") return Preset::CouplingAudit;
  if (s == "envelope") return Preset::Envelope;
  if (s == "lemma-b") return Preset::LemmaB;
  if (s == "windowed-progress") return Preset::WindowedProgress;
  throw UsageError("--preset: unknown preset '" + std::string(s) + "'");
}

std::uint64_t parse_u64(const std::string& key, const std::string& text) {
  try {
    return parse_count(text);
  } catch (const std::exception& e) {
    throw UsageError("--" + key + ": " + e.what());
  }
}

std::int64_t parse_i64(const std::string& key, const std::string& text) {
  std::size_t used = 0;
  long long v = 0;
  try {
    v = std::stoll(text, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used != text.size() || text.empty()) throw UsageError("--" + key + ": not an integer: '" + text + "'");
  return v;
}

std::map<std::string, std::string> read_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw UsageError("--config: cannot read '" + path + "'");
  std::map<std::string, std::string> values;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.resize(hash);
    const std::string body = trim(line);
    if (body.empty()) continue;
    const auto eq = body.find('=');
    if (eq == std::string::npos) {
      throw UsageError(path + ":" + std::to_string(lineno) + ": expected 'key = value'");
    }
    const std::string key = trim(std::string_view(body).substr(0, eq));
    if (std::find(kKeys.begin(), kKeys.end(), key) == kKeys.end()) {
      throw UsageError(path + ":" + std::to_string(lineno) + ": unknown key '" + key + "'");
    }
    values[key] = trim(std::string_view(body).substr(eq + 1));
  }
  return values;
}

struct CliValues {
  std::map<std::string, std::string> flags;
  std::string config;
};

std::unique_ptr<CLI::App> make_app(CliValues& values) {
  auto app = std::make_unique<CLI::App>("Monte Carlo laboratory for the two-dimensional excited random walk",
                                        "walklab");
  const std::map<std::string, std::string> help = {
      {"preset", "speed | tan-exponent | coupling-audit | envelope | lemma-b | windowed-progress"},
      {"epsilon", "drift strength list, each in [0, 1/4) (comma separated)"},
      {"n", "step counts (comma separated; 1e6 and 2^18 forms accepted)"},
      {"m", "block length for windowed-progress (default ceil(n^{15/16}))"},
      {"replicas", "replicas per (epsilon, n) cell"},
      {"seed", "master seed"},
      {"variant", "drift rule: fresh | literal"},
      {"coupling", "coupling rule: maximal | stated"},
      {"cookies", "cookies per site"},
      {"halfplane-x", "pre-visit every site with x <= this value"},
      {"workers", "worker threads (WALKLAB_WORKERS overrides)"},
      {"format", "csv | json"},
      {"out", "output directory"},
  };
  for (const auto& key : kKeys) app->add_option("--" + key, values.flags[key], help.at(key));
  app->add_option("--config", values.config, "file of 'key = value' lines");
  return app;
}

}  // namespace

std::string_view to_string(Preset p) {
  switch (p) {
    case Preset::Speed: return "speed";
    case Preset::TanExponent: return "tan-exponent";
    case Preset::CouplingAudit: return "coupling-audit";
    case Preset::Envelope: return "envelope";
    case Preset::LemmaB: return "lemma-b";
    case Preset::WindowedProgress: return "windowed-progress";
  }
  return "?";
}

std::string_view to_string(OutputFormat f) { return f == OutputFormat::Csv ? "csv" : "json"; }

std::uint64_t parse_count(std::string_view text) {
  const std::string s = trim(text);
  if (s.empty()) throw std::invalid_argument("empty count");
  if (const auto caret = s.find('^'); caret != std::string::npos) {
    const std::uint64_t base = parse_count(s.substr(0, caret));
    const std::uint64_t exp = parse_count(s.substr(caret + 1));
    std::uint64_t v = 1;
    for (std::uint64_t i = 0; i < exp; ++i) {
      if (base != 0 && v > UINT64_MAX / base) throw std::invalid_argument("count overflows: '" + s + "'");
      v *= base;
    }
    return v;
  }
  if (s.find_first_not_of("0123456789") == std::string::npos) {
    std::size_t used = 0;
    const unsigned long long v = std::stoull(s, &used);
    return v;
  }
  std::size_t used = 0;
  double d = 0;
  try {
    d = std::stod(s, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used != s.size() || !(d >= 0) || d != std::floor(d) || d >= 1.8e19) {
    throw std::invalid_argument("not a non-negative integer: '" + s + "'");
  }
  return static_cast<std::uint64_t>(d);
}

std::vector<std::pair<std::string, std::string>> ExperimentConfig::resolved() const {
  return {
      {"preset", std::string(to_string(preset))},
      {"epsilon", join(epsilons)},
      {"n", join(ns)},
      {"m", m ? std::to_string(*m) : "auto"},
      {"replicas", std::to_string(replicas)},
      {"seed", std::to_string(master_seed)},
      {"variant", std::string(to_string(variant))},
      {"coupling", std::string(to_string(coupling))},
      {"cookies", std::to_string(cookies)},
      {"halfplane-x", halfplane_x ? std::to_string(*halfplane_x) : "none"},
      {"workers", std::to_string(workers)},
      {"format", std::string(to_string(format))},
      {"out", out.string()},
  };
}

WalkParams ExperimentConfig::walk_params(const std::string& epsilon) const {
  WalkParams p;
  p.epsilon = Epsilon::parse(epsilon);
  p.drift_variant = variant;
  p.coupling_rule = coupling;
  p.cookies_per_site = cookies;
  p.initial_region.half_plane_threshold = halfplane_x;
  p.validate();
  return p;
}

ExperimentConfig parse_config(const std::vector<std::string>& args, const std::optional<std::string>& env_workers) {
  CliValues cli;
  auto app = make_app(cli);
  std::vector<std::string> argv_storage;
  argv_storage.reserve(args.size() + 1);
  argv_storage.emplace_back("walklab");
  argv_storage.insert(argv_storage.end(), args.begin(), args.end());
  std::vector<char*> argv;
  for (auto& a : argv_storage) argv.push_back(a.data());
  try {
    app->parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::ParseError& e) {
    throw UsageError(e.what());
  }

  std::map<std::string, std::string> values;
  if (app->count("--config") > 0) values = read_config_file(cli.config);
  for (const auto& key : kKeys) {
    if (app->count("--" + key) > 0) values[key] = cli.flags[key];
  }
  const auto get = [&](const std::string& key) -> std::optional<std::string> {
    if (auto it = values.find(key); it != values.end()) return it->second;
    return std::nullopt;
  };

  ExperimentConfig cfg;
  cfg.preset = parse_preset(get("preset").value_or("speed"));

  std::string default_eps = "0.1";
  std::vector<std::uint64_t> default_n = {1000000};
  std::uint64_t default_replicas = 100;
  switch (cfg.preset) {
    case Preset::Speed: break;
    case Preset::TanExponent:
      default_eps = "0";
      default_n = {1u << 12, 1u << 13, 1u << 14, 1u << 15, 1u << 16, 1u << 17, 1u << 18};
      default_replicas = 200;
      break;
    case Preset::CouplingAudit:
      default_eps = "0.05,0.1,0.2";
      default_n = {10000};
      default_replicas = 1000;
      break;
    case Preset::Envelope:
      default_eps = "0";
      default_n = {10000};
      default_replicas = 1000;
      break;
    case Preset::LemmaB:
      default_eps = "0";
      default_n = {10, 100, 1000};
      default_replicas = 1;
      break;
    case Preset::WindowedProgress:
      default_n = {100000};
      break;
  }

  cfg.epsilons = split_list(get("epsilon").value_or(default_eps));
  if (cfg.epsilons.empty()) throw UsageError("--epsilon: empty list");
  for (const auto& e : cfg.epsilons) {
    try {
      (void)Epsilon::parse(e);
    } catch (const ParamError& err) {
      throw UsageError(std::string("--epsilon: ") + err.what());
    }
  }

  if (auto n = get("n")) {
    for (const auto& item : split_list(*n)) cfg.ns.push_back(parse_u64("n", item));
  } else {
    cfg.ns = default_n;
  }
  if (cfg.ns.empty()) throw UsageError("--n: empty list");
  for (auto n : cfg.ns) {
    if (n == 0) throw UsageError("--n: step counts must be >= 1");
  }

  if (auto m = get("m")) cfg.m = parse_u64("m", *m);
  cfg.replicas = get("replicas") ? parse_u64("replicas", *get("replicas")) : default_replicas;
  if (cfg.replicas == 0) throw UsageError("--replicas: must be >= 1");
  if (auto s = get("seed")) cfg.master_seed = parse_u64("seed", *s);

  try {
    if (auto v = get("variant")) cfg.variant = parse_drift_variant(*v);
    if (auto c = get("coupling")) cfg.coupling = parse_coupling_rule(*c);
  } catch (const ParamError& err) {
    throw UsageError(err.what());
  }
  if (auto c = get("cookies")) {
    const std::uint64_t v = parse_u64("cookies", *c);
    if (v == 0 || v > UINT32_MAX) throw UsageError("--cookies: must be in [1, 2^32)");
    cfg.cookies = static_cast<std::uint32_t>(v);
  }
  if (auto h = get("halfplane-x")) cfg.halfplane_x = parse_i64("halfplane-x", *h);

  cfg.workers = default_workers();
  if (auto w = get("workers")) cfg.workers = static_cast<unsigned>(parse_u64("workers", *w));
  if (env_workers && !trim(*env_workers).empty()) {
    cfg.workers = static_cast<unsigned>(parse_u64("workers (WALKLAB_WORKERS)", *env_workers));
  }
  if (cfg.workers == 0) throw UsageError("--workers: must be >= 1");

  if (auto f = get("format")) {
    if (*f == "csv") {
      cfg.format = OutputFormat::Csv;
    } else if (*f == "json") {
      cfg.format = OutputFormat::Json;
    } else {
      throw UsageError("--format: expected csv or json, got '" + *f + "'");
    }
  }
  if (auto o = get("out")) cfg.out = *o;

  if (cfg.preset == Preset::CouplingAudit && cfg.variant != DriftVariant::FreshDrift) {
    throw UsageError("--variant: coupling-audit requires the fresh drift variant");
  }
  if (cfg.preset == Preset::WindowedProgress && cfg.m) {
    for (auto n : cfg.ns) {
      if (static_cast<double>(*cfg.m) < std::pow(static_cast<double>(n), 15.0 / 16.0)) {
        throw UsageError("--m: windowed-progress needs m >= n^{15/16} (n=" + std::to_string(n) + ")");
      }
      if (*cfg.m > n) throw UsageError("--m: must not exceed n=" + std::to_string(n));
    }
  }
  return cfg;
}

// ---------------------------------------------------------------------------
// Running

namespace {

struct Cell {
  std::string epsilon;
  std::uint64_t n = 0;
  std::string key;  // "|eps=...|n=..." suffix of metric names
};

struct UnitResult {
  RunSummary summary;
  std::vector<std::pair<std::string, double>> metrics;
};

bool simulates_srw(Preset p) { return p == Preset::TanExponent || p == Preset::Envelope; }

std::uint64_t block_length(const ExperimentConfig& cfg, std::uint64_t n) {
  if (cfg.m) return *cfg.m;
  return static_cast<std::uint64_t>(std::ceil(std::pow(static_cast<double>(n), 15.0 / 16.0)));
}

// The nominal window floor(m log^6 2n) exceeds n at any desk-scale n; the
// block length m itself is used then.
std::uint64_t progress_window(std::uint64_t n, std::uint64_t m) {
  const std::uint64_t w = log6_horizon(static_cast<double>(m), 2.0 * static_cast<double>(n));
  return w <= n ? w : m;
}

UnitResult run_unit(const ExperimentConfig& cfg, const Cell& cell, std::uint64_t replica) {
  const RngSpec rng{cfg.master_seed, replica};
  UnitResult u;
  RunSummary& s = u.summary;
  s.epsilon = cell.epsilon;
  s.n = cell.n;
  s.replica_index = replica;
  const auto metric = [&](const std::string& name, double v) { u.metrics.emplace_back(name + cell.key, v); };

  switch (cfg.preset) {
    case Preset::Speed: {
      const ErwRun run = run_erw_detailed(cfg.walk_params(cell.epsilon), cell.n, rng);
      s.final_x = run.path.back().x - run.path.front().x;
      s.final_y = run.path.back().y - run.path.front().y;
      s.fresh_visit_count = run.fresh_visits;
      metric("speed", static_cast<double>(s.final_x) / static_cast<double>(cell.n));
      metric("final_x", static_cast<double>(s.final_x));
      metric("final_x_nonpositive", s.final_x <= 0 ? 1.0 : 0.0);
      metric("fresh_fraction", static_cast<double>(run.fresh_visits) / static_cast<double>(cell.n + 1));
      break;
    }
    case Preset::TanExponent: {
      const Path path = run_srw({0, 0}, cell.n, rng);
      const TanCount tc = count_tan_points(path, 0);
      s.final_x = path.back().x;
      s.final_y = path.back().y;
      s.tan_count_total = tc.total;
      metric("tan_count", static_cast<double>(tc.total));
      break;
    }
    case Preset::Envelope: {
      const Path path = run_srw({0, 0}, cell.n, rng);
      const EnvelopeResult env = envelope_violations(path);
      s.final_x = path.back().x;
      s.final_y = path.back().y;
      s.max_envelope_ratio = env.max_ratio;
      metric("envelope_max_ratio", env.max_ratio);
      metric("envelope_violated", env.violations > 0 ? 1.0 : 0.0);
      break;
    }
    case Preset::CouplingAudit: {
      const WalkParams params = cfg.walk_params(cell.epsilon);
      const CoupledTrajectory traj = run_coupled(params, cell.n, rng);
      const GapAudit audit = gap_audit(traj, params.epsilon);
      s.final_x = traj.erw_path.back().x;
      s.final_y = traj.erw_path.back().y;
      s.fresh_visit_count = traj.fresh_times.size();
      s.gap_final = traj.gap.back();
      s.tan_count_total = count_tan_points(traj.srw_path, 0).total;
      double xi_sum = 0;
      for (auto x : traj.xi) xi_sum += static_cast<double>(x);
      metric("audit_failed", audit.passed() ? 0.0 : 1.0);
      metric("gap_final", static_cast<double>(traj.gap.back()));
      metric("activations", static_cast<double>(traj.activations));
      metric("drift_visits", static_cast<double>(traj.drift_visits));
      metric("xi_sum", xi_sum);
      metric("fresh_times", static_cast<double>(traj.fresh_times.size()));
      break;
    }
    case Preset::WindowedProgress: {
      const std::uint64_t m = block_length(cfg, cell.n);
      const std::uint64_t window = progress_window(cell.n, m);
      const Path path = run_erw(cfg.walk_params(cell.epsilon), 2 * cell.n, rng);
      const ProgressResult pr = windowed_progress(path, cell.n, m, window);
      s.final_x = path.back().x - path.front().x;
      s.final_y = path.back().y - path.front().y;
      s.windowed_progress_min = pr.min_progress;
      metric("progress_min", static_cast<double>(pr.min_progress));
      metric("progress_min_over_m34", static_cast<double>(pr.min_progress) / std::pow(static_cast<double>(m), 0.75));
      break;
    }
    case Preset::LemmaB: break;
  }
  return u;
}

void run_lemma_b(Report& report) {
  const std::vector<std::uint64_t> ns = {10, 100, 1000};
  const std::vector<std::pair<std::string, double>> n_eps = {{"0.01", 0.01}, {"0.1", 0.1}, {"0.5", 0.5}};
  for (auto n : ns) {
    for (const auto& [label, ne] : n_eps) {
      const double eps = ne / static_cast<double>(n);
      for (std::uint64_t k = 1; k <= 5; ++k) {
        const std::string key = "|n=" + std::to_string(n) + "|n_eps=" + label + "|k=" + std::to_string(k);
        const double exact = exact_binomial_tail(n, eps, k);
        const double bound = bernoulli_tail_bound(n, eps, k);
        report.aggregate.add("exact_tail" + key, exact);
        report.aggregate.add("bound" + key, bound);
        report.aggregate.add("bound_dominates", exact <= bound ? 1.0 : 0.0);
      }
    }
  }
}

}  // namespace

Report run_experiment(const ExperimentConfig& cfg) {
  Report report;
  report.config = cfg;
  if (cfg.preset == Preset::LemmaB) {
    run_lemma_b(report);
    return report;
  }

  std::vector<Cell> cells;
  const std::vector<std::string> eps_list = simulates_srw(cfg.preset) ? std::vector<std::string>{"0"} : cfg.epsilons;
  for (const auto& eps : eps_list) {
    for (auto n : cfg.ns) {
      Cell c{eps, n, ""};
      c.key = simulates_srw(cfg.preset) ? "|n=" + std::to_string(n) : "|eps=" + eps + "|n=" + std::to_string(n);
      cells.push_back(std::move(c));
    }
  }

  for (const auto& c : cells) {
    switch (cfg.preset) {
      case Preset::CouplingAudit: check_capacity(c.n, 2 * sizeof(LatticePoint) + sizeof(std::int64_t), {}); break;
      case Preset::WindowedProgress: {
        check_capacity(2 * c.n, sizeof(LatticePoint), {});
        const std::uint64_t m = block_length(cfg, c.n);
        if (static_cast<double>(m) < std::pow(static_cast<double>(c.n), 15.0 / 16.0) || m > c.n) {
          throw ParamError("windowed-progress needs n^{15/16} <= m <= n");
        }
        break;
      }
      default: check_capacity(c.n, sizeof(LatticePoint), {}); break;
    }
  }

  const std::size_t units = cells.size() * cfg.replicas;
  auto results = parallel_map<UnitResult>(units, cfg.workers, [&](std::size_t u) {
    return run_unit(cfg, cells[u / cfg.replicas], u % cfg.replicas);
  });

  report.replicas.reserve(units);
  for (auto& r : results) {
    for (const auto& [name, v] : r.metrics) report.aggregate.add(name, v);
    report.replicas.push_back(std::move(r.summary));
  }

  for (const auto& c : cells) {
    if (cfg.preset == Preset::CouplingAudit) {
      const auto& act = report.aggregate.at("activations" + c.key);
      const auto& trials = report.aggregate.at("drift_visits" + c.key);
      const double total_act = act.mean * static_cast<double>(act.count);
      const double total_trials = trials.mean * static_cast<double>(trials.count);
      const double p = activation_probability(Epsilon::parse(c.epsilon), cfg.coupling);
      const double rate = total_trials > 0 ? total_act / total_trials : 0.0;
      const double var = total_trials * p * (1 - p);
      report.aggregate.add("pooled_activation_rate" + c.key, rate);
      report.aggregate.add("pooled_activation_z" + c.key, var > 0 ? (total_act - total_trials * p) / std::sqrt(var) : 0.0);
    }
    if (cfg.preset == Preset::WindowedProgress) {
      report.aggregate.add("window" + c.key, static_cast<double>(progress_window(c.n, block_length(cfg, c.n))));
    }
  }

  // Log-log fits across n, one per epsilon.
  const auto fit_metric = [&](const std::string& metric, const std::string& eps_key) {
    std::vector<std::pair<double, double>> pts;
    for (const auto& c : cells) {
      if (!eps_key.empty() && c.epsilon != eps_key) continue;
      const auto& s = report.aggregate.at(metric + c.key);
      if (!(s.mean > 0)) return;
      pts.emplace_back(static_cast<double>(c.n), s.mean);
    }
    if (pts.size() < 3) return;
    const std::string name = eps_key.empty() ? metric : metric + "|eps=" + eps_key;
    report.fits.push_back({name, exponent_fit(pts)});
  };
  if (cfg.preset == Preset::TanExponent) fit_metric("tan_count", "");
  if (cfg.preset == Preset::Speed) {
    for (const auto& eps : cfg.epsilons) fit_metric("final_x", eps);
  }
  return report;
}

// ---------------------------------------------------------------------------
// Output

std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

namespace {

template <typename T>
std::string opt_field(const std::optional<T>& v) {
  if (!v) return {};
  if constexpr (std::is_floating_point_v<T>) {
    return format_double(*v);
  } else {
    return std::to_string(*v);
  }
}

void write_metadata(std::ostream& os, const Report& report, const std::string& timestamp) {
  os << "# " << kVersion << '\n' << "# config:";
  for (const auto& [k, v] : report.config.resolved()) os << ' ' << k << '=' << v;
  os << '\n' << "# timestamp: " << timestamp << '\n';
}

void write_file(const std::filesystem::path& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open '" + path.string() + "' for writing");
  out << content;
  out.flush();
  if (!out) throw IoError("write to '" + path.string() + "' failed");
}

struct AggregateFields {
  double mean, stderr_mean, ci_low, ci_high;
};

AggregateFields aggregate_fields(const MetricSummary& s) {
  const double se = s.stderr_mean();
  return {s.mean, se, s.mean - kCiSigma * se, s.mean + kCiSigma * se};
}

}  // namespace

std::vector<std::filesystem::path> write_report(const Report& report, const std::string& timestamp) {
  const auto& dir = report.config.out;
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw IoError("cannot create output directory '" + dir.string() + "': " + ec.message());

  std::vector<std::filesystem::path> written;
  if (report.config.format == OutputFormat::Csv) {
    std::ostringstream rep, agg, fit;
    write_metadata(rep, report, timestamp);
    rep << kReplicaHeader << '\n';
    for (const auto& r : report.replicas) {
      rep << r.replica_index << ',' << r.epsilon << ',' << r.n << ',' << r.final_x << ',' << r.final_y << ','
          << opt_field(r.fresh_visit_count) << ',' << opt_field(r.gap_final) << ',' << opt_field(r.tan_count_total)
          << ',' << opt_field(r.max_envelope_ratio) << ',' << opt_field(r.windowed_progress_min) << '\n';
    }
    write_metadata(agg, report, timestamp);
    agg << kAggregateHeader << '\n';
    for (const auto& [name, s] : report.aggregate.metrics()) {
      const auto f = aggregate_fields(s);
      agg << name << ',' << s.count << ',' << format_double(f.mean) << ',' << format_double(f.stderr_mean) << ','
          << format_double(f.ci_low) << ',' << format_double(f.ci_high) << ',' << format_double(s.min) << ','
          << format_double(s.max) << '\n';
    }
    write_metadata(fit, report, timestamp);
    fit << kExponentHeader << '\n';
    for (const auto& f : report.fits) {
      fit << f.metric << ',' << format_double(f.fit.slope) << ',' << format_double(f.fit.intercept) << ','
          << format_double(f.fit.r_squared) << ',';
      for (std::size_t i = 0; i < f.fit.points.size(); ++i) {
        fit << (i ? ";" : "") << format_double(f.fit.points[i].first) << ':'
            << format_double(f.fit.points[i].second);
      }
      fit << '\n';
    }
    written = {dir / "replicas.csv", dir / "aggregate.csv", dir / "exponent.csv"};
    write_file(written[0], rep.str());
    write_file(written[1], agg.str());
    write_file(written[2], fit.str());
    return written;
  }

  using nlohmann::ordered_json;
  ordered_json doc;
  doc["version"] = kVersion;
  doc["timestamp"] = timestamp;
  ordered_json config = ordered_json::object();
  for (const auto& [k, v] : report.config.resolved()) config[k] = v;
  doc["config"] = config;
  ordered_json replicas = ordered_json::array();
  const auto opt = [](const auto& v) -> ordered_json { return v ? ordered_json(*v) : ordered_json(nullptr); };
  for (const auto& r : report.replicas) {
    replicas.push_back({{"replica", r.replica_index},
                        {"epsilon", r.epsilon},
                        {"n", r.n},
                        {"final_x", r.final_x},
                        {"final_y", r.final_y},
                        {"fresh_visits", opt(r.fresh_visit_count)},
                        {"gap_final", opt(r.gap_final)},
                        {"tan_count", opt(r.tan_count_total)},
                        {"envelope_max_ratio", opt(r.max_envelope_ratio)},
                        {"progress_min", opt(r.windowed_progress_min)}});
  }
  doc["replicas"] = replicas;
  ordered_json aggregate = ordered_json::object();
  for (const auto& [name, s] : report.aggregate.metrics()) {
    const auto f = aggregate_fields(s);
    aggregate[name] = {{"count", s.count}, {"mean", f.mean},     {"stderr", f.stderr_mean}, {"ci_low", f.ci_low},
                       {"ci_high", f.ci_high}, {"min", s.min}, {"max", s.max}};
  }
  doc["aggregate"] = aggregate;
  ordered_json fits = ordered_json::object();
  for (const auto& f : report.fits) {
    ordered_json pts = ordered_json::array();
    for (const auto& [x, y] : f.fit.points) pts.push_back({x, y});
    fits[f.metric] = {{"slope", f.fit.slope},
                      {"intercept", f.fit.intercept},
                      {"r_squared", f.fit.r_squared},
                      {"points", pts}};
  }
  doc["fit"] = fits;
  written = {dir / "result.json"};
  write_file(written[0], doc.dump(2) + "\n");
  return written;
}

namespace {

std::string utc_timestamp() {
  const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, const std::optional<std::string>& env_workers) {
  if (std::find(args.begin(), args.end(), "--help") != args.end() ||
      std::find(args.begin(), args.end(), "-h") != args.end()) {
    CliValues cli;
    std::cout << make_app(cli)->help();
    return kExitOk;
  }
  ExperimentConfig cfg;
  try {
    cfg = parse_config(args, env_workers);
  } catch (const UsageError& e) {
    std::cerr << "walklab: usage error: " << e.what() << '\n';
    return kExitUsage;
  }
  Report report;
  try {
    report = run_experiment(cfg);
  } catch (const CapacityError& e) {
    std::cerr << "walklab: capacity error: " << e.what() << '\n';
    return kExitCapacity;
  } catch (const ParamError& e) {
    std::cerr << "walklab: usage error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const VariantError& e) {
    std::cerr << "walklab: usage error: " << e.what() << '\n';
    return kExitUsage;
  }
  try {
    for (const auto& p : write_report(report, utc_timestamp())) std::cout << p.string() << '\n';
  } catch (const IoError& e) {
    std::cerr << "walklab: I/O error: " << e.what() << '\n';
    return kExitIo;
  }
  for (const auto& f : report.fits) {
    std::cout << "fit " << f.metric << ": slope " << format_double(f.fit.slope) << " r^2 "
              << format_double(f.fit.r_squared) << '\n';
  }
  return kExitOk;
}

}  // namespace walklab
