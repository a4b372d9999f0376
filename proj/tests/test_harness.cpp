#include <doctest.h>
#include <json.hpp>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>
#include <unordered_set>

#include "walklab/errors.hpp"
#include "walklab/harness.hpp"
#include "walklab/rng.hpp"

using namespace walklab;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / ("walklab_test_harness_" + name);
  fs::remove_all(dir);
  return dir;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

// File content without the '#' metadata lines.
std::string data_lines(const fs::path& p) {
  std::istringstream in(slurp(p));
  std::string line, out;
  while (std::getline(in, line)) {
    if (!line.empty() && line[0] == '#') continue;
    out += line + '\n';
  }
  return out;
}

std::vector<std::string> lines_of(const fs::path& p) {
  std::istringstream in(slurp(p));
  std::vector<std::string> out;
  for (std::string line; std::getline(in, line);) out.push_back(line);
  return out;
}

}  // namespace

TEST_CASE("parse_count forms") {
  CHECK(parse_count("1000000") == 1000000);
  CHECK(parse_count("1e6") == 1000000);
  CHECK(parse_count("2^18") == 262144);
  CHECK(parse_count("2.5e5") == 250000);
  CHECK_THROWS(parse_count("1.5"));
  CHECK_THROWS(parse_count("-3"));
  CHECK_THROWS(parse_count("ten"));
  CHECK_THROWS(parse_count("2^70"));
}

TEST_CASE("parse_config preset defaults and flags") {
  ExperimentConfig c = parse_config({"--preset", "speed", "--epsilon", "0.1", "--n", "1e4", "--replicas", "10"});
  CHECK(c.preset == Preset::Speed);
  CHECK(c.epsilons == std::vector<std::string>{"0.1"});
  CHECK(c.ns == std::vector<std::uint64_t>{10000});
  CHECK(c.replicas == 10);
  CHECK(c.variant == DriftVariant::FreshDrift);
  CHECK(c.format == OutputFormat::Csv);

  c = parse_config({"--preset", "tan-exponent"});
  CHECK(c.ns.front() == 4096);
  CHECK(c.ns.back() == 262144);
  CHECK(c.replicas == 200);

  c = parse_config({"--preset", "coupling-audit"});
  CHECK(c.epsilons == std::vector<std::string>{"0.05", "0.1", "0.2"});
  CHECK(c.replicas == 1000);

  c = parse_config({"--epsilon", "0.05, 0.1", "--n", "1e3,2^10", "--halfplane-x", "-4", "--cookies", "3",
                    "--variant", "literal", "--format", "json", "--coupling", "stated"});
  CHECK(c.epsilons.size() == 2);
  CHECK(c.ns == std::vector<std::uint64_t>{1000, 1024});
  CHECK(c.halfplane_x == -4);
  CHECK(c.cookies == 3);
  CHECK(c.variant == DriftVariant::PaperLiteral);
  CHECK(c.coupling == CouplingRule::Stated);
  CHECK(c.format == OutputFormat::Json);
  CHECK(c.walk_params("0.05").initial_region.half_plane_threshold == -4);
}

TEST_CASE("parse_config rejects bad input") {
  CHECK_THROWS_AS(parse_config({"--epsilon", "0.3"}), UsageError);
  CHECK_THROWS_AS(parse_config({"--epsilon", "-0.1"}), UsageError);
  CHECK_THROWS_AS(parse_config({"--bogus", "1"}), UsageError);
  CHECK_THROWS_AS(parse_config({"--preset", "nope"}), UsageError);
  CHECK_THROWS_AS(parse_config({"--n", "0"}), UsageError);
  CHECK_THROWS_AS(parse_config({"--replicas", "0"}), UsageError);
  CHECK_THROWS_AS(parse_config({"--format", "xml"}), UsageError);
  CHECK_THROWS_AS(parse_config({"--cookies", "0"}), UsageError);
  CHECK_THROWS_AS(parse_config({"--preset", "coupling-audit", "--variant", "literal"}), UsageError);
  // m must lie in [n^{15/16}, n].
  CHECK_THROWS_AS(parse_config({"--preset", "windowed-progress", "--n", "65536", "--m", "30000"}), UsageError);
  CHECK_THROWS_AS(parse_config({"--preset", "windowed-progress", "--n", "65536", "--m", "70000"}), UsageError);
  CHECK_NOTHROW(parse_config({"--preset", "windowed-progress", "--n", "65536", "--m", "32768"}));
}

TEST_CASE("config file precedence and errors") {
  const fs::path dir = scratch("config");
  fs::create_directories(dir);
  const fs::path file = dir / "run.conf";
  {
    std::ofstream out(file);
    out << "# comment line\n"
        << "preset = speed\n"
        << "replicas = 20   # trailing comment\n"
        << "n = 5000\n\n"
        << "workers = 3\n";
  }
  ExperimentConfig c = parse_config({"--config", file.string()});
  CHECK(c.replicas == 20);
  CHECK(c.ns == std::vector<std::uint64_t>{5000});
  CHECK(c.workers == 3);
  c = parse_config({"--config", file.string(), "--replicas", "50"});
  CHECK(c.replicas == 50);
  c = parse_config({"--replicas", "50", "--config", file.string()});
  CHECK(c.replicas == 50);
  // The environment variable beats both.
  c = parse_config({"--config", file.string(), "--workers", "5"}, std::string("7"));
  CHECK(c.workers == 7);
  c = parse_config({"--workers", "5"}, std::string(""));
  CHECK(c.workers == 5);
  CHECK_THROWS_AS(parse_config({}, std::string("zero")), UsageError);

  const fs::path bad = dir / "bad.conf";
  {
    std::ofstream out(bad);
    out << "replicas = 2\nfrobnicate = 1\n";
  }
  try {
    parse_config({"--config", bad.string()});
    FAIL("expected UsageError");
  } catch (const UsageError& e) {
    const std::string msg = e.what();
    CHECK(msg.find(":2:") != std::string::npos);
    CHECK(msg.find("frobnicate") != std::string::npos);
  }
  CHECK_THROWS_AS(parse_config({"--config", (dir / "missing.conf").string()}), UsageError);
  fs::remove_all(dir);
}

TEST_CASE("seed derivation gives distinct, uncorrelated streams") {
  std::unordered_set<std::uint64_t> seen;
  seen.reserve(2000000);
  for (std::uint64_t r = 0; r < 1000000; ++r) seen.insert(seed_derivation(42, r));
  CHECK(seen.size() == 1000000);
  CHECK(seed_derivation(1, 0) != seed_derivation(2, 0));

  // Correlation of first draws across neighbouring replicas.
  const int k = 20000;
  double sx = 0, sy = 0, sxx = 0, syy = 0, sxy = 0;
  for (int r = 0; r < k; ++r) {
    Stream a({7, static_cast<std::uint64_t>(r)});
    Stream b({7, static_cast<std::uint64_t>(r + 1)});
    const double x = static_cast<double>(a.draw()) / kDrawRange;
    const double y = static_cast<double>(b.draw()) / kDrawRange;
    sx += x;
    sy += y;
    sxx += x * x;
    syy += y * y;
    sxy += x * y;
  }
  const double cov = sxy / k - (sx / k) * (sy / k);
  const double rho = cov / std::sqrt((sxx / k - sx * sx / k / k) * (syy / k - sy * sy / k / k));
  CHECK(std::fabs(rho) < 0.1);
}

TEST_CASE("reports are reproducible and independent of the worker count") {
  const fs::path a = scratch("det_a"), b = scratch("det_b"), c = scratch("det_c");
  ExperimentConfig cfg = parse_config({"--preset", "speed", "--epsilon", "0.1,0.2", "--n", "2000,4000,8000",
                                       "--replicas", "12", "--seed", "99", "--workers", "1"});
  cfg.out = a;
  write_report(run_experiment(cfg), "t0");
  cfg.out = b;
  write_report(run_experiment(cfg), "t1");
  cfg.out = c;
  cfg.workers = 8;
  write_report(run_experiment(cfg), "t2");
  for (const char* f : {"replicas.csv", "aggregate.csv", "exponent.csv"}) {
    CHECK(data_lines(a / f) == data_lines(b / f));
    CHECK(data_lines(a / f) == data_lines(c / f));
  }
  const auto lines = lines_of(a / "replicas.csv");
  REQUIRE(lines.size() == 3 + 1 + 2 * 3 * 12);
  CHECK(lines[0] == "# walklab 0.1.0");
  CHECK(lines[1].rfind("# config: preset=speed epsilon=0.1,0.2 n=2000,4000,8000", 0) == 0);
  CHECK(lines[2] == "# timestamp: t0");
  CHECK(lines[3] == kReplicaHeader);
  CHECK(lines_of(a / "aggregate.csv")[3] == kAggregateHeader);
  CHECK(lines_of(a / "exponent.csv")[3] == kExponentHeader);
  // The speed preset fits final_x against n once per epsilon.
  CHECK(lines_of(a / "exponent.csv").size() == 6);
  for (const auto& d : {a, b, c}) fs::remove_all(d);
}

TEST_CASE("replica rows depend only on (seed, replica)") {
  ExperimentConfig one = parse_config({"--preset", "envelope", "--n", "500", "--replicas", "3", "--seed", "5"});
  ExperimentConfig many = parse_config({"--preset", "envelope", "--n", "500", "--replicas", "30", "--seed", "5"});
  const Report r1 = run_experiment(one);
  const Report r2 = run_experiment(many);
  for (std::size_t i = 0; i < 3; ++i) {
    CHECK(r1.replicas[i].final_x == r2.replicas[i].final_x);
    CHECK(r1.replicas[i].max_envelope_ratio == r2.replicas[i].max_envelope_ratio);
  }
}

TEST_CASE("tan-exponent run writes a fit row") {
  const fs::path dir = scratch("tan");
  ExperimentConfig cfg = parse_config({"--preset", "tan-exponent", "--n", "2^8,2^10,2^12", "--replicas", "30"});
  cfg.out = dir;
  const Report report = run_experiment(cfg);
  REQUIRE(report.fits.size() == 1);
  CHECK(report.fits[0].metric == "tan_count");
  CHECK(report.fits[0].fit.points.size() == 3);
  write_report(report, "now");
  const auto lines = lines_of(dir / "exponent.csv");
  REQUIRE(lines.size() == 5);
  CHECK(lines[4].rfind("tan_count,", 0) == 0);
  CHECK(std::count(lines[4].begin(), lines[4].end(), ';') == 2);
  fs::remove_all(dir);
}

TEST_CASE("json report layout") {
  const fs::path dir = scratch("json");
  ExperimentConfig cfg = parse_config(
      {"--preset", "coupling-audit", "--epsilon", "0.1", "--n", "300", "--replicas", "4", "--format", "json"});
  cfg.out = dir;
  const auto written = write_report(run_experiment(cfg), "now");
  REQUIRE(written.size() == 1);
  const auto doc = nlohmann::json::parse(slurp(dir / "result.json"));
  for (const char* key : {"replicas", "aggregate", "fit", "config"}) CHECK(doc.contains(key));
  CHECK(doc["replicas"].is_array());
  CHECK(doc["replicas"].size() == 4);
  CHECK(doc["replicas"][0].contains("gap_final"));
  CHECK(doc["replicas"][0]["progress_min"].is_null());
  CHECK(doc["aggregate"].is_object());
  CHECK(doc["aggregate"]["audit_failed|eps=0.1|n=300"]["max"] == 0.0);
  CHECK(doc["config"]["preset"] == "coupling-audit");
  fs::remove_all(dir);
}

TEST_CASE("lemma-b preset reports the bound dominating everywhere") {
  const Report r = run_experiment(parse_config({"--preset", "lemma-b"}));
  const auto& dom = r.aggregate.at("bound_dominates");
  CHECK(dom.count == 45);
  CHECK(dom.min == 1.0);
}

TEST_CASE("format_double") {
  CHECK(format_double(0.1) == "0.10000000000000001");
  CHECK(format_double(2.0) == "2");
  CHECK(format_double(std::nan("")) == "nan");
  CHECK(std::stod(format_double(1.0 / 3.0)) == 1.0 / 3.0);
}

TEST_CASE("run_cli exit statuses") {
  CHECK(run_cli({"--epsilon", "0.3"}, std::nullopt) == kExitUsage);
  CHECK(run_cli({"--no-such-flag"}, std::nullopt) == kExitUsage);
  CHECK(run_cli({"--preset", "speed", "--n", "3e9", "--replicas", "1"}, std::nullopt) == kExitCapacity);

  const fs::path blocker = scratch("blocker");
  { std::ofstream(blocker) << "file"; }
  CHECK(run_cli({"--preset", "lemma-b", "--out", (blocker / "sub").string()}, std::nullopt) == kExitIo);
  fs::remove(blocker);

  const fs::path ok = scratch("ok");
  CHECK(run_cli({"--preset", "lemma-b", "--out", ok.string()}, std::nullopt) == kExitOk);
  CHECK(fs::exists(ok / "aggregate.csv"));
  fs::remove_all(ok);
}
