#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "walklab/params.hpp"
#include "walklab/stats.hpp"

namespace walklab {

inline constexpr std::string_view kVersion = "walklab 0.1.0";

/// Process exit statuses of the CLI.
enum ExitStatus : int { kExitOk = 0, kExitUsage = 2, kExitIo = 3, kExitCapacity = 4 };

/// Bad flag, bad config key or invalid value; maps to exit status 2.
class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Output could not be written; maps to exit status 3.
class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class Preset { Speed, TanExponent, CouplingAudit, Envelope, LemmaB, WindowedProgress };
enum class OutputFormat { Csv, Json };

std::string_view to_string(Preset p);
std::string_view to_string(OutputFormat f);

struct ExperimentConfig {
  Preset preset = Preset::Speed;
  std::vector<std::string> epsilons;
  std::vector<std::uint64_t> ns;
  std::optional<std::uint64_t> m;  ///< windowed-progress block length
  std::uint64_t replicas = 1;
  std::uint64_t master_seed = 1;
  DriftVariant variant = DriftVariant::FreshDrift;
  CouplingRule coupling = CouplingRule::Maximal;
  std::uint32_t cookies = 1;
  std::optional<std::int64_t> halfplane_x;
  unsigned workers = 1;
  OutputFormat format = OutputFormat::Csv;
  std::filesystem::path out = "walklab-out";

  /// Every resolved field as (key, value), in flag order.
  std::vector<std::pair<std::string, std::string>> resolved() const;

  /// Parameters for one (epsilon, n) cell.
  WalkParams walk_params(const std::string& epsilon) const;
};

/// Parses CLI arguments (without the program name) and an optional
/// `--config FILE` of `key = value` lines. Precedence, highest first:
/// flag, config file, preset default. `env_workers` (the WALKLAB_WORKERS
/// variable) overrides the worker count from any source. Throws UsageError.
ExperimentConfig parse_config(const std::vector<std::string>& args,
                              const std::optional<std::string>& env_workers = std::nullopt);

/// Parses "1000000", "1e6" or "2^20".
std::uint64_t parse_count(std::string_view text);

struct FitRow {
  std::string metric;
  ExponentFit fit;
};

/// Everything an experiment produces, independent of output format.
struct Report {
  ExperimentConfig config;
  std::vector<RunSummary> replicas;
  EnsembleSummary aggregate;
  std::vector<FitRow> fits;
};

/// Runs all replicas of every (epsilon, n) cell across config.workers threads.
/// Replica r of every cell uses stream (master_seed, r); results are folded in
/// replica order, so the report does not depend on the worker count.
/// Throws CapacityError before any work if a cell exceeds the memory budget.
Report run_experiment(const ExperimentConfig& config);

/// Writes replicas.csv, aggregate.csv and exponent.csv (or result.json) under
/// config.out. `timestamp` goes on its own metadata line. Throws IoError.
std::vector<std::filesystem::path> write_report(const Report& report, const std::string& timestamp);

/// Exact CSV header lines.
inline constexpr std::string_view kReplicaHeader =
    "replica,epsilon,n,final_x,final_y,fresh_visits,gap_final,tan_count,envelope_max_ratio,progress_min";
inline constexpr std::string_view kAggregateHeader = "metric,count,mean,stderr,ci_low,ci_high,min,max";
inline constexpr std::string_view kExponentHeader = "metric,slope,intercept,r_squared,points";

/// Half-width multiplier of the aggregate confidence interval.
inline constexpr double kCiSigma = 3.0;

/// Decimal with 17 significant digits; "nan"/"inf" for non-finite values.
std::string format_double(double v);

/// Full CLI: parse, run, write; returns the exit status.
int run_cli(const std::vector<std::string>& args, const std::optional<std::string>& env_workers);

}  // namespace walklab
