#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "walklab/lattice.hpp"
#include "walklab/params.hpp"
#include "walklab/walk.hpp"

namespace walklab {

/// Deterministic mergeable quantile sketch (KLL-style compactor stack).
///
/// Exact until more than `k` values arrive at level 0. A full level is sorted
/// and every other element is promoted with doubled weight; the kept parity
/// alternates per level so compaction error does not drift one way.
class QuantileSketch {
 public:
  explicit QuantileSketch(std::size_t k = 1024) : k_(k) {}

  void add(double x);
  void merge(const QuantileSketch& other);
  /// q-quantile by weighted rank, q in [0, 1]. NaN when empty.
  double quantile(double q) const;
  std::uint64_t weight() const;
  bool exact() const { return levels_.size() <= 1; }

 private:
  void compress();

  std::size_t k_;
  std::vector<std::vector<double>> levels_;
  std::vector<std::uint8_t> parity_;
};

/// Moments, extremes and quantiles of one scalar metric.
struct MetricSummary {
  std::uint64_t count = 0;
  double mean = 0.0;
  double m2 = 0.0;  ///< sum of squared deviations from the mean
  double min = 0.0;
  double max = 0.0;
  QuantileSketch sketch;

  void add(double x);
  /// Chan et al. pairwise update; exact in count, order-free up to rounding.
  void merge(const MetricSummary& other);

  double variance() const { return count > 1 ? m2 / static_cast<double>(count - 1) : 0.0; }
  double stderr_mean() const;
  double quantile(double q) const { return sketch.quantile(q); }
};

/// Named metrics aggregated over replicas.
class EnsembleSummary {
 public:
  void add(const std::string& metric, double value) { metrics_[metric].add(value); }
  void merge(const EnsembleSummary& other);

  const std::map<std::string, MetricSummary>& metrics() const { return metrics_; }
  const MetricSummary& at(const std::string& metric) const { return metrics_.at(metric); }
  bool contains(const std::string& metric) const { return metrics_.contains(metric); }

 private:
  std::map<std::string, MetricSummary> metrics_;
};

/// One replica's headline numbers. Metrics a preset does not compute stay empty.
struct RunSummary {
  std::string epsilon;
  std::uint64_t n = 0;
  std::uint64_t replica_index = 0;
  std::int64_t final_x = 0;
  std::int64_t final_y = 0;
  std::optional<std::uint64_t> fresh_visit_count;
  std::optional<std::int64_t> gap_final;
  std::optional<std::uint64_t> tan_count_total;
  std::optional<double> max_envelope_ratio;
  std::optional<std::int64_t> windowed_progress_min;
};

struct SpeedEstimate {
  double mean = 0.0;    ///< mean of final_x / n
  double stderr_mean = 0.0;
  double ci_low = 0.0;
  double ci_high = 0.0;
  double p_nonpositive = 0.0;  ///< fraction of replicas with final_x <= 0
};

/// Normal-approximation interval mean +- z * stderr for the speed final_x / n.
/// Throws InsufficientDataError with fewer than two replicas.
SpeedEstimate speed_estimate(std::span<const RunSummary> runs, double z = 3.0);

struct ExponentFit {
  double slope = 0.0;
  double intercept = 0.0;
  double r_squared = 0.0;
  double residual_max = 0.0;
  std::vector<std::pair<double, double>> points;  ///< (log n, log metric)
};

/// Least squares of log metric on log n. Throws InsufficientDataError with
/// fewer than three points and NonPositiveMetricError on n or metric <= 0.
ExponentFit exponent_fit(std::span<const std::pair<double, double>> points);

struct EnvelopeResult {
  std::uint64_t violations = 0;
  double max_ratio = 0.0;
  std::uint64_t pairs_checked = 0;
  /// Smallest dyadic lag with a violating pair, 0 if none.
  std::uint64_t first_violation_lag = 0;
};

/// Checks |x(j) - x(i)| <= log n * sqrt(j - i) over all pairs whose lag j - i
/// is a power of two, with n the path's step count and log floored at 1.
EnvelopeResult envelope_violations(std::span<const LatticePoint> path);

/// 2 (n eps)^k; an upper bound on P(Binomial(n, eps) > k) when n eps <= 1/2.
double bernoulli_tail_bound(std::uint64_t n, double eps, std::uint64_t k);

/// P(Binomial(n, eps) > k) by direct summation in extended precision.
/// Throws RangeError for n > 10^4.
double exact_binomial_tail(std::uint64_t n, double eps, std::uint64_t k);

struct ProgressResult {
  std::int64_t min_progress = 0;
  std::uint64_t argmin_i = 0;
  std::uint64_t samples = 0;
};

/// min over sampled i in [n, 2n - window] of
///   path[i + window].x - max_{j <= i} path[j].x,
/// with up to `samples` evenly spaced i. Requires m >= n^{15/16} and a path of
/// at least 2n steps; throws RangeError if the window leaves no admissible i.
ProgressResult windowed_progress(std::span<const LatticePoint> path, std::uint64_t n, std::uint64_t m,
                                 std::uint64_t window, std::uint64_t samples = 64);

/// Same with the window floor(m log^6 2n).
ProgressResult windowed_progress(std::span<const LatticePoint> path, std::uint64_t n, std::uint64_t m);

struct GapAudit {
  bool nonnegative = true;
  bool monotone = true;
  bool even = true;
  bool vertical_lock = true;
  bool gap_matches_paths = true;
  bool bookkeeping = true;  ///< gap(n) == sum of xi == 2 * activations
  std::uint64_t activations = 0;
  std::uint64_t trials = 0;
  double activation_probability = 0.0;
  double z = 0.0;

  bool passed() const {
    return nonnegative && monotone && even && vertical_lock && gap_matches_paths && bookkeeping;
  }
};

/// Exact checks of a coupled trajectory plus the z-score of its activation
/// count against Binomial(drift visits, activation probability).
GapAudit gap_audit(const CoupledTrajectory& traj, const Epsilon& eps);

}  // namespace walklab
