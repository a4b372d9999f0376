#include "walklab/stats.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "walklab/errors.hpp"
#include "walklab/logs.hpp"

namespace walklab {

// ---------------------------------------------------------------------------
// Quantile sketch

void QuantileSketch::add(double x) {
  if (levels_.empty()) {
    levels_.emplace_back();
    parity_.push_back(0);
  }
  levels_[0].push_back(x);
  if (levels_[0].size() > k_) compress();
}

void QuantileSketch::merge(const QuantileSketch& other) {
  if (levels_.size() < other.levels_.size()) {
    levels_.resize(other.levels_.size());
    parity_.resize(other.levels_.size(), 0);
  }
  for (std::size_t h = 0; h < other.levels_.size(); ++h) {
    levels_[h].insert(levels_[h].end(), other.levels_[h].begin(), other.levels_[h].end());
  }
  compress();
}

void QuantileSketch::compress() {
  for (std::size_t h = 0; h < levels_.size(); ++h) {
    auto& level = levels_[h];
    if (level.size() <= k_) continue;
    std::sort(level.begin(), level.end());
    // An odd element stays behind so total weight is preserved exactly.
    std::vector<double> keep;
    if (level.size() % 2 == 1) {
      keep.push_back(level.back());
      level.pop_back();
    }
    if (h + 1 == levels_.size()) {
      levels_.emplace_back();
      parity_.push_back(0);
    }
    auto& up = levels_[h + 1];
    auto& cur = levels_[h];  // levels_ may have reallocated
    for (std::size_t i = parity_[h]; i < cur.size(); i += 2) up.push_back(cur[i]);
    parity_[h] ^= 1;
    cur = std::move(keep);
  }
}

std::uint64_t QuantileSketch::weight() const {
  std::uint64_t w = 0;
  for (std::size_t h = 0; h < levels_.size(); ++h) w += levels_[h].size() << h;
  return w;
}

double QuantileSketch::quantile(double q) const {
  std::vector<std::pair<double, std::uint64_t>> items;
  for (std::size_t h = 0; h < levels_.size(); ++h) {
    for (double v : levels_[h]) items.emplace_back(v, std::uint64_t{1} << h);
  }
  if (items.empty()) return std::numeric_limits<double>::quiet_NaN();
  std::sort(items.begin(), items.end());
  const std::uint64_t total = weight();
  // Lower empirical quantile: smallest value whose cumulative weight reaches
  // ceil(q * total), at least 1.
  const double target = std::max(1.0, std::ceil(std::clamp(q, 0.0, 1.0) * static_cast<double>(total)));
  std::uint64_t acc = 0;
  for (const auto& [v, w] : items) {
    acc += w;
    if (static_cast<double>(acc) >= target) return v;
  }
  return items.back().first;
}

// ---------------------------------------------------------------------------
// Moments

void MetricSummary::add(double x) {
  if (count == 0) {
    min = max = x;
  } else {
    min = std::min(min, x);
    max = std::max(max, x);
  }
  ++count;
  const double delta = x - mean;
  mean += delta / static_cast<double>(count);
  m2 += delta * (x - mean);
  sketch.add(x);
}

void MetricSummary::merge(const MetricSummary& other) {
  if (other.count == 0) return;
  if (count == 0) {
    *this = other;
    return;
  }
  const double na = static_cast<double>(count);
  const double nb = static_cast<double>(other.count);
  const double n = na + nb;
  const double delta = other.mean - mean;
  mean += delta * nb / n;
  m2 += other.m2 + delta * delta * na * nb / n;
  count += other.count;
  min = std::min(min, other.min);
  max = std::max(max, other.max);
  sketch.merge(other.sketch);
}

double MetricSummary::stderr_mean() const {
  return count > 1 ? std::sqrt(variance() / static_cast<double>(count)) : 0.0;
}

void EnsembleSummary::merge(const EnsembleSummary& other) {
  for (const auto& [name, summary] : other.metrics_) metrics_[name].merge(summary);
}

// ---------------------------------------------------------------------------
// Speed and exponents

SpeedEstimate speed_estimate(std::span<const RunSummary> runs, double z) {
  if (runs.size() < 2) throw InsufficientDataError("speed estimate needs at least two replicas");
  MetricSummary speed;
  std::uint64_t nonpositive = 0;
  for (const RunSummary& r : runs) {
    if (r.n == 0) throw InsufficientDataError("speed estimate needs n >= 1");
    speed.add(static_cast<double>(r.final_x) / static_cast<double>(r.n));
    nonpositive += r.final_x <= 0 ? 1 : 0;
  }
  SpeedEstimate est;
  est.mean = speed.mean;
  est.stderr_mean = speed.stderr_mean();
  est.ci_low = est.mean - z * est.stderr_mean;
  est.ci_high = est.mean + z * est.stderr_mean;
  est.p_nonpositive = static_cast<double>(nonpositive) / static_cast<double>(runs.size());
  return est;
}

ExponentFit exponent_fit(std::span<const std::pair<double, double>> points) {
  if (points.size() < 3) throw InsufficientDataError("exponent fit needs at least three points");
  const auto k = static_cast<Eigen::Index>(points.size());
  Eigen::MatrixXd design(k, 2);
  Eigen::VectorXd target(k);
  ExponentFit fit;
  for (Eigen::Index r = 0; r < k; ++r) {
    const auto [n, metric] = points[static_cast<std::size_t>(r)];
    if (!(n > 0.0)) throw NonPositiveMetricError("exponent fit: n must be positive");
    if (!(metric > 0.0)) throw NonPositiveMetricError("exponent fit: metric must be positive");
    design(r, 0) = 1.0;
    design(r, 1) = std::log(n);
    target(r) = std::log(metric);
    fit.points.emplace_back(design(r, 1), target(r));
  }
  const Eigen::Vector2d beta = design.colPivHouseholderQr().solve(target);
  fit.intercept = beta(0);
  fit.slope = beta(1);
  const Eigen::VectorXd residual = target - design * beta;
  fit.residual_max = residual.cwiseAbs().maxCoeff();
  const double ss_res = residual.squaredNorm();
  const double ss_tot = (target.array() - target.mean()).square().sum();
  fit.r_squared = ss_tot > 0.0 ? std::clamp(1.0 - ss_res / ss_tot, 0.0, 1.0) : 1.0;
  return fit;
}

// ---------------------------------------------------------------------------
// Envelope

EnvelopeResult envelope_violations(std::span<const LatticePoint> path) {
  EnvelopeResult out;
  if (path.size() < 2) return out;
  const std::uint64_t steps = path.size() - 1;
  const double log_n = log1(static_cast<double>(steps));
  for (std::uint64_t lag = 1; lag <= steps; lag *= 2) {
    const double bound = log_n * std::sqrt(static_cast<double>(lag));
    for (std::uint64_t i = 0; i + lag <= steps; ++i) {
      const double dx = std::fabs(static_cast<double>(path[i + lag].x - path[i].x));
      ++out.pairs_checked;
      out.max_ratio = std::max(out.max_ratio, dx / bound);
      if (dx > bound) {
        ++out.violations;
        if (out.first_violation_lag == 0) out.first_violation_lag = lag;
      }
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// Bernoulli tails

double bernoulli_tail_bound(std::uint64_t n, double eps, std::uint64_t k) {
  return 2.0 * std::pow(static_cast<double>(n) * eps, static_cast<double>(k));
}

double exact_binomial_tail(std::uint64_t n, double eps, std::uint64_t k) {
  if (n > 10000) throw RangeError("exact binomial tail is limited to n <= 10^4");
  if (!(eps >= 0.0 && eps <= 1.0)) throw ParamError("binomial probability must lie in [0, 1]");
  if (k >= n || eps == 0.0) return 0.0;
  if (eps == 1.0) return 1.0;

  using real = long double;
  const real p = eps;
  const real log_p = std::log(p);
  const real log_q = std::log1p(-p);
  const std::uint64_t j0 = k + 1;
  const real nn = static_cast<real>(n);
  const real jj = static_cast<real>(j0);
  real term = std::exp(std::lgamma(nn + 1) - std::lgamma(jj + 1) - std::lgamma(nn - jj + 1) + jj * log_p +
                       (nn - jj) * log_q);
  const real odds = p / (1 - p);
  real sum = term;
  for (std::uint64_t j = j0; j < n; ++j) {
    term *= static_cast<real>(n - j) / static_cast<real>(j + 1) * odds;
    sum += term;
  }
  return static_cast<double>(std::min<real>(sum, 1));
}

// ---------------------------------------------------------------------------
// Windowed progress

ProgressResult windowed_progress(std::span<const LatticePoint> path, std::uint64_t n, std::uint64_t m,
                                 std::uint64_t window, std::uint64_t samples) {
  if (n == 0) throw RangeError("windowed progress needs n >= 1");
  if (static_cast<double>(m) < std::pow(static_cast<double>(n), 15.0 / 16.0)) {
    throw ParamError("windowed progress needs m >= n^{15/16}");
  }
  if (path.size() < 2 * n + 1) throw RangeError("windowed progress needs a path of at least 2n steps");
  if (window > n) {
    throw RangeError("window " + std::to_string(window) + " exceeds n=" + std::to_string(n) +
                     ", no admissible i in [n, 2n - window]");
  }
  if (samples == 0) samples = 1;
  const std::uint64_t lo = n;
  const std::uint64_t hi = 2 * n - window;

  std::vector<std::uint64_t> sample_i;
  if (hi - lo + 1 <= samples) {
    for (std::uint64_t i = lo; i <= hi; ++i) sample_i.push_back(i);
  } else {
    for (std::uint64_t s = 0; s < samples; ++s) {
      const std::uint64_t i = lo + (samples == 1 ? 0 : s * (hi - lo) / (samples - 1));
      if (sample_i.empty() || sample_i.back() != i) sample_i.push_back(i);
    }
  }

  ProgressResult out;
  std::int64_t prefix_max = path[0].x;
  std::uint64_t next = 0;
  bool first = true;
  for (std::uint64_t i = 0; i <= hi && next < sample_i.size(); ++i) {
    prefix_max = std::max(prefix_max, path[i].x);
    if (i != sample_i[next]) continue;
    ++next;
    const std::int64_t progress = path[i + window].x - prefix_max;
    if (first || progress < out.min_progress) {
      out.min_progress = progress;
      out.argmin_i = i;
      first = false;
    }
  }
  out.samples = sample_i.size();
  return out;
}

ProgressResult windowed_progress(std::span<const LatticePoint> path, std::uint64_t n, std::uint64_t m) {
  return windowed_progress(path, n, m, log6_horizon(static_cast<double>(m), 2.0 * static_cast<double>(n)));
}

// ---------------------------------------------------------------------------
// Coupling audit

GapAudit gap_audit(const CoupledTrajectory& traj, const Epsilon& eps) {
  GapAudit a;
  const std::size_t len = traj.gap.size();
  if (traj.erw_path.size() != len || traj.srw_path.size() != len) {
    a.gap_matches_paths = false;
    return a;
  }
  if (len > 0 && traj.gap[0] != 0) a.nonnegative = false;
  std::int64_t xi_sum = 0;
  for (std::int64_t x : traj.xi) xi_sum += x;
  for (std::size_t j = 0; j < len; ++j) {
    const std::int64_t g = traj.gap[j];
    if (g < 0) a.nonnegative = false;
    if (g % 2 != 0) a.even = false;
    if (j > 0 && g < traj.gap[j - 1]) a.monotone = false;
    if (traj.erw_path[j].y != traj.srw_path[j].y) a.vertical_lock = false;
    if (traj.erw_path[j].x - traj.srw_path[j].x != g) a.gap_matches_paths = false;
  }
  const std::int64_t final_gap = len > 0 ? traj.gap.back() : 0;
  a.bookkeeping = final_gap == 2 * static_cast<std::int64_t>(traj.activations);
  // With one cookie per site every activation happens at a fresh time, so the
  // xi sum accounts for the whole gap.
  if (traj.drift_visits == traj.fresh_times.size()) a.bookkeeping = a.bookkeeping && xi_sum == final_gap;

  a.activations = traj.activations;
  a.trials = traj.drift_visits;
  a.activation_probability = activation_probability(eps, traj.rule);
  const double mean = static_cast<double>(a.trials) * a.activation_probability;
  const double var = mean * (1.0 - a.activation_probability);
  const double diff = static_cast<double>(a.activations) - mean;
  a.z = var > 0.0 ? diff / std::sqrt(var) : (diff == 0.0 ? 0.0 : std::numeric_limits<double>::infinity());
  return a;
}

}  // namespace walklab
