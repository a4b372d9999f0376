#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "walklab/lattice.hpp"
#include "walklab/params.hpp"
#include "walklab/rng.hpp"
#include "walklab/visited.hpp"

namespace walklab {

using Path = std::vector<LatticePoint>;

/// Memory budget for a single trajectory.
struct Limits {
  std::size_t max_bytes = std::size_t{8} << 30;
};

/// Throws CapacityError if an n-step trajectory needing bytes_per_step per
/// step would exceed the budget, or if n > 2^31.
void check_capacity(std::uint64_t n, std::size_t bytes_per_step, const Limits& limits);

/// (1/4+eps, 1/4-eps, 1/4, 1/4) at a drift site, uniform otherwise.
StepDistribution step_distribution(const WalkParams& params, bool site_is_drift_site);

/// Drift rule given the cookies left at `position` before the current visit.
bool is_drift_site(const WalkParams& params, const VisitedSet& visited, std::uint32_t cookie_count_at_site,
                   const LatticePoint& position);

/// Same, with the cookie count read from `visited` (visits strictly before now).
bool is_drift_site(const WalkParams& params, const VisitedSet& visited, const LatticePoint& position);

/// Maps u in [0, 2^40) to a move: right on [0, w_right), then left, up, down.
constexpr Direction choose_direction(const StepDistribution& d, std::uint64_t u) {
  if (u < d.w_right) return Direction::Right;
  u -= d.w_right;
  if (u < d.w_left) return Direction::Left;
  u -= d.w_left;
  if (u < d.w_up) return Direction::Up;
  return Direction::Down;
}

/// Simple random walk of n steps; one draw per step.
Path run_srw(const LatticePoint& start, std::uint64_t n, const RngSpec& rng, const Limits& limits = {});

/// An excited walk together with its site bookkeeping.
struct ErwRun {
  Path path;
  std::uint64_t fresh_visits = 0;  ///< indices 0..n whose vertex is new
  std::uint64_t drift_steps = 0;   ///< steps drawn from the drifted law
};

/// Excited random walk of n steps; one draw per step. With epsilon = 0 the
/// path equals run_srw(params.start, n, rng).
ErwRun run_erw_detailed(const WalkParams& params, std::uint64_t n, const RngSpec& rng, const Limits& limits = {});

inline Path run_erw(const WalkParams& params, std::uint64_t n, const RngSpec& rng, const Limits& limits = {}) {
  return run_erw_detailed(params, n, rng, limits).path;
}

/// Synchronized excited and simple walks built on one random stream.
struct CoupledTrajectory {
  Path erw_path;
  Path srw_path;
  /// gap[j] = erw_path[j].x - srw_path[j].x
  std::vector<std::int64_t> gap;
  /// Times T_k < n at which the excited walk stands on a new vertex.
  std::vector<std::uint64_t> fresh_times;
  /// xi[k] = gap[T_{k+1}] - gap[T_k], with T_{K} taken as n after the last
  /// fresh time. Values are 0 or 2 with one cookie per site.
  std::vector<std::int64_t> xi;
  std::uint64_t drift_visits = 0;
  std::uint64_t activations = 0;
  CouplingRule rule = CouplingRule::Maximal;

  std::uint64_t steps() const { return erw_path.empty() ? 0 : erw_path.size() - 1; }
};

/// Probability that a drift-site step pulls the walks apart: eps under the
/// maximal rule, 2*eps under the stated rule.
double activation_probability(const Epsilon& eps, CouplingRule rule);

/// Couples the excited walk to a simple walk. Under CouplingRule::Maximal
/// a single draw per step drives both walks and the excited path is identical
/// to run_erw on the same stream. Throws VariantError for PaperLiteral.
CoupledTrajectory run_coupled(const WalkParams& params, std::uint64_t n, const RngSpec& rng,
                              const Limits& limits = {});

/// Indices t with path[t] outside region and outside path[0..t-1].
std::vector<std::uint64_t> fresh_site_times(std::span<const LatticePoint> path, const InitialRegion& region);

}  // namespace walklab
