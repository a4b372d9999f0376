#include "walklab/walk.hpp"

#include <algorithm>
#include <string>

#include "walklab/errors.hpp"

namespace walklab {

namespace {

constexpr std::uint64_t kMaxSteps = std::uint64_t{1} << 31;

// Expected number of distinct sites; only a sizing hint for the hash table.
std::size_t table_hint(std::uint64_t n) { return static_cast<std::size_t>(std::min<std::uint64_t>(n + 1, 1u << 16)); }

bool drift_from_counts(const WalkParams& params, std::uint32_t prior_visits, bool in_region) {
  if (params.drift_variant == DriftVariant::FreshDrift) {
    return !in_region && prior_visits < params.cookies_per_site;
  }
  return in_region || prior_visits > 0;
}

Direction uniform_direction(std::uint64_t u) { return static_cast<Direction>(u / kQuarter); }

}  // namespace

void check_capacity(std::uint64_t n, std::size_t bytes_per_step, const Limits& limits) {
  if (n > kMaxSteps) throw CapacityError("step count " + std::to_string(n) + " exceeds 2^31");
  const std::uint64_t need = (n + 1) * bytes_per_step;
  if (need > limits.max_bytes) {
    throw CapacityError("trajectory of " + std::to_string(n) + " steps needs " + std::to_string(need) +
                        " bytes, budget is " + std::to_string(limits.max_bytes));
  }
}

StepDistribution step_distribution(const WalkParams& params, bool site_is_drift_site) {
  StepDistribution d;
  if (!site_is_drift_site) return d;
  const std::uint64_t e = params.epsilon.numerator();
  d.w_right = kQuarter + e;
  d.w_left = kQuarter - e;
  const double scale = static_cast<double>(kDrawRange);
  d.p_right = static_cast<double>(d.w_right) / scale;
  d.p_left = static_cast<double>(d.w_left) / scale;
  return d;
}

bool is_drift_site(const WalkParams& params, const VisitedSet& visited, std::uint32_t cookie_count_at_site,
                   const LatticePoint& position) {
  if (params.drift_variant == DriftVariant::FreshDrift) {
    return cookie_count_at_site > 0 && !visited.in_region(position);
  }
  return visited.contains(position);
}

bool is_drift_site(const WalkParams& params, const VisitedSet& visited, const LatticePoint& position) {
  const std::uint32_t visits = visited.visits(position);
  const std::uint32_t cookies = visits >= params.cookies_per_site ? 0 : params.cookies_per_site - visits;
  return is_drift_site(params, visited, cookies, position);
}

Path run_srw(const LatticePoint& start, std::uint64_t n, const RngSpec& rng, const Limits& limits) {
  check_capacity(n, sizeof(LatticePoint), limits);
  Stream stream(rng);
  Path path;
  path.reserve(n + 1);
  LatticePoint pos = start;
  path.push_back(pos);
  for (std::uint64_t t = 0; t < n; ++t) {
    pos += unit_step(uniform_direction(stream.draw()));
    path.push_back(pos);
  }
  return path;
}

ErwRun run_erw_detailed(const WalkParams& params, std::uint64_t n, const RngSpec& rng, const Limits& limits) {
  params.validate();
  check_capacity(n, sizeof(LatticePoint), limits);
  Stream stream(rng);
  const InitialRegion& region = params.initial_region;
  const bool has_region = !region.empty();
  VisitedSet visited(region, table_hint(n), /*track_rows=*/false);
  const StepDistribution drifted = step_distribution(params, true);
  const StepDistribution plain = step_distribution(params, false);

  ErwRun run;
  run.path.reserve(n + 1);
  LatticePoint pos = params.start;
  run.path.push_back(pos);
  for (std::uint64_t t = 0;; ++t) {
    const bool in_region = has_region && region.contains(pos);
    const std::uint32_t before = visited.visit(pos);
    if (before == 0 && !in_region) ++run.fresh_visits;
    if (t == n) break;
    const bool drift = drift_from_counts(params, before, in_region);
    run.drift_steps += drift ? 1 : 0;
    pos += unit_step(choose_direction(drift ? drifted : plain, stream.draw()));
    run.path.push_back(pos);
  }
  return run;
}

double activation_probability(const Epsilon& eps, CouplingRule rule) {
  return rule == CouplingRule::Maximal ? eps.value() : 2.0 * eps.value();
}

CoupledTrajectory run_coupled(const WalkParams& params, std::uint64_t n, const RngSpec& rng, const Limits& limits) {
  params.validate();
  if (params.drift_variant != DriftVariant::FreshDrift) {
    throw VariantError("run_coupled is defined for the FreshDrift variant only");
  }
  check_capacity(n, 2 * sizeof(LatticePoint) + sizeof(std::int64_t), limits);
  Stream stream(rng);
  const InitialRegion& region = params.initial_region;
  const bool has_region = !region.empty();
  VisitedSet visited(region, table_hint(n), /*track_rows=*/false);
  const StepDistribution drifted = step_distribution(params, true);
  const std::uint64_t e = params.epsilon.numerator();
  const bool maximal = params.coupling_rule == CouplingRule::Maximal;

  CoupledTrajectory traj;
  traj.rule = params.coupling_rule;
  traj.erw_path.reserve(n + 1);
  traj.srw_path.reserve(n + 1);
  traj.gap.reserve(n + 1);
  LatticePoint erw = params.start;
  LatticePoint srw = params.start;
  traj.erw_path.push_back(erw);
  traj.srw_path.push_back(srw);
  traj.gap.push_back(0);

  for (std::uint64_t t = 0; t < n; ++t) {
    const bool in_region = has_region && region.contains(erw);
    const std::uint32_t before = visited.visit(erw);
    if (before == 0 && !in_region) traj.fresh_times.push_back(t);
    const bool drift = drift_from_counts(params, before, in_region);

    bool activated = false;
    Direction shared = Direction::Right;
    if (!drift) {
      shared = uniform_direction(stream.draw());
    } else if (maximal) {
      // One draw: [0, e) splits the walks; elsewhere both follow the drifted
      // partition, under which the simple walk stays uniform.
      const std::uint64_t u = stream.draw();
      activated = u < e;
      shared = choose_direction(drifted, u);
    } else {
      activated = stream.draw() < 2 * e;
      if (!activated) shared = uniform_direction(stream.draw());
    }

    if (drift) ++traj.drift_visits;
    if (activated) {
      ++traj.activations;
      erw += unit_step(Direction::Right);
      srw += unit_step(Direction::Left);
    } else {
      const LatticePoint d = unit_step(shared);
      erw += d;
      srw += d;
    }
    traj.erw_path.push_back(erw);
    traj.srw_path.push_back(srw);
    traj.gap.push_back(erw.x - srw.x);
  }

  traj.xi.reserve(traj.fresh_times.size());
  for (std::size_t k = 0; k < traj.fresh_times.size(); ++k) {
    const std::uint64_t next = k + 1 < traj.fresh_times.size() ? traj.fresh_times[k + 1] : n;
    traj.xi.push_back(traj.gap[next] - traj.gap[traj.fresh_times[k]]);
  }
  return traj;
}

std::vector<std::uint64_t> fresh_site_times(std::span<const LatticePoint> path, const InitialRegion& region) {
  std::vector<std::uint64_t> times;
  PointTable seen(table_hint(path.size()));
  const bool has_region = !region.empty();
  for (std::size_t t = 0; t < path.size(); ++t) {
    if (has_region && region.contains(path[t])) continue;
    if (seen.increment(path[t]) == 0) times.push_back(t);
  }
  return times;
}

}  // namespace walklab
