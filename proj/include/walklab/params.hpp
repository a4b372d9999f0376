#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_set>

#include "walklab/lattice.hpp"

namespace walklab {

/// Number of fractional bits of the dyadic representation of epsilon. Every
/// step probability is a multiple of 2^-kEpsilonBits, so a single uniform
/// kEpsilonBits-bit draw partitions exactly.
inline constexpr int kEpsilonBits = 40;
inline constexpr std::uint64_t kDrawRange = std::uint64_t{1} << kEpsilonBits;
inline constexpr std::uint64_t kQuarter = kDrawRange / 4;

/// Drift strength epsilon in [0, 1/4), stored as numerator / 2^40.
class Epsilon {
 public:
  Epsilon() = default;

  /// Parses a non-negative decimal string ("0.1", "0.05", "1e-3", ".2") and
  /// rounds it once to the nearest multiple of 2^-40 (ties to even).
  static Epsilon parse(std::string_view text);
  static Epsilon from_double(double value);
  static Epsilon from_numerator(std::uint64_t numerator);

  std::uint64_t numerator() const { return num_; }
  double value() const { return static_cast<double>(num_) / static_cast<double>(kDrawRange); }

  /// The original text when parsed from a string, else the shortest decimal
  /// that round-trips value().
  std::string to_string() const;

  friend bool operator==(const Epsilon& a, const Epsilon& b) { return a.num_ == b.num_; }

 private:
  explicit Epsilon(std::uint64_t num) : num_(num) {}
  std::uint64_t num_ = 0;
  std::string text_;
};

/// Which sites trigger the drifted step distribution.
enum class DriftVariant {
  FreshDrift,    ///< sites still holding a cookie (never visited, not pre-visited)
  PaperLiteral,  ///< sites in the past path or the pre-visited set
};

/// How run_coupled pairs the excited walk with the simple walk.
enum class CouplingRule {
  Maximal,  ///< activation probability eps; both marginals exact
  Stated,   ///< activation probability 2*eps, then a shared uniform step
};

std::string_view to_string(DriftVariant v);
std::string_view to_string(CouplingRule r);
DriftVariant parse_drift_variant(std::string_view text);
CouplingRule parse_coupling_rule(std::string_view text);

/// Pre-visited vertices: an optional closed left half-plane plus a finite set.
struct InitialRegion {
  std::optional<std::int64_t> half_plane_threshold;
  std::unordered_set<LatticePoint, LatticePointHash> extra_points;

  bool contains(const LatticePoint& p) const {
    if (half_plane_threshold && p.x <= *half_plane_threshold) return true;
    return !extra_points.empty() && extra_points.contains(p);
  }
  bool empty() const { return !half_plane_threshold && extra_points.empty(); }
};

struct WalkParams {
  Epsilon epsilon;
  DriftVariant drift_variant = DriftVariant::FreshDrift;
  CouplingRule coupling_rule = CouplingRule::Maximal;
  std::uint32_t cookies_per_site = 1;
  InitialRegion initial_region;
  LatticePoint start;

  /// Throws ParamError if epsilon >= 1/4 or cookies_per_site == 0.
  void validate() const;
};

/// Builds validated parameters; the common case for experiments and tests.
WalkParams make_params(std::string_view epsilon, DriftVariant variant = DriftVariant::FreshDrift,
                       std::uint32_t cookies_per_site = 1);

/// Probabilities of the four moves (right, left, up, down).
struct StepDistribution {
  double p_right = 0.25;
  double p_left = 0.25;
  double p_up = 0.25;
  double p_down = 0.25;

  // Exact integer weights out of kDrawRange; the doubles above are these
  // divided by 2^40 and therefore exact.
  std::uint64_t w_right = kQuarter;
  std::uint64_t w_left = kQuarter;
  std::uint64_t w_up = kQuarter;
  std::uint64_t w_down = kQuarter;
};

}  // namespace walklab
