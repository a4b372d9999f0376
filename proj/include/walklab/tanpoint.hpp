#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "walklab/lattice.hpp"
#include "walklab/visited.hpp"

namespace walklab {

/// Index ranges of a windowed tan-point query: candidate times j in
/// [j_lo, j_hi], reference time i, window width m.
struct WindowSpec {
  std::uint64_t i = 0;
  std::uint64_t j_lo = 0;
  std::uint64_t j_hi = 0;
  std::uint64_t m = 1;
};

/// "The walk has a tan point at `time` relative to `relative_to`."
struct TanPointRecord {
  std::uint64_t time = 0;
  LatticePoint point;
  std::uint64_t relative_to = 0;
};

/// Direct definition: no point of path[i..j-1] lies on the half line
/// {path[j] + (t, 0) : t = 0, 1, 2, ...}. Throws RangeError unless
/// i < j < path.size().
bool is_tan_point_brute(std::span<const LatticePoint> path, std::uint64_t i, std::uint64_t j);

/// O(1) form: `index` holds exactly the points that may block p.
inline bool is_tan_point_indexed(const RowMaxIndex& index, const LatticePoint& p) { return !index.blocks(p); }

struct TanCount {
  /// indicator[k] is 1 when j_lo + k is a tan point relative to i.
  std::vector<std::uint8_t> indicator;
  std::uint64_t total = 0;
  std::uint64_t index_updates = 0;
  std::uint64_t index_queries = 0;
};

/// Tan points relative to i over j in [j_lo, j_hi]; one pass that advances a
/// row-max index over path[i..j-1]. Requires i < j_lo <= j_hi < path.size().
TanCount count_tan_points(std::span<const LatticePoint> path, std::uint64_t i, std::uint64_t j_lo,
                          std::uint64_t j_hi);

/// Tan points relative to i at every j in (i, path.size()).
inline TanCount count_tan_points(std::span<const LatticePoint> path, std::uint64_t i = 0) {
  if (path.size() <= i + 1) return {};
  return count_tan_points(path, i, i + 1, path.size() - 1);
}

std::vector<TanPointRecord> list_tan_points(std::span<const LatticePoint> path, const WindowSpec& window);

struct WindowCount {
  std::uint64_t j_star = 0;
  std::uint64_t count = 0;
};

/// Over admissible j in [i + m, i + horizon - m], the window [j, j + m]
/// holding the most tan points relative to i; the earliest maximizer wins.
/// Throws RangeError if i + horizon exceeds the path's step count, if m == 0,
/// or if horizon < 2m leaves no admissible j.
WindowCount best_window_tan_count(std::span<const LatticePoint> path, std::uint64_t i, std::uint64_t m,
                                  std::uint64_t horizon);

}  // namespace walklab
