#include "walklab/tanpoint.hpp"

#include <string>

#include "walklab/errors.hpp"

namespace walklab {

bool is_tan_point_brute(std::span<const LatticePoint> path, std::uint64_t i, std::uint64_t j) {
  if (!(i < j && j < path.size())) {
    throw RangeError("tan point query needs i < j < path length (i=" + std::to_string(i) +
                     ", j=" + std::to_string(j) + ", length=" + std::to_string(path.size()) + ")");
  }
  const LatticePoint p = path[j];
  for (std::uint64_t k = i; k < j; ++k) {
    if (path[k].y == p.y && path[k].x >= p.x) return false;
  }
  return true;
}

TanCount count_tan_points(std::span<const LatticePoint> path, std::uint64_t i, std::uint64_t j_lo,
                          std::uint64_t j_hi) {
  if (!(i < j_lo && j_lo <= j_hi && j_hi < path.size())) {
    throw RangeError("tan point range needs i < j_lo <= j_hi < path length");
  }
  RowMaxIndex index;
  for (std::uint64_t k = i; k < j_lo; ++k) index.insert(path[k]);
  TanCount out;
  out.indicator.resize(j_hi - j_lo + 1);
  for (std::uint64_t j = j_lo; j <= j_hi; ++j) {
    const bool tan = is_tan_point_indexed(index, path[j]);
    out.indicator[j - j_lo] = tan ? 1 : 0;
    out.total += tan ? 1 : 0;
    if (j < j_hi) index.insert(path[j]);
  }
  out.index_updates = index.update_count();
  out.index_queries = index.query_count();
  return out;
}

std::vector<TanPointRecord> list_tan_points(std::span<const LatticePoint> path, const WindowSpec& window) {
  const TanCount c = count_tan_points(path, window.i, window.j_lo, window.j_hi);
  std::vector<TanPointRecord> out;
  out.reserve(c.total);
  for (std::uint64_t k = 0; k < c.indicator.size(); ++k) {
    if (c.indicator[k]) out.push_back({window.j_lo + k, path[window.j_lo + k], window.i});
  }
  return out;
}

WindowCount best_window_tan_count(std::span<const LatticePoint> path, std::uint64_t i, std::uint64_t m,
                                  std::uint64_t horizon) {
  const std::uint64_t steps = path.empty() ? 0 : path.size() - 1;
  if (m == 0) throw RangeError("window width m must be >= 1");
  if (i > steps || horizon > steps - i) {
    throw RangeError("horizon " + std::to_string(horizon) + " from i=" + std::to_string(i) +
                     " exceeds the path's " + std::to_string(steps) + " steps");
  }
  if (horizon < 2 * m) throw RangeError("horizon shorter than 2m leaves no admissible window");

  const TanCount c = count_tan_points(path, i, i + 1, i + horizon);
  // prefix[t] = number of tan points at times i+1 .. i+t
  std::vector<std::uint64_t> prefix(horizon + 1, 0);
  for (std::uint64_t t = 1; t <= horizon; ++t) prefix[t] = prefix[t - 1] + c.indicator[t - 1];

  WindowCount best{i + m, 0};
  bool first = true;
  for (std::uint64_t off = m; off + m <= horizon; ++off) {
    const std::uint64_t count = prefix[off + m] - prefix[off - 1];
    if (first || count > best.count) {
      best = {i + off, count};
      first = false;
    }
  }
  return best;
}

}  // namespace walklab
