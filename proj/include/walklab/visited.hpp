#pragma once

#include <cstddef>
#include <cstdint>
#include <limits>
#include <optional>
#include <vector>

#include "walklab/lattice.hpp"
#include "walklab/params.hpp"

namespace walklab {

/// Open-addressing hash map from a packed lattice point to a visit count.
/// Linear probing, power-of-two capacity, load factor <= 1/2. A zero count
/// marks an empty slot, so stored counts are always >= 1.
class PointTable {
 public:
  explicit PointTable(std::size_t expected = 16);

  /// Visits recorded for p (0 if never seen).
  std::uint32_t count(const LatticePoint& p) const;
  bool contains(const LatticePoint& p) const { return count(p) != 0; }

  /// Increments p's count (saturating) and returns the count before the call.
  std::uint32_t increment(const LatticePoint& p);

  std::size_t size() const { return size_; }
  std::size_t capacity() const { return keys_.size(); }

 private:
  std::size_t probe(std::uint64_t key) const;
  void grow();

  std::vector<std::uint64_t> keys_;
  std::vector<std::uint32_t> counts_;
  std::size_t size_ = 0;
  std::size_t mask_ = 0;
};

/// For every row y, the largest x among the points inserted so far.
///
/// Rows are stored densely over the span of rows seen so far; a nearest
/// neighbour path occupies a contiguous band of rows, so this is proportional
/// to the number of occupied rows. Rows never inserted report no maximum.
class RowMaxIndex {
 public:
  void insert(const LatticePoint& p);
  std::optional<std::int64_t> row_max(std::int64_t y) const;

  /// True if some inserted point lies on the half line {p + (t, 0) : t >= 0}.
  bool blocks(const LatticePoint& p) const {
    ++queries_;
    const std::int64_t off = p.y - lo_;
    if (off < 0 || off >= static_cast<std::int64_t>(slots_.size())) return false;
    return slots_[static_cast<std::size_t>(off)] >= p.x;
  }

  void clear();
  bool empty() const { return rows_ == 0; }
  std::size_t occupied_rows() const { return rows_; }

  std::uint64_t update_count() const { return updates_; }
  std::uint64_t query_count() const { return queries_; }

 private:
  static constexpr std::int64_t kAbsent = std::numeric_limits<std::int64_t>::min();

  std::vector<std::int64_t> slots_;
  std::int64_t lo_ = 0;
  std::size_t rows_ = 0;
  std::uint64_t updates_ = 0;
  mutable std::uint64_t queries_ = 0;
};

/// Occupied vertices of an excited walk: the pre-visited region plus every
/// point of the path so far, with per-site visit counts and a per-row max.
class VisitedSet {
 public:
  explicit VisitedSet(InitialRegion region, std::size_t expected = 16, bool track_rows = true);

  bool contains(const LatticePoint& p) const { return region_.contains(p) || points_.contains(p); }
  bool in_region(const LatticePoint& p) const { return region_.contains(p); }
  std::uint32_t visits(const LatticePoint& p) const { return points_.count(p); }

  /// Records a visit to p and returns the number of earlier visits.
  std::uint32_t visit(const LatticePoint& p);

  /// Row maximum over explicitly visited points (region excluded).
  std::optional<std::int64_t> row_max(std::int64_t y) const { return rows_.row_max(y); }
  const RowMaxIndex& rows() const { return rows_; }
  std::size_t distinct_points() const { return points_.size(); }
  const InitialRegion& region() const { return region_; }

 private:
  InitialRegion region_;
  PointTable points_;
  RowMaxIndex rows_;
  bool track_rows_;
};

}  // namespace walklab
