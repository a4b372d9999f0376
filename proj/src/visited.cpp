#include "walklab/visited.hpp"

#include <algorithm>
#include <bit>
#include <utility>

#include "walklab/errors.hpp"

namespace walklab {

PointTable::PointTable(std::size_t expected) {
  const std::size_t cap = std::bit_ceil(std::max<std::size_t>(16, expected * 2));
  keys_.assign(cap, 0);
  counts_.assign(cap, 0);
  mask_ = cap - 1;
}

std::size_t PointTable::probe(std::uint64_t key) const {
  std::size_t slot = static_cast<std::size_t>(mix64(key)) & mask_;
  while (counts_[slot] != 0 && keys_[slot] != key) slot = (slot + 1) & mask_;
  return slot;
}

std::uint32_t PointTable::count(const LatticePoint& p) const {
  if (!packable(p)) return 0;
  return counts_[probe(pack(p))];
}

std::uint32_t PointTable::increment(const LatticePoint& p) {
  if (!packable(p)) throw CapacityError("lattice point outside the 32-bit packed range");
  const std::uint64_t key = pack(p);
  std::size_t slot = probe(key);
  const std::uint32_t before = counts_[slot];
  if (before == 0) {
    if (2 * (size_ + 1) > keys_.size()) {
      grow();
      slot = probe(key);
    }
    keys_[slot] = key;
    counts_[slot] = 1;
    ++size_;
    return 0;
  }
  if (before != UINT32_MAX) counts_[slot] = before + 1;
  return before;
}

void PointTable::grow() {
  std::vector<std::uint64_t> old_keys(keys_.size() * 2, 0);
  std::vector<std::uint32_t> old_counts(counts_.size() * 2, 0);
  old_keys.swap(keys_);
  old_counts.swap(counts_);
  mask_ = keys_.size() - 1;
  for (std::size_t i = 0; i < old_keys.size(); ++i) {
    if (old_counts[i] == 0) continue;
    const std::size_t slot = probe(old_keys[i]);
    keys_[slot] = old_keys[i];
    counts_[slot] = old_counts[i];
  }
}

void RowMaxIndex::insert(const LatticePoint& p) {
  ++updates_;
  if (slots_.empty()) {
    slots_.assign(1, p.x);
    lo_ = p.y;
    rows_ = 1;
    return;
  }
  const auto size = static_cast<std::int64_t>(slots_.size());
  std::int64_t off = p.y - lo_;
  if (off < 0) {
    const auto extra = static_cast<std::size_t>(std::max<std::int64_t>(-off, size));
    slots_.insert(slots_.begin(), extra, kAbsent);
    lo_ -= static_cast<std::int64_t>(extra);
    off = p.y - lo_;
  } else if (off >= size) {
    slots_.resize(static_cast<std::size_t>(std::max<std::int64_t>(off + 1, 2 * size)), kAbsent);
  }
  auto& slot = slots_[static_cast<std::size_t>(off)];
  if (slot == kAbsent) {
    ++rows_;
    slot = p.x;
  } else if (p.x > slot) {
    slot = p.x;
  }
}

std::optional<std::int64_t> RowMaxIndex::row_max(std::int64_t y) const {
  const std::int64_t off = y - lo_;
  if (off < 0 || off >= static_cast<std::int64_t>(slots_.size())) return std::nullopt;
  const std::int64_t v = slots_[static_cast<std::size_t>(off)];
  if (v == kAbsent) return std::nullopt;
  return v;
}

void RowMaxIndex::clear() {
  slots_.clear();
  lo_ = 0;
  rows_ = 0;
}

VisitedSet::VisitedSet(InitialRegion region, std::size_t expected, bool track_rows)
    : region_(std::move(region)), points_(expected), track_rows_(track_rows) {}

std::uint32_t VisitedSet::visit(const LatticePoint& p) {
  const std::uint32_t before = points_.increment(p);
  if (track_rows_ && before == 0) rows_.insert(p);
  return before;
}

}  // namespace walklab
