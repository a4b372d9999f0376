#pragma once

#include <compare>
#include <cstdint>
#include <functional>
#include <ostream>

namespace walklab {

/// A vertex of Z^2. Coordinates are 64-bit so that a walk of up to 2^31
/// steps started anywhere in the packed range cannot overflow.
struct LatticePoint {
  std::int64_t x = 0;
  std::int64_t y = 0;

  friend constexpr bool operator==(const LatticePoint&, const LatticePoint&) = default;
  friend constexpr auto operator<=>(const LatticePoint&, const LatticePoint&) = default;

  constexpr LatticePoint& operator+=(const LatticePoint& o) {
    x += o.x;
    y += o.y;
    return *this;
  }
  friend constexpr LatticePoint operator+(LatticePoint a, const LatticePoint& b) { return a += b; }
  friend constexpr LatticePoint operator-(const LatticePoint& a, const LatticePoint& b) {
    return {a.x - b.x, a.y - b.y};
  }
};

inline std::ostream& operator<<(std::ostream& os, const LatticePoint& p) {
  return os << '(' << p.x << ',' << p.y << ')';
}

/// The four unit moves, in the fixed order used to partition a uniform draw.
enum class Direction : std::uint8_t { Right = 0, Left = 1, Up = 2, Down = 3 };

constexpr LatticePoint unit_step(Direction d) {
  switch (d) {
    case Direction::Right: return {1, 0};
    case Direction::Left: return {-1, 0};
    case Direction::Up: return {0, 1};
    case Direction::Down: return {0, -1};
  }
  return {0, 0};
}

/// True when both coordinates fit the 32-bit packed representation.
constexpr bool packable(const LatticePoint& p) {
  constexpr std::int64_t lim = std::int64_t{1} << 31;
  return p.x > -lim && p.x < lim && p.y > -lim && p.y < lim;
}

/// Packs a point into one 64-bit key (x in the high word, y in the low word).
/// Requires packable(p).
constexpr std::uint64_t pack(const LatticePoint& p) {
  return (static_cast<std::uint64_t>(static_cast<std::uint32_t>(p.x)) << 32) |
         static_cast<std::uint64_t>(static_cast<std::uint32_t>(p.y));
}

constexpr LatticePoint unpack(std::uint64_t key) {
  return {static_cast<std::int32_t>(static_cast<std::uint32_t>(key >> 32)),
          static_cast<std::int32_t>(static_cast<std::uint32_t>(key))};
}

/// Stafford's mix13 finalizer (the SplitMix64 output function). A bijection
/// on 64-bit words.
constexpr std::uint64_t mix64(std::uint64_t z) {
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

struct LatticePointHash {
  std::size_t operator()(const LatticePoint& p) const noexcept {
    return static_cast<std::size_t>(mix64(static_cast<std::uint64_t>(p.x) * 0x9e3779b97f4a7c15ULL ^
                                          static_cast<std::uint64_t>(p.y)));
  }
};

}  // namespace walklab
