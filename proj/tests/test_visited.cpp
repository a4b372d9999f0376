#include <doctest.h>

#include <map>
#include <random>
#include <unordered_map>

#include "walklab/errors.hpp"
#include "walklab/visited.hpp"

using namespace walklab;

TEST_CASE("pack round-trips signed coordinates") {
  std::mt19937_64 gen(7);
  std::uniform_int_distribution<std::int64_t> coord(-(std::int64_t{1} << 31) + 1, (std::int64_t{1} << 31) - 1);
  for (int t = 0; t < 10000; ++t) {
    const LatticePoint p{coord(gen), coord(gen)};
    CHECK(packable(p));
    CHECK(unpack(pack(p)) == p);
  }
  CHECK_FALSE(packable({std::int64_t{1} << 31, 0}));
}

TEST_CASE("point table agrees with std::unordered_map through growth") {
  PointTable table(4);
  std::unordered_map<LatticePoint, std::uint32_t, LatticePointHash> oracle;
  std::mt19937_64 gen(11);
  std::uniform_int_distribution<int> coord(-60, 60);
  for (int t = 0; t < 50000; ++t) {
    const LatticePoint p{coord(gen), coord(gen)};
    const std::uint32_t before = table.increment(p);
    CHECK(before == oracle[p]);
    ++oracle[p];
  }
  CHECK(table.size() == oracle.size());
  CHECK(table.capacity() >= 2 * table.size());
  for (int x = -61; x <= 61; ++x) {
    for (int y = -61; y <= 61; ++y) {
      const auto it = oracle.find({x, y});
      CHECK(table.count({x, y}) == (it == oracle.end() ? 0u : it->second));
    }
  }
}

TEST_CASE("point table rejects unpackable points") {
  PointTable table;
  CHECK_THROWS_AS(table.increment({std::int64_t{1} << 33, 0}), CapacityError);
  CHECK(table.count({std::int64_t{1} << 33, 0}) == 0);
}

TEST_CASE("row max index matches a brute-force row map") {
  RowMaxIndex index;
  std::map<std::int64_t, std::int64_t> oracle;
  std::mt19937_64 gen(3);
  std::uniform_int_distribution<int> coord(-40, 40);
  for (int t = 0; t < 2000; ++t) {
    const LatticePoint p{coord(gen), coord(gen)};
    index.insert(p);
    auto [it, fresh] = oracle.emplace(p.y, p.x);
    if (!fresh) it->second = std::max(it->second, p.x);
  }
  CHECK(index.occupied_rows() == oracle.size());
  for (int y = -45; y <= 45; ++y) {
    const auto it = oracle.find(y);
    const auto got = index.row_max(y);
    if (it == oracle.end()) {
      CHECK_FALSE(got.has_value());
      CHECK_FALSE(index.blocks({-1000, y}));
    } else {
      REQUIRE(got.has_value());
      CHECK(*got == it->second);
      CHECK(index.blocks({it->second, y}));
      CHECK_FALSE(index.blocks({it->second + 1, y}));
    }
  }
  index.clear();
  CHECK(index.empty());
  CHECK_FALSE(index.row_max(0).has_value());
}

TEST_CASE("row max index with sparse rows reports gaps as absent") {
  RowMaxIndex index;
  index.insert({5, 0});
  index.insert({-2, 10});
  index.insert({7, -10});
  CHECK(index.occupied_rows() == 3);
  CHECK(index.row_max(0) == 5);
  CHECK(index.row_max(10) == -2);
  CHECK(index.row_max(-10) == 7);
  CHECK_FALSE(index.row_max(3).has_value());
  CHECK_FALSE(index.row_max(-5).has_value());
}

TEST_CASE("visited set combines the region with explicit visits") {
  InitialRegion region;
  region.half_plane_threshold = -2;
  region.extra_points.insert({4, 4});
  VisitedSet v(region);
  CHECK(v.contains({-2, 9}));
  CHECK(v.contains({4, 4}));
  CHECK_FALSE(v.contains({0, 0}));
  CHECK(v.visit({0, 0}) == 0);
  CHECK(v.visit({0, 0}) == 1);
  CHECK(v.visit({3, 0}) == 0);
  CHECK(v.contains({0, 0}));
  CHECK(v.visits({0, 0}) == 2);
  CHECK(v.row_max(0) == 3);
  // Region points do not enter the row index.
  CHECK_FALSE(v.row_max(4).has_value());
  CHECK(v.distinct_points() == 2);
}
