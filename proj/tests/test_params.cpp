#include <doctest.h>

#include <cmath>

#include "walklab/errors.hpp"
#include "walklab/params.hpp"

using namespace walklab;

TEST_CASE("epsilon parses decimals onto the 2^-40 grid") {
  CHECK(Epsilon::parse("0").numerator() == 0);
  CHECK(Epsilon::parse("0.0").numerator() == 0);
  // 0.125 = 2^-3 is exact.
  CHECK(Epsilon::parse("0.125").numerator() == (std::uint64_t{1} << 37));
  CHECK(Epsilon::parse(".125").numerator() == (std::uint64_t{1} << 37));
  CHECK(Epsilon::parse("1.25e-1").numerator() == (std::uint64_t{1} << 37));
  CHECK(Epsilon::parse("125e-3").numerator() == (std::uint64_t{1} << 37));
  // 0.1 * 2^40 = 109951162777.6 rounds up.
  CHECK(Epsilon::parse("0.1").numerator() == 109951162778ULL);
  CHECK(Epsilon::parse("0.1").to_string() == "0.1");
  CHECK(std::fabs(Epsilon::parse("0.05").value() - 0.05) < 1e-12);
}

TEST_CASE("epsilon rounding ties go to even") {
  // 2^-41 is exactly half a grid step: rounds to 0; 3 * 2^-41 rounds to 2 * 2^-40.
  CHECK(Epsilon::parse("4.5474735088646411895751953125e-13").numerator() == 0);
  CHECK(Epsilon::parse("1.36424205265939235687255859375e-12").numerator() == 2);
}

TEST_CASE("epsilon parsing stays exact for long inputs") {
  const std::string zeros(60, '0');
  const std::string half_step = "4.5474735088646411895751953125";
  CHECK(Epsilon::parse(half_step + zeros + "e-13").numerator() == 0);
  CHECK(Epsilon::parse(half_step + zeros + "1e-13").numerator() == 1);
  CHECK(Epsilon::parse("0." + zeros + "1e60").numerator() == 109951162778ULL);
  CHECK(Epsilon::parse("0.0999999999999999999999999999999999999999999").numerator() == 109951162778ULL);
}

TEST_CASE("epsilon outside [0, 1/4) is rejected") {
  CHECK_THROWS_AS(Epsilon::parse("0.25"), ParamError);
  CHECK_THROWS_AS(Epsilon::parse("0.3"), ParamError);
  CHECK_THROWS_AS(Epsilon::parse("1"), ParamError);
  CHECK_THROWS_AS(Epsilon::parse("-0.1"), ParamError);
  CHECK_THROWS_AS(Epsilon::parse("abc"), ParamError);
  CHECK_THROWS_AS(Epsilon::parse("0.1x"), ParamError);
  CHECK_THROWS_AS(Epsilon::parse(""), ParamError);
  // Just below 1/4 but rounding onto it.
  CHECK_THROWS_AS(Epsilon::parse("0.24999999999999999999"), ParamError);
  CHECK_NOTHROW(Epsilon::parse("0.2499"));
  CHECK(Epsilon::parse("1e-60").numerator() == 0);
}

TEST_CASE("walk params validation") {
  CHECK_NOTHROW(make_params("0.1"));
  CHECK_THROWS_AS(make_params("0.1", DriftVariant::FreshDrift, 0), ParamError);
  WalkParams p = make_params("0.2");
  p.start = {std::int64_t{1} << 40, 0};
  CHECK_THROWS_AS(p.validate(), ParamError);
}

TEST_CASE("initial region membership") {
  InitialRegion r;
  CHECK(r.empty());
  CHECK_FALSE(r.contains({0, 0}));
  r.half_plane_threshold = -3;
  CHECK(r.contains({-3, 100}));
  CHECK(r.contains({-10, -7}));
  CHECK_FALSE(r.contains({-2, 0}));
  r.extra_points.insert({5, 5});
  CHECK(r.contains({5, 5}));
  CHECK_FALSE(r.contains({5, 6}));
}

TEST_CASE("variant names round-trip") {
  CHECK(parse_drift_variant(to_string(DriftVariant::FreshDrift)) == DriftVariant::FreshDrift);
  CHECK(parse_drift_variant(to_string(DriftVariant::PaperLiteral)) == DriftVariant::PaperLiteral);
  CHECK(parse_coupling_rule(to_string(CouplingRule::Maximal)) == CouplingRule::Maximal);
  CHECK(parse_coupling_rule(to_string(CouplingRule::Stated)) == CouplingRule::Stated);
  CHECK_THROWS_AS(parse_drift_variant("other"), ParamError);
}
