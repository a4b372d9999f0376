#include "walklab/params.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <vector>

#include "walklab/errors.hpp"

namespace walklab {

namespace {

[[noreturn]] void bad_epsilon(std::string_view text, const char* why) {
  throw ParamError("epsilon '" + std::string(text) + "': " + why);
}

}  // namespace

Epsilon Epsilon::parse(std::string_view text) {
  std::size_t i = 0;
  const std::size_t n = text.size();
  if (i < n && text[i] == '+') ++i;
  if (i < n && text[i] == '-') bad_epsilon(text, "must be non-negative");

  // value = 0.digits * 10^point, digits without leading zeros.
  std::vector<std::uint8_t> digits;
  long point = 0;
  bool any_digit = false;
  bool seen_point = false;
  for (; i < n; ++i) {
    const char c = text[i];
    if (c == '.') {
      if (seen_point) bad_epsilon(text, "malformed number");
      seen_point = true;
      continue;
    }
    if (!std::isdigit(static_cast<unsigned char>(c))) break;
    any_digit = true;
    if (digits.empty() && c == '0') {
      if (seen_point) --point;
      continue;
    }
    digits.push_back(static_cast<std::uint8_t>(c - '0'));
    if (!seen_point) ++point;
  }
  if (!any_digit) bad_epsilon(text, "malformed number");
  if (i < n && (text[i] == 'e' || text[i] == 'E')) {
    ++i;
    long sign = 1;
    if (i < n && (text[i] == '+' || text[i] == '-')) sign = text[i++] == '-' ? -1 : 1;
    long e = 0;
    bool any = false;
    for (; i < n && std::isdigit(static_cast<unsigned char>(text[i])); ++i) {
      any = true;
      if (e < 100000) e = e * 10 + (text[i] - '0');
    }
    if (!any) bad_epsilon(text, "malformed exponent");
    point += sign * e;
  }
  if (i != n) bad_epsilon(text, "trailing characters");
  while (!digits.empty() && digits.back() == 0) digits.pop_back();

  std::uint64_t num = 0;
  if (!digits.empty()) {
    if (point > 0) bad_epsilon(text, "must be < 1/4");
    // Below 10^-13 < 2^-41 the value rounds to zero; skip the arithmetic.
    if (point >= -13) {
      // Fraction digits of the value, doubled kEpsilonBits times; the carries
      // out of the first digit form floor(value * 2^40).
      std::vector<std::uint8_t> frac(static_cast<std::size_t>(-point), 0);
      frac.insert(frac.end(), digits.begin(), digits.end());
      std::uint64_t q = 0;
      for (int b = 0; b < kEpsilonBits; ++b) {
        int carry = 0;
        for (auto it = frac.rbegin(); it != frac.rend(); ++it) {
          const int d = *it * 2 + carry;
          *it = static_cast<std::uint8_t>(d % 10);
          carry = d / 10;
        }
        q = q * 2 + static_cast<std::uint64_t>(carry);
      }
      // Compare the remaining fraction with 1/2; ties go to even.
      const bool rest_nonzero = std::any_of(frac.begin() + 1, frac.end(), [](std::uint8_t d) { return d != 0; });
      const bool above = frac[0] > 5 || (frac[0] == 5 && rest_nonzero);
      const bool tie = frac[0] == 5 && !rest_nonzero;
      if (above || (tie && (q & 1) != 0)) ++q;
      if (q >= kQuarter) bad_epsilon(text, "must be < 1/4");
      num = q;
    }
  }
  Epsilon eps(num);
  eps.text_ = std::string(text);
  return eps;
}

Epsilon Epsilon::from_double(double value) {
  if (!(value >= 0.0)) throw ParamError("epsilon must be non-negative");
  const double scaled = std::nearbyint(value * static_cast<double>(kDrawRange));
  if (scaled >= static_cast<double>(kQuarter)) throw ParamError("epsilon must be < 1/4");
  return Epsilon(static_cast<std::uint64_t>(scaled));
}

Epsilon Epsilon::from_numerator(std::uint64_t numerator) {
  if (numerator >= kQuarter) throw ParamError("epsilon must be < 1/4");
  return Epsilon(numerator);
}

std::string Epsilon::to_string() const {
  if (!text_.empty()) return text_;
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", value());
  return buf;
}

std::string_view to_string(DriftVariant v) {
  return v == DriftVariant::FreshDrift ? "fresh" : "literal";
}

std::string_view to_string(CouplingRule r) {
  return r == CouplingRule::Maximal ? "maximal" : "stated";
}

DriftVariant parse_drift_variant(std::string_view text) {
  if (text == "fresh" || text == "FreshDrift") return DriftVariant::FreshDrift;
  if (text == "literal" || text == "PaperLiteral") return DriftVariant::PaperLiteral;
  throw ParamError("unknown drift variant '" + std::string(text) + "' (expected fresh or literal)");
}

CouplingRule parse_coupling_rule(std::string_view text) {
  if (text == "maximal") return CouplingRule::Maximal;
  if (text == "stated") return CouplingRule::Stated;
  throw ParamError("unknown coupling rule '" + std::string(text) + "' (expected maximal or stated)");
}

void WalkParams::validate() const {
  if (epsilon.numerator() >= kQuarter) throw ParamError("epsilon must be < 1/4");
  if (cookies_per_site == 0) throw ParamError("cookies_per_site must be >= 1");
  if (!packable(start)) throw ParamError("start point outside the packed coordinate range");
}

WalkParams make_params(std::string_view epsilon, DriftVariant variant, std::uint32_t cookies_per_site) {
  WalkParams p;
  p.epsilon = Epsilon::parse(epsilon);
  p.drift_variant = variant;
  p.cookies_per_site = cookies_per_site;
  p.validate();
  return p;
}

}  // namespace walklab
