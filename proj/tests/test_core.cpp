#include <doctest.h>

#include <array>
#include <limits>
#include <random>
#include <set>

#include "sentipipe/core.hpp"
#include "sentipipe/errors.hpp"

using namespace sentipipe;

namespace {

AuVector vec(std::initializer_list<double> head) {
  std::array<double, kAuCount> s{};
  std::size_t i = 0;
  for (double v : head) s[i++] = v;
  return AuVector(s);
}

}  // namespace

TEST_CASE("canonical_au_index follows the fixed AU order") {
  CHECK(canonical_au_index("AU1") == 0);
  CHECK(canonical_au_index("Smirk") == 19);
  CHECK(canonical_au_index("au6") == 4);
  CHECK(canonical_au_index("EYECLOSURE") == 17);
  CHECK_THROWS_AS(canonical_au_index("AU99"), UnknownAuName);
  CHECK_THROWS_AS(canonical_au_index(""), UnknownAuName);
}

TEST_CASE("canonical_au_index is a bijection onto 0..19") {
  std::set<std::size_t> seen;
  for (std::size_t i = 0; i < kAuCount; ++i) {
    const std::size_t idx = canonical_au_index(kAuNames[i]);
    CHECK(idx == i);
    seen.insert(idx);
    CHECK(au_column_index(kAuColumns[i]) == i);
  }
  CHECK(seen.size() == kAuCount);
}

TEST_CASE("active_au_count uses an inclusive threshold") {
  CHECK(active_au_count(AuVector::zeros(), 0.5) == 0);
  std::array<double, kAuCount> ones;
  ones.fill(1.0);
  CHECK(active_au_count(AuVector(ones), 0.5) == 20);
  CHECK(active_au_count(vec({0.7, 0.5, 0.49}), 0.5) == 2);
}

TEST_CASE("active_au_count is non-increasing in the threshold") {
  std::mt19937_64 gen(11);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int trial = 0; trial < 200; ++trial) {
    std::array<double, kAuCount> s{};
    for (double& x : s) x = u(gen);
    const AuVector v(s);
    int prev = kAuCount + 1;
    for (double t = 0.01; t < 1.0; t += 0.01) {
      const int c = active_au_count(v, t);
      CHECK(c <= prev);
      prev = c;
    }
  }
}

TEST_CASE("AuVector rejects out-of-range scores") {
  std::array<double, kAuCount> s{};
  s[3] = 1.3;
  CHECK_THROWS_AS(AuVector{s}, ValidationError);
  s[3] = -0.01;
  CHECK_THROWS_AS(AuVector{s}, ValidationError);
  s[3] = std::numeric_limits<double>::quiet_NaN();
  CHECK_THROWS_AS(AuVector{s}, ValidationError);
}

TEST_CASE("VideoRecord enforces frame ordering") {
  const AuFrame a{0, 0.0, AuVector::zeros()};
  const AuFrame b{1, 0.2, std::nullopt};
  CHECK_NOTHROW(VideoRecord("v", "ad", {a, b}));
  CHECK_THROWS_AS(VideoRecord("v", "ad", {}), ValidationError);
  CHECK_THROWS_AS(VideoRecord("v", "ad", {b, a}), ValidationError);
  CHECK_THROWS_AS(VideoRecord("v", "ad", {a, AuFrame{1, -0.1, std::nullopt}}), ValidationError);
  CHECK_THROWS_AS(VideoRecord("v", "ad", {AuFrame{0, 1.0, std::nullopt}, AuFrame{1, 0.5, std::nullopt}}),
                  ValidationError);
}

TEST_CASE("Interval and AdSpec invariants") {
  CHECK_THROWS_AS(Interval(5, 5), ValidationError);
  CHECK_THROWS_AS(Interval(-1, 5), ValidationError);
  CHECK(Interval(30, 45).contains(30.0));
  CHECK_FALSE(Interval(30, 45).contains(45.0));

  CHECK_NOTHROW(AdSpec("a", AdLabel::Sentimental, 60, {Interval(30, 45)}));
  CHECK_THROWS_AS(AdSpec("a", AdLabel::Sentimental, 60, {}), ValidationError);
  CHECK_THROWS_AS(AdSpec("a", AdLabel::NonSentimental, 60, {Interval(1, 2)}), ValidationError);
  CHECK_THROWS_AS(AdSpec("a", AdLabel::Sentimental, 60, {Interval(10, 20), Interval(15, 25)}), ValidationError);
  CHECK_THROWS_AS(AdSpec("a", AdLabel::Sentimental, 60, {Interval(50, 61)}), ValidationError);
  CHECK_THROWS_AS(AdSpec("a", AdLabel::NonSentimental, 0, {}), ValidationError);
  // Touching moments are disjoint under half-open membership.
  CHECK_NOTHROW(AdSpec("a", AdLabel::Sentimental, 60, {Interval(10, 20), Interval(20, 25)}));
}

TEST_CASE("bin_count covers [0, duration)") {
  CHECK(bin_count(60.0, 0.5) == 120);
  CHECK(bin_count(60.1, 0.5) == 121);
  CHECK(bin_count(0.3, 0.5) == 1);
  CHECK(bin_count(1.0, 0.1) == 10);
  CHECK(bin_count(0.7, 0.1) == 7);
}

TEST_CASE("AggregateCurve validates its time axis") {
  std::vector<CurvePoint> good = {{0.0, 0.1, 1}, {0.5, 0.2, 1}};
  CHECK_NOTHROW(AggregateCurve("a", 0.5, 1.0, good));
  CHECK_THROWS_AS(AggregateCurve("a", 0.5, 1.5, good), ValidationError);
  std::vector<CurvePoint> shifted = {{0.0, 0.1, 1}, {0.6, 0.2, 1}};
  CHECK_THROWS_AS(AggregateCurve("a", 0.5, 1.0, shifted), ValidationError);
  std::vector<CurvePoint> big = {{0.0, 1.1, 1}, {0.5, 0.2, 1}};
  CHECK_THROWS_AS(AggregateCurve("a", 0.5, 1.0, big), ValidationError);
}
