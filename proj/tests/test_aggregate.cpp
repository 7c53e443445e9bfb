#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <random>

#include "oracles.hpp"
#include "sentipipe/aggregate.hpp"
#include "sentipipe/errors.hpp"

using namespace sentipipe;

namespace {

AdSpec plain_ad(double duration) { return AdSpec("ad", AdLabel::NonSentimental, duration, {}); }

ScoreSeries constant_series(double value, double duration, double fps) {
  ScoreSeries s;
  for (int i = 0; i / fps < duration; ++i) s.push_back({i / fps, value});
  return s;
}

std::vector<oracle::Sample> to_samples(const ScoreSeries& s) {
  std::vector<oracle::Sample> out;
  for (const auto& x : s) out.push_back({x.timestamp_s, x.score});
  return out;
}

AggregateCurve curve_of(std::vector<double> values, double step = 0.5) {
  std::vector<CurvePoint> pts;
  for (std::size_t k = 0; k < values.size(); ++k) pts.push_back({k * step, values[k], 1});
  return AggregateCurve("c", step, values.size() * step, pts);
}

}  // namespace

TEST_CASE("constant predictions give a constant curve") {
  const std::vector<ScoreSeries> preds(3, constant_series(0.8, 10.0, 5.0));
  const AggregateCurve c = aggregate_ad(preds, plain_ad(10.0));
  REQUIRE(c.values().size() == 20);
  for (const auto& p : c.values()) {
    CHECK(p.mean_score == doctest::Approx(0.8).epsilon(1e-15));
    CHECK(p.participant_count == 3);
  }
}

TEST_CASE("two participants are averaged per bin") {
  const std::vector<ScoreSeries> preds = {constant_series(0.2, 5.0, 5.0), constant_series(0.6, 5.0, 5.0)};
  const AggregateCurve c = aggregate_ad(preds, plain_ad(5.0));
  for (const auto& p : c.values()) CHECK(p.mean_score == doctest::Approx(0.4).epsilon(1e-15));
}

TEST_CASE("participants are weighted equally regardless of frame count") {
  // One participant has 3 frames in bin 0, the other has 1.
  const std::vector<ScoreSeries> preds = {{{0.0, 1.0}, {0.1, 1.0}, {0.2, 1.0}}, {{0.3, 0.0}}};
  const AggregateCurve c = aggregate_ad(preds, plain_ad(0.5));
  REQUIRE(c.values().size() == 1);
  CHECK(c.values()[0].mean_score == 0.5);
  CHECK(c.values()[0].participant_count == 2);
}

TEST_CASE("aggregate_ad matches the brute-force two-level mean on populated bins") {
  std::mt19937_64 gen(21);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int trial = 0; trial < 20; ++trial) {
    const double duration = 5.0 + 10.0 * u(gen);
    std::vector<ScoreSeries> preds;
    std::vector<std::vector<oracle::Sample>> samples;
    for (int p = 0; p < 1 + trial % 6; ++p) {
      ScoreSeries s;
      for (double t = 0.0; t < duration + 1.0; t += 0.2) {
        if (u(gen) < 0.6) s.push_back({t, u(gen)});
      }
      preds.push_back(s);
      samples.push_back(to_samples(s));
    }
    const auto expected = oracle::brute_force_bins(samples, duration, 0.5);
    bool any = false;
    for (const auto& [v, n] : expected) any |= n > 0;
    if (!any) continue;
    const AggregateCurve c = aggregate_ad(preds, plain_ad(duration));
    REQUIRE(c.values().size() == expected.size());
    for (std::size_t k = 0; k < expected.size(); ++k) {
      CHECK(c.values()[k].participant_count == expected[k].second);
      if (expected[k].second > 0) CHECK(c.values()[k].mean_score == doctest::Approx(expected[k].first).epsilon(1e-12));
    }
  }
}

TEST_CASE("empty bins are interpolated and edges are held") {
  // Populated bins 1 (0.2) and 4 (0.8); bins 0, 2, 3, 5 are empty.
  const std::vector<ScoreSeries> preds = {{{0.6, 0.2}, {2.1, 0.8}}};
  const AggregateCurve c = aggregate_ad(preds, plain_ad(3.0));
  REQUIRE(c.values().size() == 6);
  const double want[] = {0.2, 0.2, 0.4, 0.6, 0.8, 0.8};
  const int counts[] = {0, 1, 0, 0, 1, 0};
  for (std::size_t k = 0; k < 6; ++k) {
    CHECK(c.values()[k].mean_score == doctest::Approx(want[k]).epsilon(1e-12));
    CHECK(c.values()[k].participant_count == counts[k]);
  }
}

TEST_CASE("frames past the end of the ad are ignored") {
  const std::vector<ScoreSeries> preds = {{{0.1, 0.3}, {1.0, 0.9}, {7.0, 1.0}}};
  const AggregateCurve c = aggregate_ad(preds, plain_ad(1.0));
  REQUIRE(c.values().size() == 2);
  CHECK(c.values()[0].mean_score == 0.3);
  CHECK(c.values()[1].mean_score == 0.3);
  CHECK_THROWS_AS(aggregate_ad(std::vector<ScoreSeries>{{{5.0, 0.5}}}, plain_ad(1.0)), NoPredictions);
  CHECK_THROWS_AS(aggregate_ad(std::vector<ScoreSeries>{}, plain_ad(1.0)), NoPredictions);
}

TEST_CASE("aggregation is invariant to participant order and stays in the score hull") {
  std::mt19937_64 gen(22);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int trial = 0; trial < 20; ++trial) {
    std::vector<ScoreSeries> preds;
    double lo = 1.0, hi = 0.0;
    for (int p = 0; p < 5; ++p) {
      ScoreSeries s;
      for (double t = 0.0; t < 8.0; t += 0.2) {
        if (u(gen) < 0.5) {
          const double v = u(gen);
          lo = std::min(lo, v);
          hi = std::max(hi, v);
          s.push_back({t, v});
        }
      }
      preds.push_back(s);
    }
    const AggregateCurve a = aggregate_ad(preds, plain_ad(8.0));
    std::shuffle(preds.begin(), preds.end(), gen);
    const AggregateCurve b = aggregate_ad(preds, plain_ad(8.0));
    REQUIRE(a.values().size() == b.values().size());
    for (std::size_t k = 0; k < a.values().size(); ++k) {
      CHECK(a.values()[k].mean_score == doctest::Approx(b.values()[k].mean_score).epsilon(1e-14));
      CHECK(a.values()[k].mean_score >= lo - 1e-15);
      CHECK(a.values()[k].mean_score <= hi + 1e-15);
    }
  }
}

TEST_CASE("duplicating a participant shifts the bin mean by hand-computed amounts") {
  // Bin 0 participant means: 0.3, 0.6, 0.9 -> 0.6. Doubling the 0.9 one: (0.3+0.6+0.9+0.9)/4 = 0.675.
  std::vector<ScoreSeries> preds = {{{0.0, 0.3}}, {{0.1, 0.4}, {0.2, 0.8}}, {{0.3, 0.9}}};
  CHECK(aggregate_ad(preds, plain_ad(0.5)).values()[0].mean_score == doctest::Approx(0.6).epsilon(1e-14));
  preds.push_back(preds[2]);
  CHECK(aggregate_ad(preds, plain_ad(0.5)).values()[0].mean_score == doctest::Approx(0.675).epsilon(1e-14));
}

TEST_CASE("max_over_interval and curve_max") {
  const AggregateCurve c = curve_of({0.1, 0.9, 0.3, 0.7, 0.2, 0.4});
  CHECK(curve_max(c) == 0.9);
  CHECK(max_over_interval(c, Interval(1.0, 2.0)) == 0.7);
  CHECK(max_over_interval(c, Interval(0.0, 3.0)) == 0.9);
  CHECK(max_over_interval(c, Interval(2.0, 2.5)) == 0.2);
  // Narrower than a bin and not containing a bin start: bin holding the start.
  CHECK(max_over_interval(c, Interval(1.6, 1.9)) == 0.7);
  CHECK(max_over_interval(c, Interval(2.6, 10.0)) == 0.4);
  CHECK_THROWS_AS(max_over_interval(c, Interval(3.0, 4.0)), EmptyInterval);
}

TEST_CASE("predict_video applies the model frame by frame") {
  std::mt19937_64 gen(23);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::vector<AuFrame> frames;
  for (int i = 0; i < 30; ++i) {
    AuFrame f{static_cast<std::uint64_t>(i), i * 0.2, std::nullopt};
    if (i % 7 != 3) {
      std::array<double, kAuCount> s{};
      for (double& x : s) x = u(gen);
      f.aus.emplace(s);
    }
    frames.push_back(f);
  }
  const VideoRecord v("v", "ad", frames);
  const MlpParams model = init_params(5);
  const ScoreSeries s = predict_video(model, v);
  std::size_t j = 0;
  for (const AuFrame& f : frames) {
    if (!f.aus) continue;
    REQUIRE(j < s.size());
    CHECK(s[j].timestamp_s == f.timestamp_s);
    CHECK(s[j].score == forward(model, *f.aus));
    ++j;
  }
  CHECK(j == s.size());

  const std::vector<ScoreSeries> flat = {predict_video(MlpParams{}, v)};
  const AggregateCurve c = aggregate_ad(flat, plain_ad(6.0));
  for (const auto& p : c.values()) CHECK(p.mean_score == 0.5);
}

TEST_CASE("curve CSV round trip") {
  AdMap ads;
  ads.emplace("a", AdSpec("a", AdLabel::NonSentimental, 3.0, {}));
  ads.emplace("b", AdSpec("b", AdLabel::Sentimental, 2.2, {Interval(1, 2)}));
  const std::vector<ScoreSeries> pa = {{{0.1, 0.25}, {2.7, 1.0 / 3.0}}};
  const std::vector<ScoreSeries> pb = {{{0.0, 0.125}}, {{1.3, 0.7}}};
  const std::vector<AggregateCurve> curves = {aggregate_ad(pa, ads.at("a")), aggregate_ad(pb, ads.at("b"))};
  const std::string csv = serialize_curves_csv(curves);
  CHECK(csv.rfind("ad_id,timestamp_s,mean_score,participant_count\n", 0) == 0);
  const auto back = parse_curves_csv(csv, ads);
  CHECK(back == curves);
  CHECK_THROWS(parse_curves_csv("ad_id,timestamp_s,mean_score,participant_count\nzz,0,0.5,1\n", ads));
}
