#pragma once

// Per-participant frame predictions -> one sentimentality curve per ad.

#include <map>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "sentipipe/core.hpp"
#include "sentipipe/errors.hpp"
#include "sentipipe/ingest.hpp"
#include "sentipipe/mlp.hpp"

namespace sentipipe {

struct TimedScore {
  double timestamp_s;
  double score;

  friend bool operator==(const TimedScore&, const TimedScore&) = default;
};

using ScoreSeries = std::vector<TimedScore>;

/// Applies `scorer(const AuVector&) -> double` to every frame with a face.
template <typename Scorer>
ScoreSeries score_video(const VideoRecord& video, Scorer&& scorer) {
  ScoreSeries out;
  out.reserve(video.frames().size());
  for (const AuFrame& f : video.frames()) {
    if (f.aus) out.push_back({f.timestamp_s, scorer(*f.aus)});
  }
  return out;
}

ScoreSeries predict_video(const MlpParams& model, const VideoRecord& video);

inline constexpr double kDefaultStepS = 0.5;

// How participants are weighted in a bin; reported alongside exported curves.
inline constexpr std::string_view kAggregationWeighting = "participant-equal";

/// Bins [k*step_s, (k+1)*step_s) over [0, duration_s). Each participant's
/// scores are averaged within a bin first, then the bin value is the mean over
/// the participants present. Empty bins are linearly interpolated between the
/// nearest populated bins; leading/trailing empty bins copy the nearest one.
/// Frames at or past duration_s are ignored. Throws NoPredictions when no
/// frame falls inside the ad.
AggregateCurve aggregate_ad(std::span<const ScoreSeries> predictions, const AdSpec& ad,
                            double step_s = kDefaultStepS);

/// Max over bins whose start lies in [start, end); falls back to the bin
/// containing start when none does. Throws EmptyInterval if the interval
/// starts at or after the curve's end.
double max_over_interval(const AggregateCurve& curve, const Interval& interval);

double curve_max(const AggregateCurve& curve);

/// Curves of every ad that has videos in `videos`, keyed by ad_id.
template <typename Scorer>
std::vector<AggregateCurve> aggregate_dataset(std::span<const VideoRecord> videos, const AdMap& ads,
                                              double step_s, Scorer&& scorer) {
  std::map<std::string, std::vector<ScoreSeries>> by_ad;
  for (const VideoRecord& v : videos) by_ad[v.ad_id()].push_back(score_video(v, scorer));
  std::vector<AggregateCurve> curves;
  for (const auto& [ad_id, series] : by_ad) {
    auto it = ads.find(ad_id);
    if (it == ads.end()) throw UnknownAdId(ad_id);
    curves.push_back(aggregate_ad(series, it->second, step_s));
  }
  return curves;
}

// Curve CSV: ad_id,timestamp_s,mean_score,participant_count
std::string serialize_curves_csv(std::span<const AggregateCurve> curves);
/// Durations come from `ads`; the step is read off the timestamps.
std::vector<AggregateCurve> parse_curves_csv(std::string_view csv_text, const AdMap& ads,
                                             const std::string& source = "<memory>");

}  // namespace sentipipe
