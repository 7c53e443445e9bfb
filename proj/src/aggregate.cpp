#include "sentipipe/aggregate.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <optional>

#include "sentipipe/errors.hpp"
#include "sentipipe/text_format.hpp"

namespace sentipipe {

ScoreSeries predict_video(const MlpParams& model, const VideoRecord& video) {
  return score_video(video, [&model](const AuVector& aus) { return forward(model, aus); });
}

AggregateCurve aggregate_ad(std::span<const ScoreSeries> predictions, const AdSpec& ad, double step_s) {
  if (!std::isfinite(step_s) || step_s <= 0.0) throw ValidationError("step_s must be > 0");
  const std::size_t n = bin_count(ad.duration_s(), step_s);

  std::vector<double> bin_sum(n, 0.0);
  std::vector<int> bin_participants(n, 0);
  std::vector<double> own_sum(n);
  std::vector<int> own_count(n);

  for (const ScoreSeries& series : predictions) {
    std::fill(own_sum.begin(), own_sum.end(), 0.0);
    std::fill(own_count.begin(), own_count.end(), 0);
    for (const TimedScore& s : series) {
      if (!(s.timestamp_s >= 0.0) || s.timestamp_s >= ad.duration_s()) continue;
      auto k = static_cast<std::size_t>(std::floor(s.timestamp_s / step_s));
      // Guard against floor() landing one bin off near boundaries.
      while (k > 0 && static_cast<double>(k) * step_s > s.timestamp_s) --k;
      while (k + 1 < n && static_cast<double>(k + 1) * step_s <= s.timestamp_s) ++k;
      if (k >= n) continue;
      own_sum[k] += s.score;
      ++own_count[k];
    }
    for (std::size_t k = 0; k < n; ++k) {
      if (own_count[k] == 0) continue;
      bin_sum[k] += own_sum[k] / own_count[k];
      ++bin_participants[k];
    }
  }

  std::vector<std::size_t> populated;
  for (std::size_t k = 0; k < n; ++k) {
    if (bin_participants[k] > 0) populated.push_back(k);
  }
  if (populated.empty()) {
    throw NoPredictions("ad '" + ad.ad_id() + "' has no scored frame inside its duration");
  }

  std::vector<CurvePoint> values(n);
  for (std::size_t k = 0; k < n; ++k) {
    values[k].timestamp_s = static_cast<double>(k) * step_s;
    values[k].participant_count = bin_participants[k];
    if (bin_participants[k] > 0) {
      values[k].mean_score = std::clamp(bin_sum[k] / bin_participants[k], 0.0, 1.0);
    }
  }

  // Fill gaps: copy at the edges, interpolate between populated neighbours.
  for (std::size_t k = 0; k < populated.front(); ++k) values[k].mean_score = values[populated.front()].mean_score;
  for (std::size_t k = populated.back() + 1; k < n; ++k) values[k].mean_score = values[populated.back()].mean_score;
  for (std::size_t j = 1; j < populated.size(); ++j) {
    const std::size_t lo = populated[j - 1];
    const std::size_t hi = populated[j];
    const double v_lo = values[lo].mean_score;
    const double v_hi = values[hi].mean_score;
    for (std::size_t k = lo + 1; k < hi; ++k) {
      const double frac = static_cast<double>(k - lo) / static_cast<double>(hi - lo);
      values[k].mean_score = v_lo + (v_hi - v_lo) * frac;
    }
  }

  return AggregateCurve(ad.ad_id(), step_s, ad.duration_s(), std::move(values));
}

double max_over_interval(const AggregateCurve& curve, const Interval& interval) {
  const auto& values = curve.values();
  if (interval.start_s() >= curve.duration_s()) {
    throw EmptyInterval("interval [" + text::format_double(interval.start_s()) + ", " +
                        text::format_double(interval.end_s()) + ") lies outside curve '" +
                        curve.ad_id() + "'");
  }
  std::optional<double> best;
  for (const CurvePoint& p : values) {
    if (interval.contains(p.timestamp_s)) best = std::max(best.value_or(p.mean_score), p.mean_score);
  }
  if (best) return *best;

  // Interval narrower than a bin: use the bin holding its start.
  for (std::size_t k = values.size(); k-- > 0;) {
    if (values[k].timestamp_s <= interval.start_s()) return values[k].mean_score;
  }
  return values.front().mean_score;
}

double curve_max(const AggregateCurve& curve) {
  const auto& v = curve.values();
  return std::max_element(v.begin(), v.end(), [](const CurvePoint& a, const CurvePoint& b) {
           return a.mean_score < b.mean_score;
         })->mean_score;
}

std::string serialize_curves_csv(std::span<const AggregateCurve> curves) {
  std::string out = "ad_id,timestamp_s,mean_score,participant_count\n";
  for (const AggregateCurve& c : curves) {
    for (const CurvePoint& p : c.values()) {
      out += c.ad_id() + "," + text::format_double(p.timestamp_s) + "," +
             text::format_double(p.mean_score) + "," + std::to_string(p.participant_count) + "\n";
    }
  }
  return out;
}

std::vector<AggregateCurve> parse_curves_csv(std::string_view csv_text, const AdMap& ads,
                                             const std::string& source) {
  std::size_t pos = 0;
  std::size_t line_no = 0;
  std::vector<std::string> order;
  std::map<std::string, std::vector<CurvePoint>> points;

  while (pos < csv_text.size()) {
    std::size_t nl = csv_text.find('\n', pos);
    if (nl == std::string_view::npos) nl = csv_text.size();
    const std::string_view line = csv_text.substr(pos, nl - pos);
    pos = nl + 1;
    ++line_no;
    if (line.empty() || line == "\r") continue;
    const auto fields = text::split_csv(line);
    const std::string where = source + ":" + std::to_string(line_no);
    if (line_no == 1) {
      if (fields.size() != 4 || fields[0] != "ad_id" || fields[1] != "timestamp_s" ||
          fields[2] != "mean_score" || fields[3] != "participant_count") {
        throw SchemaError(where + ": expected header ad_id,timestamp_s,mean_score,participant_count");
      }
      continue;
    }
    if (fields.size() != 4) throw SchemaError(where + ": expected 4 fields");
    CurvePoint p{};
    std::uint64_t count = 0;
    if (!text::parse_double(fields[1], p.timestamp_s) || !text::parse_double(fields[2], p.mean_score) ||
        !text::parse_uint(fields[3], count)) {
      throw SchemaError(where + ": bad number");
    }
    p.participant_count = static_cast<int>(count);
    const std::string ad_id(fields[0]);
    auto [it, inserted] = points.try_emplace(ad_id);
    if (inserted) order.push_back(ad_id);
    it->second.push_back(p);
  }
  if (line_no == 0) throw SchemaError(source + ": empty file, header expected");

  std::vector<AggregateCurve> curves;
  for (const std::string& ad_id : order) {
    auto ad_it = ads.find(ad_id);
    if (ad_it == ads.end()) throw UnknownAdId(ad_id);
    auto& pts = points.at(ad_id);
    const double step = pts.size() > 1 ? pts[1].timestamp_s - pts[0].timestamp_s : ad_it->second.duration_s();
    curves.emplace_back(ad_id, step, ad_it->second.duration_s(), std::move(pts));
  }
  return curves;
}

}  // namespace sentipipe
