#include "sentipipe/core.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>

#include "sentipipe/errors.hpp"

namespace sentipipe {

namespace {

bool iequals(std::string_view a, std::string_view b) {
  return a.size() == b.size() &&
         std::equal(a.begin(), a.end(), b.begin(), [](char x, char y) {
           return std::tolower(static_cast<unsigned char>(x)) ==
                  std::tolower(static_cast<unsigned char>(y));
         });
}

}  // namespace

std::size_t canonical_au_index(std::string_view name) {
  for (std::size_t i = 0; i < kAuCount; ++i) {
    if (iequals(name, kAuNames[i])) return i;
  }
  throw UnknownAuName(std::string(name));
}

std::size_t au_column_index(std::string_view column) {
  for (std::size_t i = 0; i < kAuCount; ++i) {
    if (iequals(column, kAuColumns[i])) return i;
  }
  throw UnknownAuName(std::string(column));
}

AuVector::AuVector(const std::array<double, kAuCount>& scores) : scores_(scores) {
  for (std::size_t i = 0; i < kAuCount; ++i) {
    const double s = scores_[i];
    if (!std::isfinite(s) || s < 0.0 || s > 1.0) {
      throw ValidationError("AU score for " + std::string(kAuNames[i]) + " outside [0,1]: " +
                            std::to_string(s));
    }
  }
}

AuVector AuVector::zeros() { return AuVector(std::array<double, kAuCount>{}); }

int active_au_count(const AuVector& aus, double threshold) {
  return static_cast<int>(std::count_if(aus.scores().begin(), aus.scores().end(),
                                        [threshold](double s) { return s >= threshold; }));
}

VideoRecord::VideoRecord(std::string video_id, std::string ad_id, std::vector<AuFrame> frames)
    : video_id_(std::move(video_id)), ad_id_(std::move(ad_id)), frames_(std::move(frames)) {
  if (video_id_.empty()) throw ValidationError("empty video_id");
  if (frames_.empty()) throw ValidationError("video '" + video_id_ + "' has no frames");
  for (std::size_t i = 0; i < frames_.size(); ++i) {
    const AuFrame& f = frames_[i];
    if (!std::isfinite(f.timestamp_s) || f.timestamp_s < 0.0) {
      throw ValidationError("video '" + video_id_ + "' frame " + std::to_string(f.frame_index) +
                            ": invalid timestamp");
    }
    if (i == 0) continue;
    const AuFrame& prev = frames_[i - 1];
    if (f.frame_index <= prev.frame_index) {
      throw ValidationError("video '" + video_id_ + "': frame_index " +
                            std::to_string(f.frame_index) + " follows " +
                            std::to_string(prev.frame_index));
    }
    if (f.timestamp_s < prev.timestamp_s) {
      throw ValidationError("video '" + video_id_ + "': timestamp decreases at frame " +
                            std::to_string(f.frame_index));
    }
  }
}

Interval::Interval(double start_s, double end_s) : start_s_(start_s), end_s_(end_s) {
  if (!std::isfinite(start_s) || !std::isfinite(end_s) || start_s < 0.0 || !(start_s < end_s)) {
    throw ValidationError("invalid interval [" + std::to_string(start_s) + ", " +
                          std::to_string(end_s) + ")");
  }
}

std::string_view to_string(AdLabel label) {
  return label == AdLabel::Sentimental ? "sentimental" : "non_sentimental";
}

AdSpec::AdSpec(std::string ad_id, AdLabel label, double duration_s, std::vector<Interval> moments)
    : ad_id_(std::move(ad_id)), label_(label), duration_s_(duration_s), moments_(std::move(moments)) {
  if (ad_id_.empty()) throw ValidationError("empty ad_id");
  const auto fail = [this](const std::string& reason) {
    throw ValidationError("ad '" + ad_id_ + "': " + reason);
  };
  if (!std::isfinite(duration_s_) || duration_s_ <= 0.0) fail("duration_s must be > 0");
  if (label_ == AdLabel::NonSentimental && !moments_.empty()) {
    fail("non-sentimental ad carries moments");
  }
  if (label_ == AdLabel::Sentimental && moments_.empty()) fail("sentimental ad has no moments");
  for (std::size_t i = 0; i < moments_.size(); ++i) {
    if (moments_[i].end_s() > duration_s_) fail("moment extends past duration");
    if (i > 0 && moments_[i].start_s() < moments_[i - 1].end_s()) {
      fail("moments overlap or are unsorted");
    }
  }
}

std::size_t bin_count(double duration_s, double step_s) {
  if (!(duration_s > 0.0) || !(step_s > 0.0)) {
    throw ValidationError("bin_count needs positive duration and step");
  }
  auto n = static_cast<std::size_t>(std::ceil(duration_s / step_s));
  while (n > 1 && static_cast<double>(n - 1) * step_s >= duration_s) --n;
  while (static_cast<double>(n) * step_s < duration_s) ++n;
  return n;
}

AggregateCurve::AggregateCurve(std::string ad_id, double step_s, double duration_s,
                               std::vector<CurvePoint> values)
    : ad_id_(std::move(ad_id)), step_s_(step_s), duration_s_(duration_s), values_(std::move(values)) {
  if (!std::isfinite(step_s_) || step_s_ <= 0.0) throw ValidationError("curve step_s must be > 0");
  const std::size_t n = bin_count(duration_s_, step_s_);
  if (values_.size() != n) {
    throw ValidationError("curve '" + ad_id_ + "' has " + std::to_string(values_.size()) +
                          " bins, expected " + std::to_string(n));
  }
  for (std::size_t k = 0; k < n; ++k) {
    const CurvePoint& p = values_[k];
    if (p.timestamp_s != static_cast<double>(k) * step_s_) {
      throw ValidationError("curve '" + ad_id_ + "': bin " + std::to_string(k) +
                            " does not start at k*step_s");
    }
    if (!std::isfinite(p.mean_score) || p.mean_score < 0.0 || p.mean_score > 1.0) {
      throw ValidationError("curve '" + ad_id_ + "': mean_score outside [0,1]");
    }
    if (p.participant_count < 0) {
      throw ValidationError("curve '" + ad_id_ + "': negative participant_count");
    }
  }
}

}  // namespace sentipipe
