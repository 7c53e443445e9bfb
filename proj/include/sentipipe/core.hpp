#pragma once

// Shared vocabulary of the pipeline: the canonical AU ordering, per-frame
// records, participant videos, ads with their sentimental moments, weakly
// labeled examples and aggregated curves.
//
// Every type with an invariant validates it in its constructor (or static
// factory) and is immutable afterwards.

#include <array>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace sentipipe {

inline constexpr std::size_t kAuCount = 20;

// Display names in canonical order (index 0..19).
inline constexpr std::array<std::string_view, kAuCount> kAuNames = {
    "AU1",  "AU2",  "AU4",  "AU5",  "AU6",  "AU7",  "AU9",
    "AU10", "AU14", "AU15", "AU17", "AU18", "AU20", "AU24",
    "AU25", "AU26", "AU28", "EyeClosure", "Smile", "Smirk"};

// AU-stream CSV column names in canonical order.
inline constexpr std::array<std::string_view, kAuCount> kAuColumns = {
    "au_1",  "au_2",  "au_4",  "au_5",  "au_6",  "au_7",  "au_9",
    "au_10", "au_14", "au_15", "au_17", "au_18", "au_20", "au_24",
    "au_25", "au_26", "au_28", "au_eye_closure", "au_smile", "au_smirk"};

inline constexpr double kDefaultActivationThreshold = 0.5;

/// Canonical position of an AU display name (case-insensitive).
/// Throws UnknownAuName for anything outside the 20 canonical names.
std::size_t canonical_au_index(std::string_view name);

/// Canonical position of an AU-stream CSV column ("au_6", "au_eye_closure").
std::size_t au_column_index(std::string_view column);

class AuVector {
 public:
  /// Throws ValidationError if any score is non-finite or outside [0,1].
  explicit AuVector(const std::array<double, kAuCount>& scores);

  static AuVector zeros();

  double operator[](std::size_t i) const { return scores_[i]; }
  const std::array<double, kAuCount>& scores() const { return scores_; }
  std::span<const double, kAuCount> span() const { return scores_; }

  friend bool operator==(const AuVector&, const AuVector&) = default;

 private:
  std::array<double, kAuCount> scores_;
};

/// Number of entries with score >= threshold (inclusive boundary).
int active_au_count(const AuVector& aus, double threshold);

struct AuFrame {
  std::uint64_t frame_index = 0;
  double timestamp_s = 0.0;
  std::optional<AuVector> aus;  // engaged iff a face was detected

  bool face_detected() const { return aus.has_value(); }

  friend bool operator==(const AuFrame&, const AuFrame&) = default;
};

class VideoRecord {
 public:
  /// Throws ValidationError on an empty frame list, non-increasing
  /// frame_index, decreasing or negative timestamps.
  VideoRecord(std::string video_id, std::string ad_id, std::vector<AuFrame> frames);

  const std::string& video_id() const { return video_id_; }
  const std::string& ad_id() const { return ad_id_; }
  const std::vector<AuFrame>& frames() const { return frames_; }

  friend bool operator==(const VideoRecord&, const VideoRecord&) = default;

 private:
  std::string video_id_;
  std::string ad_id_;
  std::vector<AuFrame> frames_;
};

class Interval {
 public:
  /// Requires 0 <= start_s < end_s, both finite.
  Interval(double start_s, double end_s);

  double start_s() const { return start_s_; }
  double end_s() const { return end_s_; }
  double length() const { return end_s_ - start_s_; }

  /// Half-open membership: start_s <= t < end_s.
  bool contains(double t) const { return start_s_ <= t && t < end_s_; }

  friend bool operator==(const Interval&, const Interval&) = default;

 private:
  double start_s_;
  double end_s_;
};

enum class AdLabel { Sentimental, NonSentimental };

std::string_view to_string(AdLabel label);

class AdSpec {
 public:
  /// Sentimental ads need at least one moment, non-sentimental ads none.
  /// Moments must be sorted, pairwise disjoint and within [0, duration_s].
  AdSpec(std::string ad_id, AdLabel label, double duration_s, std::vector<Interval> moments);

  const std::string& ad_id() const { return ad_id_; }
  AdLabel label() const { return label_; }
  bool sentimental() const { return label_ == AdLabel::Sentimental; }
  double duration_s() const { return duration_s_; }
  const std::vector<Interval>& moments() const { return moments_; }

  friend bool operator==(const AdSpec&, const AdSpec&) = default;

 private:
  std::string ad_id_;
  AdLabel label_;
  double duration_s_;
  std::vector<Interval> moments_;
};

enum class ExampleLabel { Negative = 0, Positive = 1 };

struct LabeledExample {
  AuVector aus;
  ExampleLabel label;
  std::string video_id;
  std::uint64_t frame_index;

  bool positive() const { return label == ExampleLabel::Positive; }

  friend bool operator==(const LabeledExample&, const LabeledExample&) = default;
};

struct CurvePoint {
  double timestamp_s;
  double mean_score;
  // Zero marks a bin with no contributors, filled by interpolation.
  int participant_count;

  friend bool operator==(const CurvePoint&, const CurvePoint&) = default;
};

class AggregateCurve {
 public:
  /// Bins must start at k * step_s for k = 0..n-1 with n the smallest count
  /// covering [0, duration_s); every mean_score in [0,1].
  AggregateCurve(std::string ad_id, double step_s, double duration_s, std::vector<CurvePoint> values);

  const std::string& ad_id() const { return ad_id_; }
  double step_s() const { return step_s_; }
  double duration_s() const { return duration_s_; }
  const std::vector<CurvePoint>& values() const { return values_; }

  friend bool operator==(const AggregateCurve&, const AggregateCurve&) = default;

 private:
  std::string ad_id_;
  double step_s_;
  double duration_s_;
  std::vector<CurvePoint> values_;
};

/// Number of bins of width step_s needed to cover [0, duration_s).
std::size_t bin_count(double duration_s, double step_s);

}  // namespace sentipipe
