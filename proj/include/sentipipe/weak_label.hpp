#pragma once

#include <cstddef>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "sentipipe/core.hpp"
#include "sentipipe/ingest.hpp"

namespace sentipipe {

struct LabelingConfig {
  double activation_threshold = kDefaultActivationThreshold;
  int min_active_positive = 2;
  // Also take every faced frame of non-sentimental ads as a negative.
  bool nonsentimental_ads_as_negatives = false;

  /// Throws ConfigError on threshold outside (0,1) or min_active_positive < 1.
  void validate() const;
};

/// Half-open membership test against a list of moments.
bool frame_in_moments(double timestamp_s, std::span<const Interval> moments);

/// Weak frame labels from ad-level annotations.
///
/// For every frame with a detected face of a sentimental ad:
///  - inside a moment with at least min_active_positive active AUs: positive
///  - inside a moment with fewer active AUs: dropped
///  - outside every moment: negative, regardless of AU activity
/// Frames of non-sentimental ads are ignored unless
/// nonsentimental_ads_as_negatives is set. Output is sorted by
/// (video_id, frame_index). Throws UnknownAdId.
std::vector<LabeledExample> extract_examples(std::span<const VideoRecord> videos, const AdMap& ads,
                                             const LabelingConfig& config);

struct LabelSummary {
  std::size_t positives = 0;
  std::size_t negatives = 0;
  // negatives / positives; +inf with no positives, empty with no examples.
  std::optional<double> ratio;
};

LabelSummary label_summary(std::span<const LabeledExample> examples);

// JSONL, one object per line:
//   {"video_id": str, "frame_index": int, "label": "positive"|"negative", "aus": [20 numbers]}
std::string serialize_examples_jsonl(std::span<const LabeledExample> examples);
std::vector<LabeledExample> parse_examples_jsonl(std::string_view text,
                                                 const std::string& source = "<memory>");
std::vector<LabeledExample> load_examples_jsonl(const std::filesystem::path& path);

}  // namespace sentipipe
