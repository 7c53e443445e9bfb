#include "sentipipe/weak_label.hpp"

#include <algorithm>
#include <limits>
#include <tuple>

#include <json.hpp>

#include "sentipipe/errors.hpp"
#include "sentipipe/text_format.hpp"

namespace sentipipe {

using json = nlohmann::json;

void LabelingConfig::validate() const {
  if (!(activation_threshold > 0.0 && activation_threshold < 1.0)) {
    throw ConfigError("activation_threshold must lie in (0,1)");
  }
  if (min_active_positive < 1) throw ConfigError("min_active_positive must be >= 1");
}

bool frame_in_moments(double timestamp_s, std::span<const Interval> moments) {
  return std::any_of(moments.begin(), moments.end(),
                     [timestamp_s](const Interval& m) { return m.contains(timestamp_s); });
}

std::vector<LabeledExample> extract_examples(std::span<const VideoRecord> videos, const AdMap& ads,
                                             const LabelingConfig& config) {
  config.validate();
  std::vector<LabeledExample> out;
  for (const VideoRecord& video : videos) {
    auto it = ads.find(video.ad_id());
    if (it == ads.end()) throw UnknownAdId(video.ad_id());
    const AdSpec& ad = it->second;
    if (!ad.sentimental() && !config.nonsentimental_ads_as_negatives) continue;

    for (const AuFrame& frame : video.frames()) {
      if (!frame.aus) continue;
      ExampleLabel label = ExampleLabel::Negative;
      if (frame_in_moments(frame.timestamp_s, ad.moments())) {
        if (active_au_count(*frame.aus, config.activation_threshold) < config.min_active_positive) {
          continue;
        }
        label = ExampleLabel::Positive;
      }
      out.push_back(LabeledExample{*frame.aus, label, video.video_id(), frame.frame_index});
    }
  }
  std::sort(out.begin(), out.end(), [](const LabeledExample& a, const LabeledExample& b) {
    return std::tie(a.video_id, a.frame_index) < std::tie(b.video_id, b.frame_index);
  });
  return out;
}

LabelSummary label_summary(std::span<const LabeledExample> examples) {
  LabelSummary s;
  for (const LabeledExample& e : examples) {
    if (e.positive()) {
      ++s.positives;
    } else {
      ++s.negatives;
    }
  }
  if (s.positives > 0) {
    s.ratio = static_cast<double>(s.negatives) / static_cast<double>(s.positives);
  } else if (s.negatives > 0) {
    s.ratio = std::numeric_limits<double>::infinity();
  }
  return s;
}

std::string serialize_examples_jsonl(std::span<const LabeledExample> examples) {
  std::string out;
  for (const LabeledExample& e : examples) {
    out += "{\"video_id\": " + json(e.video_id).dump() +
           ", \"frame_index\": " + std::to_string(e.frame_index) + ", \"label\": \"" +
           (e.positive() ? "positive" : "negative") + "\", \"aus\": [";
    for (std::size_t i = 0; i < kAuCount; ++i) {
      if (i > 0) out += ", ";
      out += text::format_double(e.aus[i]);
    }
    out += "]}\n";
  }
  return out;
}

std::vector<LabeledExample> parse_examples_jsonl(std::string_view text, const std::string& source) {
  std::vector<LabeledExample> out;
  std::size_t pos = 0;
  std::size_t line_no = 0;
  while (pos < text.size()) {
    std::size_t nl = text.find('\n', pos);
    if (nl == std::string_view::npos) nl = text.size();
    const std::string_view line = text.substr(pos, nl - pos);
    pos = nl + 1;
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string_view::npos) continue;

    const std::string where = source + ":" + std::to_string(line_no);
    json obj;
    try {
      obj = json::parse(line);
    } catch (const json::parse_error& e) {
      throw SchemaError(where + ": " + e.what());
    }
    if (!obj.is_object() || !obj.contains("video_id") || !obj["video_id"].is_string() ||
        !obj.contains("frame_index") || !obj["frame_index"].is_number_unsigned() ||
        !obj.contains("label") || !obj["label"].is_string() || !obj.contains("aus") ||
        !obj["aus"].is_array() || obj["aus"].size() != kAuCount) {
      throw SchemaError(where + ": expected {video_id, frame_index, label, aus[20]}");
    }
    ExampleLabel label;
    if (obj["label"] == "positive") {
      label = ExampleLabel::Positive;
    } else if (obj["label"] == "negative") {
      label = ExampleLabel::Negative;
    } else {
      throw SchemaError(where + ": label must be positive|negative");
    }
    std::array<double, kAuCount> scores{};
    for (std::size_t i = 0; i < kAuCount; ++i) {
      if (!obj["aus"][i].is_number()) throw SchemaError(where + ": aus entries must be numbers");
      scores[i] = obj["aus"][i].get<double>();
    }
    out.push_back(LabeledExample{AuVector(scores), label, obj["video_id"].get<std::string>(),
                                 obj["frame_index"].get<std::uint64_t>()});
  }
  return out;
}

std::vector<LabeledExample> load_examples_jsonl(const std::filesystem::path& path) {
  return parse_examples_jsonl(text::read_file(path), path.string());
}

}  // namespace sentipipe
