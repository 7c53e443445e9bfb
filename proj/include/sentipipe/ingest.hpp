#pragma once

#include <filesystem>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "sentipipe/core.hpp"

namespace sentipipe {

using AdMap = std::map<std::string, AdSpec>;

class Dataset {
 public:
  Dataset() = default;
  /// Videos are kept sorted by video_id. Throws ValidationError on duplicate video ids and UnknownAdId when a
  /// video references an ad missing from `ads`.
  Dataset(AdMap ads, std::vector<VideoRecord> videos);

  const AdMap& ads() const { return ads_; }
  const std::vector<VideoRecord>& videos() const { return videos_; }
  const AdSpec& ad(const std::string& ad_id) const;

  friend bool operator==(const Dataset&, const Dataset&) = default;

 private:
  AdMap ads_;
  std::vector<VideoRecord> videos_;
};

// Ad annotations: a JSON array of
//   {"ad_id": str, "label": "sentimental"|"non_sentimental",
//    "duration_s": number, "moments": [[start_s, end_s], ...]}
AdMap parse_ad_annotations(const std::filesystem::path& path);
AdMap parse_ad_annotations_text(std::string_view json_text, const std::string& source = "<memory>");
std::string serialize_ad_annotations(const AdMap& ads);

// AU streams: CSV with columns video_id, ad_id, frame_index, timestamp_s,
// face_detected and the 20 au_* columns (any order). AU cells are empty on
// rows with face_detected=0. Rows of one video must appear in strictly
// increasing frame_index order; videos come back in order of first row.
std::vector<VideoRecord> parse_au_stream(const std::filesystem::path& path);
std::vector<VideoRecord> parse_au_stream_text(std::string_view csv_text,
                                              const std::string& source = "<memory>");
std::string serialize_au_stream(const std::vector<VideoRecord>& videos);

// Dataset directory layout: <dir>/annotations.json plus <dir>/streams/*.csv,
// one stream file per ad. Stream files are read in filename order.
Dataset load_dataset(const std::filesystem::path& dir);
void write_dataset(const Dataset& dataset, const std::filesystem::path& dir);

/// Fraction of frames with a detected face.
double face_coverage(const VideoRecord& video);

inline constexpr double kDefaultMinCoverage = 0.90;

struct CoverageSplit {
  std::vector<VideoRecord> kept;
  std::vector<std::string> dropped_ids;
};

/// Keeps videos with face_coverage >= min_coverage (inclusive), preserving
/// input order; the rest are reported by id.
CoverageSplit filter_by_coverage(std::vector<VideoRecord> videos,
                                 double min_coverage = kDefaultMinCoverage);

}  // namespace sentipipe
