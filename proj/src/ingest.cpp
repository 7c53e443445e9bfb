#include "sentipipe/ingest.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <optional>
#include <set>
#include <unordered_map>

#include <json.hpp>

#include "sentipipe/errors.hpp"
#include "sentipipe/text_format.hpp"

namespace sentipipe {

using json = nlohmann::json;

Dataset::Dataset(AdMap ads, std::vector<VideoRecord> videos)
    : ads_(std::move(ads)), videos_(std::move(videos)) {
  std::stable_sort(videos_.begin(), videos_.end(),
                   [](const VideoRecord& a, const VideoRecord& b) { return a.video_id() < b.video_id(); });
  std::set<std::string> seen;
  for (const VideoRecord& v : videos_) {
    if (!ads_.contains(v.ad_id())) throw UnknownAdId(v.ad_id());
    if (!seen.insert(v.video_id()).second) {
      throw ValidationError("duplicate video_id '" + v.video_id() + "'");
    }
  }
}

const AdSpec& Dataset::ad(const std::string& ad_id) const {
  auto it = ads_.find(ad_id);
  if (it == ads_.end()) throw UnknownAdId(ad_id);
  return it->second;
}

// ---------------------------------------------------------------------------
// Ad annotations

namespace {

double number_field(const json& obj, const char* field, const std::string& where) {
  auto it = obj.find(field);
  if (it == obj.end() || !it->is_number()) {
    throw SchemaError(where + ": field '" + field + "' missing or not a number");
  }
  return it->get<double>();
}

}  // namespace

AdMap parse_ad_annotations_text(std::string_view json_text, const std::string& source) {
  json doc;
  try {
    doc = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw SchemaError(source + ": " + e.what());
  }
  if (!doc.is_array()) throw SchemaError(source + ": top level must be an array");

  AdMap ads;
  for (std::size_t i = 0; i < doc.size(); ++i) {
    const json& obj = doc[i];
    const std::string where = source + "[" + std::to_string(i) + "]";
    if (!obj.is_object()) throw SchemaError(where + ": entry is not an object");

    auto id_it = obj.find("ad_id");
    if (id_it == obj.end() || !id_it->is_string()) {
      throw SchemaError(where + ": field 'ad_id' missing or not a string");
    }
    const std::string ad_id = id_it->get<std::string>();

    auto label_it = obj.find("label");
    if (label_it == obj.end() || !label_it->is_string()) {
      throw SchemaError(where + ": field 'label' missing or not a string");
    }
    AdLabel label;
    if (*label_it == "sentimental") {
      label = AdLabel::Sentimental;
    } else if (*label_it == "non_sentimental") {
      label = AdLabel::NonSentimental;
    } else {
      throw SchemaError(where + ": field 'label' must be sentimental|non_sentimental");
    }

    const double duration = number_field(obj, "duration_s", where);

    std::vector<Interval> moments;
    auto m_it = obj.find("moments");
    if (m_it != obj.end()) {
      if (!m_it->is_array()) throw SchemaError(where + ": field 'moments' must be an array");
      for (const json& pair : *m_it) {
        if (!pair.is_array() || pair.size() != 2 || !pair[0].is_number() || !pair[1].is_number()) {
          throw SchemaError(where + ": each moment must be [start_s, end_s]");
        }
        try {
          moments.emplace_back(pair[0].get<double>(), pair[1].get<double>());
        } catch (const ValidationError& e) {
          throw ValidationError("ad '" + ad_id + "': " + e.what());
        }
      }
    }

    AdSpec spec(ad_id, label, duration, std::move(moments));
    if (!ads.emplace(ad_id, std::move(spec)).second) {
      throw ValidationError("ad '" + ad_id + "': duplicate ad_id");
    }
  }
  return ads;
}

AdMap parse_ad_annotations(const std::filesystem::path& path) {
  return parse_ad_annotations_text(text::read_file(path), path.string());
}

std::string serialize_ad_annotations(const AdMap& ads) {
  // Written by hand so numbers use the same shortest round-trip form as the
  // CSV streams.
  std::string out = "[\n";
  bool first = true;
  for (const auto& [id, ad] : ads) {
    if (!first) out += ",\n";
    first = false;
    out += "  {\"ad_id\": " + json(id).dump() + ", \"label\": \"" +
           std::string(to_string(ad.label())) +
           "\", \"duration_s\": " + text::format_double(ad.duration_s()) + ", \"moments\": [";
    for (std::size_t m = 0; m < ad.moments().size(); ++m) {
      if (m > 0) out += ", ";
      out += "[" + text::format_double(ad.moments()[m].start_s()) + ", " +
             text::format_double(ad.moments()[m].end_s()) + "]";
    }
    out += "]}";
  }
  out += "\n]\n";
  return out;
}

// ---------------------------------------------------------------------------
// AU streams

namespace {

struct StreamColumns {
  std::size_t video_id, ad_id, frame_index, timestamp_s, face_detected;
  std::array<std::size_t, kAuCount> au;
  std::size_t width;
};

StreamColumns resolve_header(std::string_view header, const std::string& source) {
  const auto fields = text::split_csv(header);
  std::optional<std::size_t> video_id, ad_id, frame_index, timestamp_s, face_detected;
  std::array<std::optional<std::size_t>, kAuCount> au{};

  const auto claim = [&](std::optional<std::size_t>& slot, std::size_t col, std::string_view name) {
    if (slot) throw SchemaError(source + ": duplicate column '" + std::string(name) + "'");
    slot = col;
  };

  for (std::size_t c = 0; c < fields.size(); ++c) {
    const std::string_view name = fields[c];
    if (name == "video_id") {
      claim(video_id, c, name);
    } else if (name == "ad_id") {
      claim(ad_id, c, name);
    } else if (name == "frame_index") {
      claim(frame_index, c, name);
    } else if (name == "timestamp_s") {
      claim(timestamp_s, c, name);
    } else if (name == "face_detected") {
      claim(face_detected, c, name);
    } else {
      std::size_t idx;
      try {
        idx = au_column_index(name);
      } catch (const UnknownAuName&) {
        throw SchemaError(source + ": unknown column '" + std::string(name) + "'");
      }
      claim(au[idx], c, name);
    }
  }

  const auto need = [&](const std::optional<std::size_t>& slot, std::string_view name) {
    if (!slot) throw SchemaError(source + ": missing column '" + std::string(name) + "'");
    return *slot;
  };
  StreamColumns cols{};
  cols.video_id = need(video_id, "video_id");
  cols.ad_id = need(ad_id, "ad_id");
  cols.frame_index = need(frame_index, "frame_index");
  cols.timestamp_s = need(timestamp_s, "timestamp_s");
  cols.face_detected = need(face_detected, "face_detected");
  for (std::size_t i = 0; i < kAuCount; ++i) cols.au[i] = need(au[i], kAuColumns[i]);
  cols.width = fields.size();
  return cols;
}

struct PendingVideo {
  std::string ad_id;
  std::vector<AuFrame> frames;
};

}  // namespace

std::vector<VideoRecord> parse_au_stream_text(std::string_view csv_text, const std::string& source) {
  std::size_t pos = 0;
  std::size_t line_no = 0;
  const auto next_line = [&](std::string_view& line) {
    if (pos >= csv_text.size()) return false;
    std::size_t nl = csv_text.find('\n', pos);
    if (nl == std::string_view::npos) nl = csv_text.size();
    line = csv_text.substr(pos, nl - pos);
    pos = nl + 1;
    ++line_no;
    return true;
  };

  std::string_view line;
  if (!next_line(line)) throw SchemaError(source + ": empty file, header expected");
  const StreamColumns cols = resolve_header(line, source);

  std::vector<std::string> order;
  std::unordered_map<std::string, PendingVideo> pending;

  while (next_line(line)) {
    if (line.empty() || line == "\r") continue;
    const std::string where = source + ":" + std::to_string(line_no);
    const auto fields = text::split_csv(line);
    if (fields.size() != cols.width) {
      throw SchemaError(where + ": expected " + std::to_string(cols.width) + " fields, got " +
                        std::to_string(fields.size()));
    }

    const std::string video_id(fields[cols.video_id]);
    const std::string ad_id(fields[cols.ad_id]);
    if (video_id.empty() || ad_id.empty()) throw SchemaError(where + ": empty video_id or ad_id");

    AuFrame frame;
    if (!text::parse_uint(fields[cols.frame_index], frame.frame_index)) {
      throw SchemaError(where + ": bad frame_index");
    }
    if (!text::parse_double(fields[cols.timestamp_s], frame.timestamp_s)) {
      throw SchemaError(where + ": bad timestamp_s");
    }
    const std::string_view face = fields[cols.face_detected];
    if (face != "0" && face != "1") throw SchemaError(where + ": face_detected must be 0 or 1");

    if (face == "1") {
      std::array<double, kAuCount> scores{};
      for (std::size_t i = 0; i < kAuCount; ++i) {
        const std::string_view cell = fields[cols.au[i]];
        if (cell.empty()) {
          throw ValidationError(where + ": missing " + std::string(kAuColumns[i]) +
                                " on a face_detected row");
        }
        if (!text::parse_double(cell, scores[i])) {
          throw SchemaError(where + ": bad number in " + std::string(kAuColumns[i]));
        }
      }
      try {
        frame.aus.emplace(scores);
      } catch (const ValidationError& e) {
        throw ValidationError(where + ": " + e.what());
      }
    } else {
      for (std::size_t i = 0; i < kAuCount; ++i) {
        if (!fields[cols.au[i]].empty()) {
          throw ValidationError(where + ": AU value present on a row without a face");
        }
      }
    }

    auto [it, inserted] = pending.try_emplace(video_id);
    PendingVideo& pv = it->second;
    if (inserted) {
      order.push_back(video_id);
      pv.ad_id = ad_id;
    } else {
      if (pv.ad_id != ad_id) {
        throw ValidationError(where + ": video '" + video_id + "' switches ad_id");
      }
      const AuFrame& prev = pv.frames.back();
      if (frame.frame_index <= prev.frame_index) {
        throw ValidationError(where + ": video '" + video_id + "' frame_index " +
                              std::to_string(frame.frame_index) + " after " +
                              std::to_string(prev.frame_index));
      }
    }
    pv.frames.push_back(std::move(frame));
  }

  std::vector<VideoRecord> videos;
  videos.reserve(order.size());
  for (const std::string& id : order) {
    PendingVideo& pv = pending.at(id);
    try {
      videos.emplace_back(id, std::move(pv.ad_id), std::move(pv.frames));
    } catch (const ValidationError& e) {
      throw ValidationError(source + ": " + e.what());
    }
  }
  return videos;
}

std::vector<VideoRecord> parse_au_stream(const std::filesystem::path& path) {
  return parse_au_stream_text(text::read_file(path), path.string());
}

std::string serialize_au_stream(const std::vector<VideoRecord>& videos) {
  std::string out = "video_id,ad_id,frame_index,timestamp_s,face_detected";
  for (std::string_view col : kAuColumns) {
    out += ',';
    out += col;
  }
  out += '\n';
  for (const VideoRecord& v : videos) {
    for (const AuFrame& f : v.frames()) {
      out += v.video_id();
      out += ',';
      out += v.ad_id();
      out += ',';
      out += std::to_string(f.frame_index);
      out += ',';
      out += text::format_double(f.timestamp_s);
      out += f.face_detected() ? ",1" : ",0";
      for (std::size_t i = 0; i < kAuCount; ++i) {
        out += ',';
        if (f.aus) out += text::format_double((*f.aus)[i]);
      }
      out += '\n';
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// Dataset directories

Dataset load_dataset(const std::filesystem::path& dir) {
  namespace fs = std::filesystem;
  AdMap ads = parse_ad_annotations(dir / "annotations.json");

  const fs::path streams = dir / "streams";
  std::error_code ec;
  if (!fs::is_directory(streams, ec)) {
    throw IoError("missing stream directory '" + streams.string() + "'");
  }
  std::vector<fs::path> files;
  for (const auto& entry : fs::directory_iterator(streams)) {
    if (entry.is_regular_file() && entry.path().extension() == ".csv") files.push_back(entry.path());
  }
  std::sort(files.begin(), files.end());

  std::vector<VideoRecord> videos;
  for (const fs::path& f : files) {
    auto part = parse_au_stream(f);
    videos.insert(videos.end(), std::make_move_iterator(part.begin()),
                  std::make_move_iterator(part.end()));
  }
  return Dataset(std::move(ads), std::move(videos));
}

void write_dataset(const Dataset& dataset, const std::filesystem::path& dir) {
  text::write_file(dir / "annotations.json", serialize_ad_annotations(dataset.ads()));
  std::map<std::string, std::vector<VideoRecord>> by_ad;
  for (const VideoRecord& v : dataset.videos()) by_ad[v.ad_id()].push_back(v);
  for (const auto& [ad_id, videos] : by_ad) {
    text::write_file(dir / "streams" / (ad_id + ".csv"), serialize_au_stream(videos));
  }
}

// ---------------------------------------------------------------------------
// Coverage filter

double face_coverage(const VideoRecord& video) {
  const auto& frames = video.frames();
  const auto detected = std::count_if(frames.begin(), frames.end(),
                                      [](const AuFrame& f) { return f.face_detected(); });
  return static_cast<double>(detected) / static_cast<double>(frames.size());
}

CoverageSplit filter_by_coverage(std::vector<VideoRecord> videos, double min_coverage) {
  CoverageSplit split;
  for (VideoRecord& v : videos) {
    if (face_coverage(v) >= min_coverage) {
      split.kept.push_back(std::move(v));
    } else {
      split.dropped_ids.push_back(v.video_id());
    }
  }
  return split;
}

}  // namespace sentipipe
