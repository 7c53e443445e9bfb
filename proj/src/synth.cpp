#include "sentipipe/synth.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <string>

#include "sentipipe/errors.hpp"
#include "sentipipe/rng.hpp"

namespace sentipipe {

namespace {

bool is_probability(double p) { return p >= 0.0 && p <= 1.0; }

std::string numbered(const char* prefix, int i) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%s_%02d", prefix, i);
  return buf;
}

std::vector<Interval> place_moments(const SynthConfig& c, Rng& rng) {
  const int span = c.max_moments_per_ad - c.min_moments_per_ad + 1;
  const int count = c.min_moments_per_ad + static_cast<int>(rng.below(static_cast<std::uint64_t>(span)));
  const double segment = c.ad_duration_s / count;
  const double length = c.moment_coverage * c.ad_duration_s / count;
  std::vector<Interval> moments;
  for (int m = 0; m < count; ++m) {
    const double seg_start = segment * m;
    // Whole-second starts, as human labellers mark them.
    double start = std::floor(seg_start + rng.uniform() * (segment - length));
    if (start < seg_start) start = seg_start;
    moments.emplace_back(start, std::min(start + length, c.ad_duration_s));
  }
  return moments;
}

double noise_score(const SynthConfig& c, Rng& rng) {
  if (rng.bernoulli(c.incidental_activation_prob)) return rng.uniform(0.5, 1.0);
  return c.noise_level * (1.0 - std::cbrt(rng.uniform()));
}

VideoRecord simulate_participant(const SynthConfig& c, const AdSpec& ad, const std::string& video_id,
                                 Rng& rng) {
  const bool responder = ad.sentimental() && rng.bernoulli(c.responder_fraction);
  const bool distracted = rng.bernoulli(c.distracted_fraction);
  const double dropout = distracted ? c.distracted_dropout_prob : c.face_dropout_prob;

  std::vector<bool> is_signal(kAuCount, false);
  for (std::size_t k : c.signal_aus) is_signal[k] = true;

  const auto n_frames = static_cast<std::uint64_t>(std::ceil(c.ad_duration_s * c.fps));
  std::vector<AuFrame> frames;
  frames.reserve(n_frames);
  for (std::uint64_t i = 0; i < n_frames; ++i) {
    AuFrame f;
    f.frame_index = i;
    f.timestamp_s = static_cast<double>(i) / c.fps;
    if (f.timestamp_s >= c.ad_duration_s) break;
    if (!rng.bernoulli(dropout)) {
      const bool expressing = responder && std::any_of(ad.moments().begin(), ad.moments().end(),
                                                       [&](const Interval& m) { return m.contains(f.timestamp_s); });
      std::array<double, kAuCount> scores{};
      for (std::size_t k = 0; k < kAuCount; ++k) {
        scores[k] = noise_score(c, rng);
        if (expressing && is_signal[k]) scores[k] = std::min(1.0, scores[k] + c.signal_strength);
      }
      f.aus.emplace(scores);
    }
    frames.push_back(std::move(f));
  }
  return VideoRecord(video_id, ad.ad_id(), std::move(frames));
}

Dataset simulate_ads(const SynthConfig& c, Rng& rng, const std::vector<std::pair<std::string, AdLabel>>& ads) {
  AdMap specs;
  std::vector<VideoRecord> videos;
  for (const auto& [ad_id, label] : ads) {
    std::vector<Interval> moments;
    if (label == AdLabel::Sentimental) moments = place_moments(c, rng);
    AdSpec ad(ad_id, label, c.ad_duration_s, std::move(moments));
    for (int p = 0; p < c.participants_per_ad; ++p) {
      videos.push_back(simulate_participant(c, ad, numbered((ad_id + "_p").c_str(), p), rng));
    }
    specs.emplace(ad_id, std::move(ad));
  }
  return Dataset(std::move(specs), std::move(videos));
}

}  // namespace

void SynthConfig::validate() const {
  if (n_train_sent_ads < 1 || n_test_sent_ads < 1 || n_test_nonsent_ads < 1) {
    throw ConfigError("ad counts must be >= 1");
  }
  if (participants_per_ad < 1) throw ConfigError("participants_per_ad must be >= 1");
  if (!(ad_duration_s > 0.0) || !std::isfinite(ad_duration_s)) throw ConfigError("ad_duration_s must be > 0");
  if (!(fps > 0.0) || !std::isfinite(fps)) throw ConfigError("fps must be > 0");
  if (min_moments_per_ad < 1 || max_moments_per_ad < min_moments_per_ad) {
    throw ConfigError("need 1 <= min_moments_per_ad <= max_moments_per_ad");
  }
  if (!(moment_coverage > 0.0 && moment_coverage < 1.0)) throw ConfigError("moment_coverage must lie in (0,1)");
  if (signal_aus.empty()) throw ConfigError("signal_aus must not be empty");
  for (std::size_t k : signal_aus) {
    if (k >= kAuCount) throw ConfigError("signal AU index out of range");
  }
  for (double p : {signal_strength, responder_fraction, incidental_activation_prob, face_dropout_prob,
                   distracted_fraction, distracted_dropout_prob}) {
    if (!is_probability(p)) throw ConfigError("probabilities and signal_strength must lie in [0,1]");
  }
  if (!(noise_level >= 0.0 && noise_level <= 1.0)) throw ConfigError("noise_level must lie in [0,1]");
}

SyntheticDataset generate(const SynthConfig& config) {
  config.validate();
  Rng rng(config.rng_seed);

  std::vector<std::pair<std::string, AdLabel>> train_ads, test_ads;
  for (int i = 0; i < config.n_train_sent_ads; ++i) {
    train_ads.emplace_back(numbered("train_sent", i), AdLabel::Sentimental);
  }
  for (int i = 0; i < config.n_test_sent_ads; ++i) {
    test_ads.emplace_back(numbered("test_sent", i), AdLabel::Sentimental);
  }
  for (int i = 0; i < config.n_test_nonsent_ads; ++i) {
    test_ads.emplace_back(numbered("test_nonsent", i), AdLabel::NonSentimental);
  }

  SyntheticDataset out;
  out.train = simulate_ads(config, rng, train_ads);
  out.test = simulate_ads(config, rng, test_ads);
  return out;
}

SyntheticDataset generate_null(const SynthConfig& config) {
  SynthConfig null_config = config;
  null_config.signal_strength = 0.0;
  return generate(null_config);
}

}  // namespace sentipipe
