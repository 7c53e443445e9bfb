#pragma once

// Seeded synthetic datasets with a planted sentimentality signal.
//
// Every ad lasts ad_duration_s and is watched by participants_per_ad
// participants filmed at fps. Outside the planted signal each AU score is
// noise_level * (1 - U^(1/3)) (density 3(1-x)^2, mode at zero), replaced with
// probability incidental_activation_prob by an incidental activation drawn
// uniformly from [0.5, 1]. In sentimental ads a responder_fraction of the
// participants add signal_strength to every signal AU (clipped to 1) while a
// moment is playing. Faces drop out per frame with face_dropout_prob, or
// distracted_dropout_prob for the distracted_fraction of participants.

#include <cstddef>
#include <cstdint>
#include <vector>

#include "sentipipe/core.hpp"
#include "sentipipe/ingest.hpp"

namespace sentipipe {

struct SynthConfig {
  int n_train_sent_ads = 3;
  int n_test_sent_ads = 15;
  int n_test_nonsent_ads = 15;
  int participants_per_ad = 40;
  double ad_duration_s = 60.0;
  double fps = 5.0;
  int min_moments_per_ad = 1;
  int max_moments_per_ad = 2;
  // Share of each sentimental ad covered by its moments.
  double moment_coverage = 0.5;
  std::vector<std::size_t> signal_aus = {canonical_au_index("Smile"), canonical_au_index("AU1"),
                                         canonical_au_index("AU6")};
  double signal_strength = 0.8;
  double responder_fraction = 0.4;
  double noise_level = 0.1;
  double incidental_activation_prob = 0.03;
  double face_dropout_prob = 0.02;
  double distracted_fraction = 0.05;
  double distracted_dropout_prob = 0.3;
  std::uint64_t rng_seed = 0;

  /// Throws ConfigError on out-of-range fields.
  void validate() const;
};

struct SyntheticDataset {
  Dataset train;  // sentimental ads only
  Dataset test;   // sentimental and non-sentimental ads

  friend bool operator==(const SyntheticDataset&, const SyntheticDataset&) = default;
};

SyntheticDataset generate(const SynthConfig& config);

/// Same layout and annotations, signal_strength forced to zero.
SyntheticDataset generate_null(const SynthConfig& config);

}  // namespace sentipipe
