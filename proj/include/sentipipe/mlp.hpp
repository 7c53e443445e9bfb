#pragma once

// The 20 -> 8 -> 1 sentimentality classifier: sigmoid hidden layer, sigmoid
// output, binary cross-entropy loss, analytic backpropagation and Adam.
// Everything runs in double precision and is deterministic for a given seed.

#include <array>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "sentipipe/core.hpp"
#include "sentipipe/rng.hpp"

namespace sentipipe {

inline constexpr std::size_t kHiddenUnits = 8;
inline constexpr std::size_t kParamCount = kHiddenUnits * kAuCount + kHiddenUnits + kHiddenUnits + 1;

// Flat parameter storage, laid out as w1 (row-major 8x20), b1 (8), w2 (8), b2.
// Gradients and Adam moments share the same type and layout.
class MlpParams {
 public:
  MlpParams() = default;  // all zeros

  double& w1(std::size_t hidden, std::size_t input) { return values_[hidden * kAuCount + input]; }
  double w1(std::size_t hidden, std::size_t input) const { return values_[hidden * kAuCount + input]; }
  double& b1(std::size_t hidden) { return values_[kB1Offset + hidden]; }
  double b1(std::size_t hidden) const { return values_[kB1Offset + hidden]; }
  double& w2(std::size_t hidden) { return values_[kW2Offset + hidden]; }
  double w2(std::size_t hidden) const { return values_[kW2Offset + hidden]; }
  double& b2() { return values_[kB2Offset]; }
  double b2() const { return values_[kB2Offset]; }

  std::span<double, kParamCount> flat() { return values_; }
  std::span<const double, kParamCount> flat() const { return values_; }

  bool all_finite() const;

  friend bool operator==(const MlpParams&, const MlpParams&) = default;

 private:
  static constexpr std::size_t kB1Offset = kHiddenUnits * kAuCount;
  static constexpr std::size_t kW2Offset = kB1Offset + kHiddenUnits;
  static constexpr std::size_t kB2Offset = kW2Offset + kHiddenUnits;

  std::array<double, kParamCount> values_{};
};

/// Glorot-uniform weights, zero biases.
MlpParams init_params(std::uint64_t seed);

/// Network output, kept strictly inside (0,1).
double forward(const MlpParams& params, std::span<const double, kAuCount> x);
inline double forward(const MlpParams& params, const AuVector& aus) {
  return forward(params, aus.span());
}

inline constexpr double kBceClamp = 1e-12;

/// -[y ln p + (1-y) ln(1-p)] with p clamped to [1e-12, 1 - 1e-12].
double bce_loss(double score, int label);

struct LossGradient {
  double loss;
  MlpParams gradient;
};

/// Loss and its exact gradient for one example.
LossGradient backward(const MlpParams& params, std::span<const double, kAuCount> x, int label);
inline LossGradient backward(const MlpParams& params, const AuVector& aus, int label) {
  return backward(params, aus.span(), label);
}

struct TrainConfig {
  int epochs = 100;
  double learning_rate = 1e-3;
  int batch_size = 64;
  double adam_beta1 = 0.9;
  double adam_beta2 = 0.999;
  double adam_epsilon = 1e-8;
  bool oversample_positives = true;
  std::uint64_t rng_seed = 0;
  // Fraction of examples held out for reporting, not trained on.
  double holdout_fraction = 0.0;

  /// Throws ConfigError when any field is out of range.
  void validate() const;
};

struct AdamState {
  MlpParams first_moment;
  MlpParams second_moment;
  std::uint64_t step = 0;
};

/// One bias-corrected Adam update in place; increments state.step.
void adam_step(MlpParams& params, const MlpParams& grads, AdamState& state, const TrainConfig& config);

struct HoldoutReport {
  std::size_t count = 0;
  double mean_loss = 0.0;
  double accuracy = 0.0;
};

struct TrainResult {
  MlpParams params;
  std::vector<double> epoch_losses;
  std::size_t positives = 0;
  std::size_t negatives = 0;
  std::optional<HoldoutReport> holdout;
};

/// Shuffled example indices for one epoch drawn from `pool`. With
/// `oversample` the minority class is topped up by draws with replacement
/// until both classes appear equally often.
std::vector<std::size_t> epoch_indices(std::span<const LabeledExample> examples,
                                       std::span<const std::size_t> pool, bool oversample, Rng& rng);

/// Minibatch Adam on BCE. With oversample_positives the minority class is
/// resampled with replacement every epoch until both classes contribute the
/// same number of examples. Throws DegenerateTrainingSet on single-class input.
TrainResult train(std::span<const LabeledExample> examples, const TrainConfig& config);

/// Fraction of examples classified correctly at the 0.5 cut.
double accuracy(const MlpParams& params, std::span<const LabeledExample> examples);

inline constexpr std::string_view kModelFormat = "sentipipe-mlp-v1";

// Model file: {"format": "sentipipe-mlp-v1", "w1": [[20] x 8], "b1": [8],
//              "w2": [[8]], "b2": [1], "au_order": [20 names]}
std::string serialize_model(const MlpParams& params);
MlpParams parse_model_text(std::string_view json_text, const std::string& source = "<memory>");
void save_model(const MlpParams& params, const std::filesystem::path& path);
MlpParams load_model(const std::filesystem::path& path);

/// "epoch,mean_loss" CSV, epochs numbered from 1.
std::string serialize_loss_trace(std::span<const double> epoch_losses);

}  // namespace sentipipe
