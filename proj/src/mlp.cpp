#include "sentipipe/mlp.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <json.hpp>

#include "sentipipe/errors.hpp"
#include "sentipipe/rng.hpp"
#include "sentipipe/text_format.hpp"

namespace sentipipe {

using json = nlohmann::json;

namespace {

double sigmoid(double z) {
  if (z >= 0.0) return 1.0 / (1.0 + std::exp(-z));
  const double e = std::exp(z);
  return e / (1.0 + e);
}

struct Activations {
  std::array<double, kHiddenUnits> hidden;
  double output;  // unclamped sigmoid
};

Activations run(const MlpParams& p, std::span<const double, kAuCount> x) {
  Activations a{};
  double z2 = p.b2();
  for (std::size_t h = 0; h < kHiddenUnits; ++h) {
    double z1 = p.b1(h);
    for (std::size_t i = 0; i < kAuCount; ++i) z1 += p.w1(h, i) * x[i];
    a.hidden[h] = sigmoid(z1);
    z2 += p.w2(h) * a.hidden[h];
  }
  a.output = sigmoid(z2);
  return a;
}

// Adds the per-example gradient into `grad`, returns the loss.
double accumulate(const MlpParams& p, std::span<const double, kAuCount> x, int label, MlpParams& grad) {
  const Activations a = run(p, x);
  const double delta2 = a.output - static_cast<double>(label);
  grad.b2() += delta2;
  for (std::size_t h = 0; h < kHiddenUnits; ++h) {
    grad.w2(h) += delta2 * a.hidden[h];
    const double delta1 = delta2 * p.w2(h) * a.hidden[h] * (1.0 - a.hidden[h]);
    grad.b1(h) += delta1;
    for (std::size_t i = 0; i < kAuCount; ++i) grad.w1(h, i) += delta1 * x[i];
  }
  return bce_loss(a.output, label);
}

}  // namespace

bool MlpParams::all_finite() const {
  return std::all_of(values_.begin(), values_.end(), [](double v) { return std::isfinite(v); });
}

MlpParams init_params(std::uint64_t seed) {
  Rng rng(seed);
  MlpParams p;
  const double limit1 = std::sqrt(6.0 / static_cast<double>(kAuCount + kHiddenUnits));
  const double limit2 = std::sqrt(6.0 / static_cast<double>(kHiddenUnits + 1));
  for (std::size_t h = 0; h < kHiddenUnits; ++h) {
    for (std::size_t i = 0; i < kAuCount; ++i) p.w1(h, i) = rng.uniform(-limit1, limit1);
  }
  for (std::size_t h = 0; h < kHiddenUnits; ++h) p.w2(h) = rng.uniform(-limit2, limit2);
  return p;
}

double forward(const MlpParams& params, std::span<const double, kAuCount> x) {
  const double p = run(params, x).output;
  return std::clamp(p, std::numeric_limits<double>::min(), std::nextafter(1.0, 0.0));
}

double bce_loss(double score, int label) {
  const double p = std::clamp(score, kBceClamp, 1.0 - kBceClamp);
  return label == 1 ? -std::log(p) : -std::log1p(-p);
}

LossGradient backward(const MlpParams& params, std::span<const double, kAuCount> x, int label) {
  LossGradient out{0.0, MlpParams{}};
  out.loss = accumulate(params, x, label, out.gradient);
  return out;
}

void TrainConfig::validate() const {
  if (epochs < 1) throw ConfigError("epochs must be >= 1");
  if (!(learning_rate > 0.0) || !std::isfinite(learning_rate)) {
    throw ConfigError("learning_rate must be > 0");
  }
  if (batch_size < 1) throw ConfigError("batch_size must be >= 1");
  if (!(adam_beta1 > 0.0 && adam_beta1 < 1.0)) throw ConfigError("adam_beta1 must lie in (0,1)");
  if (!(adam_beta2 > 0.0 && adam_beta2 < 1.0)) throw ConfigError("adam_beta2 must lie in (0,1)");
  if (!(adam_epsilon > 0.0)) throw ConfigError("adam_epsilon must be > 0");
  if (!(holdout_fraction >= 0.0 && holdout_fraction < 1.0)) {
    throw ConfigError("holdout_fraction must lie in [0,1)");
  }
}

void adam_step(MlpParams& params, const MlpParams& grads, AdamState& state, const TrainConfig& config) {
  ++state.step;
  const double b1 = config.adam_beta1;
  const double b2 = config.adam_beta2;
  const double t = static_cast<double>(state.step);
  const double correction1 = 1.0 - std::pow(b1, t);
  const double correction2 = 1.0 - std::pow(b2, t);

  auto p = params.flat();
  auto g = grads.flat();
  auto m = state.first_moment.flat();
  auto v = state.second_moment.flat();
  for (std::size_t k = 0; k < kParamCount; ++k) {
    m[k] = b1 * m[k] + (1.0 - b1) * g[k];
    v[k] = b2 * v[k] + (1.0 - b2) * g[k] * g[k];
    const double m_hat = m[k] / correction1;
    const double v_hat = v[k] / correction2;
    p[k] -= config.learning_rate * m_hat / (std::sqrt(v_hat) + config.adam_epsilon);
  }
}

std::vector<std::size_t> epoch_indices(std::span<const LabeledExample> examples,
                                       std::span<const std::size_t> pool, bool oversample, Rng& rng) {
  std::vector<std::size_t> epoch(pool.begin(), pool.end());
  if (oversample) {
    std::vector<std::size_t> pos, neg;
    for (std::size_t i : pool) (examples[i].positive() ? pos : neg).push_back(i);
    const auto& minority = pos.size() < neg.size() ? pos : neg;
    const std::size_t deficit = std::max(pos.size(), neg.size()) - minority.size();
    if (!minority.empty()) {
      for (std::size_t k = 0; k < deficit; ++k) epoch.push_back(minority[rng.below(minority.size())]);
    }
  }
  rng.shuffle(std::span<std::size_t>(epoch));
  return epoch;
}

TrainResult train(std::span<const LabeledExample> examples, const TrainConfig& config) {
  config.validate();
  // Separate stream from the one init_params draws from.
  Rng rng(config.rng_seed ^ 0x9E3779B97F4A7C15ULL);
  TrainResult result;
  result.params = init_params(config.rng_seed);

  std::vector<std::size_t> order(examples.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;

  std::vector<std::size_t> holdout;
  if (config.holdout_fraction > 0.0) {
    rng.shuffle(std::span<std::size_t>(order));
    const auto n_hold = static_cast<std::size_t>(config.holdout_fraction * static_cast<double>(order.size()));
    holdout.assign(order.end() - static_cast<std::ptrdiff_t>(n_hold), order.end());
    order.resize(order.size() - n_hold);
    std::sort(order.begin(), order.end());
  }

  std::vector<std::size_t> pos, neg;
  for (std::size_t i : order) (examples[i].positive() ? pos : neg).push_back(i);
  result.positives = pos.size();
  result.negatives = neg.size();
  if (pos.empty() || neg.empty()) {
    throw DegenerateTrainingSet("training set has " + std::to_string(pos.size()) + " positives and " +
                                std::to_string(neg.size()) + " negatives; both classes are required");
  }

  AdamState adam;
  const auto batch = static_cast<std::size_t>(config.batch_size);
  for (int e = 0; e < config.epochs; ++e) {
    const std::vector<std::size_t> epoch = epoch_indices(examples, order, config.oversample_positives, rng);

    double loss_sum = 0.0;
    for (std::size_t start = 0; start < epoch.size(); start += batch) {
      const std::size_t end = std::min(start + batch, epoch.size());
      MlpParams grad;
      for (std::size_t j = start; j < end; ++j) {
        const LabeledExample& ex = examples[epoch[j]];
        loss_sum += accumulate(result.params, ex.aus.span(), ex.positive() ? 1 : 0, grad);
      }
      const double scale = 1.0 / static_cast<double>(end - start);
      for (double& g : grad.flat()) g *= scale;
      adam_step(result.params, grad, adam, config);
    }
    result.epoch_losses.push_back(loss_sum / static_cast<double>(epoch.size()));
  }

  if (!holdout.empty()) {
    HoldoutReport report;
    report.count = holdout.size();
    std::size_t correct = 0;
    for (std::size_t i : holdout) {
      const LabeledExample& ex = examples[i];
      const double p = forward(result.params, ex.aus);
      report.mean_loss += bce_loss(p, ex.positive() ? 1 : 0);
      if ((p >= 0.5) == ex.positive()) ++correct;
    }
    report.mean_loss /= static_cast<double>(holdout.size());
    report.accuracy = static_cast<double>(correct) / static_cast<double>(holdout.size());
    result.holdout = report;
  }
  return result;
}

double accuracy(const MlpParams& params, std::span<const LabeledExample> examples) {
  if (examples.empty()) return 0.0;
  std::size_t correct = 0;
  for (const LabeledExample& ex : examples) {
    if ((forward(params, ex.aus) >= 0.5) == ex.positive()) ++correct;
  }
  return static_cast<double>(correct) / static_cast<double>(examples.size());
}

// ---------------------------------------------------------------------------
// Model files

std::string serialize_model(const MlpParams& params) {
  const auto row = [](auto&& get, std::size_t n) {
    std::string s = "[";
    for (std::size_t i = 0; i < n; ++i) {
      if (i > 0) s += ", ";
      s += text::format_double(get(i));
    }
    return s + "]";
  };
  std::string out = "{\n  \"format\": \"" + std::string(kModelFormat) + "\",\n  \"w1\": [\n";
  for (std::size_t h = 0; h < kHiddenUnits; ++h) {
    out += "    " + row([&](std::size_t i) { return params.w1(h, i); }, kAuCount);
    out += h + 1 < kHiddenUnits ? ",\n" : "\n";
  }
  out += "  ],\n  \"b1\": " + row([&](std::size_t h) { return params.b1(h); }, kHiddenUnits);
  out += ",\n  \"w2\": [" + row([&](std::size_t h) { return params.w2(h); }, kHiddenUnits) + "]";
  out += ",\n  \"b2\": [" + text::format_double(params.b2()) + "]";
  out += ",\n  \"au_order\": [";
  for (std::size_t i = 0; i < kAuCount; ++i) {
    if (i > 0) out += ", ";
    out += "\"" + std::string(kAuNames[i]) + "\"";
  }
  out += "]\n}\n";
  return out;
}

namespace {

std::vector<double> numbers(const json& doc, const char* field, std::size_t n, const std::string& where) {
  const json& arr = doc.at(field);
  if (!arr.is_array() || arr.size() != n) {
    throw SchemaError(where + ": '" + field + "' must hold " + std::to_string(n) + " numbers");
  }
  std::vector<double> out;
  for (const json& v : arr) {
    if (!v.is_number()) throw SchemaError(where + ": '" + field + "' must hold numbers");
    out.push_back(v.get<double>());
  }
  return out;
}

}  // namespace

MlpParams parse_model_text(std::string_view json_text, const std::string& source) {
  json doc;
  try {
    doc = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw SchemaError(source + ": " + e.what());
  }
  if (!doc.is_object()) throw SchemaError(source + ": model must be a JSON object");
  for (const char* field : {"format", "w1", "b1", "w2", "b2", "au_order"}) {
    if (!doc.contains(field)) throw SchemaError(source + ": missing field '" + field + "'");
  }
  if (doc["format"] != kModelFormat) {
    throw SchemaError(source + ": unsupported format, expected " + std::string(kModelFormat));
  }
  const json& order = doc["au_order"];
  if (!order.is_array() || order.size() != kAuCount) throw SchemaError(source + ": bad au_order");
  for (std::size_t i = 0; i < kAuCount; ++i) {
    if (!order[i].is_string() || order[i].get<std::string>() != kAuNames[i]) {
      throw SchemaError(source + ": au_order differs from the canonical AU order");
    }
  }

  MlpParams p;
  const json& w1 = doc["w1"];
  if (!w1.is_array() || w1.size() != kHiddenUnits) {
    throw SchemaError(source + ": 'w1' must be 8x20");
  }
  for (std::size_t h = 0; h < kHiddenUnits; ++h) {
    const json row = json{{"r", w1[h]}};
    const auto values = numbers(row, "r", kAuCount, source + " w1[" + std::to_string(h) + "]");
    for (std::size_t i = 0; i < kAuCount; ++i) p.w1(h, i) = values[i];
  }
  const auto b1 = numbers(doc, "b1", kHiddenUnits, source);
  const json& w2 = doc["w2"];
  if (!w2.is_array() || w2.size() != 1) throw SchemaError(source + ": 'w2' must be 1x8");
  const auto w2_row = numbers(json{{"r", w2[0]}}, "r", kHiddenUnits, source + " w2[0]");
  const auto b2 = numbers(doc, "b2", 1, source);
  for (std::size_t h = 0; h < kHiddenUnits; ++h) {
    p.b1(h) = b1[h];
    p.w2(h) = w2_row[h];
  }
  p.b2() = b2[0];
  if (!p.all_finite()) throw SchemaError(source + ": non-finite parameter");
  return p;
}

void save_model(const MlpParams& params, const std::filesystem::path& path) {
  text::write_file(path, serialize_model(params));
}

MlpParams load_model(const std::filesystem::path& path) {
  return parse_model_text(text::read_file(path), path.string());
}

std::string serialize_loss_trace(std::span<const double> epoch_losses) {
  std::string out = "epoch,mean_loss\n";
  for (std::size_t e = 0; e < epoch_losses.size(); ++e) {
    out += std::to_string(e + 1) + "," + text::format_double(epoch_losses[e]) + "\n";
  }
  return out;
}

}  // namespace sentipipe
