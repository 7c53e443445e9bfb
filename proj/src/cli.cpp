#include "sentipipe/cli.hpp"

#include <filesystem>
#include <limits>
#include <optional>
#include <ostream>
#include <sstream>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "sentipipe/aggregate.hpp"
#include "sentipipe/errors.hpp"
#include "sentipipe/ingest.hpp"
#include "sentipipe/metrics.hpp"
#include "sentipipe/mlp.hpp"
#include "sentipipe/svg.hpp"
#include "sentipipe/synth.hpp"
#include "sentipipe/text_format.hpp"
#include "sentipipe/weak_label.hpp"

namespace sentipipe {

namespace fs = std::filesystem;
using json = nlohmann::ordered_json;

namespace {

struct Settings {
  std::uint64_t seed = 0;
  double min_coverage = kDefaultMinCoverage;
  double step_s = kDefaultStepS;
  LabelingConfig labeling;
  TrainConfig training;
  SynthConfig synth;
  KpiConfig kpi;
  bool null_data = false;
};

template <typename T>
T config_value(const nlohmann::json& v, const std::string& key) {
  try {
    return v.get<T>();
  } catch (const nlohmann::json::exception&) {
    throw ConfigError("config key '" + key + "' has the wrong type");
  }
}

std::vector<std::size_t> au_list(const std::vector<std::string>& names) {
  std::vector<std::size_t> out;
  for (const std::string& n : names) {
    try {
      out.push_back(canonical_au_index(n));
    } catch (const UnknownAuName& e) {
      throw ConfigError(e.what());
    }
  }
  return out;
}

void apply_synth_config(SynthConfig& s, const nlohmann::json& obj) {
  if (!obj.is_object()) throw ConfigError("config key 'synth' must be an object");
  for (const auto& [key, v] : obj.items()) {
    if (key == "n_train_sent_ads") s.n_train_sent_ads = config_value<int>(v, key);
    else if (key == "n_test_sent_ads") s.n_test_sent_ads = config_value<int>(v, key);
    else if (key == "n_test_nonsent_ads") s.n_test_nonsent_ads = config_value<int>(v, key);
    else if (key == "participants_per_ad") s.participants_per_ad = config_value<int>(v, key);
    else if (key == "ad_duration_s") s.ad_duration_s = config_value<double>(v, key);
    else if (key == "fps") s.fps = config_value<double>(v, key);
    else if (key == "min_moments_per_ad") s.min_moments_per_ad = config_value<int>(v, key);
    else if (key == "max_moments_per_ad") s.max_moments_per_ad = config_value<int>(v, key);
    else if (key == "moment_coverage") s.moment_coverage = config_value<double>(v, key);
    else if (key == "signal_aus") s.signal_aus = au_list(config_value<std::vector<std::string>>(v, key));
    else if (key == "signal_strength") s.signal_strength = config_value<double>(v, key);
    else if (key == "responder_fraction") s.responder_fraction = config_value<double>(v, key);
    else if (key == "noise_level") s.noise_level = config_value<double>(v, key);
    else if (key == "incidental_activation_prob") s.incidental_activation_prob = config_value<double>(v, key);
    else if (key == "face_dropout_prob") s.face_dropout_prob = config_value<double>(v, key);
    else if (key == "distracted_fraction") s.distracted_fraction = config_value<double>(v, key);
    else if (key == "distracted_dropout_prob") s.distracted_dropout_prob = config_value<double>(v, key);
    else throw ConfigError("unknown config key 'synth." + key + "'");
  }
}

// JSON config overrides the defaults; explicit flags override the config.
void apply_config_file(Settings& s, const fs::path& path) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(text::read_file(path));
  } catch (const nlohmann::json::parse_error& e) {
    throw ConfigError(path.string() + ": " + e.what());
  }
  if (!doc.is_object()) throw ConfigError(path.string() + ": config must be a JSON object");
  for (const auto& [key, v] : doc.items()) {
    if (key == "seed") s.seed = config_value<std::uint64_t>(v, key);
    else if (key == "threshold") s.labeling.activation_threshold = config_value<double>(v, key);
    else if (key == "min_active") s.labeling.min_active_positive = config_value<int>(v, key);
    else if (key == "nonsent_negatives") s.labeling.nonsentimental_ads_as_negatives = config_value<bool>(v, key);
    else if (key == "min_coverage") s.min_coverage = config_value<double>(v, key);
    else if (key == "step_s") s.step_s = config_value<double>(v, key);
    else if (key == "epochs") s.training.epochs = config_value<int>(v, key);
    else if (key == "learning_rate") s.training.learning_rate = config_value<double>(v, key);
    else if (key == "batch_size") s.training.batch_size = config_value<int>(v, key);
    else if (key == "oversample") s.training.oversample_positives = config_value<bool>(v, key);
    else if (key == "holdout_fraction") s.training.holdout_fraction = config_value<double>(v, key);
    else if (key == "guard_band_s") s.kpi.guard_band_s = config_value<double>(v, key);
    else if (key == "null") s.null_data = config_value<bool>(v, key);
    else if (key == "synth") apply_synth_config(s.synth, v);
    else throw ConfigError("unknown config key '" + key + "'");
  }
}

// Flag values; unset flags leave the config/default value alone.
struct Flags {
  std::optional<std::uint64_t> seed;
  std::optional<double> threshold, min_coverage, step_s;
  std::optional<std::string> config;
  std::string out, data, model, examples, curves, svg_dir, loss_trace;
  std::optional<int> min_active, epochs, batch_size, participants;
  std::optional<double> learning_rate, holdout, signal_strength, responder_fraction, noise_level, guard_band;
  std::optional<std::string> signal_aus;
  bool nonsent_negatives = false;
  bool no_oversample = false;
  bool null_data = false;
};

Settings resolve(const Flags& f) {
  Settings s;
  if (f.config) apply_config_file(s, *f.config);
  if (f.seed) s.seed = *f.seed;
  if (f.threshold) s.labeling.activation_threshold = *f.threshold;
  if (f.min_coverage) s.min_coverage = *f.min_coverage;
  if (f.step_s) s.step_s = *f.step_s;
  if (f.min_active) s.labeling.min_active_positive = *f.min_active;
  if (f.nonsent_negatives) s.labeling.nonsentimental_ads_as_negatives = true;
  if (f.epochs) s.training.epochs = *f.epochs;
  if (f.batch_size) s.training.batch_size = *f.batch_size;
  if (f.learning_rate) s.training.learning_rate = *f.learning_rate;
  if (f.holdout) s.training.holdout_fraction = *f.holdout;
  if (f.no_oversample) s.training.oversample_positives = false;
  if (f.guard_band) s.kpi.guard_band_s = *f.guard_band;
  if (f.participants) s.synth.participants_per_ad = *f.participants;
  if (f.signal_strength) s.synth.signal_strength = *f.signal_strength;
  if (f.responder_fraction) s.synth.responder_fraction = *f.responder_fraction;
  if (f.noise_level) s.synth.noise_level = *f.noise_level;
  if (f.signal_aus) {
    std::vector<std::string> names;
    std::stringstream ss(*f.signal_aus);
    for (std::string item; std::getline(ss, item, ',');) {
      if (!item.empty()) names.push_back(item);
    }
    s.synth.signal_aus = au_list(names);
  }
  if (f.null_data) s.null_data = true;
  s.synth.rng_seed = s.seed;
  s.training.rng_seed = s.seed;

  s.labeling.validate();
  s.training.validate();
  s.synth.validate();
  if (!(s.min_coverage >= 0.0 && s.min_coverage <= 1.0)) throw ConfigError("min_coverage must lie in [0,1]");
  if (!(s.step_s > 0.0)) throw ConfigError("step_s must be > 0");
  if (!(s.kpi.guard_band_s >= 0.0)) throw ConfigError("guard_band_s must be >= 0");
  return s;
}

json number_or_null(std::optional<double> v) {
  if (!v) return nullptr;
  if (std::isinf(*v)) return "inf";
  return *v;
}

struct FilteredData {
  Dataset dataset;
  std::vector<VideoRecord> kept;
  std::vector<std::string> dropped;
};

FilteredData load_filtered(const fs::path& dir, double min_coverage) {
  FilteredData f{load_dataset(dir), {}, {}};
  auto split = filter_by_coverage(f.dataset.videos(), min_coverage);
  f.kept = std::move(split.kept);
  f.dropped = std::move(split.dropped_ids);
  return f;
}

void write_svgs(std::span<const AggregateCurve> curves, const AdMap& ads, const fs::path& dir) {
  for (const AggregateCurve& c : curves) {
    text::write_file(dir / (c.ad_id() + ".svg"), render_curve_svg(c, ads.at(c.ad_id())));
  }
}

// --- subcommands -----------------------------------------------------------

json cmd_simulate(const Flags& f, std::ostream& out) {
  const Settings s = resolve(f);
  const SyntheticDataset data = s.null_data ? generate_null(s.synth) : generate(s.synth);
  const fs::path root(f.out);
  write_dataset(data.train, root / "train");
  write_dataset(data.test, root / "test");

  std::size_t sent = 0, nonsent = 0;
  for (const auto& [id, ad] : data.test.ads()) (ad.sentimental() ? sent : nonsent)++;
  out << "wrote " << data.train.ads().size() << " training ads and " << data.test.ads().size()
      << " test ads to " << root.string() << "\n";
  return {{"command", "simulate"},
          {"seed", s.seed},
          {"null", s.null_data},
          {"train_sentimental_ads", data.train.ads().size()},
          {"test_sentimental_ads", sent},
          {"test_nonsentimental_ads", nonsent},
          {"train_videos", data.train.videos().size()},
          {"test_videos", data.test.videos().size()}};
}

json cmd_label(const Flags& f, std::ostream& out) {
  const Settings s = resolve(f);
  const FilteredData data = load_filtered(f.data, s.min_coverage);
  const auto examples = extract_examples(data.kept, data.dataset.ads(), s.labeling);
  text::write_file(f.out, serialize_examples_jsonl(examples));
  const LabelSummary summary = label_summary(examples);
  out << "labeled " << examples.size() << " frames from " << data.kept.size() << " videos ("
      << data.dropped.size() << " dropped by coverage)\n";
  return {{"command", "label"},
          {"positives", summary.positives},
          {"negatives", summary.negatives},
          {"ratio", number_or_null(summary.ratio)},
          {"kept_videos", data.kept.size()},
          {"dropped_videos", data.dropped},
          {"threshold", s.labeling.activation_threshold},
          {"min_active", s.labeling.min_active_positive}};
}

json cmd_train(const Flags& f, std::ostream& out) {
  const Settings s = resolve(f);
  const auto examples = load_examples_jsonl(f.examples);
  const TrainResult result = train(examples, s.training);
  save_model(result.params, f.out);
  const fs::path trace = f.loss_trace.empty() ? fs::path(f.out).replace_extension(".loss.csv") : fs::path(f.loss_trace);
  text::write_file(trace, serialize_loss_trace(result.epoch_losses));

  const double acc = accuracy(result.params, examples);
  out << "trained " << s.training.epochs << " epochs on " << result.positives << " positives / "
      << result.negatives << " negatives, final loss " << result.epoch_losses.back() << "\n";
  json summary = {{"command", "train"},
                  {"seed", s.seed},
                  {"epochs", s.training.epochs},
                  {"positives", result.positives},
                  {"negatives", result.negatives},
                  {"first_epoch_loss", result.epoch_losses.front()},
                  {"final_epoch_loss", result.epoch_losses.back()},
                  {"training_accuracy", acc},
                  {"model", f.out},
                  {"loss_trace", trace.string()}};
  if (result.holdout) {
    summary["holdout"] = {{"count", result.holdout->count},
                          {"mean_loss", result.holdout->mean_loss},
                          {"accuracy", result.holdout->accuracy}};
  }
  return summary;
}

std::vector<AggregateCurve> model_curves(const MlpParams& model, const FilteredData& data, double step_s) {
  return aggregate_dataset(data.kept, data.dataset.ads(), step_s,
                           [&model](const AuVector& aus) { return forward(model, aus); });
}

json cmd_predict(const Flags& f, std::ostream& out) {
  const Settings s = resolve(f);
  const MlpParams model = load_model(f.model);
  const FilteredData data = load_filtered(f.data, s.min_coverage);
  const auto curves = model_curves(model, data, s.step_s);
  text::write_file(f.out, serialize_curves_csv(curves));
  if (!f.svg_dir.empty()) write_svgs(curves, data.dataset.ads(), f.svg_dir);
  out << "wrote " << curves.size() << " curves to " << f.out << "\n";
  return {{"command", "predict"},
          {"curves", curves.size()},
          {"kept_videos", data.kept.size()},
          {"dropped_videos", data.dropped.size()},
          {"step_s", s.step_s},
          {"aggregation", std::string(kAggregationWeighting)}};
}

json cmd_evaluate(const Flags& f, std::ostream& out) {
  const Settings s = resolve(f);
  const MlpParams model = load_model(f.model);
  const FilteredData data = load_filtered(f.data, s.min_coverage);
  const AdMap& ads = data.dataset.ads();

  const auto curves = model_curves(model, data, s.step_s);
  const KpiReport report = evaluate_curves(curves, ads, s.kpi);
  const auto per_au = single_au_baseline(data.kept, ads, s.step_s, s.kpi);
  const KpiReport chance = chance_baseline(data.kept, ads, s.step_s, s.kpi);

  const fs::path dir(f.out);
  text::write_file(dir / "kpi.json", serialize_kpi_json(report, s.step_s, s.kpi));
  text::write_file(dir / "table.csv", serialize_baseline_table_csv(chance, per_au, report));
  text::write_file(dir / "curves.csv", serialize_curves_csv(curves));

  std::size_t best_au = 0;
  for (std::size_t k = 1; k < kAuCount; ++k) {
    if (per_au[k].avg > per_au[best_au].avg) best_au = k;
  }
  out << "ROC-Ad " << text::format_fixed(report.roc_ad, 4) << "  ROC-Sent "
      << text::format_fixed(report.roc_sent, 4) << "  Avg " << text::format_fixed(report.avg, 4) << "\n";
  json baselines = json::object();
  for (std::size_t k = 0; k < kAuCount; ++k) {
    baselines[std::string(kAuNames[k])] = {{"roc_ad", per_au[k].roc_ad}, {"roc_sent", per_au[k].roc_sent}};
  }
  return {{"command", "evaluate"},
          {"roc_ad", report.roc_ad},
          {"roc_sent", report.roc_sent},
          {"avg", report.avg},
          {"chance", {{"roc_ad", chance.roc_ad}, {"roc_sent", chance.roc_sent}}},
          {"best_single_au", std::string(kAuNames[best_au])},
          {"single_au", std::move(baselines)},
          {"out", dir.string()}};
}

json cmd_export_curves(const Flags& f, std::ostream& out) {
  const AdMap ads = parse_ad_annotations(fs::path(f.data) / "annotations.json");
  const auto curves = parse_curves_csv(text::read_file(f.curves), ads, f.curves);
  write_svgs(curves, ads, f.out);
  out << "rendered " << curves.size() << " curves to " << f.out << "\n";
  return {{"command", "export-curves"}, {"svgs", curves.size()}, {"out", f.out}};
}

int exit_code_for(const Error& e) {
  switch (e.category()) {
    case Error::Category::Io: return kExitIo;
    case Error::Category::Validation: return kExitValidation;
    case Error::Category::Degenerate: return kExitDegenerate;
    case Error::Category::Usage: return kExitUsage;
  }
  return kExitValidation;
}

}  // namespace

int run_cli(std::span<const std::string> args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Sentimentality pipeline: simulate, label, train, predict, evaluate, export-curves", "sentipipe"};
  app.require_subcommand(1);
  Flags f;

  const auto common = [&f](CLI::App* sub) {
    sub->add_option("--seed", f.seed, "Seed for every random draw of this command");
    sub->add_option("--threshold", f.threshold, "AU activation threshold (score >= threshold is active)");
    sub->add_option("--min-coverage", f.min_coverage, "Minimum face coverage for a video to be kept");
    sub->add_option("--step-s", f.step_s, "Curve bin width in seconds");
    sub->add_option("--config", f.config, "JSON file overriding defaults");
  };

  auto* simulate = app.add_subcommand("simulate", "Generate a synthetic dataset (train/ and test/)");
  common(simulate);
  simulate->add_option("--out", f.out, "Output directory")->required();
  simulate->add_flag("--null", f.null_data, "Zero signal strength (chance-level control)");
  simulate->add_option("--participants", f.participants, "Participants per ad");
  simulate->add_option("--signal-strength", f.signal_strength, "Signal added to signal AUs in moments");
  simulate->add_option("--responder-fraction", f.responder_fraction, "Share of participants that respond");
  simulate->add_option("--noise-level", f.noise_level, "Scale of background AU noise");
  simulate->add_option("--signal-aus", f.signal_aus, "Comma-separated AU names carrying the signal");

  auto* label = app.add_subcommand("label", "Extract weakly labeled examples as JSONL");
  common(label);
  label->add_option("--data", f.data, "Dataset directory")->required();
  label->add_option("--out", f.out, "Output JSONL path")->required();
  label->add_option("--min-active", f.min_active, "Active AUs required for a positive");
  label->add_flag("--nonsent-negatives", f.nonsent_negatives, "Also use non-sentimental ads as negatives");

  auto* train_cmd = app.add_subcommand("train", "Train the MLP on a label file");
  common(train_cmd);
  train_cmd->add_option("--examples", f.examples, "Examples JSONL")->required();
  train_cmd->add_option("--out", f.out, "Output model JSON")->required();
  train_cmd->add_option("--loss-trace", f.loss_trace, "Loss trace CSV (default: <model>.loss.csv)");
  train_cmd->add_option("--epochs", f.epochs, "Training epochs");
  train_cmd->add_option("--lr", f.learning_rate, "Adam learning rate");
  train_cmd->add_option("--batch-size", f.batch_size, "Minibatch size");
  train_cmd->add_option("--holdout", f.holdout, "Fraction of examples held out for reporting");
  train_cmd->add_flag("--no-oversample", f.no_oversample, "Disable minority-class oversampling");

  auto* predict = app.add_subcommand("predict", "Aggregate model predictions into per-ad curves");
  common(predict);
  predict->add_option("--data", f.data, "Dataset directory")->required();
  predict->add_option("--model", f.model, "Model JSON")->required();
  predict->add_option("--out", f.out, "Output curve CSV")->required();
  predict->add_option("--svg-dir", f.svg_dir, "Also render one SVG per ad here");

  auto* evaluate = app.add_subcommand("evaluate", "Compute ROC-Ad / ROC-Sent and single-AU baselines");
  common(evaluate);
  evaluate->add_option("--data", f.data, "Dataset directory")->required();
  evaluate->add_option("--model", f.model, "Model JSON")->required();
  evaluate->add_option("--out", f.out, "Output directory (kpi.json, table.csv, curves.csv)")->required();
  evaluate->add_option("--guard-band", f.guard_band, "Seconds trimmed around moments for ROC-Sent negatives");

  auto* export_curves = app.add_subcommand("export-curves", "Render curve CSV as SVG plots");
  common(export_curves);
  export_curves->add_option("--curves", f.curves, "Curve CSV")->required();
  export_curves->add_option("--data", f.data, "Dataset directory holding annotations.json")->required();
  export_curves->add_option("--out", f.out, "Output directory for SVGs")->required();

  std::vector<const char*> argv;
  for (const std::string& a : args) argv.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    json summary;
    if (simulate->parsed()) summary = cmd_simulate(f, out);
    else if (label->parsed()) summary = cmd_label(f, out);
    else if (train_cmd->parsed()) summary = cmd_train(f, out);
    else if (predict->parsed()) summary = cmd_predict(f, out);
    else if (evaluate->parsed()) summary = cmd_evaluate(f, out);
    else if (export_curves->parsed()) summary = cmd_export_curves(f, out);
    out << summary.dump() << "\n";
    return kExitOk;
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return exit_code_for(e);
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitValidation;
  }
}

}  // namespace sentipipe
