// Acceptance suite: one line per criterion, nonzero exit if any fails.

#include <algorithm>
#include <array>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <iostream>
#include <map>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "oracles.hpp"
#include "sentipipe/cli.hpp"
#include "sentipipe/ingest.hpp"
#include "sentipipe/metrics.hpp"
#include "sentipipe/mlp.hpp"
#include "sentipipe/synth.hpp"
#include "sentipipe/text_format.hpp"
#include "sentipipe/weak_label.hpp"

using namespace sentipipe;
namespace fs = std::filesystem;
using Clock = std::chrono::steady_clock;

namespace {

struct Outcome {
  bool pass;
  std::string detail;
};

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

std::string fmt(double v, int digits = 4) { return text::format_fixed(v, digits); }

fs::path work_dir(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / "sentipipe_acceptance" / name;
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

nlohmann::json run(std::vector<std::string> args) {
  args.insert(args.begin(), "sentipipe");
  std::ostringstream out, err;
  const int code = run_cli(args, out, err);
  if (code != kExitOk) {
    throw std::runtime_error("sentipipe " + args[1] + " exited " + std::to_string(code) + ": " + err.str());
  }
  std::string s = out.str();
  while (!s.empty() && s.back() == '\n') s.pop_back();
  return nlohmann::json::parse(s.substr(s.rfind('\n') + 1));
}

// simulate -> label -> train -> evaluate; returns the evaluate summary.
nlohmann::json full_chain(const fs::path& dir, std::uint64_t seed, const std::vector<std::string>& simulate_extra = {}) {
  const std::string s = std::to_string(seed);
  std::vector<std::string> sim = {"simulate", "--out", (dir / "data").string(), "--seed", s};
  sim.insert(sim.end(), simulate_extra.begin(), simulate_extra.end());
  run(sim);
  run({"label", "--data", (dir / "data/train").string(), "--out", (dir / "examples.jsonl").string()});
  run({"train", "--examples", (dir / "examples.jsonl").string(), "--out", (dir / "model.json").string(), "--seed", s});
  return run({"evaluate", "--data", (dir / "data/test").string(), "--model", (dir / "model.json").string(), "--out",
              (dir / "eval").string()});
}

std::vector<double> random_scores(std::mt19937_64& gen, std::size_t n, bool coarse) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::uniform_int_distribution<int> grid(0, coarse ? 10 : 1000);
  std::vector<double> out(n);
  for (double& x : out) x = coarse || u(gen) < 0.5 ? grid(gen) / static_cast<double>(coarse ? 10 : 1000) : u(gen);
  return out;
}

Outcome roc_oracle() {
  const auto t0 = Clock::now();
  std::mt19937_64 gen(101);
  std::uniform_int_distribution<std::size_t> len(1, 200);
  int mismatches = 0;
  for (int trial = 0; trial < 1000; ++trial) {
    const bool coarse = trial % 2 == 0;
    const auto pos = random_scores(gen, len(gen), coarse);
    const auto neg = random_scores(gen, len(gen), coarse);
    if (roc_auc(pos, neg) != oracle::brute_force_auc(pos, neg)) ++mismatches;
  }
  const double elapsed = seconds_since(t0);
  return {mismatches == 0 && elapsed < 10.0,
          std::to_string(mismatches) + "/1000 mismatches, " + fmt(elapsed, 2) + " s (limit 10 s)"};
}

Outcome roc_properties() {
  std::mt19937_64 gen(102);
  std::uniform_int_distribution<std::size_t> len(1, 100);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  int separation = 0, complement = 0, transform = 0;
  for (int trial = 0; trial < 100; ++trial) {
    std::vector<double> pos(len(gen)), neg(len(gen));
    for (double& x : pos) x = 0.5 + 0.5 * u(gen) + 1e-9;
    for (double& x : neg) x = 0.5 * u(gen);
    separation += roc_auc(pos, neg) == 1.0 ? 0 : 1;

    const auto p = random_scores(gen, len(gen), trial % 2 == 0);
    const auto n = random_scores(gen, len(gen), trial % 2 == 0);
    const double auc = roc_auc(p, n);
    // Both values are multiples of 1/(2 |p| |n|); they must sum to one up to rounding of the last bit.
    complement += std::abs(roc_auc(n, p) + auc - 1.0) <= 0x1p-52 ? 0 : 1;

    auto warp = [](std::vector<double> v) {
      for (double& x : v) x = std::exp(4.0 * x) + x * x * x - 2.0;
      return v;
    };
    transform += roc_auc(warp(p), warp(n)) == auc ? 0 : 1;
  }
  const int failures = separation + complement + transform;
  return {failures == 0, "separation " + std::to_string(separation) + ", complement " + std::to_string(complement) +
                             ", transform " + std::to_string(transform) + " failures over 100 trials"};
}

Outcome gradient_check() {
  const auto t0 = Clock::now();
  std::mt19937_64 gen(103);
  std::uniform_real_distribution<double> w(-1.0, 1.0), u(0.0, 1.0);
  double worst = 0.0;
  for (int trial = 0; trial < 50; ++trial) {
    MlpParams params;
    for (double& x : params.flat()) x = w(gen);
    std::array<double, kAuCount> x{};
    for (double& v : x) v = u(gen);
    const int y = static_cast<int>(gen() & 1u);
    const auto analytic = backward(params, x, y).gradient;
    const auto numeric = oracle::finite_difference_gradient(
        params, [&](const MlpParams& p) { return oracle::reference_loss(p, x, y); }, 1e-5);
    worst = std::max(worst, oracle::max_relative_error(analytic, numeric, 1e-6));
  }
  const double elapsed = seconds_since(t0);
  return {worst < 1e-4 && elapsed < 5.0,
          "max relative error " + text::format_double(worst) + " (limit 1e-4), " + fmt(elapsed, 2) + " s"};
}

Outcome weak_label_oracle() {
  std::mt19937_64 gen(104);
  int checked = 0, mismatched = 0;
  while (checked < 20) {
    SynthConfig cfg;
    cfg.n_train_sent_ads = 1;
    cfg.n_test_sent_ads = 1;
    cfg.n_test_nonsent_ads = 1;
    cfg.participants_per_ad = 4;
    cfg.ad_duration_s = 20;
    cfg.incidental_activation_prob = 0.08;
    cfg.rng_seed = gen();
    const auto data = generate(cfg);
    for (const Dataset* d : {&data.train, &data.test}) {
      for (const VideoRecord& v : d->videos()) {
        if (checked == 20) break;
        if (gen() % 3 != 0) continue;
        const auto examples = extract_examples(std::span(&v, 1), d->ads(), LabelingConfig{});
        std::set<oracle::LabelKey> got;
        for (const auto& e : examples) got.insert({e.video_id, e.frame_index, e.positive() ? 1 : 0});
        const bool duplicates = got.size() != examples.size();
        if (duplicates || got != oracle::brute_force_labels(std::span(&v, 1), d->ads(), 0.5, 2)) ++mismatched;
        ++checked;
      }
    }
  }
  return {mismatched == 0, std::to_string(mismatched) + "/20 videos differ from the brute-force labeler"};
}

const std::set<std::string> kDefaultSignal = {"Smile", "AU1", "AU6"};

Outcome planted_signal() {
  const auto t0 = Clock::now();
  double roc_ad = 0.0, roc_sent = 0.0;
  std::map<std::string, std::pair<double, double>> per_au;
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    const auto summary = full_chain(work_dir("planted_" + std::to_string(seed)), seed);
    roc_ad += summary.at("roc_ad").get<double>() / 5;
    roc_sent += summary.at("roc_sent").get<double>() / 5;
    for (const auto& [name, v] : summary.at("single_au").items()) {
      per_au[name].first += v.at("roc_ad").get<double>() / 5;
      per_au[name].second += v.at("roc_sent").get<double>() / 5;
    }
  }
  double best_ad = 0.0, best_sent = 0.0;
  for (const auto& [name, v] : per_au) {
    if (kDefaultSignal.count(name)) continue;
    best_ad = std::max(best_ad, v.first);
    best_sent = std::max(best_sent, v.second);
  }
  const double elapsed = seconds_since(t0);
  const bool pass = roc_ad >= 0.90 && roc_sent >= 0.80 && roc_ad > best_ad && roc_sent > best_sent && elapsed < 120.0;
  return {pass, "ROC-Ad " + fmt(roc_ad) + " (>= 0.90, best non-signal AU " + fmt(best_ad) + "), ROC-Sent " +
                    fmt(roc_sent) + " (>= 0.80, best non-signal AU " + fmt(best_sent) + "), " + fmt(elapsed, 1) +
                    " s for 5 chains (limit 120 s)"};
}

Outcome null_control() {
  double roc_ad = 0.0, roc_sent = 0.0;
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    const auto summary = full_chain(work_dir("null_" + std::to_string(seed)), seed, {"--null"});
    roc_ad += summary.at("roc_ad").get<double>() / 5;
    roc_sent += summary.at("roc_sent").get<double>() / 5;
  }
  const bool pass = std::abs(roc_ad - 0.5) <= 0.15 && std::abs(roc_sent - 0.5) <= 0.15;
  return {pass, "ROC-Ad " + fmt(roc_ad) + ", ROC-Sent " + fmt(roc_sent) + " (each within 0.5 +/- 0.15)"};
}

Outcome single_au_sanity() {
  const std::size_t planted = canonical_au_index("AU2");
  double planted_ad = 0.0;
  std::array<double, kAuCount> mean_ad{};
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    SynthConfig cfg;
    cfg.signal_aus = {planted};
    cfg.rng_seed = seed;
    const auto data = generate(cfg);
    const auto kept = filter_by_coverage(data.test.videos()).kept;
    const auto table = single_au_baseline(kept, data.test.ads());
    for (std::size_t k = 0; k < kAuCount; ++k) mean_ad[k] += table[k].roc_ad / 5;
  }
  planted_ad = mean_ad[planted];
  std::vector<double> others;
  for (std::size_t k = 0; k < kAuCount; ++k) {
    if (k != planted) others.push_back(mean_ad[k]);
  }
  std::sort(others.begin(), others.end());
  const double median = others[others.size() / 2];  // 19 values
  const bool pass = planted_ad >= 0.9 && median >= 0.4 && median <= 0.6;
  return {pass, "AU2 ROC-Ad " + fmt(planted_ad) + " (>= 0.9), median non-signal AU " + fmt(median) +
                    " (in [0.4, 0.6])"};
}

bool same_tree(const fs::path& a, const fs::path& b, std::size_t& files) {
  std::set<fs::path> left, right;
  for (const auto& e : fs::recursive_directory_iterator(a)) {
    if (e.is_regular_file()) left.insert(fs::relative(e.path(), a));
  }
  for (const auto& e : fs::recursive_directory_iterator(b)) {
    if (e.is_regular_file()) right.insert(fs::relative(e.path(), b));
  }
  if (left != right) return false;
  files = left.size();
  for (const fs::path& rel : left) {
    if (text::read_file(a / rel) != text::read_file(b / rel)) return false;
  }
  return true;
}

Outcome determinism() {
  const fs::path first = work_dir("determinism_a");
  const fs::path second = work_dir("determinism_b");
  full_chain(first, 42);
  full_chain(second, 42);
  std::size_t files = 0;
  const bool same = same_tree(first, second, files);
  return {same && files > 0, same ? std::to_string(files) + " artifacts byte-identical across two runs"
                                  : "artifacts differ between runs"};
}

VideoRecord coverage_video(int detected, int total) {
  std::vector<AuFrame> frames;
  for (int i = 0; i < total; ++i) {
    AuFrame f{static_cast<std::uint64_t>(i), i * 0.2, std::nullopt};
    if (i < detected) f.aus = AuVector::zeros();
    frames.push_back(f);
  }
  return VideoRecord("v" + std::to_string(detected) + "_" + std::to_string(total), "ad", std::move(frames));
}

Outcome coverage_boundary() {
  const std::vector<VideoRecord> videos = {coverage_video(9, 10), coverage_video(900, 1000),
                                           coverage_video(27, 30), coverage_video(899, 1000)};
  const auto split = filter_by_coverage(videos);
  std::set<std::string> kept;
  for (const auto& v : split.kept) kept.insert(v.video_id());
  const bool pass = kept == std::set<std::string>{"v9_10", "v900_1000", "v27_30"} &&
                    split.dropped_ids == std::vector<std::string>{"v899_1000"};
  return {pass, "90% kept (9/10, 900/1000, 27/30): " + std::string(kept.size() == 3 ? "yes" : "no") +
                    "; 89.9% dropped: " + std::string(split.dropped_ids.size() == 1 ? "yes" : "no")};
}

}  // namespace

int main() {
  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria = {
      {"1 ROC oracle equivalence", roc_oracle},
      {"2 ROC properties", roc_properties},
      {"3 gradient check", gradient_check},
      {"4 weak-label oracle", weak_label_oracle},
      {"5 end-to-end planted signal", planted_signal},
      {"6 null control", null_control},
      {"7 single-AU baseline sanity", single_au_sanity},
      {"8 determinism", determinism},
      {"9 coverage boundary", coverage_boundary},
  };
  int failed = 0;
  for (const auto& [name, check] : criteria) {
    Outcome o;
    try {
      o = check();
    } catch (const std::exception& e) {
      o = {false, std::string("threw: ") + e.what()};
    }
    std::cout << (o.pass ? "[PASS] " : "[FAIL] ") << name << ": " << o.detail << std::endl;
    failed += o.pass ? 0 : 1;
  }
  fs::remove_all(fs::temp_directory_path() / "sentipipe_acceptance");
  std::cout << (9 - failed) << "/9 criteria passed" << std::endl;
  return failed == 0 ? 0 : 1;
}
