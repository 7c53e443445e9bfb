#pragma once

#include <array>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "sentipipe/aggregate.hpp"
#include "sentipipe/core.hpp"
#include "sentipipe/ingest.hpp"

namespace sentipipe {

/// Mann-Whitney estimate of P(pos > neg) + 0.5 P(pos == neg), computed from
/// mid-ranks in O(n log n). Throws EmptyScoreList if either list is empty and
/// ValidationError on non-finite scores.
double roc_auc(std::span<const double> positives, std::span<const double> negatives);

struct KpiConfig {
  // Trimmed from each side of a moment before taking complement maxima.
  double guard_band_s = 0.0;
};

struct AdScores {
  std::string ad_id;
  AdLabel label;
  double curve_max;
  std::optional<double> moment_max;      // sentimental ads only
  std::optional<double> complement_max;  // sentimental ads only
};

struct KpiReport {
  double roc_ad = 0.5;
  double roc_sent = 0.5;
  double avg = 0.5;
  std::vector<AdScores> per_ad;
};

/// Sentimental-ad curve maxima vs non-sentimental ones.
/// Throws InsufficientAds unless both kinds are present.
double kpi_roc_ad(std::span<const AggregateCurve> curves, const AdMap& ads);

/// Per sentimental ad: max over its moments (positive) vs max over the rest
/// of the ad (negative). Throws NoMoments for an ad without moments and
/// DegenerateComplement when the moments leave nothing uncovered.
double kpi_roc_sent(std::span<const AggregateCurve> curves, const AdMap& ads,
                    const KpiConfig& config = {});

/// Parts of [0, duration) outside every moment, after trimming the guard band.
std::vector<Interval> complement_intervals(const AdSpec& ad, double guard_band_s = 0.0);

/// Both KPIs plus per-ad details; ROC-Sent uses the sentimental curves only.
KpiReport evaluate_curves(std::span<const AggregateCurve> curves, const AdMap& ads,
                          const KpiConfig& config = {});

/// Reruns aggregation and both KPIs with score(frame) = aus[k], k = 0..19.
std::array<KpiReport, kAuCount> single_au_baseline(std::span<const VideoRecord> videos, const AdMap& ads,
                                                   double step_s = kDefaultStepS,
                                                   const KpiConfig& config = {});

/// Constant-score control; both KPIs are 0.5 by tie credit.
KpiReport chance_baseline(std::span<const VideoRecord> videos, const AdMap& ads,
                          double step_s = kDefaultStepS, const KpiConfig& config = {});

// {"roc_ad": .., "roc_sent": .., "avg": .., "per_ad": [..], "meta": {..}}
std::string serialize_kpi_json(const KpiReport& report, double step_s, const KpiConfig& config);

// Rows ROC-Ad, ROC-Sent, Avg; columns Chance, the 20 AUs, Proposed.
std::string serialize_baseline_table_csv(const KpiReport& chance,
                                         const std::array<KpiReport, kAuCount>& per_au,
                                         const KpiReport& model);

}  // namespace sentipipe
