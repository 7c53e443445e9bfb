#include "sentipipe/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>

#include <json.hpp>

#include "sentipipe/errors.hpp"
#include "sentipipe/text_format.hpp"

namespace sentipipe {

double roc_auc(std::span<const double> positives, std::span<const double> negatives) {
  if (positives.empty() || negatives.empty()) {
    throw EmptyScoreList("roc_auc needs at least one positive and one negative score");
  }
  struct Tagged {
    double score;
    bool positive;
  };
  std::vector<Tagged> all;
  all.reserve(positives.size() + negatives.size());
  for (double s : positives) all.push_back({s, true});
  for (double s : negatives) all.push_back({s, false});
  for (const Tagged& t : all) {
    if (!std::isfinite(t.score)) throw ValidationError("roc_auc: non-finite score");
  }
  std::sort(all.begin(), all.end(), [](const Tagged& a, const Tagged& b) { return a.score < b.score; });

  // Sum of doubled mid-ranks of the positives; doubling keeps tie ranks integral.
  std::int64_t doubled_rank_sum = 0;
  for (std::size_t i = 0; i < all.size();) {
    std::size_t j = i;
    while (j < all.size() && all[j].score == all[i].score) ++j;
    const auto doubled_mid_rank = static_cast<std::int64_t>(i + 1 + j);  // (i+1) + j = 2 * mid-rank
    for (std::size_t k = i; k < j; ++k) {
      if (all[k].positive) doubled_rank_sum += doubled_mid_rank;
    }
    i = j;
  }
  const auto n_pos = static_cast<std::int64_t>(positives.size());
  const auto n_neg = static_cast<std::int64_t>(negatives.size());
  const std::int64_t doubled_u = doubled_rank_sum - n_pos * (n_pos + 1);
  return (static_cast<double>(doubled_u) * 0.5) / (static_cast<double>(n_pos) * static_cast<double>(n_neg));
}

namespace {

const AdSpec& lookup(const AdMap& ads, const std::string& ad_id) {
  auto it = ads.find(ad_id);
  if (it == ads.end()) throw UnknownAdId(ad_id);
  return it->second;
}

double moment_max(const AggregateCurve& curve, const AdSpec& ad) {
  if (ad.moments().empty()) throw NoMoments("ad '" + ad.ad_id() + "' has no labeled moments");
  double best = 0.0;
  for (const Interval& m : ad.moments()) best = std::max(best, max_over_interval(curve, m));
  return best;
}

double complement_max(const AggregateCurve& curve, const AdSpec& ad, double guard_band_s) {
  const auto gaps = complement_intervals(ad, guard_band_s);
  if (gaps.empty()) {
    throw DegenerateComplement("moments of ad '" + ad.ad_id() + "' cover the whole ad");
  }
  double best = 0.0;
  for (const Interval& g : gaps) best = std::max(best, max_over_interval(curve, g));
  return best;
}

}  // namespace

std::vector<Interval> complement_intervals(const AdSpec& ad, double guard_band_s) {
  std::vector<Interval> out;
  double cursor = 0.0;
  bool after_moment = false;
  const auto emit = [&](double start, double end, bool before_moment) {
    if (after_moment) start += guard_band_s;
    if (before_moment) end -= guard_band_s;
    if (start < end) out.emplace_back(start, end);
  };
  for (const Interval& m : ad.moments()) {
    emit(cursor, m.start_s(), true);
    cursor = m.end_s();
    after_moment = true;
  }
  emit(cursor, ad.duration_s(), false);
  return out;
}

double kpi_roc_ad(std::span<const AggregateCurve> curves, const AdMap& ads) {
  std::vector<double> pos, neg;
  for (const AggregateCurve& c : curves) {
    (lookup(ads, c.ad_id()).sentimental() ? pos : neg).push_back(curve_max(c));
  }
  if (pos.empty() || neg.empty()) {
    throw InsufficientAds("ROC-Ad needs sentimental and non-sentimental ads (got " +
                          std::to_string(pos.size()) + " and " + std::to_string(neg.size()) + ")");
  }
  return roc_auc(pos, neg);
}

double kpi_roc_sent(std::span<const AggregateCurve> curves, const AdMap& ads, const KpiConfig& config) {
  std::vector<double> pos, neg;
  for (const AggregateCurve& c : curves) {
    const AdSpec& ad = lookup(ads, c.ad_id());
    pos.push_back(moment_max(c, ad));
    neg.push_back(complement_max(c, ad, config.guard_band_s));
  }
  if (pos.empty()) throw InsufficientAds("ROC-Sent needs at least one sentimental ad");
  return roc_auc(pos, neg);
}

KpiReport evaluate_curves(std::span<const AggregateCurve> curves, const AdMap& ads, const KpiConfig& config) {
  KpiReport report;
  std::vector<AggregateCurve> sentimental;
  for (const AggregateCurve& c : curves) {
    const AdSpec& ad = lookup(ads, c.ad_id());
    AdScores s{c.ad_id(), ad.label(), curve_max(c), std::nullopt, std::nullopt};
    if (ad.sentimental()) {
      s.moment_max = moment_max(c, ad);
      s.complement_max = complement_max(c, ad, config.guard_band_s);
      sentimental.push_back(c);
    }
    report.per_ad.push_back(std::move(s));
  }
  report.roc_ad = kpi_roc_ad(curves, ads);
  report.roc_sent = kpi_roc_sent(sentimental, ads, config);
  report.avg = (report.roc_ad + report.roc_sent) / 2.0;
  return report;
}

std::array<KpiReport, kAuCount> single_au_baseline(std::span<const VideoRecord> videos, const AdMap& ads,
                                                   double step_s, const KpiConfig& config) {
  std::array<KpiReport, kAuCount> reports;
  for (std::size_t k = 0; k < kAuCount; ++k) {
    const auto curves =
        aggregate_dataset(videos, ads, step_s, [k](const AuVector& aus) { return aus[k]; });
    reports[k] = evaluate_curves(curves, ads, config);
  }
  return reports;
}

KpiReport chance_baseline(std::span<const VideoRecord> videos, const AdMap& ads, double step_s,
                          const KpiConfig& config) {
  const auto curves = aggregate_dataset(videos, ads, step_s, [](const AuVector&) { return 0.5; });
  return evaluate_curves(curves, ads, config);
}

std::string serialize_kpi_json(const KpiReport& report, double step_s, const KpiConfig& config) {
  using json = nlohmann::ordered_json;
  json per_ad = json::array();
  for (const AdScores& s : report.per_ad) {
    json entry = {{"ad_id", s.ad_id}, {"label", std::string(to_string(s.label))}, {"curve_max", s.curve_max}};
    entry["moment_max"] = s.moment_max ? json(*s.moment_max) : json(nullptr);
    entry["complement_max"] = s.complement_max ? json(*s.complement_max) : json(nullptr);
    per_ad.push_back(std::move(entry));
  }
  json doc = {{"roc_ad", report.roc_ad},
              {"roc_sent", report.roc_sent},
              {"avg", report.avg},
              {"per_ad", std::move(per_ad)},
              {"meta",
               {{"step_s", step_s},
                {"aggregation", std::string(kAggregationWeighting)},
                {"roc_sent_negative", "whole-complement"},
                {"guard_band_s", config.guard_band_s}}}};
  return doc.dump(2) + "\n";
}

std::string serialize_baseline_table_csv(const KpiReport& chance, const std::array<KpiReport, kAuCount>& per_au,
                                         const KpiReport& model) {
  std::string out = "KPI,Chance";
  for (std::string_view name : kAuNames) {
    out += ',';
    out += name;
  }
  out += ",Proposed\n";
  const auto row = [&](const char* name, auto&& pick) {
    out += name;
    out += "," + text::format_fixed(pick(chance), 4);
    for (const KpiReport& r : per_au) out += "," + text::format_fixed(pick(r), 4);
    out += "," + text::format_fixed(pick(model), 4) + "\n";
  };
  row("ROC-Ad", [](const KpiReport& r) { return r.roc_ad; });
  row("ROC-Sent", [](const KpiReport& r) { return r.roc_sent; });
  row("Avg", [](const KpiReport& r) { return r.avg; });
  return out;
}

}  // namespace sentipipe
