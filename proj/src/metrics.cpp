/**
 * Copyright 2026, treecontrib contributors
 */
#include "treecontrib/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <set>

#include "treecontrib/errors.hpp"
#include "treecontrib/text.hpp"

namespace treecontrib {

std::string_view ranking_method_name(RankingMethod method) {
  switch (method) {
    case RankingMethod::kGainFi: return "gain_fi";
    case RankingMethod::kIv: return "iv";
    case RankingMethod::kFcMedianAbs: return "fc_median_abs";
  }
  return "";
}

FeatureRanking make_ranking(RankingMethod method, const std::vector<double>& scores) {
  FeatureRanking ranking;
  ranking.method = method;
  ranking.entries.reserve(scores.size());
  for (std::size_t f = 0; f < scores.size(); ++f) {
    ranking.entries.emplace_back(static_cast<int>(f), scores[f]);
  }
  std::stable_sort(ranking.entries.begin(), ranking.entries.end(),
                   [](const auto& a, const auto& b) { return a.second > b.second; });
  return ranking;
}

FeatureRanking gain_feature_importance(const AnnotatedEnsemble& model, const Dataset& dataset,
                                       int threads) {
  const Ensemble& ensemble = model.ensemble;
  const std::vector<TreeStats> stats = count_instances(ensemble, dataset, threads);

  auto node_sse = [](const NodeStats& s) {
    if (s.count == 0) return 0.0;
    const double n = static_cast<double>(s.count);
    return s.label_sq_sum - s.label_sum * s.label_sum / n;
  };

  std::vector<double> importance(ensemble.catalog.size(), 0.0);
  for (std::size_t m = 0; m < ensemble.trees.size(); ++m) {
    const Tree& tree = ensemble.trees[m];
    for (const auto& [id, node] : tree.nodes) {
      if (node.is_leaf()) continue;
      const NodeStats& parent = stats[m].at(id);
      if (parent.count == 0) continue;
      const double gain = node_sse(parent) - node_sse(stats[m].at(node.children[0])) -
                          node_sse(stats[m].at(node.children[1]));
      const int feature = tree.node(node.children[0]).predicate->feature;
      importance[static_cast<std::size_t>(feature)] += std::max(gain, 0.0);
    }
  }
  const double total = std::accumulate(importance.begin(), importance.end(), 0.0);
  if (total > 0.0) {
    for (double& v : importance) v /= total;
  }
  return make_ranking(RankingMethod::kGainFi, importance);
}

namespace {

struct BinCounts {
  double positives = 0.0;
  double negatives = 0.0;
};

std::vector<BinCounts> bin_feature(const Dataset& dataset, int feature, int bins) {
  const std::size_t f = static_cast<std::size_t>(feature);

  bool numeric = true;
  for (const Instance& row : dataset.rows) {
    if (row.values[f].is_token()) {
      numeric = false;
      break;
    }
  }

  std::vector<BinCounts> counts;
  BinCounts missing_bin;
  bool any_missing = false;

  if (numeric) {
    // Rank-based equal-frequency bins: membership depends only on the order
    // of values (stable by row), so strictly monotone transforms of the
    // feature leave the binning unchanged.
    std::vector<std::pair<double, std::size_t>> defined;
    for (std::size_t r = 0; r < dataset.size(); ++r) {
      const FeatureValue& v = dataset.rows[r].values[f];
      if (v.is_missing()) {
        any_missing = true;
        (dataset.labels[r] == 1.0 ? missing_bin.positives : missing_bin.negatives) += 1.0;
      } else {
        defined.emplace_back(v.number_value(), r);
      }
    }
    std::sort(defined.begin(), defined.end());
    counts.assign(static_cast<std::size_t>(bins), BinCounts{});
    // Tie groups are assigned atomically by their first rank, so equal values
    // never straddle a bin boundary and a constant feature forms one bin.
    std::size_t i = 0;
    while (i < defined.size()) {
      std::size_t j = i;
      while (j + 1 < defined.size() && defined[j + 1].first == defined[i].first) ++j;
      const std::size_t b = i * static_cast<std::size_t>(bins) / defined.size();
      for (std::size_t k = i; k <= j; ++k) {
        const std::size_t r = defined[k].second;
        (dataset.labels[r] == 1.0 ? counts[b].positives : counts[b].negatives) += 1.0;
      }
      i = j + 1;
    }
  } else {
    std::map<std::string, BinCounts> by_token;
    for (std::size_t r = 0; r < dataset.size(); ++r) {
      const FeatureValue& v = dataset.rows[r].values[f];
      if (v.is_missing()) {
        any_missing = true;
        (dataset.labels[r] == 1.0 ? missing_bin.positives : missing_bin.negatives) += 1.0;
        continue;
      }
      const std::string key =
          v.is_token() ? v.token_value() : format_double(v.number_value());
      BinCounts& bin = by_token[key];
      (dataset.labels[r] == 1.0 ? bin.positives : bin.negatives) += 1.0;
    }
    counts.reserve(by_token.size());
    for (const auto& [token, bin] : by_token) counts.push_back(bin);
  }

  if (any_missing) counts.push_back(missing_bin);
  return counts;
}

}  // namespace

double information_value(const Dataset& dataset, int feature, int bins) {
  if (feature < 0 || static_cast<std::size_t>(feature) >= dataset.catalog.size()) {
    throw ConfigError("information_value: feature index out of range");
  }
  if (bins < 1) throw ConfigError("information_value: bins must be >= 1");
  if (!dataset.labels_binary()) {
    throw DegenerateLabelsError("information value requires binary {0,1} labels");
  }
  double total_pos = 0.0;
  for (double y : dataset.labels) total_pos += y;
  if (total_pos == 0.0 || total_pos == static_cast<double>(dataset.size())) {
    throw DegenerateLabelsError("information value requires both classes present");
  }

  std::vector<BinCounts> binned = bin_feature(dataset, feature, bins);

  // Smooth non-empty bins with a zero cell, then recompute the class totals.
  double smoothed_pos = 0.0;
  double smoothed_neg = 0.0;
  for (BinCounts& bin : binned) {
    const double n = bin.positives + bin.negatives;
    if (n == 0.0) continue;  // empty bin: no evidence, skipped below too
    if (bin.positives == 0.0 || bin.negatives == 0.0) {
      bin.positives += 0.5;
      bin.negatives += 0.5;
    }
    smoothed_pos += bin.positives;
    smoothed_neg += bin.negatives;
  }

  double iv = 0.0;
  for (const BinCounts& bin : binned) {
    if (bin.positives + bin.negatives == 0.0) continue;
    const double p = bin.positives / smoothed_pos;
    const double q = bin.negatives / smoothed_neg;
    iv += (p - q) * std::log(p / q);
  }
  return iv;
}

FeatureRanking iv_ranking(const Dataset& dataset, int bins) {
  std::vector<double> scores(dataset.catalog.size());
  for (std::size_t f = 0; f < dataset.catalog.size(); ++f) {
    scores[f] = information_value(dataset, static_cast<int>(f), bins);
  }
  return make_ranking(RankingMethod::kIv, scores);
}

FeatureRanking fc_median_ranking(const FcDistribution& distribution) {
  if (distribution.medians.empty()) {
    throw ConfigError("fc_median_ranking: empty distribution");
  }
  std::vector<double> scores(distribution.medians.size());
  for (std::size_t f = 0; f < scores.size(); ++f) {
    scores[f] = std::abs(distribution.medians[f]);
  }
  return make_ranking(RankingMethod::kFcMedianAbs, scores);
}

int top_k_intersection(const FeatureRanking& reference, const FeatureRanking& candidate, int k) {
  const std::size_t take = std::min<std::size_t>(static_cast<std::size_t>(k),
                                                 reference.entries.size());
  std::set<int> top_reference;
  for (std::size_t i = 0; i < take; ++i) top_reference.insert(reference.entries[i].first);
  const std::size_t take_candidate =
      std::min<std::size_t>(static_cast<std::size_t>(k), candidate.entries.size());
  int size = 0;
  for (std::size_t i = 0; i < take_candidate; ++i) {
    if (top_reference.count(candidate.entries[i].first)) ++size;
  }
  return size;
}

ConsistencyReport consistency_report(const AnnotatedEnsemble& primary, const Dataset& dataset,
                                     RankingMethod reference,
                                     const std::vector<CandidateSpec>& candidates,
                                     const std::vector<int>& k_set, int iv_bins, int threads) {
  if (reference != RankingMethod::kGainFi && reference != RankingMethod::kIv) {
    throw ConfigError("consistency_report: reference must be gain_fi or iv");
  }
  ConsistencyReport report;
  report.reference_method = reference;
  report.k_set = k_set;

  report.gain_fi = gain_feature_importance(primary, dataset, threads);
  if (reference == RankingMethod::kIv || dataset.labels_binary()) {
    report.iv = iv_ranking(dataset, iv_bins);
  }

  for (const CandidateSpec& spec : candidates) {
    if (spec.model == nullptr) throw ConfigError("consistency_report: null candidate model");
    if (!(spec.model->ensemble.catalog == dataset.catalog)) {
      throw CatalogMismatchError("consistency_report: candidate '" + spec.name +
                                 "' catalog does not match the dataset catalog");
    }
    const BatchExplanation batch = explain_batch(*spec.model, dataset, spec.variant, threads);
    report.medians.emplace_back(spec.name, batch.distribution.medians);
    report.candidates.emplace_back(spec.name, fc_median_ranking(batch.distribution));
  }

  const FeatureRanking& ref_ranking =
      reference == RankingMethod::kIv ? report.iv : report.gain_fi;
  for (int k : k_set) {
    for (const auto& [name, ranking] : report.candidates) {
      report.intersections.push_back({k, name, top_k_intersection(ref_ranking, ranking, k)});
    }
  }
  return report;
}

std::string consistency_csv(const ConsistencyReport& report, const FeatureCatalog& catalog) {
  std::vector<double> fi_scores(catalog.size(), 0.0);
  for (const auto& [f, score] : report.gain_fi.entries) {
    fi_scores[static_cast<std::size_t>(f)] = score;
  }
  std::vector<double> iv_scores(catalog.size(), 0.0);
  for (const auto& [f, score] : report.iv.entries) {
    iv_scores[static_cast<std::size_t>(f)] = score;
  }

  std::string out = "feature,fi,iv";
  for (const auto& [name, medians] : report.medians) {
    out += ",fc_median_" + name;
  }
  out += "\n";
  for (std::size_t f = 0; f < catalog.size(); ++f) {
    out += csv_quote(catalog.names()[f]) + "," + format_double(fi_scores[f]) + "," +
           format_double(iv_scores[f]);
    for (const auto& [name, medians] : report.medians) {
      out += "," + format_double(medians[f]);
    }
    out += "\n";
  }
  return out;
}

std::string intersections_csv(const ConsistencyReport& report) {
  std::string out = "k,candidate,size\n";
  for (const auto& row : report.intersections) {
    out += std::to_string(row.k) + "," + csv_quote(row.candidate) + "," +
           std::to_string(row.size) + "\n";
  }
  return out;
}

}  // namespace treecontrib
