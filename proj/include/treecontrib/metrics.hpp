/**
 * Copyright 2026, treecontrib contributors
 */
#ifndef TREECONTRIB_METRICS_HPP_
#define TREECONTRIB_METRICS_HPP_

#include <string>
#include <utility>
#include <vector>

#include "treecontrib/annotate.hpp"
#include "treecontrib/contrib.hpp"
#include "treecontrib/dataset.hpp"

namespace treecontrib {

enum class RankingMethod { kGainFi, kIv, kFcMedianAbs };

std::string_view ranking_method_name(RankingMethod method);

/// Features ordered by descending score; ties broken by catalog order.
struct FeatureRanking {
  RankingMethod method = RankingMethod::kGainFi;
  std::vector<std::pair<int, double>> entries;  // (feature index, score)
};

// Ranks (feature, score) pairs descending by score with catalog-order ties.
FeatureRanking make_ranking(RankingMethod method, const std::vector<double>& scores);

// Split-gain importance surrogate: per internal node, add
// count(node) * variance_reduction(node labels) to the split feature, summed
// over all trees, normalized to sum 1. Counts and label statistics come from
// routing `dataset` through the model.
FeatureRanking gain_feature_importance(const AnnotatedEnsemble& model, const Dataset& dataset,
                                       int threads = 1);

// Standard Information Value with equal-frequency bins for numeric features
// (MISSING is its own bin), one bin per token for categorical features, and
// 0.5 added to both class counts of any non-empty bin with a zero cell.
// Requires binary labels with both classes present.
double information_value(const Dataset& dataset, int feature, int bins = 10);

FeatureRanking iv_ranking(const Dataset& dataset, int bins = 10);

FeatureRanking fc_median_ranking(const FcDistribution& distribution);

/// One FC-median candidate for the comparison report: a named annotated model
/// plus the contribution variant to explain it with.
struct CandidateSpec {
  std::string name;
  const AnnotatedEnsemble* model = nullptr;
  Variant variant = Variant::kSimple;
};

struct ConsistencyReport {
  RankingMethod reference_method = RankingMethod::kIv;
  FeatureRanking gain_fi;
  FeatureRanking iv;  // empty entries when labels are not binary and fi is the reference
  std::vector<std::pair<std::string, FeatureRanking>> candidates;
  std::vector<std::pair<std::string, std::vector<double>>> medians;  // signed, catalog-aligned
  std::vector<int> k_set;

  struct Intersection {
    int k = 0;
    std::string candidate;
    int size = 0;
  };
  std::vector<Intersection> intersections;
};

// Builds the reference ranking (IV over the dataset or gain FI of `primary`),
// the FC-median-abs ranking of every candidate, and top-k intersection counts
// for every k in k_set.
ConsistencyReport consistency_report(const AnnotatedEnsemble& primary, const Dataset& dataset,
                                     RankingMethod reference,
                                     const std::vector<CandidateSpec>& candidates,
                                     const std::vector<int>& k_set = {10, 20, 30, 40, 50},
                                     int iv_bins = 10, int threads = 1);

// |top-k(reference) ∩ top-k(candidate)| over feature indices.
int top_k_intersection(const FeatureRanking& reference, const FeatureRanking& candidate, int k);

// Machine-readable report files (callers write them to disk).
std::string consistency_csv(const ConsistencyReport& report, const FeatureCatalog& catalog);
std::string intersections_csv(const ConsistencyReport& report);

}  // namespace treecontrib

#endif  // TREECONTRIB_METRICS_HPP_
