/**
 * Copyright 2026, treecontrib contributors
 */
#ifndef TREECONTRIB_CONTRIB_HPP_
#define TREECONTRIB_CONTRIB_HPP_

#include <vector>

#include "treecontrib/annotate.hpp"
#include "treecontrib/dataset.hpp"
#include "treecontrib/ensemble.hpp"

namespace treecontrib {

/// Per-instance signed feature contributions, catalog-aligned. Features never
/// used on any traversed path are exactly 0. For GBDT_SUM variants,
/// baseline + sum(contributions) reconstructs the prediction (local accuracy).
struct ContributionVector {
  std::vector<double> contributions;
  double baseline = 0.0;
  double prediction = 0.0;
  Variant variant = Variant::kSimple;
};

/// Per-feature contribution samples across a dataset, plus their medians
/// (even-length median = mean of the two middle order statistics).
struct FcDistribution {
  std::vector<std::vector<double>> values;  // [feature][row]
  std::vector<double> medians;
};

struct BatchExplanation {
  std::vector<ContributionVector> rows;
  FcDistribution distribution;
};

// Per tree, walk the instance's root-to-leaf path and add each edge's local
// increment (times the tree weight) to the edge's split feature; trees
// combine by sum for GBDT_SUM and by mean for RF_AVERAGE. Summation order is
// fixed: trees ascending, edges root to leaf, division by the tree count last.
ContributionVector explain_instance(const AnnotatedEnsemble& model, const Instance& instance,
                                    Variant variant);

// Row-wise explain over a dataset with deterministic output ordering; errors
// are rethrown with the offending row index attached.
BatchExplanation explain_batch(const AnnotatedEnsemble& model, const Dataset& dataset,
                               Variant variant, int threads = 1);

// The label-distribution (random forest) interpretation: identical path
// accumulation over li_label, averaged over trees. Requires RF_AVERAGE.
ContributionVector rf_explain_instance(const AnnotatedEnsemble& model, const Instance& instance);

double median_of_sorted(const std::vector<double>& sorted);

}  // namespace treecontrib

#endif  // TREECONTRIB_CONTRIB_HPP_
