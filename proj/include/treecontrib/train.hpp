/**
 * Copyright 2026, treecontrib contributors
 */
#ifndef TREECONTRIB_TRAIN_HPP_
#define TREECONTRIB_TRAIN_HPP_

#include <cstdint>
#include <vector>

#include "treecontrib/dataset.hpp"
#include "treecontrib/ensemble.hpp"

namespace treecontrib {

/// Desk-scale trainer configuration. max_depth 0 means a root-only tree.
struct TrainConfig {
  int max_depth = 3;
  int min_samples_leaf = 1;
  int n_trees = 1;
  double shrinkage = 1.0;           // folded into stored leaf scores
  double rf_feature_fraction = 1.0; // candidate features per split
  bool rf_bootstrap = true;
  std::uint64_t seed = 0;

  void check() const;  // throws ConfigError on out-of-range values
};

/// Per-iteration training record: residuals[m] is the target vector tree m
/// was fit to (residuals[0] == labels, since f_0 = 0), and tree_rows[m] lists
/// the dataset row indices that fed tree m.
struct FitTrace {
  std::vector<std::vector<double>> residuals;
  std::vector<std::vector<int>> tree_rows;
};

struct GbdtFit {
  Ensemble ensemble;
  FitTrace trace;
};

// Greedy exact CART regression tree: splits minimize weighted child variance
// (maximize SSE reduction), thresholds are midpoints between consecutive
// distinct sorted values, ties go to the lower feature index then lower
// threshold, and a node splits only when both children keep min_samples_leaf
// rows and the reduction is positive. Leaf score = mean target (LS rule).
// Numeric features only; MISSING values are rejected.
Tree fit_regression_tree(const Dataset& dataset, const std::vector<double>& targets,
                         const TrainConfig& config);

// Stagewise least-squares boosting: f_0 = 0, each tree fits the current
// residuals, stored leaf scores absorb the shrinkage factor.
GbdtFit fit_gbdt(const Dataset& dataset, const TrainConfig& config);

// Bagged binary-label forest: optional bootstrap per tree, random feature
// subset per split, leaf score = positive fraction, prediction = tree mean.
Ensemble fit_random_forest(const Dataset& dataset, const TrainConfig& config);

// FitTrace as CSV (iteration, row, residual) for debugging.
std::string fit_trace_csv(const FitTrace& trace);

}  // namespace treecontrib

#endif  // TREECONTRIB_TRAIN_HPP_
