/**
 * Copyright 2026, treecontrib contributors
 */
#ifndef TREECONTRIB_TESTS_TESTUTIL_HPP_
#define TREECONTRIB_TESTS_TESTUTIL_HPP_

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <random>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "treecontrib/annotate.hpp"
#include "treecontrib/dataset.hpp"
#include "treecontrib/ensemble.hpp"

namespace treecontrib::testutil {

inline std::string fixture_path(const std::string& name) {
  return std::string(TREECONTRIB_FIXTURE_DIR) + "/" + name;
}

inline std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path);
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

// ---------------------------------------------------------------------------
// Worked-example fixture tree (same structure and scores as example_tree.pmml):
// path 0 -> 2 -> 5 -> 9 -> 14, sibling pair 11/12 under node 6.
// Simple back-propagation gives S(n6) = 0.0770 and the local increments
// -0.0201 (feat5), -0.0073 (feat2), -0.0015 / +0.0010 (feat4).
// ---------------------------------------------------------------------------

inline Tree build_example_tree() {
  Tree tree;
  tree.root_id = 0;
  auto leaf = [&](int id, int feature, SplitOp op, double threshold, double score) {
    TreeNode node;
    node.id = id;
    node.predicate = SplitPredicate{feature, op, threshold, {}};
    node.leaf_score = score;
    tree.nodes.emplace(id, std::move(node));
  };
  auto internal = [&](int id, int c1, int c2) {
    TreeNode node;
    node.id = id;
    node.children = {c1, c2};
    tree.nodes.emplace(id, std::move(node));
  };
  auto split_into = [&](int id, int feature, SplitOp op, double threshold, int c1, int c2) {
    TreeNode node;
    node.id = id;
    node.predicate = SplitPredicate{feature, op, threshold, {}};
    node.children = {c1, c2};
    tree.nodes.emplace(id, std::move(node));
  };

  internal(0, 1, 2);
  split_into(1, 4, SplitOp::kLessOrEqual, 1.5, 3, 4);
  split_into(2, 4, SplitOp::kGreaterThan, 1.5, 5, 6);
  split_into(3, 0, SplitOp::kLessOrEqual, 0.5, 7, 8);
  leaf(4, 0, SplitOp::kGreaterThan, 0.5, 0.1199);
  split_into(5, 1, SplitOp::kLessOrEqual, 3.0, 9, 10);
  split_into(6, 1, SplitOp::kGreaterThan, 3.0, 11, 12);
  leaf(7, 2, SplitOp::kLessOrEqual, 0.5, 0.0949);
  leaf(8, 2, SplitOp::kGreaterThan, 0.5, 0.1049);
  split_into(9, 3, SplitOp::kLessOrEqual, 2.5, 13, 14);
  leaf(10, 3, SplitOp::kGreaterThan, 2.5, 0.0639);
  leaf(11, 4, SplitOp::kLessOrEqual, 2.5, 0.085);
  leaf(12, 4, SplitOp::kGreaterThan, 2.5, 0.069);
  leaf(13, 3, SplitOp::kLessOrEqual, 1.0, 0.0599);
  leaf(14, 3, SplitOp::kGreaterThan, 1.0, 0.0619);
  return tree;
}

inline FeatureCatalog example_catalog() {
  return FeatureCatalog({"feat1", "feat2", "feat3", "feat4", "feat5"});
}

inline Ensemble build_example_ensemble() {
  Ensemble ensemble;
  ensemble.catalog = example_catalog();
  ensemble.kind = EnsembleKind::kGbdtSum;
  ensemble.trees.push_back(build_example_tree());
  return ensemble;
}

// Instance routed along 0 -> 2 -> 5 -> 9 -> 14.
inline Instance example_path_instance() {
  Instance instance;
  instance.values = {FeatureValue::number(0.0), FeatureValue::number(1.0),
                     FeatureValue::number(0.0), FeatureValue::number(2.0),
                     FeatureValue::number(2.0)};
  return instance;
}

// ---------------------------------------------------------------------------
// Random valid trees/ensembles with numeric ordering splits.
// ---------------------------------------------------------------------------

struct RandomTreeOptions {
  int n_features = 5;
  int max_depth = 3;
  double split_probability = 0.7;
};

inline int grow_random_node(std::mt19937_64& rng, const RandomTreeOptions& options, Tree& tree,
                            int depth, int* next_id) {
  const int id = (*next_id)++;
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const bool split = depth < options.max_depth && unit(rng) < options.split_probability;
  TreeNode node;
  node.id = id;
  if (!split) {
    node.leaf_score = std::uniform_real_distribution<double>(-1.0, 1.0)(rng);
    tree.nodes.emplace(id, std::move(node));
    return id;
  }
  const int feature =
      static_cast<int>(rng() % static_cast<std::uint64_t>(options.n_features));
  const double threshold = std::uniform_real_distribution<double>(-2.0, 2.0)(rng);
  const int left = grow_random_node(rng, options, tree, depth + 1, next_id);
  const int right = grow_random_node(rng, options, tree, depth + 1, next_id);
  tree.nodes.at(left).predicate =
      SplitPredicate{feature, SplitOp::kLessOrEqual, threshold, {}};
  tree.nodes.at(right).predicate =
      SplitPredicate{feature, SplitOp::kGreaterThan, threshold, {}};
  node.children = {left, right};
  tree.nodes.emplace(id, std::move(node));
  return id;
}

inline Tree build_random_tree(std::mt19937_64& rng, const RandomTreeOptions& options = {}) {
  Tree tree;
  int next_id = 0;
  tree.root_id = grow_random_node(rng, options, tree, 0, &next_id);
  return tree;
}

inline Ensemble build_random_ensemble(std::mt19937_64& rng, int n_trees,
                                      EnsembleKind kind = EnsembleKind::kGbdtSum,
                                      const RandomTreeOptions& options = {}) {
  Ensemble ensemble;
  std::vector<std::string> names;
  for (int f = 0; f < options.n_features; ++f) names.push_back("f" + std::to_string(f));
  ensemble.catalog = FeatureCatalog(names);
  ensemble.kind = kind;
  for (int m = 0; m < n_trees; ++m) ensemble.trees.push_back(build_random_tree(rng, options));
  return ensemble;
}

inline Instance random_numeric_instance(std::mt19937_64& rng, int n_features) {
  Instance instance;
  std::uniform_real_distribution<double> dist(-2.5, 2.5);
  for (int f = 0; f < n_features; ++f) {
    instance.values.push_back(FeatureValue::number(dist(rng)));
  }
  return instance;
}

// ---------------------------------------------------------------------------
// Independent oracles. These re-derive expected values without calling the
// library path they check.
// ---------------------------------------------------------------------------

// Follows matches by evaluating every child predicate directly.
inline std::vector<int> oracle_trace(const Tree& tree, const Instance& instance) {
  std::vector<int> path{tree.root_id};
  const TreeNode* node = &tree.nodes.at(tree.root_id);
  while (!node->children.empty()) {
    int chosen = -1;
    for (int child_id : node->children) {
      const TreeNode& child = tree.nodes.at(child_id);
      if (satisfies(*child.predicate, instance.values[static_cast<std::size_t>(
                                          child.predicate->feature)])) {
        if (chosen != -1) throw std::runtime_error("oracle: both children match");
        chosen = child_id;
      }
    }
    if (chosen == -1) throw std::runtime_error("oracle: no child matches");
    path.push_back(chosen);
    node = &tree.nodes.at(chosen);
  }
  return path;
}

// Per-tree brute-force scoring summed (or averaged) externally.
inline double oracle_predict(const Ensemble& ensemble, const Instance& instance) {
  double total = 0.0;
  for (const Tree& tree : ensemble.trees) {
    const std::vector<int> path = oracle_trace(tree, instance);
    total += *tree.nodes.at(path.back()).leaf_score * tree.weight;
  }
  if (ensemble.kind == EnsembleKind::kRfAverage) {
    total /= static_cast<double>(ensemble.trees.size());
  }
  return total;
}

// Path-walk contribution oracle with the library's documented summation order
// (trees ascending, edges root to leaf, division by tree count last).
inline std::vector<double> oracle_explain(const AnnotatedEnsemble& model,
                                          const Instance& instance, Variant variant) {
  const Ensemble& ensemble = model.ensemble;
  std::vector<double> contributions(ensemble.catalog.size(), 0.0);
  for (std::size_t m = 0; m < ensemble.trees.size(); ++m) {
    const Tree& tree = ensemble.trees[m];
    const std::vector<int> path = oracle_trace(tree, instance);
    for (std::size_t i = 1; i < path.size(); ++i) {
      const TreeNode& child = tree.nodes.at(path[i]);
      const NodeAnnotation& a = model.annotations[m].at(path[i]);
      contributions[static_cast<std::size_t>(child.predicate->feature)] +=
          tree.weight * *a.local_increment(variant);
    }
  }
  if (ensemble.kind == EnsembleKind::kRfAverage) {
    for (double& c : contributions) c /= static_cast<double>(ensemble.trees.size());
  }
  return contributions;
}

// Filters the dataset by the conjunction of predicates along each node's
// root path; returns per-node row counts.
inline std::map<int, std::vector<int>> oracle_node_rows(const Tree& tree,
                                                        const Dataset& dataset) {
  std::map<int, std::vector<int>> rows_at;
  for (const auto& [id, node] : tree.nodes) rows_at[id] = {};
  for (std::size_t r = 0; r < dataset.size(); ++r) {
    const std::vector<int> path = oracle_trace(tree, dataset.rows[r]);
    for (int id : path) rows_at[id].push_back(static_cast<int>(r));
  }
  return rows_at;
}

// Deep structural tree-model equality (ids, predicates, scores, weights).
inline bool trees_equal(const Tree& a, const Tree& b) {
  if (a.root_id != b.root_id || a.weight != b.weight) return false;
  if (a.nodes.size() != b.nodes.size()) return false;
  for (const auto& [id, na] : a.nodes) {
    auto it = b.nodes.find(id);
    if (it == b.nodes.end()) return false;
    const TreeNode& nb = it->second;
    if (na.predicate != nb.predicate) return false;
    if (na.children != nb.children) return false;
    if (na.leaf_score != nb.leaf_score) return false;
    if (na.default_child != nb.default_child) return false;
  }
  return true;
}

inline bool ensembles_equal(const Ensemble& a, const Ensemble& b) {
  if (!(a.catalog == b.catalog) || a.kind != b.kind || a.missing_policy != b.missing_policy) {
    return false;
  }
  if (a.trees.size() != b.trees.size()) return false;
  for (std::size_t m = 0; m < a.trees.size(); ++m) {
    if (!trees_equal(a.trees[m], b.trees[m])) return false;
  }
  return true;
}

// ---------------------------------------------------------------------------
// Synthetic datasets.
// ---------------------------------------------------------------------------

inline Dataset make_regression_dataset(std::size_t n_rows, int n_features,
                                       std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> noise(0.0, 0.25);
  std::uniform_real_distribution<double> value(-2.0, 2.0);
  Dataset dataset;
  std::vector<std::string> names;
  for (int f = 0; f < n_features; ++f) names.push_back("x" + std::to_string(f));
  dataset.catalog = FeatureCatalog(names);
  for (std::size_t r = 0; r < n_rows; ++r) {
    Instance row;
    double y = 0.0;
    for (int f = 0; f < n_features; ++f) {
      const double v = value(rng);
      row.values.push_back(FeatureValue::number(v));
      if (f % 2 == 0) y += (f + 1) * 0.3 * v;
      if (f % 3 == 0) y += (v > 0.5 ? 0.8 : -0.2);
    }
    dataset.rows.push_back(std::move(row));
    dataset.labels.push_back(y + noise(rng));
  }
  return dataset;
}

inline Dataset make_binary_dataset(std::size_t n_rows, int n_features, std::uint64_t seed) {
  Dataset dataset = make_regression_dataset(n_rows, n_features, seed);
  std::vector<double> sorted = dataset.labels;
  std::sort(sorted.begin(), sorted.end());
  const double cut = sorted[sorted.size() / 2];
  for (double& y : dataset.labels) y = y > cut ? 1.0 : 0.0;
  return dataset;
}

// n_features columns of N(0,1); the planted features drive a logistic label
// through asymmetric threshold indicators (1[x > 0.55]), so every planted
// feature has a clearly nonzero contribution median while noise features
// stay at zero.
inline Dataset make_planted_dataset(std::size_t n_rows, int n_features,
                                    const std::vector<int>& planted, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> standard(0.0, 1.0);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  Dataset dataset;
  std::vector<std::string> names;
  for (int f = 0; f < n_features; ++f) names.push_back("x" + std::to_string(f));
  dataset.catalog = FeatureCatalog(names);
  const double indicator_rate = 0.29;  // P(N(0,1) > 0.55)
  for (std::size_t r = 0; r < n_rows; ++r) {
    Instance row;
    row.values.reserve(static_cast<std::size_t>(n_features));
    for (int f = 0; f < n_features; ++f) {
      row.values.push_back(FeatureValue::number(standard(rng)));
    }
    double logit = 0.0;
    for (std::size_t j = 0; j < planted.size(); ++j) {
      const double v = row.values[static_cast<std::size_t>(planted[j])].number_value();
      const double coefficient = 1.6 + 0.2 * static_cast<double>(j);
      logit += coefficient * ((v > 0.55 ? 1.0 : 0.0) - indicator_rate);
    }
    const double p = 1.0 / (1.0 + std::exp(-logit));
    dataset.labels.push_back(unit(rng) < p ? 1.0 : 0.0);
    dataset.rows.push_back(std::move(row));
  }
  return dataset;
}

}  // namespace treecontrib::testutil

#endif  // TREECONTRIB_TESTS_TESTUTIL_HPP_
