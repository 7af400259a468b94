/**
 * Copyright 2026, treecontrib contributors
 */
#include "treecontrib/train.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <string>
#include <utility>

#include "treecontrib/errors.hpp"
#include "treecontrib/text.hpp"

namespace treecontrib {

void TrainConfig::check() const {
  if (max_depth < 0) throw ConfigError("max_depth must be >= 0");
  if (min_samples_leaf < 1) throw ConfigError("min_samples_leaf must be >= 1");
  if (n_trees < 1) throw ConfigError("n_trees must be >= 1");
  if (!(shrinkage > 0.0 && shrinkage <= 1.0)) throw ConfigError("shrinkage must be in (0, 1]");
  if (!(rf_feature_fraction > 0.0 && rf_feature_fraction <= 1.0)) {
    throw ConfigError("rf_feature_fraction must be in (0, 1]");
  }
}

namespace {

// The trainer works on dense numeric matrices only.
std::vector<std::vector<double>> numeric_matrix(const Dataset& dataset) {
  const std::size_t n_features = dataset.catalog.size();
  std::vector<std::vector<double>> columns(n_features, std::vector<double>(dataset.size()));
  for (std::size_t r = 0; r < dataset.size(); ++r) {
    const Instance& row = dataset.rows[r];
    if (row.size() != n_features) {
      throw ConfigError("trainer: row " + std::to_string(r) + " width does not match catalog");
    }
    for (std::size_t f = 0; f < n_features; ++f) {
      const FeatureValue& v = row.values[f];
      if (v.is_missing()) {
        throw ConfigError("trainer: MISSING values are unsupported (feature '" +
                          dataset.catalog.names()[f] + "', row " + std::to_string(r) + ")");
      }
      if (!v.is_number()) {
        throw ConfigError("trainer: categorical features are unsupported (feature '" +
                          dataset.catalog.names()[f] + "')");
      }
      columns[f][r] = v.number_value();
    }
  }
  return columns;
}

struct SplitChoice {
  bool found = false;
  int feature = -1;
  double threshold = 0.0;
  double gain = 0.0;
};

struct TreeBuilder {
  const std::vector<std::vector<double>>& columns;
  const std::vector<double>& targets;  // indexed by dataset row
  const TrainConfig& config;
  std::mt19937_64* rng = nullptr;      // feature subsampling; null = all features

  Tree tree;
  int next_id = 0;

  std::vector<int> candidate_features() {
    const int n_features = static_cast<int>(columns.size());
    if (rng == nullptr || config.rf_feature_fraction >= 1.0) {
      std::vector<int> all(static_cast<std::size_t>(n_features));
      std::iota(all.begin(), all.end(), 0);
      return all;
    }
    const int k = std::max(
        1, static_cast<int>(std::ceil(config.rf_feature_fraction * n_features)));
    std::vector<int> pool(static_cast<std::size_t>(n_features));
    std::iota(pool.begin(), pool.end(), 0);
    for (int i = 0; i < k; ++i) {
      const auto j = i + static_cast<int>((*rng)() % static_cast<std::uint64_t>(n_features - i));
      std::swap(pool[static_cast<std::size_t>(i)], pool[static_cast<std::size_t>(j)]);
    }
    pool.resize(static_cast<std::size_t>(k));
    std::sort(pool.begin(), pool.end());  // ascending scan keeps the tie rule
    return pool;
  }

  SplitChoice best_split(const std::vector<int>& rows, double node_mean) {
    SplitChoice best;
    const std::size_t n = rows.size();
    std::vector<std::pair<double, double>> samples(n);  // (value, centered target)

    for (int f : candidate_features()) {
      const std::vector<double>& column = columns[static_cast<std::size_t>(f)];
      for (std::size_t i = 0; i < n; ++i) {
        const int r = rows[i];
        samples[i] = {column[static_cast<std::size_t>(r)],
                      targets[static_cast<std::size_t>(r)] - node_mean};
      }
      std::sort(samples.begin(), samples.end());

      // Prefix sums over centered targets keep the SSE arithmetic small.
      double total_sum = 0.0;
      double total_sq = 0.0;
      for (const auto& [v, c] : samples) {
        total_sum += c;
        total_sq += c * c;
      }
      const double sse_parent = total_sq - total_sum * total_sum / static_cast<double>(n);

      double left_sum = 0.0;
      double left_sq = 0.0;
      for (std::size_t i = 1; i < n; ++i) {
        left_sum += samples[i - 1].second;
        left_sq += samples[i - 1].second * samples[i - 1].second;
        if (samples[i - 1].first == samples[i].first) continue;  // not a boundary
        const std::size_t n_left = i;
        const std::size_t n_right = n - i;
        if (n_left < static_cast<std::size_t>(config.min_samples_leaf) ||
            n_right < static_cast<std::size_t>(config.min_samples_leaf)) {
          continue;
        }
        const double right_sum = total_sum - left_sum;
        const double right_sq = total_sq - left_sq;
        const double sse_left = left_sq - left_sum * left_sum / static_cast<double>(n_left);
        const double sse_right =
            right_sq - right_sum * right_sum / static_cast<double>(n_right);
        const double gain = sse_parent - sse_left - sse_right;
        if (gain > best.gain) {
          double threshold = samples[i - 1].first +
                             0.5 * (samples[i].first - samples[i - 1].first);
          // Adjacent doubles can round the midpoint up to the right value;
          // fall back to the left value so "<= threshold" still separates.
          if (threshold >= samples[i].first) threshold = samples[i - 1].first;
          best.found = true;
          best.feature = f;
          best.threshold = threshold;
          best.gain = gain;
        }
      }
    }
    return best;
  }

  int build(std::vector<int> rows, int depth) {
    const int id = next_id++;
    const std::size_t n = rows.size();

    double sum = 0.0;
    for (int r : rows) sum += targets[static_cast<std::size_t>(r)];
    const double mean = sum / static_cast<double>(n);

    auto make_leaf = [&] {
      TreeNode node;
      node.id = id;
      node.leaf_score = mean;
      tree.nodes.emplace(id, std::move(node));
      return id;
    };

    if (depth >= config.max_depth || n < 2 * static_cast<std::size_t>(config.min_samples_leaf)) {
      return make_leaf();
    }
    const auto [min_it, max_it] =
        std::minmax_element(rows.begin(), rows.end(), [&](int a, int b) {
          return targets[static_cast<std::size_t>(a)] < targets[static_cast<std::size_t>(b)];
        });
    if (targets[static_cast<std::size_t>(*min_it)] == targets[static_cast<std::size_t>(*max_it)]) {
      return make_leaf();  // constant targets: zero variance everywhere
    }

    const SplitChoice split = best_split(rows, mean);
    if (!split.found || !(split.gain > 0.0)) return make_leaf();

    std::vector<int> left_rows;
    std::vector<int> right_rows;
    const std::vector<double>& column = columns[static_cast<std::size_t>(split.feature)];
    for (int r : rows) {
      if (column[static_cast<std::size_t>(r)] <= split.threshold) {
        left_rows.push_back(r);
      } else {
        right_rows.push_back(r);
      }
    }
    rows.clear();
    rows.shrink_to_fit();

    TreeNode node;
    node.id = id;
    const int left_id = build(std::move(left_rows), depth + 1);
    const int right_id = build(std::move(right_rows), depth + 1);
    tree.nodes.at(left_id).predicate =
        SplitPredicate{split.feature, SplitOp::kLessOrEqual, split.threshold, {}};
    tree.nodes.at(right_id).predicate =
        SplitPredicate{split.feature, SplitOp::kGreaterThan, split.threshold, {}};
    node.children = {left_id, right_id};
    tree.nodes.emplace(id, std::move(node));
    return id;
  }
};

Tree fit_tree(const std::vector<std::vector<double>>& columns, const std::vector<double>& targets,
              const std::vector<int>& rows, const TrainConfig& config, std::mt19937_64* rng) {
  TreeBuilder builder{columns, targets, config, rng, {}, 0};
  builder.tree.root_id = builder.build(rows, 0);
  return std::move(builder.tree);
}

double tree_predict(const Tree& tree, const std::vector<std::vector<double>>& columns, int row) {
  int id = tree.root_id;
  const TreeNode* node = &tree.node(id);
  while (!node->is_leaf()) {
    const TreeNode& left = tree.node(node->children[0]);
    const double value = columns[static_cast<std::size_t>(left.predicate->feature)]
                                [static_cast<std::size_t>(row)];
    id = value <= left.predicate->threshold ? node->children[0] : node->children[1];
    node = &tree.node(id);
  }
  return *node->leaf_score;
}

std::vector<int> all_rows(std::size_t n) {
  std::vector<int> rows(n);
  std::iota(rows.begin(), rows.end(), 0);
  return rows;
}

std::mt19937_64 tree_rng(std::uint64_t seed, std::size_t tree_index) {
  // splitmix-style stream separation per tree
  return std::mt19937_64(seed + 0x9e3779b97f4a7c15ULL * (tree_index + 1));
}

}  // namespace

Tree fit_regression_tree(const Dataset& dataset, const std::vector<double>& targets,
                         const TrainConfig& config) {
  config.check();
  if (dataset.size() == 0) throw ConfigError("trainer: dataset is empty");
  if (targets.size() != dataset.size()) {
    throw ConfigError("trainer: targets length does not match dataset size");
  }
  const auto columns = numeric_matrix(dataset);
  return fit_tree(columns, targets, all_rows(dataset.size()), config, nullptr);
}

GbdtFit fit_gbdt(const Dataset& dataset, const TrainConfig& config) {
  config.check();
  if (dataset.size() == 0) throw ConfigError("trainer: dataset is empty");
  const auto columns = numeric_matrix(dataset);
  const std::size_t n = dataset.size();

  GbdtFit fit;
  fit.ensemble.catalog = dataset.catalog;
  fit.ensemble.kind = EnsembleKind::kGbdtSum;
  fit.ensemble.missing_policy = MissingPolicy::kAlwaysLeft;

  std::vector<double> prediction(n, 0.0);  // f_0 = 0
  std::vector<double> residuals(n);
  for (int m = 0; m < config.n_trees; ++m) {
    for (std::size_t i = 0; i < n; ++i) {
      residuals[i] = dataset.labels[i] - prediction[i];
    }
    fit.trace.residuals.push_back(residuals);
    fit.trace.tree_rows.push_back(all_rows(n));

    Tree tree = fit_tree(columns, residuals, all_rows(n), config, nullptr);
    if (config.shrinkage != 1.0) {
      for (auto& [id, node] : tree.nodes) {
        if (node.leaf_score) *node.leaf_score *= config.shrinkage;
      }
    }
    for (std::size_t i = 0; i < n; ++i) {
      prediction[i] += tree_predict(tree, columns, static_cast<int>(i));
    }
    fit.ensemble.trees.push_back(std::move(tree));
  }
  return fit;
}

Ensemble fit_random_forest(const Dataset& dataset, const TrainConfig& config) {
  config.check();
  if (dataset.size() == 0) throw ConfigError("trainer: dataset is empty");
  if (!dataset.labels_binary()) {
    throw ConfigError("trainer: random forest requires binary {0,1} labels");
  }
  const auto columns = numeric_matrix(dataset);
  const std::size_t n = dataset.size();

  Ensemble forest;
  forest.catalog = dataset.catalog;
  forest.kind = EnsembleKind::kRfAverage;
  forest.missing_policy = MissingPolicy::kAlwaysLeft;

  for (int m = 0; m < config.n_trees; ++m) {
    std::mt19937_64 rng = tree_rng(config.seed, static_cast<std::size_t>(m));
    std::vector<int> rows;
    if (config.rf_bootstrap) {
      rows.resize(n);
      for (std::size_t i = 0; i < n; ++i) {
        rows[i] = static_cast<int>(rng() % static_cast<std::uint64_t>(n));
      }
    } else {
      rows = all_rows(n);
    }
    forest.trees.push_back(fit_tree(columns, dataset.labels, rows, config, &rng));
  }
  return forest;
}

std::string fit_trace_csv(const FitTrace& trace) {
  std::string out = "iteration,row,residual\n";
  for (std::size_t m = 0; m < trace.residuals.size(); ++m) {
    for (std::size_t i = 0; i < trace.residuals[m].size(); ++i) {
      out += std::to_string(m) + "," + std::to_string(i) + "," +
             format_double(trace.residuals[m][i]) + "\n";
    }
  }
  return out;
}

}  // namespace treecontrib
