/**
 * Copyright 2026, treecontrib contributors
 */
#include "treecontrib/contrib.hpp"

#include <algorithm>
#include <string>
#include <utility>

#include "treecontrib/errors.hpp"
#include "treecontrib/parallel.hpp"

namespace treecontrib {

namespace {

// Rethrows the same error type with the offending row index attached.
[[noreturn]] void throw_with_row(std::size_t row, const Error& e) {
  const std::string msg = "row " + std::to_string(row) + ": " + e.what();
  if (dynamic_cast<const MissingValueError*>(&e)) throw MissingValueError(msg);
  if (dynamic_cast<const VariantUnavailableError*>(&e)) throw VariantUnavailableError(msg);
  if (dynamic_cast<const ModelInvariantError*>(&e)) throw ModelInvariantError(msg);
  if (dynamic_cast<const CatalogMismatchError*>(&e)) throw CatalogMismatchError(msg);
  throw Error(msg);
}

}  // namespace

ContributionVector explain_instance(const AnnotatedEnsemble& model, const Instance& instance,
                                    Variant variant) {
  const Ensemble& ensemble = model.ensemble;
  if (instance.size() != ensemble.catalog.size()) {
    throw CatalogMismatchError("instance has " + std::to_string(instance.size()) +
                               " values, catalog has " +
                               std::to_string(ensemble.catalog.size()));
  }
  if (model.annotations.size() != ensemble.trees.size() || model.annotations.empty()) {
    throw VariantUnavailableError("model carries no annotations; run annotate first");
  }

  ContributionVector out;
  out.variant = variant;
  out.contributions.assign(ensemble.catalog.size(), 0.0);

  double baseline = 0.0;
  for (std::size_t m = 0; m < ensemble.trees.size(); ++m) {
    const Tree& tree = ensemble.trees[m];
    const PredictionPath path =
        trace_path(tree, instance, ensemble.missing_policy, static_cast<int>(m));
    for (std::size_t step = 1; step < path.node_ids.size(); ++step) {
      const int child_id = path.node_ids[step];
      const TreeNode& child = tree.node(child_id);
      const NodeAnnotation& annotation = model.annotation(static_cast<int>(m), child_id);
      const auto li = annotation.local_increment(variant);
      if (!li) {
        throw VariantUnavailableError("variant '" + std::string(variant_name(variant)) +
                                      "' has no local increment at tree " + std::to_string(m) +
                                      " node " + std::to_string(child_id));
      }
      out.contributions[static_cast<std::size_t>(child.predicate->feature)] +=
          tree.weight * *li;
    }
    baseline += tree.weight *
                model.annotation(static_cast<int>(m), tree.root_id).bp_score(variant);
  }
  if (ensemble.kind == EnsembleKind::kRfAverage) {
    const double n_trees = static_cast<double>(ensemble.trees.size());
    for (double& c : out.contributions) c /= n_trees;
    baseline /= n_trees;
  }
  out.baseline = baseline;
  out.prediction = predict(ensemble, instance);
  return out;
}

ContributionVector rf_explain_instance(const AnnotatedEnsemble& model, const Instance& instance) {
  if (model.ensemble.kind != EnsembleKind::kRfAverage) {
    throw ConfigError("rf_explain_instance requires an RF_AVERAGE ensemble");
  }
  return explain_instance(model, instance, Variant::kLabel);
}

double median_of_sorted(const std::vector<double>& sorted) {
  const std::size_t n = sorted.size();
  if (n == 0) throw ConfigError("median of an empty sample");
  if (n % 2 == 1) return sorted[n / 2];
  return 0.5 * (sorted[n / 2 - 1] + sorted[n / 2]);
}

BatchExplanation explain_batch(const AnnotatedEnsemble& model, const Dataset& dataset,
                               Variant variant, int threads) {
  if (!(dataset.catalog == model.ensemble.catalog)) {
    throw CatalogMismatchError("dataset catalog does not match the model catalog");
  }

  BatchExplanation out;
  out.rows.resize(dataset.size());
  parallel_chunks(dataset.size(), threads, [&](std::size_t, std::size_t begin, std::size_t end) {
    for (std::size_t r = begin; r < end; ++r) {
      try {
        out.rows[r] = explain_instance(model, dataset.rows[r], variant);
      } catch (const Error& e) {
        throw_with_row(r, e);
      }
    }
  });

  const std::size_t n_features = model.ensemble.catalog.size();
  out.distribution.values.assign(n_features, {});
  for (std::size_t f = 0; f < n_features; ++f) {
    out.distribution.values[f].reserve(dataset.size());
  }
  for (const ContributionVector& row : out.rows) {
    for (std::size_t f = 0; f < n_features; ++f) {
      out.distribution.values[f].push_back(row.contributions[f]);
    }
  }
  out.distribution.medians.resize(n_features);
  for (std::size_t f = 0; f < n_features; ++f) {
    std::vector<double> sorted = out.distribution.values[f];
    std::sort(sorted.begin(), sorted.end());
    out.distribution.medians[f] = median_of_sorted(sorted);
  }
  return out;
}

}  // namespace treecontrib
