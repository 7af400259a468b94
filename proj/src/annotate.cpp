/**
 * Copyright 2026, treecontrib contributors
 */
#include "treecontrib/annotate.hpp"

#include <string>
#include <utility>
#include <vector>

#include "treecontrib/errors.hpp"
#include "treecontrib/parallel.hpp"

namespace treecontrib {

std::string_view variant_name(Variant variant) {
  switch (variant) {
    case Variant::kSimple: return "simple";
    case Variant::kWeighted: return "weighted";
    case Variant::kLabel: return "label";
  }
  return "";
}

std::optional<Variant> variant_from_name(std::string_view name) {
  if (name == "simple") return Variant::kSimple;
  if (name == "weighted") return Variant::kWeighted;
  if (name == "label") return Variant::kLabel;
  return std::nullopt;
}

double NodeAnnotation::bp_score(Variant variant) const {
  switch (variant) {
    case Variant::kSimple: return bp_score_simple;
    case Variant::kWeighted: return bp_score_weighted;
    case Variant::kLabel:
      if (!pos_fraction) {
        throw VariantUnavailableError(
            "label variant unavailable: node has no positive-class fraction");
      }
      return *pos_fraction;
  }
  throw VariantUnavailableError("unknown variant");
}

const NodeAnnotation& AnnotatedEnsemble::annotation(int tree_index, int node_id) const {
  if (tree_index < 0 || static_cast<std::size_t>(tree_index) >= annotations.size()) {
    throw VariantUnavailableError("no annotations for tree " + std::to_string(tree_index));
  }
  const auto& per_tree = annotations[static_cast<std::size_t>(tree_index)];
  auto it = per_tree.find(node_id);
  if (it == per_tree.end()) {
    throw VariantUnavailableError("no annotation for tree " + std::to_string(tree_index) +
                                  " node " + std::to_string(node_id));
  }
  return it->second;
}

bool AnnotatedEnsemble::has_variant(Variant variant) const {
  if (annotations.size() != ensemble.trees.size() || annotations.empty()) return false;
  if (variant != Variant::kLabel) return true;
  for (std::size_t m = 0; m < ensemble.trees.size(); ++m) {
    auto it = annotations[m].find(ensemble.trees[m].root_id);
    if (it == annotations[m].end() || !it->second.pos_fraction) return false;
  }
  return true;
}

double AnnotatedEnsemble::baseline(Variant variant) const {
  if (annotations.size() != ensemble.trees.size() || annotations.empty()) {
    throw VariantUnavailableError("model carries no annotations");
  }
  double total = 0.0;
  for (std::size_t m = 0; m < ensemble.trees.size(); ++m) {
    const NodeAnnotation& root = annotation(static_cast<int>(m), ensemble.trees[m].root_id);
    total += ensemble.trees[m].weight * root.bp_score(variant);
  }
  if (ensemble.kind == EnsembleKind::kRfAverage) {
    total /= static_cast<double>(ensemble.trees.size());
  }
  return total;
}

std::vector<TreeStats> count_instances(const Ensemble& ensemble, const Dataset& dataset,
                                       int threads) {
  if (!(dataset.catalog == ensemble.catalog)) {
    throw CatalogMismatchError("dataset catalog does not match the model catalog");
  }

  // Zero-initialized stats for every node so untouched nodes still appear.
  std::vector<TreeStats> zeros(ensemble.trees.size());
  for (std::size_t m = 0; m < ensemble.trees.size(); ++m) {
    for (const auto& [id, node] : ensemble.trees[m].nodes) {
      zeros[m][id] = NodeStats{};
    }
  }

  const std::size_t n_chunks = chunk_count(dataset.size());
  std::vector<std::vector<TreeStats>> partials(n_chunks, zeros);

  parallel_chunks(dataset.size(), threads, [&](std::size_t c, std::size_t begin, std::size_t end) {
    std::vector<TreeStats>& local = partials[c];
    for (std::size_t r = begin; r < end; ++r) {
      const Instance& row = dataset.rows[r];
      const double label = dataset.labels[r];
      for (std::size_t m = 0; m < ensemble.trees.size(); ++m) {
        const Tree& tree = ensemble.trees[m];
        int id = tree.root_id;
        for (;;) {
          NodeStats& stats = local[m][id];
          stats.count += 1;
          stats.label_sum += label;
          stats.label_sq_sum += label * label;
          const TreeNode& node = tree.node(id);
          if (node.is_leaf()) break;
          id = route(tree, id, row, ensemble.missing_policy);
        }
      }
    }
  });

  // Merge in chunk order: identical result at any thread count.
  std::vector<TreeStats> out = std::move(zeros);
  for (std::size_t c = 0; c < n_chunks; ++c) {
    for (std::size_t m = 0; m < out.size(); ++m) {
      for (auto& [id, acc] : out[m]) {
        const NodeStats& part = partials[c][m][id];
        acc.count += part.count;
        acc.label_sum += part.label_sum;
        acc.label_sq_sum += part.label_sq_sum;
      }
    }
  }
  return out;
}

BackpropScores backprop_scores(const Tree& tree, const TreeStats& stats) {
  BackpropScores out;

  auto count_of = [&](int id) -> std::int64_t {
    auto it = stats.find(id);
    return it == stats.end() ? 0 : it->second.count;
  };

  // Iterative post-order: children are finished before their parent.
  std::vector<std::pair<int, bool>> stack{{tree.root_id, false}};
  while (!stack.empty()) {
    auto [id, expanded] = stack.back();
    stack.pop_back();
    const TreeNode& node = tree.node(id);
    if (node.is_leaf()) {
      if (!node.leaf_score) {
        throw ModelInvariantError("leaf node " + std::to_string(id) + " has no score");
      }
      out.simple[id] = *node.leaf_score;
      out.weighted[id] = *node.leaf_score;
      continue;
    }
    if (!expanded) {
      stack.push_back({id, true});
      for (int child : node.children) stack.push_back({child, false});
      continue;
    }
    const int c1 = node.children[0];
    const int c2 = node.children[1];
    out.simple[id] = 0.5 * (out.simple[c1] + out.simple[c2]);
    const std::int64_t n1 = count_of(c1);
    const std::int64_t n2 = count_of(c2);
    if (n1 + n2 > 0) {
      out.weighted[id] = (static_cast<double>(n1) * out.weighted[c1] +
                          static_cast<double>(n2) * out.weighted[c2]) /
                         static_cast<double>(n1 + n2);
    } else {
      out.weighted[id] = 0.5 * (out.weighted[c1] + out.weighted[c2]);
      out.fallback_nodes.insert(id);
    }
  }
  return out;
}

std::map<int, double> compute_local_increments(const Tree& tree,
                                               const std::map<int, double>& scores) {
  std::map<int, double> out;
  for (const auto& [id, node] : tree.nodes) {
    for (int child : node.children) {
      out[child] = scores.at(child) - scores.at(id);
    }
  }
  return out;
}

AnnotatedEnsemble annotate(const Ensemble& ensemble, const Dataset& dataset, int threads) {
  const std::vector<TreeStats> stats = count_instances(ensemble, dataset, threads);
  const bool binary = dataset.labels_binary();

  AnnotatedEnsemble out;
  out.ensemble = ensemble;
  out.annotations.resize(ensemble.trees.size());

  for (std::size_t m = 0; m < ensemble.trees.size(); ++m) {
    const Tree& tree = ensemble.trees[m];
    const BackpropScores scores = backprop_scores(tree, stats[m]);
    const std::map<int, double> li_simple = compute_local_increments(tree, scores.simple);
    const std::map<int, double> li_weighted = compute_local_increments(tree, scores.weighted);

    std::map<int, NodeAnnotation>& per_tree = out.annotations[m];
    for (const auto& [id, node] : tree.nodes) {
      NodeAnnotation& a = per_tree[id];
      const NodeStats& s = stats[m].at(id);
      a.count = s.count;
      a.bp_score_simple = scores.simple.at(id);
      a.bp_score_weighted = scores.weighted.at(id);
      a.weighted_fallback = scores.fallback_nodes.count(id) > 0;
      if (binary && s.count > 0) {
        a.pos_fraction = s.label_sum / static_cast<double>(s.count);
      }
      if (auto it = li_simple.find(id); it != li_simple.end()) a.li_simple = it->second;
      if (auto it = li_weighted.find(id); it != li_weighted.end()) a.li_weighted = it->second;
    }
    // Label-distribution increments need both endpoint fractions.
    for (const auto& [id, node] : tree.nodes) {
      const NodeAnnotation& parent = per_tree.at(id);
      for (int child : node.children) {
        NodeAnnotation& c = per_tree.at(child);
        if (parent.pos_fraction && c.pos_fraction) {
          c.li_label = *c.pos_fraction - *parent.pos_fraction;
        }
      }
    }
  }
  return out;
}

}  // namespace treecontrib
