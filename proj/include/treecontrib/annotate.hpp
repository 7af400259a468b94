/**
 * Copyright 2026, treecontrib contributors
 */
#ifndef TREECONTRIB_ANNOTATE_HPP_
#define TREECONTRIB_ANNOTATE_HPP_

#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string_view>
#include <vector>

#include "treecontrib/dataset.hpp"
#include "treecontrib/ensemble.hpp"

namespace treecontrib {

/// Contribution variants: back-propagated score with unweighted child
/// averages (simple), with instance-count weighting (weighted), and the
/// positive-class-fraction method for random forests (label).
enum class Variant { kSimple, kWeighted, kLabel };

std::string_view variant_name(Variant variant);
std::optional<Variant> variant_from_name(std::string_view name);

/// Per-node statistics from routing a dataset through a tree.
struct NodeStats {
  std::int64_t count = 0;
  double label_sum = 0.0;
  double label_sq_sum = 0.0;
};

/// Node id -> stats for one tree; every node of the tree is present
/// (untouched nodes carry zeros).
using TreeStats = std::map<int, NodeStats>;

/// Everything the offline step attaches to one node. Local increments sit on
/// the edge INTO the node and are absent on roots; pos_fraction and li_label
/// exist only when the annotation labels are binary and the node was reached.
struct NodeAnnotation {
  std::int64_t count = 0;
  double bp_score_simple = 0.0;
  double bp_score_weighted = 0.0;
  std::optional<double> pos_fraction;
  std::optional<double> li_simple;
  std::optional<double> li_weighted;
  std::optional<double> li_label;
  bool weighted_fallback = false;  // simple average used because both child counts were 0

  std::optional<double> local_increment(Variant variant) const {
    switch (variant) {
      case Variant::kSimple: return li_simple;
      case Variant::kWeighted: return li_weighted;
      case Variant::kLabel: return li_label;
    }
    return std::nullopt;
  }
  double bp_score(Variant variant) const;  // throws VariantUnavailableError for absent label
};

/// An ensemble together with a complete annotation map (one NodeAnnotation
/// per node per tree). Immutable after construction by convention.
struct AnnotatedEnsemble {
  Ensemble ensemble;
  std::vector<std::map<int, NodeAnnotation>> annotations;  // [tree_index][node_id]

  const NodeAnnotation& annotation(int tree_index, int node_id) const;
  bool has_variant(Variant variant) const;

  // Contribution-free starting point: sum of weighted per-tree root scores
  // for GBDT_SUM, their mean for RF_AVERAGE.
  double baseline(Variant variant) const;
};

// Routes every dataset row through every tree, accumulating per-node counts
// and label statistics. Row work is split into fixed-size chunks merged in
// chunk order, so results are identical at any thread count.
std::vector<TreeStats> count_instances(const Ensemble& ensemble, const Dataset& dataset,
                                       int threads = 1);

/// Bottom-up back-propagated scores for one tree.
struct BackpropScores {
  std::map<int, double> simple;
  std::map<int, double> weighted;
  std::set<int> fallback_nodes;  // weighted formula undefined; simple average used
};

// Leaves keep their score; an interior node gets the unweighted child average
// (simple) and the instance-count-weighted child average (weighted). When
// both child counts are 0 the weighted variant falls back to the simple rule
// and the node is flagged.
BackpropScores backprop_scores(const Tree& tree, const TreeStats& stats);

// Local increment on the edge into each non-root node: LI(c) = S(c) - S(p),
// attributed to the parent's split feature by the caller.
std::map<int, double> compute_local_increments(const Tree& tree,
                                               const std::map<int, double>& scores);

// The full offline step: counts, back-propagated scores, per-edge local
// increments for every variant the inputs allow (label variant requires
// binary labels). Throws CatalogMismatchError when catalogs differ.
AnnotatedEnsemble annotate(const Ensemble& ensemble, const Dataset& dataset, int threads = 1);

}  // namespace treecontrib

#endif  // TREECONTRIB_ANNOTATE_HPP_
