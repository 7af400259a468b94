/**
 * Copyright 2026, treecontrib contributors
 */
#include "treecontrib/ensemble.hpp"

#include <cmath>
#include <set>
#include <utility>

#include "treecontrib/errors.hpp"
#include "treecontrib/text.hpp"

namespace treecontrib {

FeatureCatalog::FeatureCatalog(std::vector<std::string> names) : names_(std::move(names)) {
  index_.reserve(names_.size());
  for (std::size_t i = 0; i < names_.size(); ++i) {
    if (names_[i].empty()) {
      throw ModelInvariantError("feature catalog: empty name at position " + std::to_string(i));
    }
    auto [it, inserted] = index_.emplace(names_[i], static_cast<int>(i));
    if (!inserted) {
      throw ModelInvariantError("feature catalog: duplicate name '" + names_[i] + "'");
    }
  }
}

const std::string& FeatureCatalog::name(int index) const {
  if (index < 0 || static_cast<std::size_t>(index) >= names_.size()) {
    throw ModelInvariantError("feature index " + std::to_string(index) + " out of range");
  }
  return names_[static_cast<std::size_t>(index)];
}

std::optional<int> FeatureCatalog::index_of(std::string_view name) const {
  auto it = index_.find(std::string(name));
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

bool is_ordering_op(SplitOp op) {
  return op == SplitOp::kLessOrEqual || op == SplitOp::kLessThan ||
         op == SplitOp::kGreaterThan || op == SplitOp::kGreaterOrEqual;
}

std::string_view split_op_name(SplitOp op) {
  switch (op) {
    case SplitOp::kLessOrEqual: return "lessOrEqual";
    case SplitOp::kLessThan: return "lessThan";
    case SplitOp::kGreaterThan: return "greaterThan";
    case SplitOp::kGreaterOrEqual: return "greaterOrEqual";
    case SplitOp::kEqual: return "equal";
    case SplitOp::kNotEqual: return "notEqual";
  }
  return "";
}

std::optional<SplitOp> split_op_from_name(std::string_view name) {
  if (name == "lessOrEqual") return SplitOp::kLessOrEqual;
  if (name == "lessThan") return SplitOp::kLessThan;
  if (name == "greaterThan") return SplitOp::kGreaterThan;
  if (name == "greaterOrEqual") return SplitOp::kGreaterOrEqual;
  if (name == "equal") return SplitOp::kEqual;
  if (name == "notEqual") return SplitOp::kNotEqual;
  return std::nullopt;
}

std::string_view ensemble_kind_name(EnsembleKind kind) {
  return kind == EnsembleKind::kGbdtSum ? "gbdt_sum" : "rf_average";
}

std::optional<EnsembleKind> ensemble_kind_from_name(std::string_view name) {
  if (name == "gbdt_sum") return EnsembleKind::kGbdtSum;
  if (name == "rf_average") return EnsembleKind::kRfAverage;
  return std::nullopt;
}

std::string_view missing_policy_name(MissingPolicy policy) {
  switch (policy) {
    case MissingPolicy::kDefaultChild: return "default_child";
    case MissingPolicy::kAlwaysLeft: return "always_left";
    case MissingPolicy::kError: return "error";
  }
  return "";
}

std::optional<MissingPolicy> missing_policy_from_name(std::string_view name) {
  if (name == "default_child") return MissingPolicy::kDefaultChild;
  if (name == "always_left") return MissingPolicy::kAlwaysLeft;
  if (name == "error") return MissingPolicy::kError;
  return std::nullopt;
}

bool satisfies(const SplitPredicate& predicate, const FeatureValue& value) {
  if (value.is_missing()) {
    throw ModelInvariantError("satisfies() called with a MISSING value");
  }
  if (is_ordering_op(predicate.op)) {
    if (!value.is_number()) {
      throw ModelInvariantError("ordering predicate on feature " +
                                std::to_string(predicate.feature) +
                                " applied to a non-numeric value '" + value.token_value() + "'");
    }
    const double x = value.number_value();
    switch (predicate.op) {
      case SplitOp::kLessOrEqual: return x <= predicate.threshold;
      case SplitOp::kLessThan: return x < predicate.threshold;
      case SplitOp::kGreaterThan: return x > predicate.threshold;
      case SplitOp::kGreaterOrEqual: return x >= predicate.threshold;
      default: break;
    }
  }
  bool equal = false;
  if (value.is_token()) {
    equal = value.token_value() == predicate.token;
  } else if (auto parsed = parse_double(predicate.token)) {
    equal = value.number_value() == *parsed;
  }
  return predicate.op == SplitOp::kEqual ? equal : !equal;
}

bool complementary(const SplitPredicate& a, const SplitPredicate& b) {
  if (a.feature != b.feature) return false;
  auto pair_is = [&](SplitOp x, SplitOp y) {
    return (a.op == x && b.op == y) || (a.op == y && b.op == x);
  };
  if (pair_is(SplitOp::kLessOrEqual, SplitOp::kGreaterThan) ||
      pair_is(SplitOp::kLessThan, SplitOp::kGreaterOrEqual)) {
    return a.threshold == b.threshold;
  }
  if (pair_is(SplitOp::kEqual, SplitOp::kNotEqual)) {
    return a.token == b.token;
  }
  return false;
}

const TreeNode* Tree::find_node(int id) const {
  auto it = nodes.find(id);
  return it == nodes.end() ? nullptr : &it->second;
}

const TreeNode& Tree::node(int id) const {
  const TreeNode* n = find_node(id);
  if (n == nullptr) {
    throw ModelInvariantError("node id " + std::to_string(id) + " not present in tree");
  }
  return *n;
}

int route(const Tree& tree, int node_id, const Instance& instance, MissingPolicy policy) {
  const TreeNode& node = tree.node(node_id);
  if (node.is_leaf()) {
    throw ModelInvariantError("route() on leaf node " + std::to_string(node_id));
  }
  if (node.children.size() != 2) {
    throw ModelInvariantError("internal node " + std::to_string(node_id) +
                              " does not have exactly 2 children");
  }
  const TreeNode& left = tree.node(node.children[0]);
  const TreeNode& right = tree.node(node.children[1]);
  if (!left.predicate || !right.predicate) {
    throw ModelInvariantError("children of node " + std::to_string(node_id) +
                              " lack split predicates");
  }
  const int feature = left.predicate->feature;
  if (feature < 0 || static_cast<std::size_t>(feature) >= instance.size()) {
    throw ModelInvariantError("split feature " + std::to_string(feature) +
                              " out of range for instance of size " +
                              std::to_string(instance.size()));
  }
  const FeatureValue& value = instance.values[static_cast<std::size_t>(feature)];
  if (value.is_missing()) {
    switch (policy) {
      case MissingPolicy::kError:
        throw MissingValueError("missing value for feature " + std::to_string(feature) +
                                " at node " + std::to_string(node_id));
      case MissingPolicy::kAlwaysLeft:
        return node.children[0];
      case MissingPolicy::kDefaultChild:
        if (node.default_child) return *node.default_child;
        throw MissingValueError("missing value for feature " + std::to_string(feature) +
                                " at node " + std::to_string(node_id) +
                                " and no default child recorded");
    }
  }
  if (value.is_number() && !std::isfinite(value.number_value())) {
    throw ModelInvariantError("non-finite value for feature " + std::to_string(feature));
  }
  const bool match_left = satisfies(*left.predicate, value);
  const bool match_right = satisfies(*right.predicate, value);
  if (match_left == match_right) {
    throw ModelInvariantError(std::string(match_left ? "both children" : "neither child") +
                              " of node " + std::to_string(node_id) +
                              " match the instance value");
  }
  return match_left ? node.children[0] : node.children[1];
}

PredictionPath trace_path(const Tree& tree, const Instance& instance,
                          MissingPolicy policy, int tree_index) {
  PredictionPath path;
  path.tree_index = tree_index;
  int current = tree.root_id;
  path.node_ids.push_back(current);
  const TreeNode* node = &tree.node(current);
  while (!node->is_leaf()) {
    current = route(tree, current, instance, policy);
    path.node_ids.push_back(current);
    node = &tree.node(current);
  }
  if (!node->leaf_score) {
    throw ModelInvariantError("leaf node " + std::to_string(current) + " has no score");
  }
  path.leaf_score = *node->leaf_score * tree.weight;
  return path;
}

double predict(const Ensemble& ensemble, const Instance& instance) {
  if (ensemble.trees.empty()) {
    throw ModelInvariantError("ensemble has no trees");
  }
  if (instance.size() != ensemble.catalog.size()) {
    throw CatalogMismatchError("instance has " + std::to_string(instance.size()) +
                               " values, catalog has " +
                               std::to_string(ensemble.catalog.size()));
  }
  double total = 0.0;
  for (std::size_t m = 0; m < ensemble.trees.size(); ++m) {
    total += trace_path(ensemble.trees[m], instance, ensemble.missing_policy,
                        static_cast<int>(m))
                 .leaf_score;
  }
  if (ensemble.kind == EnsembleKind::kRfAverage) {
    total /= static_cast<double>(ensemble.trees.size());
  }
  return total;
}

namespace {

void check_predicate(const SplitPredicate& predicate, const FeatureCatalog& catalog,
                     int tree_index, int node_id, std::vector<Violation>& out) {
  if (predicate.feature < 0 || static_cast<std::size_t>(predicate.feature) >= catalog.size()) {
    out.push_back({tree_index, node_id, "predicate.feature.invalid",
                   "feature index " + std::to_string(predicate.feature) +
                       " not in catalog of size " + std::to_string(catalog.size())});
  }
  if (is_ordering_op(predicate.op)) {
    if (!std::isfinite(predicate.threshold)) {
      out.push_back({tree_index, node_id, "predicate.threshold.nonfinite",
                     "ordering operator requires a finite numeric threshold"});
    }
  } else if (predicate.token.empty()) {
    out.push_back({tree_index, node_id, "predicate.token.empty",
                   "equality operator requires a non-empty token"});
  }
}

void validate_tree(const Tree& tree, const FeatureCatalog& catalog, int tree_index,
                   std::vector<Violation>& out) {
  if (tree.find_node(tree.root_id) == nullptr) {
    out.push_back({tree_index, tree.root_id, "tree.root.missing",
                   "root id not present in node collection"});
    return;
  }

  std::set<int> visited;
  std::vector<int> stack{tree.root_id};
  visited.insert(tree.root_id);
  while (!stack.empty()) {
    const int id = stack.back();
    stack.pop_back();
    const TreeNode& node = tree.node(id);

    if (node.id != id) {
      out.push_back({tree_index, id, "node.id.mismatch",
                     "node stored under id " + std::to_string(id) + " carries id " +
                         std::to_string(node.id)});
    }
    if (id == tree.root_id) {
      if (node.predicate) {
        out.push_back({tree_index, id, "node.predicate.on_root",
                       "root node must not carry a predicate"});
      }
    } else if (!node.predicate) {
      out.push_back({tree_index, id, "node.predicate.missing",
                     "non-root node must carry the predicate that selects it"});
    }
    if (node.predicate) {
      check_predicate(*node.predicate, catalog, tree_index, id, out);
    }

    if (node.is_leaf()) {
      if (!node.leaf_score) {
        out.push_back({tree_index, id, "node.leaf.score.missing",
                       "leaf node must carry a score"});
      }
      continue;
    }
    if (node.leaf_score) {
      out.push_back({tree_index, id, "node.internal.score.present",
                     "internal node must not carry a leaf score"});
    }
    if (node.children.size() != 2) {
      out.push_back({tree_index, id, "node.children.count",
                     "internal node must have exactly 2 children, has " +
                         std::to_string(node.children.size())});
      continue;
    }
    const TreeNode* c1 = tree.find_node(node.children[0]);
    const TreeNode* c2 = tree.find_node(node.children[1]);
    if (c1 == nullptr || c2 == nullptr) {
      out.push_back({tree_index, id, "node.child.unknown",
                     "child id not present in node collection"});
      continue;
    }
    if (node.default_child && *node.default_child != node.children[0] &&
        *node.default_child != node.children[1]) {
      out.push_back({tree_index, id, "node.default_child.invalid",
                     "default child " + std::to_string(*node.default_child) +
                         " is not a child of this node"});
    }
    if (c1->predicate && c2->predicate) {
      if (c1->predicate->feature != c2->predicate->feature) {
        out.push_back({tree_index, id, "node.sibling.feature.mismatch",
                       "sibling predicates must share the parent's split feature"});
      } else if (!complementary(*c1->predicate, *c2->predicate)) {
        out.push_back({tree_index, id, "node.sibling.not_complementary",
                       "sibling predicates must partition the feature values"});
      }
    }
    for (int child : node.children) {
      if (!visited.insert(child).second) {
        out.push_back({tree_index, child, "tree.node.multiparent",
                       "node reached more than once from the root (shared child or cycle)"});
        continue;
      }
      stack.push_back(child);
    }
  }

  for (const auto& [id, node] : tree.nodes) {
    if (!visited.count(id)) {
      out.push_back({tree_index, id, "tree.node.unreachable",
                     "node not reachable from the root"});
    }
  }
}

}  // namespace

std::vector<Violation> validate(const Ensemble& ensemble) {
  std::vector<Violation> out;
  if (ensemble.trees.empty()) {
    out.push_back({-1, -1, "ensemble.empty", "ensemble must contain at least one tree"});
  }
  for (std::size_t m = 0; m < ensemble.trees.size(); ++m) {
    validate_tree(ensemble.trees[m], ensemble.catalog, static_cast<int>(m), out);
  }
  return out;
}

}  // namespace treecontrib
