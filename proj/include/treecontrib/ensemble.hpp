/**
 * Copyright 2026, treecontrib contributors
 */
#ifndef TREECONTRIB_ENSEMBLE_HPP_
#define TREECONTRIB_ENSEMBLE_HPP_

#include <cstddef>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace treecontrib {

/// Ordered feature-name catalog with name -> dense index lookup.
///
/// Names must be unique and non-empty; the constructor throws
/// ModelInvariantError otherwise, so a live catalog is always consistent.
class FeatureCatalog {
 public:
  FeatureCatalog() = default;
  explicit FeatureCatalog(std::vector<std::string> names);

  std::size_t size() const { return names_.size(); }
  const std::vector<std::string>& names() const { return names_; }
  const std::string& name(int index) const;
  std::optional<int> index_of(std::string_view name) const;

  friend bool operator==(const FeatureCatalog& a, const FeatureCatalog& b) {
    return a.names_ == b.names_;
  }

 private:
  std::vector<std::string> names_;
  std::unordered_map<std::string, int> index_;
};

/// One feature cell: a number, a categorical token, or MISSING.
class FeatureValue {
 public:
  enum class Kind { kMissing, kNumber, kToken };

  FeatureValue() = default;  // missing
  static FeatureValue missing() { return FeatureValue(); }
  static FeatureValue number(double v) {
    FeatureValue fv;
    fv.kind_ = Kind::kNumber;
    fv.number_ = v;
    return fv;
  }
  static FeatureValue token(std::string t) {
    FeatureValue fv;
    fv.kind_ = Kind::kToken;
    fv.token_ = std::move(t);
    return fv;
  }

  Kind kind() const { return kind_; }
  bool is_missing() const { return kind_ == Kind::kMissing; }
  bool is_number() const { return kind_ == Kind::kNumber; }
  bool is_token() const { return kind_ == Kind::kToken; }
  double number_value() const { return number_; }
  const std::string& token_value() const { return token_; }

  friend bool operator==(const FeatureValue& a, const FeatureValue& b) {
    if (a.kind_ != b.kind_) return false;
    switch (a.kind_) {
      case Kind::kMissing: return true;
      case Kind::kNumber: return a.number_ == b.number_;
      case Kind::kToken: return a.token_ == b.token_;
    }
    return false;
  }

 private:
  Kind kind_ = Kind::kMissing;
  double number_ = 0.0;
  std::string token_;
};

/// Dense feature vector for one instance; length must equal the catalog size.
struct Instance {
  std::vector<FeatureValue> values;

  std::size_t size() const { return values.size(); }
};

enum class SplitOp {
  kLessOrEqual,
  kLessThan,
  kGreaterThan,
  kGreaterOrEqual,
  kEqual,
  kNotEqual,
};

bool is_ordering_op(SplitOp op);
std::string_view split_op_name(SplitOp op);                      // PMML operator token
std::optional<SplitOp> split_op_from_name(std::string_view name);

/// Boolean test selecting a child from its parent. Ordering operators compare
/// against `threshold`; equality operators compare against `token`.
struct SplitPredicate {
  int feature = -1;
  SplitOp op = SplitOp::kLessOrEqual;
  double threshold = 0.0;
  std::string token;

  friend bool operator==(const SplitPredicate&, const SplitPredicate&) = default;
};

// True when a defined (non-missing) value satisfies the predicate. A numeric
// value against an equality token compares numerically when the token parses
// as a number, otherwise it is simply not equal.
bool satisfies(const SplitPredicate& predicate, const FeatureValue& value);

// True when the two predicates partition all defined values of one feature.
bool complementary(const SplitPredicate& a, const SplitPredicate& b);

struct TreeNode {
  int id = -1;
  std::optional<SplitPredicate> predicate;  // how this node is selected; absent on root
  std::vector<int> children;                // empty (leaf) or exactly two ids
  std::optional<double> leaf_score;         // present iff leaf
  std::optional<int> default_child;         // routing target for MISSING values

  bool is_leaf() const { return children.empty(); }
};

/// Binary tree keyed by node id. Ids are tree-local non-negative integers;
/// map order gives deterministic ascending-id iteration everywhere.
struct Tree {
  std::map<int, TreeNode> nodes;
  int root_id = 0;
  double weight = 1.0;

  const TreeNode* find_node(int id) const;
  const TreeNode& node(int id) const;  // throws ModelInvariantError when absent
};

enum class EnsembleKind { kGbdtSum, kRfAverage };
enum class MissingPolicy { kDefaultChild, kAlwaysLeft, kError };

std::string_view ensemble_kind_name(EnsembleKind kind);
std::optional<EnsembleKind> ensemble_kind_from_name(std::string_view name);
std::string_view missing_policy_name(MissingPolicy policy);
std::optional<MissingPolicy> missing_policy_from_name(std::string_view name);

/// GBDT_SUM predicts sum(weight_m * tree_score_m); RF_AVERAGE predicts the
/// mean of tree scores. Immutable after construction by convention: every
/// operation over it is a pure function.
struct Ensemble {
  std::vector<Tree> trees;
  FeatureCatalog catalog;
  EnsembleKind kind = EnsembleKind::kGbdtSum;
  MissingPolicy missing_policy = MissingPolicy::kAlwaysLeft;
};

/// Root-to-leaf trace of one instance through one tree.
struct PredictionPath {
  int tree_index = 0;
  std::vector<int> node_ids;
  double leaf_score = 0.0;  // leaf score times tree weight
};

// Selects the unique child of an internal node that the instance satisfies.
// MISSING routing values follow the policy; a defined value matching neither
// or both children is a ModelInvariantError.
int route(const Tree& tree, int node_id, const Instance& instance, MissingPolicy policy);

PredictionPath trace_path(const Tree& tree, const Instance& instance,
                          MissingPolicy policy, int tree_index = 0);

double predict(const Ensemble& ensemble, const Instance& instance);

/// One invariant breach found by validate(). tree_index / node_id are -1 when
/// the rule is not tied to a tree or node.
struct Violation {
  int tree_index = -1;
  int node_id = -1;
  std::string rule;
  std::string detail;
};

// Checks every structural invariant; an empty result means the model is valid.
// Violations are data, not errors.
std::vector<Violation> validate(const Ensemble& ensemble);

}  // namespace treecontrib

#endif  // TREECONTRIB_ENSEMBLE_HPP_
