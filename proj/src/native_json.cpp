/**
 * Copyright 2026, treecontrib contributors
 */
#include "treecontrib/native_json.hpp"

#include <json.hpp>

#include <utility>

#include "treecontrib/errors.hpp"

namespace treecontrib {

using ordered_json = nlohmann::ordered_json;

NativeModelDocument NativeModelDocument::from_ensemble(Ensemble e) {
  NativeModelDocument doc;
  doc.ensemble = std::move(e);
  return doc;
}

NativeModelDocument NativeModelDocument::from_annotated(AnnotatedEnsemble a) {
  NativeModelDocument doc;
  doc.ensemble = std::move(a.ensemble);
  doc.annotations = std::move(a.annotations);
  return doc;
}

AnnotatedEnsemble NativeModelDocument::to_annotated() const {
  if (!has_annotations()) {
    throw VariantUnavailableError("model document carries no annotations; run annotate first");
  }
  AnnotatedEnsemble out;
  out.ensemble = ensemble;
  out.annotations = annotations;
  return out;
}

namespace {

ordered_json predicate_to_json(const SplitPredicate& predicate, const FeatureCatalog& catalog) {
  ordered_json j;
  j["feature"] = catalog.name(predicate.feature);
  j["op"] = std::string(split_op_name(predicate.op));
  if (is_ordering_op(predicate.op)) {
    j["value"] = predicate.threshold;
  } else {
    j["value"] = predicate.token;
  }
  return j;
}

ordered_json annotation_to_json(const NodeAnnotation& a) {
  ordered_json j;
  j["count"] = a.count;
  j["bp_score_simple"] = a.bp_score_simple;
  j["bp_score_weighted"] = a.bp_score_weighted;
  if (a.pos_fraction) j["pos_fraction"] = *a.pos_fraction;
  if (a.li_simple) j["li_simple"] = *a.li_simple;
  if (a.li_weighted) j["li_weighted"] = *a.li_weighted;
  if (a.weighted_fallback) j["weighted_fallback"] = true;
  return j;
}

const ordered_json& require(const ordered_json& j, const char* key, const std::string& where) {
  auto it = j.find(key);
  if (it == j.end()) {
    throw ParseError("native model: missing key '" + std::string(key) + "' in " + where);
  }
  return *it;
}

SplitPredicate predicate_from_json(const ordered_json& j, const FeatureCatalog& catalog,
                                   const std::string& where) {
  SplitPredicate p;
  const auto& feature = require(j, "feature", where);
  if (!feature.is_string()) throw ParseError("native model: 'feature' must be a string in " + where);
  auto index = catalog.index_of(feature.get<std::string>());
  if (!index) {
    throw ModelInvariantError("native model: predicate feature '" +
                              feature.get<std::string>() + "' not in catalog (" + where + ")");
  }
  p.feature = *index;
  const auto& op = require(j, "op", where);
  if (!op.is_string()) throw ParseError("native model: 'op' must be a string in " + where);
  auto parsed_op = split_op_from_name(op.get<std::string>());
  if (!parsed_op) {
    throw ParseError("native model: unknown operator '" + op.get<std::string>() + "' in " + where);
  }
  p.op = *parsed_op;
  const auto& value = require(j, "value", where);
  if (is_ordering_op(p.op)) {
    if (!value.is_number()) {
      throw ParseError("native model: ordering operator requires a numeric 'value' in " + where);
    }
    p.threshold = value.get<double>();
  } else {
    if (!value.is_string()) {
      throw ParseError("native model: equality operator requires a string 'value' in " + where);
    }
    p.token = value.get<std::string>();
  }
  return p;
}

NodeAnnotation annotation_from_json(const ordered_json& j, const std::string& where) {
  NodeAnnotation a;
  const auto& count = require(j, "count", where);
  if (!count.is_number_integer()) {
    throw ParseError("native model: 'count' must be an integer in " + where);
  }
  a.count = count.get<std::int64_t>();
  a.bp_score_simple = require(j, "bp_score_simple", where).get<double>();
  a.bp_score_weighted = require(j, "bp_score_weighted", where).get<double>();
  if (auto it = j.find("pos_fraction"); it != j.end()) a.pos_fraction = it->get<double>();
  if (auto it = j.find("li_simple"); it != j.end()) a.li_simple = it->get<double>();
  if (auto it = j.find("li_weighted"); it != j.end()) a.li_weighted = it->get<double>();
  if (auto it = j.find("weighted_fallback"); it != j.end()) a.weighted_fallback = it->get<bool>();
  return a;
}

}  // namespace

std::string serialize_native(const NativeModelDocument& document) {
  ordered_json root;
  root["format_version"] = document.format_version;
  root["kind"] = std::string(ensemble_kind_name(document.ensemble.kind));
  root["missing_policy"] = std::string(missing_policy_name(document.ensemble.missing_policy));
  root["features"] = document.ensemble.catalog.names();

  ordered_json trees = ordered_json::array();
  for (std::size_t m = 0; m < document.ensemble.trees.size(); ++m) {
    const Tree& tree = document.ensemble.trees[m];
    ordered_json jt;
    jt["weight"] = tree.weight;
    jt["root"] = tree.root_id;
    ordered_json nodes = ordered_json::array();
    for (const auto& [id, node] : tree.nodes) {  // std::map: ascending id
      ordered_json jn;
      jn["id"] = id;
      jn["predicate"] = node.predicate
                            ? predicate_to_json(*node.predicate, document.ensemble.catalog)
                            : ordered_json(nullptr);
      jn["children"] = node.children;
      if (node.leaf_score) jn["score"] = *node.leaf_score;
      if (node.default_child) jn["default_child"] = *node.default_child;
      if (document.has_annotations()) {
        jn["annotation"] = annotation_to_json(document.annotations[m].at(id));
      }
      nodes.push_back(std::move(jn));
    }
    jt["nodes"] = std::move(nodes);
    trees.push_back(std::move(jt));
  }
  root["trees"] = std::move(trees);
  return root.dump(1, ' ') + "\n";
}

namespace {

NativeModelDocument parse_native_impl(std::string_view text);

}  // namespace

NativeModelDocument parse_native(std::string_view text) {
  try {
    return parse_native_impl(text);
  } catch (const nlohmann::json::exception& e) {
    // covers both malformed JSON and mistyped fields
    throw ParseError("native model: " + std::string(e.what()));
  }
}

namespace {

NativeModelDocument parse_native_impl(std::string_view text) {
  ordered_json root = ordered_json::parse(text);
  if (!root.is_object()) throw ParseError("native model: top level must be an object");

  NativeModelDocument doc;
  const auto& version = require(root, "format_version", "document");
  if (!version.is_string()) throw ParseError("native model: 'format_version' must be a string");
  doc.format_version = version.get<std::string>();
  if (doc.format_version != kNativeFormatVersion) {
    throw ParseError("native model: unrecognized format_version '" + doc.format_version + "'");
  }

  auto kind = ensemble_kind_from_name(require(root, "kind", "document").get<std::string>());
  if (!kind) throw ParseError("native model: unknown 'kind'");
  doc.ensemble.kind = *kind;
  auto policy =
      missing_policy_from_name(require(root, "missing_policy", "document").get<std::string>());
  if (!policy) throw ParseError("native model: unknown 'missing_policy'");
  doc.ensemble.missing_policy = *policy;

  const auto& features = require(root, "features", "document");
  if (!features.is_array()) throw ParseError("native model: 'features' must be an array");
  doc.ensemble.catalog = FeatureCatalog(features.get<std::vector<std::string>>());

  const auto& trees = require(root, "trees", "document");
  if (!trees.is_array()) throw ParseError("native model: 'trees' must be an array");

  bool any_annotation = false;
  for (std::size_t m = 0; m < trees.size(); ++m) {
    const std::string tree_where = "tree " + std::to_string(m);
    const auto& jt = trees[m];
    Tree tree;
    tree.weight = require(jt, "weight", tree_where).get<double>();
    tree.root_id = require(jt, "root", tree_where).get<int>();
    const auto& nodes = require(jt, "nodes", tree_where);
    if (!nodes.is_array()) throw ParseError("native model: 'nodes' must be an array in " + tree_where);

    std::map<int, NodeAnnotation> tree_annotations;
    for (const auto& jn : nodes) {
      const auto& jid = require(jn, "id", tree_where);
      if (!jid.is_number_integer()) {
        throw ParseError("native model: node 'id' must be an integer in " + tree_where);
      }
      TreeNode node;
      node.id = jid.get<int>();
      const std::string where = tree_where + " node " + std::to_string(node.id);
      const auto& predicate = require(jn, "predicate", where);
      if (!predicate.is_null()) {
        node.predicate = predicate_from_json(predicate, doc.ensemble.catalog, where);
      }
      const auto& children = require(jn, "children", where);
      if (!children.is_array()) throw ParseError("native model: 'children' must be an array in " + where);
      node.children = children.get<std::vector<int>>();
      if (auto it = jn.find("score"); it != jn.end()) node.leaf_score = it->get<double>();
      if (auto it = jn.find("default_child"); it != jn.end()) node.default_child = it->get<int>();
      if (auto it = jn.find("annotation"); it != jn.end()) {
        tree_annotations[node.id] = annotation_from_json(*it, where);
        any_annotation = true;
      }
      if (!tree.nodes.emplace(node.id, std::move(node)).second) {
        throw ParseError("native model: duplicate node id in " + where);
      }
    }
    doc.ensemble.trees.push_back(std::move(tree));
    doc.annotations.push_back(std::move(tree_annotations));
  }
  if (!any_annotation) {
    doc.annotations.clear();
  } else {
    for (std::size_t m = 0; m < doc.ensemble.trees.size(); ++m) {
      if (doc.annotations[m].size() != doc.ensemble.trees[m].nodes.size()) {
        throw ParseError("native model: annotations must cover every node of tree " +
                         std::to_string(m) + " or none at all");
      }
    }
  }

  const std::vector<Violation> violations = validate(doc.ensemble);
  if (!violations.empty()) {
    const Violation& v = violations.front();
    throw ModelInvariantError("native model: " + std::to_string(violations.size()) +
                              " invariant violation(s); first: tree " +
                              std::to_string(v.tree_index) + " node " +
                              std::to_string(v.node_id) + " " + v.rule + " (" + v.detail + ")");
  }

  // li_label is derivable data: rebuild it from the persisted fractions.
  if (doc.has_annotations()) {
    for (std::size_t m = 0; m < doc.ensemble.trees.size(); ++m) {
      for (const auto& [id, node] : doc.ensemble.trees[m].nodes) {
        const NodeAnnotation& parent = doc.annotations[m].at(id);
        for (int child : node.children) {
          NodeAnnotation& c = doc.annotations[m].at(child);
          if (parent.pos_fraction && c.pos_fraction) {
            c.li_label = *c.pos_fraction - *parent.pos_fraction;
          }
        }
      }
    }
  }
  return doc;
}

}  // namespace

}  // namespace treecontrib
