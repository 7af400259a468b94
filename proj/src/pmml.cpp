/**
 * Copyright 2026, treecontrib contributors
 */
#include "treecontrib/pmml.hpp"

#include <string>
#include <utility>
#include <vector>

#include "treecontrib/errors.hpp"
#include "treecontrib/text.hpp"
#include "treecontrib/xml.hpp"

namespace treecontrib {

namespace {

using xml::Element;

const std::string& require_attribute(const Element& element, std::string_view key) {
  const std::string* value = element.attribute(key);
  if (value == nullptr) {
    throw ParseError("pmml: element " + std::string(element.local_name()) +
                     " is missing required attribute '" + std::string(key) + "'");
  }
  return *value;
}

int parse_node_id(const Element& node) {
  const std::string& raw = require_attribute(node, "id");
  try {
    std::size_t pos = 0;
    const int id = std::stoi(raw, &pos);
    if (pos != raw.size()) throw std::invalid_argument(raw);
    return id;
  } catch (const std::exception&) {
    throw ParseError("pmml: Node id '" + raw + "' is not an integer");
  }
}

bool is_predicate_element(std::string_view local) {
  return local == "SimplePredicate" || local == "True" || local == "False" ||
         local == "CompoundPredicate" || local == "SimpleSetPredicate";
}

SplitPredicate parse_simple_predicate(const Element& element, const FeatureCatalog& catalog) {
  SplitPredicate predicate;
  const std::string& field = require_attribute(element, "field");
  auto index = catalog.index_of(field);
  if (!index) {
    throw ModelInvariantError("pmml: SimplePredicate field '" + field +
                              "' is not declared in the MiningSchema");
  }
  predicate.feature = *index;

  const std::string& op_name = require_attribute(element, "operator");
  auto op = split_op_from_name(op_name);
  if (!op) {
    throw UnsupportedFeatureError("pmml: SimplePredicate operator '" + op_name +
                                  "' is outside the supported subset");
  }
  predicate.op = *op;

  const std::string& value = require_attribute(element, "value");
  if (is_ordering_op(predicate.op)) {
    auto threshold = parse_double(value);
    if (!threshold) {
      throw ModelInvariantError("pmml: ordering operator '" + op_name +
                                "' requires a numeric value, got '" + value + "'");
    }
    predicate.threshold = *threshold;
  } else {
    predicate.token = value;
  }
  return predicate;
}

void parse_node(const Element& element, const FeatureCatalog& catalog, bool is_root,
                Tree& tree, int* out_id) {
  TreeNode node;
  node.id = parse_node_id(element);

  const Element* predicate = nullptr;
  std::vector<const Element*> child_nodes;
  for (const Element& child : element.children) {
    const std::string_view local = child.local_name();
    if (is_predicate_element(local)) {
      if (predicate != nullptr) {
        throw ParseError("pmml: Node " + std::to_string(node.id) +
                         " carries more than one predicate element");
      }
      predicate = &child;
    } else if (local == "Node") {
      child_nodes.push_back(&child);
    } else if (local == "Extension" || local == "ScoreDistribution") {
      // Informational PMML elements with no routing or score semantics here.
    } else {
      throw UnsupportedFeatureError("pmml: element " + std::string(local) +
                                    " inside Node is outside the supported subset");
    }
  }

  if (predicate == nullptr) {
    throw ParseError("pmml: Node " + std::to_string(node.id) + " has no predicate element");
  }
  if (is_root) {
    if (predicate->local_name() != "True") {
      throw UnsupportedFeatureError("pmml: root Node predicate " +
                                    std::string(predicate->local_name()) +
                                    " is outside the supported subset (expected True)");
    }
  } else {
    if (predicate->local_name() != "SimplePredicate") {
      throw UnsupportedFeatureError("pmml: element " + std::string(predicate->local_name()) +
                                    " is outside the supported subset "
                                    "(only SimplePredicate splits are supported)");
    }
    node.predicate = parse_simple_predicate(*predicate, catalog);
  }

  if (const std::string* raw = element.attribute("defaultChild")) {
    auto parsed = parse_double(*raw);
    if (!parsed) throw ParseError("pmml: defaultChild '" + *raw + "' is not an integer");
    node.default_child = static_cast<int>(*parsed);
  }

  const std::string* score = element.attribute("score");
  if (child_nodes.empty()) {
    if (score != nullptr) {
      auto parsed = parse_double(*score);
      if (!parsed) {
        throw UnsupportedFeatureError("pmml: non-numeric score '" + *score +
                                      "' is outside the supported subset");
      }
      node.leaf_score = *parsed;
    }
    // A leaf without a score is caught by validate() below.
  }
  // Scores on interior nodes are ignored: they are recomputed from the
  // leaves during annotation.

  for (const Element* child : child_nodes) {
    int child_id = -1;
    parse_node(*child, catalog, /*is_root=*/false, tree, &child_id);
    node.children.push_back(child_id);
  }

  *out_id = node.id;
  if (!tree.nodes.emplace(node.id, std::move(node)).second) {
    throw ParseError("pmml: duplicate Node id " + std::to_string(*out_id) + " within one tree");
  }
}

Tree parse_tree_model(const Element& tree_model, const FeatureCatalog& catalog) {
  const std::string* function = tree_model.attribute("functionName");
  if (function != nullptr && *function != "regression") {
    throw UnsupportedFeatureError("pmml: TreeModel functionName '" + *function +
                                  "' is outside the supported subset (expected regression)");
  }
  const Element* root = tree_model.first_child("Node");
  if (root == nullptr) throw ParseError("pmml: TreeModel has no root Node");

  Tree tree;
  int root_id = -1;
  parse_node(*root, catalog, /*is_root=*/true, tree, &root_id);
  tree.root_id = root_id;
  return tree;
}

FeatureCatalog parse_mining_schema(const Element& mining_model) {
  const Element* schema = mining_model.first_child("MiningSchema");
  if (schema == nullptr) throw ParseError("pmml: MiningModel has no MiningSchema");
  std::vector<std::string> names;
  for (const Element& child : schema->children) {
    if (child.local_name() != "MiningField") continue;
    const std::string* usage = child.attribute("usageType");
    if (usage != nullptr && (*usage == "target" || *usage == "predicted")) continue;
    names.push_back(require_attribute(child, "name"));
  }
  if (names.empty()) throw ParseError("pmml: MiningSchema declares no feature fields");
  return FeatureCatalog(std::move(names));
}

}  // namespace

Ensemble parse_pmml(std::string_view document) {
  const Element root = xml::parse_document(document);
  if (root.local_name() != "PMML") {
    throw UnsupportedFeatureError("pmml: root element " + std::string(root.local_name()) +
                                  " is not PMML");
  }

  const Element* mining_model = root.first_child("MiningModel");
  if (mining_model == nullptr) {
    if (const Element* tree_model = root.first_child("TreeModel"); tree_model != nullptr) {
      throw UnsupportedFeatureError(
          "pmml: top-level TreeModel is outside the supported subset "
          "(expected MiningModel with Segmentation)");
    }
    throw UnsupportedFeatureError("pmml: document contains no MiningModel");
  }

  Ensemble ensemble;
  ensemble.catalog = parse_mining_schema(*mining_model);

  const Element* segmentation = mining_model->first_child("Segmentation");
  if (segmentation == nullptr) {
    throw UnsupportedFeatureError("pmml: MiningModel has no Segmentation");
  }
  const std::string& method = require_attribute(*segmentation, "multipleModelMethod");
  if (method == "sum") {
    ensemble.kind = EnsembleKind::kGbdtSum;
  } else if (method == "average") {
    ensemble.kind = EnsembleKind::kRfAverage;
  } else {
    throw UnsupportedFeatureError("pmml: multipleModelMethod '" + method +
                                  "' is outside the supported subset (sum, average)");
  }

  bool any_default_child = false;
  for (const Element& segment : segmentation->children) {
    if (segment.local_name() != "Segment") continue;
    const Element* tree_model = nullptr;
    for (const Element& child : segment.children) {
      const std::string_view local = child.local_name();
      if (local == "TreeModel") {
        tree_model = &child;
      } else if (is_predicate_element(local)) {
        if (local != "True") {
          throw UnsupportedFeatureError("pmml: Segment predicate " + std::string(local) +
                                        " is outside the supported subset (expected True)");
        }
      } else if (local == "Extension") {
        // skip
      } else {
        throw UnsupportedFeatureError("pmml: element " + std::string(local) +
                                      " inside Segment is outside the supported subset");
      }
    }
    if (tree_model == nullptr) throw ParseError("pmml: Segment has no TreeModel");

    Tree tree = parse_tree_model(*tree_model, ensemble.catalog);
    if (const std::string* weight = segment.attribute("weight")) {
      auto parsed = parse_double(*weight);
      if (!parsed) throw ParseError("pmml: Segment weight '" + *weight + "' is not numeric");
      tree.weight = *parsed;
    }
    const std::string* strategy = tree_model->attribute("missingValueStrategy");
    if (strategy != nullptr && *strategy == "defaultChild") any_default_child = true;
    ensemble.trees.push_back(std::move(tree));
  }
  if (ensemble.trees.empty()) throw ParseError("pmml: Segmentation contains no Segment");
  if (any_default_child) ensemble.missing_policy = MissingPolicy::kDefaultChild;

  const std::vector<Violation> violations = validate(ensemble);
  if (!violations.empty()) {
    const Violation& v = violations.front();
    throw ModelInvariantError("pmml: model fails validation with " +
                              std::to_string(violations.size()) +
                              " violation(s); first: tree " + std::to_string(v.tree_index) +
                              " node " + std::to_string(v.node_id) + " " + v.rule + " (" +
                              v.detail + ")");
  }
  return ensemble;
}

namespace {

void write_node(const Tree& tree, int id, const FeatureCatalog& catalog, int indent,
                std::string& out) {
  const TreeNode& node = tree.node(id);
  const std::string pad(static_cast<std::size_t>(indent), ' ');
  out += pad + "<Node id=\"" + std::to_string(id) + "\"";
  if (node.leaf_score) out += " score=\"" + format_double(*node.leaf_score) + "\"";
  if (node.default_child) out += " defaultChild=\"" + std::to_string(*node.default_child) + "\"";
  out += ">\n";
  if (node.predicate) {
    const SplitPredicate& p = *node.predicate;
    out += pad + " <SimplePredicate field=\"" + xml::escape_attribute(catalog.name(p.feature)) +
           "\" operator=\"" + std::string(split_op_name(p.op)) + "\" value=\"" +
           xml::escape_attribute(is_ordering_op(p.op) ? format_double(p.threshold) : p.token) +
           "\"/>\n";
  } else {
    out += pad + " <True/>\n";
  }
  for (int child : node.children) {
    write_node(tree, child, catalog, indent + 1, out);
  }
  out += pad + "</Node>\n";
}

bool feature_is_categorical(const Ensemble& ensemble, int feature) {
  for (const Tree& tree : ensemble.trees) {
    for (const auto& [id, node] : tree.nodes) {
      if (!node.predicate || node.predicate->feature != feature) continue;
      if (!is_ordering_op(node.predicate->op) && !parse_double(node.predicate->token)) {
        return true;
      }
    }
  }
  return false;
}

}  // namespace

std::string serialize_pmml(const Ensemble& ensemble) {
  const FeatureCatalog& catalog = ensemble.catalog;
  std::string out;
  out += "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
  out += "<PMML version=\"4.3\" xmlns=\"http://www.dmg.org/PMML-4_3\">\n";
  out += " <Header description=\"tree ensemble exported by treecontrib\"/>\n";
  out += " <DataDictionary numberOfFields=\"" + std::to_string(catalog.size()) + "\">\n";
  for (std::size_t f = 0; f < catalog.size(); ++f) {
    const bool categorical = feature_is_categorical(ensemble, static_cast<int>(f));
    out += "  <DataField name=\"" + xml::escape_attribute(catalog.names()[f]) + "\" optype=\"" +
           (categorical ? "categorical" : "continuous") + "\" dataType=\"" +
           (categorical ? "string" : "double") + "\"/>\n";
  }
  out += " </DataDictionary>\n";
  out += " <MiningModel functionName=\"regression\">\n";
  out += "  <MiningSchema>\n";
  for (const std::string& name : catalog.names()) {
    out += "   <MiningField name=\"" + xml::escape_attribute(name) + "\"/>\n";
  }
  out += "  </MiningSchema>\n";
  out += std::string("  <Segmentation multipleModelMethod=\"") +
         (ensemble.kind == EnsembleKind::kGbdtSum ? "sum" : "average") + "\">\n";
  for (std::size_t m = 0; m < ensemble.trees.size(); ++m) {
    const Tree& tree = ensemble.trees[m];
    out += "   <Segment id=\"" + std::to_string(m + 1) + "\"";
    if (tree.weight != 1.0) out += " weight=\"" + format_double(tree.weight) + "\"";
    out += ">\n";
    out += "    <True/>\n";
    out += "    <TreeModel functionName=\"regression\" splitCharacteristic=\"binarySplit\"";
    if (ensemble.missing_policy == MissingPolicy::kDefaultChild) {
      out += " missingValueStrategy=\"defaultChild\"";
    }
    out += ">\n";
    out += "     <MiningSchema>\n";
    for (const std::string& name : catalog.names()) {
      out += "      <MiningField name=\"" + xml::escape_attribute(name) + "\"/>\n";
    }
    out += "     </MiningSchema>\n";
    write_node(tree, tree.root_id, catalog, 5, out);
    out += "    </TreeModel>\n";
    out += "   </Segment>\n";
  }
  out += "  </Segmentation>\n";
  out += " </MiningModel>\n";
  out += "</PMML>\n";
  return out;
}

}  // namespace treecontrib
