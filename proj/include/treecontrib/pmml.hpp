/**
 * Copyright 2026, treecontrib contributors
 */
#ifndef TREECONTRIB_PMML_HPP_
#define TREECONTRIB_PMML_HPP_

#include <string>
#include <string_view>

#include "treecontrib/ensemble.hpp"

namespace treecontrib {

// Parses the supported PMML subset: MiningModel + Segmentation with
// multipleModelMethod "sum" or "average", one TreeModel per Segment, binary
// splits with SimplePredicate only. Anything else is a loud
// UnsupportedFeatureError naming the offending construct; malformed XML is a
// ParseError; structural breaches are ModelInvariantError.
Ensemble parse_pmml(std::string_view document);

// Writes the same subset back. Annotations have no PMML home and are never
// written (callers warn when dropping them).
std::string serialize_pmml(const Ensemble& ensemble);

}  // namespace treecontrib

#endif  // TREECONTRIB_PMML_HPP_
