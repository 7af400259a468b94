/**
 * Copyright 2026, treecontrib contributors
 */
#ifndef TREECONTRIB_NATIVE_JSON_HPP_
#define TREECONTRIB_NATIVE_JSON_HPP_

#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "treecontrib/annotate.hpp"
#include "treecontrib/ensemble.hpp"

namespace treecontrib {

inline constexpr std::string_view kNativeFormatVersion = "1";

/// Persistable model: ensemble plus an optional complete annotation block.
/// An empty annotations vector means the model has not been annotated.
struct NativeModelDocument {
  std::string format_version{kNativeFormatVersion};
  Ensemble ensemble;
  std::vector<std::map<int, NodeAnnotation>> annotations;

  bool has_annotations() const { return !annotations.empty(); }

  static NativeModelDocument from_ensemble(Ensemble e);
  static NativeModelDocument from_annotated(AnnotatedEnsemble a);
  AnnotatedEnsemble to_annotated() const;  // throws VariantUnavailableError when unannotated
};

// Deterministic serialization: fixed key order, nodes ascending by id,
// round-trip-exact numerics. Serializing the same document twice yields
// byte-identical text.
std::string serialize_native(const NativeModelDocument& document);

// Inverse of serialize_native on its image. li_label values are rebuilt from
// the persisted positive-class fractions. Throws ParseError with field
// context, ModelInvariantError when the ensemble fails validation.
NativeModelDocument parse_native(std::string_view text);

}  // namespace treecontrib

#endif  // TREECONTRIB_NATIVE_JSON_HPP_
