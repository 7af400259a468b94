/**
 * Copyright 2026, treecontrib contributors
 */
#ifndef TREECONTRIB_DATASET_HPP_
#define TREECONTRIB_DATASET_HPP_

#include <string>
#include <string_view>
#include <vector>

#include "treecontrib/ensemble.hpp"

namespace treecontrib {

/// Row-major feature matrix with labels. Labels are binary {0,1} or
/// regression targets; rows and labels always have equal length.
struct Dataset {
  FeatureCatalog catalog;
  std::vector<Instance> rows;
  std::vector<double> labels;

  std::size_t size() const { return rows.size(); }
  bool labels_binary() const;
};

/// Raw RFC-4180 records: each row is a vector of unquoted cell strings.
struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;
};

// Tokenizes CSV text (quoted fields, embedded separators/newlines, ""
// escapes). The first record is the header; it must be non-empty.
CsvTable read_csv_table(std::string_view text);

// Loads a labeled dataset. The catalog is the header minus the label column,
// in order. Cells equal to missing_token become MISSING. A column is numeric
// iff every non-missing cell parses as a number; otherwise all its defined
// cells are categorical tokens.
Dataset load_csv(std::string_view text, std::string_view label_column,
                 std::string_view missing_token = "");

// Loads unlabeled instances aligned to an existing catalog by column NAME;
// extra CSV columns are ignored. Throws CatalogMismatchError when a catalog
// feature has no column.
std::vector<Instance> load_instances_csv(std::string_view text, const FeatureCatalog& catalog,
                                         std::string_view missing_token = "");

// Reorders dataset columns to match `catalog` (by name); extra source columns
// are dropped. Throws CatalogMismatchError when a feature is absent.
Dataset align_to_catalog(Dataset dataset, const FeatureCatalog& catalog);

// RFC-4180 cell quoting for writers.
std::string csv_quote(std::string_view cell);

}  // namespace treecontrib

#endif  // TREECONTRIB_DATASET_HPP_
