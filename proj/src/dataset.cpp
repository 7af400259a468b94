/**
 * Copyright 2026, treecontrib contributors
 */
#include "treecontrib/dataset.hpp"

#include <utility>

#include "treecontrib/errors.hpp"
#include "treecontrib/text.hpp"

namespace treecontrib {

bool Dataset::labels_binary() const {
  if (labels.empty()) return false;
  for (double y : labels) {
    if (y != 0.0 && y != 1.0) return false;
  }
  return true;
}

CsvTable read_csv_table(std::string_view text) {
  CsvTable table;
  std::vector<std::string> record;
  std::string cell;
  bool in_quotes = false;
  bool cell_was_quoted = false;
  bool record_has_data = false;

  auto end_cell = [&] {
    record.push_back(std::move(cell));
    cell.clear();
    cell_was_quoted = false;
  };
  auto end_record = [&] {
    end_cell();
    if (table.header.empty()) {
      table.header = std::move(record);
    } else {
      table.rows.push_back(std::move(record));
    }
    record.clear();
    record_has_data = false;
  };

  for (std::size_t i = 0; i < text.size(); ++i) {
    const char c = text[i];
    if (in_quotes) {
      if (c == '"') {
        if (i + 1 < text.size() && text[i + 1] == '"') {
          cell += '"';
          ++i;
        } else {
          in_quotes = false;
        }
      } else {
        cell += c;
      }
      continue;
    }
    switch (c) {
      case '"':
        if (!cell.empty() || cell_was_quoted) {
          throw ParseError("csv: stray quote inside unquoted cell near offset " +
                           std::to_string(i));
        }
        in_quotes = true;
        cell_was_quoted = true;
        record_has_data = true;
        break;
      case ',':
        end_cell();
        record_has_data = true;
        break;
      case '\r':
        if (i + 1 < text.size() && text[i + 1] == '\n') ++i;
        end_record();
        break;
      case '\n':
        end_record();
        break;
      default:
        cell += c;
        record_has_data = true;
        break;
    }
  }
  if (in_quotes) throw ParseError("csv: unterminated quoted cell");
  // Final record without a trailing newline.
  if (record_has_data || !record.empty()) end_record();

  if (table.header.empty()) throw ParseError("csv: missing header row");
  return table;
}

namespace {

// Column-typed view: per column, MISSING mask plus numeric-or-token decision.
std::vector<Instance> build_instances(const CsvTable& table,
                                      const std::vector<int>& column_of_feature,
                                      std::string_view missing_token) {
  const std::size_t n_rows = table.rows.size();
  const std::size_t n_features = column_of_feature.size();

  // A column is numeric iff all non-missing cells parse numerically.
  std::vector<bool> numeric(n_features, true);
  for (std::size_t f = 0; f < n_features; ++f) {
    const std::size_t col = static_cast<std::size_t>(column_of_feature[f]);
    for (std::size_t r = 0; r < n_rows; ++r) {
      const std::string& cell = table.rows[r][col];
      if (cell == missing_token) continue;
      if (!parse_double(cell)) {
        numeric[f] = false;
        break;
      }
    }
  }

  std::vector<Instance> rows(n_rows);
  for (std::size_t r = 0; r < n_rows; ++r) {
    rows[r].values.resize(n_features);
    for (std::size_t f = 0; f < n_features; ++f) {
      const std::string& cell = table.rows[r][static_cast<std::size_t>(column_of_feature[f])];
      if (cell == missing_token) {
        rows[r].values[f] = FeatureValue::missing();
      } else if (numeric[f]) {
        rows[r].values[f] = FeatureValue::number(*parse_double(cell));
      } else {
        rows[r].values[f] = FeatureValue::token(cell);
      }
    }
  }
  return rows;
}

void check_rectangular(const CsvTable& table) {
  for (std::size_t r = 0; r < table.rows.size(); ++r) {
    if (table.rows[r].size() != table.header.size()) {
      throw ParseError("csv: row " + std::to_string(r + 2) + " has " +
                       std::to_string(table.rows[r].size()) + " cells, header has " +
                       std::to_string(table.header.size()));
    }
  }
}

}  // namespace

Dataset load_csv(std::string_view text, std::string_view label_column,
                 std::string_view missing_token) {
  const CsvTable table = read_csv_table(text);
  check_rectangular(table);
  if (table.rows.empty()) throw ParseError("csv: no data rows");

  int label_col = -1;
  std::vector<std::string> feature_names;
  std::vector<int> column_of_feature;
  for (std::size_t c = 0; c < table.header.size(); ++c) {
    if (table.header[c] == label_column) {
      if (label_col >= 0) {
        throw ParseError("csv: duplicate label column '" + std::string(label_column) + "'");
      }
      label_col = static_cast<int>(c);
    } else {
      feature_names.push_back(table.header[c]);
      column_of_feature.push_back(static_cast<int>(c));
    }
  }
  if (label_col < 0) {
    throw ParseError("csv: label column '" + std::string(label_column) + "' not found");
  }

  Dataset dataset;
  dataset.catalog = FeatureCatalog(std::move(feature_names));
  dataset.rows = build_instances(table, column_of_feature, missing_token);
  dataset.labels.reserve(table.rows.size());
  for (std::size_t r = 0; r < table.rows.size(); ++r) {
    const std::string& cell = table.rows[r][static_cast<std::size_t>(label_col)];
    auto parsed = parse_double(cell);
    if (!parsed) {
      throw ParseError("csv: non-numeric label '" + cell + "' in row " + std::to_string(r + 2));
    }
    dataset.labels.push_back(*parsed);
  }
  return dataset;
}

std::vector<Instance> load_instances_csv(std::string_view text, const FeatureCatalog& catalog,
                                         std::string_view missing_token) {
  const CsvTable table = read_csv_table(text);
  check_rectangular(table);

  std::vector<int> column_of_feature(catalog.size(), -1);
  for (std::size_t f = 0; f < catalog.size(); ++f) {
    const std::string& want = catalog.names()[f];
    for (std::size_t c = 0; c < table.header.size(); ++c) {
      if (table.header[c] == want) {
        column_of_feature[f] = static_cast<int>(c);
        break;
      }
    }
    if (column_of_feature[f] < 0) {
      throw CatalogMismatchError("csv is missing model feature column '" + want + "'");
    }
  }
  return build_instances(table, column_of_feature, missing_token);
}

Dataset align_to_catalog(Dataset dataset, const FeatureCatalog& catalog) {
  if (dataset.catalog == catalog) return dataset;
  std::vector<int> source_index(catalog.size(), -1);
  for (std::size_t f = 0; f < catalog.size(); ++f) {
    auto idx = dataset.catalog.index_of(catalog.names()[f]);
    if (!idx) {
      throw CatalogMismatchError("dataset is missing model feature '" + catalog.names()[f] + "'");
    }
    source_index[f] = *idx;
  }
  Dataset out;
  out.catalog = catalog;
  out.labels = std::move(dataset.labels);
  out.rows.resize(dataset.rows.size());
  for (std::size_t r = 0; r < dataset.rows.size(); ++r) {
    out.rows[r].values.resize(catalog.size());
    for (std::size_t f = 0; f < catalog.size(); ++f) {
      out.rows[r].values[f] =
          std::move(dataset.rows[r].values[static_cast<std::size_t>(source_index[f])]);
    }
  }
  return out;
}

std::string csv_quote(std::string_view cell) {
  bool needs_quotes = false;
  for (char c : cell) {
    if (c == ',' || c == '"' || c == '\n' || c == '\r') {
      needs_quotes = true;
      break;
    }
  }
  if (!needs_quotes) return std::string(cell);
  std::string out = "\"";
  for (char c : cell) {
    if (c == '"') out += '"';
    out += c;
  }
  out += '"';
  return out;
}

}  // namespace treecontrib
