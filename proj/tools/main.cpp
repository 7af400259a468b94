/**
 * Copyright 2026, treecontrib contributors
 */
#include <CLI11.hpp>
#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "treecontrib/annotate.hpp"
#include "treecontrib/contrib.hpp"
#include "treecontrib/dataset.hpp"
#include "treecontrib/errors.hpp"
#include "treecontrib/metrics.hpp"
#include "treecontrib/native_json.hpp"
#include "treecontrib/pmml.hpp"
#include "treecontrib/text.hpp"
#include "treecontrib/train.hpp"

namespace tc = treecontrib;
namespace fs = std::filesystem;

namespace {

// Exit codes, also documented in the README:
// 0 ok, 1 runtime error, 2 parse/model error, 3 config error,
// 4 catalog mismatch, 5 variant unavailable, 6 degenerate labels.
constexpr int kExitRuntime = 1;
constexpr int kExitParse = 2;
constexpr int kExitConfig = 3;
constexpr int kExitCatalog = 4;
constexpr int kExitVariant = 5;
constexpr int kExitLabels = 6;

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw tc::ConfigError("cannot open '" + path + "' for reading");
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

void write_file(const std::string& path, const std::string& content) {
  const fs::path target(path);
  if (target.has_parent_path()) {
    std::error_code ec;
    fs::create_directories(target.parent_path(), ec);
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw tc::ConfigError("cannot open '" + path + "' for writing");
  out << content;
}

enum class ModelFormat { kNative, kPmml };

ModelFormat detect_format(const std::string& path, const std::string& flag) {
  if (flag == "native") return ModelFormat::kNative;
  if (flag == "pmml") return ModelFormat::kPmml;
  const std::string extension = fs::path(path).extension().string();
  if (extension == ".json") return ModelFormat::kNative;
  if (extension == ".pmml" || extension == ".xml") return ModelFormat::kPmml;
  throw tc::ConfigError("cannot infer model format of '" + path +
                        "'; pass --from/--to native|pmml");
}

tc::NativeModelDocument load_model(const std::string& path, const std::string& format_flag) {
  const std::string text = read_file(path);
  switch (detect_format(path, format_flag)) {
    case ModelFormat::kPmml:
      return tc::NativeModelDocument::from_ensemble(tc::parse_pmml(text));
    case ModelFormat::kNative:
      return tc::parse_native(text);
  }
  throw tc::ConfigError("unreachable");
}

struct TrainArgs {
  std::string data;
  std::string label;
  std::string out;
  std::string model = "gbdt";
  std::string missing_token;
  std::string trace_out;
  tc::TrainConfig config;
  bool no_bootstrap = false;
};

int cmd_train(const TrainArgs& args) {
  tc::Dataset dataset = tc::load_csv(read_file(args.data), args.label, args.missing_token);
  tc::TrainConfig config = args.config;
  config.rf_bootstrap = !args.no_bootstrap;

  tc::NativeModelDocument document;
  if (args.model == "gbdt") {
    const tc::GbdtFit fit = tc::fit_gbdt(dataset, config);
    // Staged training loss: mse after each added tree.
    std::vector<double> prediction(dataset.size(), 0.0);
    for (std::size_t m = 0; m < fit.ensemble.trees.size(); ++m) {
      double sse = 0.0;
      for (std::size_t i = 0; i < dataset.size(); ++i) {
        prediction[i] += tc::trace_path(fit.ensemble.trees[m], dataset.rows[i],
                                        fit.ensemble.missing_policy)
                             .leaf_score;
        const double d = dataset.labels[i] - prediction[i];
        sse += d * d;
      }
      std::cout << "iteration " << m + 1 << ": mse="
                << tc::format_double(sse / static_cast<double>(dataset.size())) << "\n";
    }
    if (!args.trace_out.empty()) write_file(args.trace_out, tc::fit_trace_csv(fit.trace));
    document = tc::NativeModelDocument::from_ensemble(fit.ensemble);
  } else if (args.model == "rf") {
    document = tc::NativeModelDocument::from_ensemble(tc::fit_random_forest(dataset, config));
  } else {
    throw tc::ConfigError("--model must be gbdt or rf");
  }
  write_file(args.out, tc::serialize_native(document));
  std::cout << "trained " << document.ensemble.trees.size() << " tree(s) over "
            << dataset.size() << " rows; model written to " << args.out << "\n";
  return 0;
}

struct AnnotateArgs {
  std::string model;
  std::string from;
  std::string data;
  std::string label;
  std::string out;
  std::string missing_token;
  int threads = 1;
  bool dump_counts = false;
};

int cmd_annotate(const AnnotateArgs& args) {
  const tc::NativeModelDocument document = load_model(args.model, args.from);
  tc::Dataset dataset = tc::load_csv(read_file(args.data), args.label, args.missing_token);
  dataset = tc::align_to_catalog(std::move(dataset), document.ensemble.catalog);

  const tc::AnnotatedEnsemble annotated = tc::annotate(document.ensemble, dataset, args.threads);
  write_file(args.out, tc::serialize_native(tc::NativeModelDocument::from_annotated(annotated)));

  if (args.dump_counts) {
    for (std::size_t m = 0; m < annotated.annotations.size(); ++m) {
      for (const auto& [id, a] : annotated.annotations[m]) {
        std::cout << "tree " << m << " node " << id << " count " << a.count << "\n";
      }
    }
  }
  std::cout << "annotated " << annotated.ensemble.trees.size() << " tree(s) with "
            << dataset.size() << " rows; model written to " << args.out << "\n";
  return 0;
}

struct ExplainArgs {
  std::string model;
  std::string data;
  std::string out;
  std::string variant = "weighted";
  std::string format = "csv";
  std::string missing_token;
  int top_k = 5;
  int threads = 1;
};

int cmd_explain(const ExplainArgs& args) {
  const tc::NativeModelDocument document = load_model(args.model, "");
  const tc::AnnotatedEnsemble model = document.to_annotated();
  const auto variant = tc::variant_from_name(args.variant);
  if (!variant) throw tc::ConfigError("--variant must be simple, weighted or label");
  if (!model.has_variant(*variant)) {
    throw tc::VariantUnavailableError("variant '" + args.variant +
                                      "' is not available in this model's annotations");
  }

  tc::Dataset dataset;
  dataset.catalog = model.ensemble.catalog;
  dataset.rows =
      tc::load_instances_csv(read_file(args.data), model.ensemble.catalog, args.missing_token);
  dataset.labels.assign(dataset.rows.size(), 0.0);

  const tc::BatchExplanation batch = tc::explain_batch(model, dataset, *variant, args.threads);

  std::string out;
  if (args.format == "csv") {
    out = "baseline,prediction";
    for (const std::string& name : model.ensemble.catalog.names()) {
      out += "," + tc::csv_quote(name);
    }
    out += "\n";
    for (const tc::ContributionVector& row : batch.rows) {
      out += tc::format_double(row.baseline) + "," + tc::format_double(row.prediction);
      for (double c : row.contributions) out += "," + tc::format_double(c);
      out += "\n";
    }
  } else if (args.format == "jsonl") {
    for (std::size_t r = 0; r < batch.rows.size(); ++r) {
      const tc::ContributionVector& row = batch.rows[r];
      std::vector<std::pair<int, double>> order;
      for (std::size_t f = 0; f < row.contributions.size(); ++f) {
        order.emplace_back(static_cast<int>(f), row.contributions[f]);
      }
      std::stable_sort(order.begin(), order.end(), [](const auto& a, const auto& b) {
        return std::abs(a.second) > std::abs(b.second);
      });
      if (args.top_k >= 0 && order.size() > static_cast<std::size_t>(args.top_k)) {
        order.resize(static_cast<std::size_t>(args.top_k));
      }
      nlohmann::ordered_json line;
      line["row"] = r;
      line["baseline"] = row.baseline;
      line["prediction"] = row.prediction;
      nlohmann::ordered_json top = nlohmann::ordered_json::array();
      for (const auto& [feature, contribution] : order) {
        nlohmann::ordered_json entry;
        entry["feature"] = model.ensemble.catalog.name(feature);
        entry["contribution"] = contribution;
        top.push_back(std::move(entry));
      }
      line["top"] = std::move(top);
      out += line.dump() + "\n";
    }
  } else {
    throw tc::ConfigError("--format must be csv or jsonl");
  }
  write_file(args.out, out);

  // Local-accuracy summary over the batch.
  double worst = 0.0;
  for (const tc::ContributionVector& row : batch.rows) {
    double total = row.baseline;
    for (double c : row.contributions) total += c;
    worst = std::max(worst, std::abs(total - row.prediction));
  }
  std::cout << "explained " << batch.rows.size() << " instance(s), variant "
            << args.variant << "; max local-accuracy residual "
            << tc::format_double(worst) << "; written to " << args.out << "\n";
  return 0;
}

struct ReportArgs {
  std::string model;
  std::string rf_model;
  std::string data;
  std::string label;
  std::string out_dir = ".";
  std::string reference = "iv";
  std::string missing_token;
  std::vector<int> k_set = {10, 20, 30, 40, 50};
  int bins = 10;
  int threads = 1;
};

int cmd_report(const ReportArgs& args) {
  const tc::NativeModelDocument document = load_model(args.model, "");
  const tc::AnnotatedEnsemble primary = document.to_annotated();
  tc::Dataset dataset = tc::load_csv(read_file(args.data), args.label, args.missing_token);
  dataset = tc::align_to_catalog(std::move(dataset), primary.ensemble.catalog);

  tc::RankingMethod reference;
  if (args.reference == "iv") {
    reference = tc::RankingMethod::kIv;
  } else if (args.reference == "fi") {
    reference = tc::RankingMethod::kGainFi;
  } else {
    throw tc::ConfigError("--reference must be iv or fi");
  }

  std::vector<tc::CandidateSpec> candidates = {
      {"simple", &primary, tc::Variant::kSimple},
      {"weighted", &primary, tc::Variant::kWeighted},
  };
  tc::AnnotatedEnsemble rf;
  if (!args.rf_model.empty()) {
    rf = load_model(args.rf_model, "").to_annotated();
    candidates.push_back({"rf", &rf, tc::Variant::kLabel});
  } else if (primary.has_variant(tc::Variant::kLabel)) {
    candidates.push_back({"rf", &primary, tc::Variant::kLabel});
  }

  const tc::ConsistencyReport report = tc::consistency_report(
      primary, dataset, reference, candidates, args.k_set, args.bins, args.threads);

  const fs::path dir(args.out_dir);
  write_file((dir / "consistency.csv").string(),
             tc::consistency_csv(report, primary.ensemble.catalog));
  write_file((dir / "intersections.csv").string(), tc::intersections_csv(report));
  std::cout << "report over " << dataset.size() << " rows, reference " << args.reference
            << ", " << candidates.size() << " candidate(s); files written to "
            << (dir / "consistency.csv").string() << " and "
            << (dir / "intersections.csv").string() << "\n";
  return 0;
}

struct ConvertArgs {
  std::string in;
  std::string out;
  std::string from;
  std::string to;
};

int cmd_convert(const ConvertArgs& args) {
  const tc::NativeModelDocument document = load_model(args.in, args.from);
  switch (detect_format(args.out, args.to)) {
    case ModelFormat::kNative:
      write_file(args.out, tc::serialize_native(document));
      break;
    case ModelFormat::kPmml:
      if (document.has_annotations()) {
        std::cerr << "warning: annotations have no PMML representation and were dropped\n";
      }
      write_file(args.out, tc::serialize_pmml(document.ensemble));
      break;
  }
  std::cout << "converted " << args.in << " -> " << args.out << "\n";
  return 0;
}

int dispatch(const std::function<int()>& command) {
  try {
    return command();
  } catch (const tc::ParseError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitParse;
  } catch (const tc::UnsupportedFeatureError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitParse;
  } catch (const tc::ModelInvariantError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitParse;
  } catch (const tc::ConfigError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const tc::CatalogMismatchError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitCatalog;
  } catch (const tc::VariantUnavailableError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitVariant;
  } catch (const tc::DegenerateLabelsError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitLabels;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitRuntime;
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"tree-ensemble feature contributions: train, annotate, explain, report"};
  app.require_subcommand(1);

  TrainArgs train_args;
  CLI::App* train = app.add_subcommand("train", "train a reference GBDT or random forest");
  train->add_option("--data", train_args.data, "training CSV")
      ->required()
      ->check(CLI::ExistingFile);
  train->add_option("--label", train_args.label, "label column name")->required();
  train->add_option("--out", train_args.out, "output model path (.json)")->required();
  train->add_option("--model", train_args.model, "gbdt or rf (default gbdt)");
  train->add_option("--trees", train_args.config.n_trees, "number of trees");
  train->add_option("--depth", train_args.config.max_depth, "maximum tree depth");
  train->add_option("--min-leaf", train_args.config.min_samples_leaf, "min rows per leaf");
  train->add_option("--shrinkage", train_args.config.shrinkage, "gbdt shrinkage in (0,1]");
  train->add_option("--feature-fraction", train_args.config.rf_feature_fraction,
                    "rf per-split feature fraction");
  train->add_flag("--no-bootstrap", train_args.no_bootstrap, "disable rf bootstrap sampling");
  train->add_option("--seed", train_args.config.seed, "random seed")
      ->envname("TREECONTRIB_SEED");
  train->add_option("--missing-token", train_args.missing_token,
                    "cell value treated as MISSING");
  train->add_option("--trace-out", train_args.trace_out, "write per-iteration residuals CSV");

  AnnotateArgs annotate_args;
  CLI::App* annotate = app.add_subcommand(
      "annotate", "attach counts, back-propagated scores and local increments");
  annotate->add_option("--model", annotate_args.model, "model path (.json or .pmml)")
      ->required()
      ->check(CLI::ExistingFile);
  annotate->add_option("--from", annotate_args.from, "input format override (native|pmml)");
  annotate->add_option("--data", annotate_args.data, "annotation CSV")
      ->required()
      ->check(CLI::ExistingFile);
  annotate->add_option("--label", annotate_args.label, "label column name")->required();
  annotate->add_option("--out", annotate_args.out, "annotated model output (.json)")
      ->required();
  annotate->add_option("--missing-token", annotate_args.missing_token,
                       "cell value treated as MISSING");
  annotate->add_option("--threads", annotate_args.threads, "worker threads")
      ->envname("TREECONTRIB_THREADS");
  annotate->add_flag("--dump-counts", annotate_args.dump_counts,
                     "print per-node instance counts");

  ExplainArgs explain_args;
  CLI::App* explain =
      app.add_subcommand("explain", "per-instance feature contributions");
  explain->add_option("--model", explain_args.model, "annotated model (.json)")
      ->required()
      ->check(CLI::ExistingFile);
  explain->add_option("--data", explain_args.data, "instances CSV")
      ->required()
      ->check(CLI::ExistingFile);
  explain->add_option("--out", explain_args.out, "output path")->required();
  explain->add_option("--variant", explain_args.variant, "simple|weighted|label");
  explain->add_option("--format", explain_args.format, "csv or jsonl");
  explain->add_option("--top-k", explain_args.top_k, "jsonl: top contributions per row");
  explain->add_option("--missing-token", explain_args.missing_token,
                      "cell value treated as MISSING");
  explain->add_option("--threads", explain_args.threads, "worker threads")
      ->envname("TREECONTRIB_THREADS");

  ReportArgs report_args;
  CLI::App* report = app.add_subcommand(
      "report", "consistency and top-k intersection reports");
  report->add_option("--model", report_args.model, "annotated model (.json)")
      ->required()
      ->check(CLI::ExistingFile);
  report->add_option("--rf-model", report_args.rf_model,
                     "annotated RF model for the label-variant candidate")
      ->check(CLI::ExistingFile);
  report->add_option("--data", report_args.data, "evaluation CSV")
      ->required()
      ->check(CLI::ExistingFile);
  report->add_option("--label", report_args.label, "label column name")->required();
  report->add_option("--reference", report_args.reference, "reference ranking: iv or fi");
  report->add_option("--k", report_args.k_set, "top-k sizes");
  report->add_option("--bins", report_args.bins, "IV bins for numeric features");
  report->add_option("--out-dir", report_args.out_dir, "directory for report files");
  report->add_option("--missing-token", report_args.missing_token,
                     "cell value treated as MISSING");
  report->add_option("--threads", report_args.threads, "worker threads")
      ->envname("TREECONTRIB_THREADS");

  ConvertArgs convert_args;
  CLI::App* convert = app.add_subcommand("convert", "convert between native JSON and PMML");
  convert->add_option("--in", convert_args.in, "input model")
      ->required()
      ->check(CLI::ExistingFile);
  convert->add_option("--out", convert_args.out, "output model")->required();
  convert->add_option("--from", convert_args.from, "input format override (native|pmml)");
  convert->add_option("--to", convert_args.to, "output format override (native|pmml)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitConfig;
  }

  if (train->parsed()) return dispatch([&] { return cmd_train(train_args); });
  if (annotate->parsed()) return dispatch([&] { return cmd_annotate(annotate_args); });
  if (explain->parsed()) return dispatch([&] { return cmd_explain(explain_args); });
  if (report->parsed()) return dispatch([&] { return cmd_report(report_args); });
  if (convert->parsed()) return dispatch([&] { return cmd_convert(convert_args); });
  return kExitConfig;
}
