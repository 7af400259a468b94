/**
 * Copyright 2026, treecontrib contributors
 *
 * Acceptance suite: one criterion per entry, one PASS/FAIL line each.
 */
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <numeric>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "treecontrib/annotate.hpp"
#include "treecontrib/contrib.hpp"
#include "treecontrib/dataset.hpp"
#include "treecontrib/errors.hpp"
#include "treecontrib/metrics.hpp"
#include "treecontrib/native_json.hpp"
#include "treecontrib/pmml.hpp"
#include "treecontrib/train.hpp"
#include "testutil.hpp"

namespace tc = treecontrib;
namespace tu = treecontrib::testutil;
namespace fs = std::filesystem;

namespace {

struct CheckFailure {
  std::string message;
};

void check(bool condition, const std::string& message) {
  if (!condition) throw CheckFailure{message};
}

void check_near(double actual, double expected, double tolerance, const std::string& what) {
  if (!(std::abs(actual - expected) <= tolerance)) {
    std::ostringstream os;
    os << what << ": got " << actual << ", want " << expected << " +/- " << tolerance;
    throw CheckFailure{os.str()};
  }
}

double elapsed_seconds(const std::chrono::steady_clock::time_point& start) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

// Average-rank Spearman correlation.
double spearman(const std::vector<double>& a, const std::vector<double>& b) {
  auto ranks = [](const std::vector<double>& values) {
    const std::size_t n = values.size();
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(),
              [&](std::size_t x, std::size_t y) { return values[x] < values[y]; });
    std::vector<double> rank(n);
    std::size_t i = 0;
    while (i < n) {
      std::size_t j = i;
      while (j + 1 < n && values[order[j + 1]] == values[order[i]]) ++j;
      const double average = 0.5 * (static_cast<double>(i) + static_cast<double>(j)) + 1.0;
      for (std::size_t k = i; k <= j; ++k) rank[order[k]] = average;
      i = j + 1;
    }
    return rank;
  };
  const std::vector<double> ra = ranks(a);
  const std::vector<double> rb = ranks(b);
  const double n = static_cast<double>(ra.size());
  double mean_a = 0.0;
  double mean_b = 0.0;
  for (std::size_t i = 0; i < ra.size(); ++i) {
    mean_a += ra[i];
    mean_b += rb[i];
  }
  mean_a /= n;
  mean_b /= n;
  double cov = 0.0;
  double var_a = 0.0;
  double var_b = 0.0;
  for (std::size_t i = 0; i < ra.size(); ++i) {
    const double da = ra[i] - mean_a;
    const double db = rb[i] - mean_b;
    cov += da * db;
    var_a += da * da;
    var_b += db * db;
  }
  if (var_a == 0.0 || var_b == 0.0) return 0.0;
  return cov / std::sqrt(var_a * var_b);
}

tc::Dataset example_routing_dataset() {
  return tc::load_csv(tu::read_file(tu::fixture_path("example_routing.csv")), "label", "?");
}

// ---------------------------------------------------------------------------
// Criterion 1: the checked-in worked-example fixture reproduces its reference numbers.
// ---------------------------------------------------------------------------
void criterion_1() {
  const auto start = std::chrono::steady_clock::now();
  const tc::Ensemble ensemble =
      tc::parse_pmml(tu::read_file(tu::fixture_path("example_tree.pmml")));
  const tc::AnnotatedEnsemble model = tc::annotate(ensemble, example_routing_dataset());

  check_near(model.annotation(0, 6).bp_score_simple, 0.0770, 0.0001,
             "bp_score_simple(n6)");
  check_near(*model.annotation(0, 11).li_simple, 0.0079, 0.0002, "LI_feat5(n11)");

  tc::Instance instance;
  instance.values = {tc::FeatureValue::number(0.0), tc::FeatureValue::number(1.0),
                     tc::FeatureValue::number(0.0), tc::FeatureValue::number(2.0),
                     tc::FeatureValue::number(2.0)};
  const tc::PredictionPath path =
      tc::trace_path(ensemble.trees[0], instance, ensemble.missing_policy);
  check(path.node_ids == std::vector<int>{0, 2, 5, 9, 14},
        "instance must traverse 0->2->5->9->14");

  const tc::ContributionVector fc =
      tc::explain_instance(model, instance, tc::Variant::kSimple);
  const auto feature = [&](const char* name) {
    return static_cast<std::size_t>(*ensemble.catalog.index_of(name));
  };
  check_near(fc.contributions[feature("feat5")], -0.0201, 0.0001, "FC_feat5");
  check_near(fc.contributions[feature("feat2")], -0.0073, 0.0001, "FC_feat2");
  check_near(fc.contributions[feature("feat4")], -0.0005, 0.0001, "FC_feat4");
  check(elapsed_seconds(start) < 1.0, "criterion 1 must finish within 1 s");
}

// ---------------------------------------------------------------------------
// Criterion 2: local accuracy on a trained 20-tree depth-4 GBDT, 2000 rows.
// ---------------------------------------------------------------------------
void criterion_2() {
  const auto start = std::chrono::steady_clock::now();
  const tc::Dataset dataset = tu::make_regression_dataset(2000, 8, 1234);
  tc::TrainConfig config;
  config.n_trees = 20;
  config.max_depth = 4;
  config.shrinkage = 0.3;
  const tc::GbdtFit fit = tc::fit_gbdt(dataset, config);
  const tc::AnnotatedEnsemble model = tc::annotate(fit.ensemble, dataset, 4);

  for (const tc::Variant variant : {tc::Variant::kSimple, tc::Variant::kWeighted}) {
    const tc::BatchExplanation batch = tc::explain_batch(model, dataset, variant, 4);
    for (std::size_t r = 0; r < batch.rows.size(); ++r) {
      const tc::ContributionVector& row = batch.rows[r];
      double total = row.baseline;
      for (double c : row.contributions) total += c;
      if (std::abs(total - row.prediction) > 1e-9) {
        std::ostringstream os;
        os << "local accuracy broken at row " << r << " variant "
           << tc::variant_name(variant) << ": residual " << std::abs(total - row.prediction);
        throw CheckFailure{os.str()};
      }
    }
  }
  check(elapsed_seconds(start) < 10.0, "criterion 2 must finish within 10 s");
}

// ---------------------------------------------------------------------------
// Criterion 3: LS special case. Weighted back-propagated scores equal per-tree
// residual means; weighted contributions equal label-distribution
// contributions on a single-tree LS model over binary labels.
// ---------------------------------------------------------------------------
void criterion_3() {
  // (a) bp_score_weighted == mean fitting residual at every node, every tree.
  {
    const tc::Dataset dataset = tu::make_regression_dataset(600, 5, 42);
    tc::TrainConfig config;
    config.n_trees = 5;
    config.max_depth = 3;
    config.shrinkage = 1.0;  // scores stay exact residual means
    const tc::GbdtFit fit = tc::fit_gbdt(dataset, config);
    const tc::AnnotatedEnsemble model = tc::annotate(fit.ensemble, dataset);
    for (std::size_t m = 0; m < fit.ensemble.trees.size(); ++m) {
      const auto rows_at = tu::oracle_node_rows(fit.ensemble.trees[m], dataset);
      for (const auto& [id, rows] : rows_at) {
        check(!rows.empty(), "trained tree node must hold training rows");
        double mean = 0.0;
        for (int r : rows) mean += fit.trace.residuals[m][static_cast<std::size_t>(r)];
        mean /= static_cast<double>(rows.size());
        if (std::abs(model.annotation(static_cast<int>(m), id).bp_score_weighted - mean) >
            1e-9) {
          std::ostringstream os;
          os << "bp_score_weighted differs from residual mean at tree " << m << " node "
             << id;
          throw CheckFailure{os.str()};
        }
      }
    }
  }
  // (b) WEIGHTED contributions == label-distribution contributions, 1e-9.
  {
    const tc::Dataset dataset = tu::make_binary_dataset(500, 5, 43);
    tc::TrainConfig config;
    config.n_trees = 1;
    config.max_depth = 3;
    config.shrinkage = 1.0;
    const tc::GbdtFit fit = tc::fit_gbdt(dataset, config);
    const tc::AnnotatedEnsemble model = tc::annotate(fit.ensemble, dataset);
    check(model.has_variant(tc::Variant::kLabel),
          "binary labels must enable the label variant");
    for (std::size_t r = 0; r < dataset.size(); ++r) {
      const tc::ContributionVector weighted =
          tc::explain_instance(model, dataset.rows[r], tc::Variant::kWeighted);
      const tc::ContributionVector label =
          tc::explain_instance(model, dataset.rows[r], tc::Variant::kLabel);
      for (std::size_t f = 0; f < weighted.contributions.size(); ++f) {
        if (std::abs(weighted.contributions[f] - label.contributions[f]) > 1e-9) {
          std::ostringstream os;
          os << "weighted vs label contribution differs at row " << r << " feature " << f;
          throw CheckFailure{os.str()};
        }
      }
    }
  }
}

// ---------------------------------------------------------------------------
// Criterion 4: telescoping and count conservation over 1,000 randomized trees.
// ---------------------------------------------------------------------------
void criterion_4() {
  std::mt19937_64 rng(777);

  // Random per-node statistics: random leaf counts (zeros allowed) and label
  // sums, aggregated upward.
  auto synthetic_stats = [&](const tc::Tree& tree) {
    tc::TreeStats stats;
    std::vector<std::pair<int, bool>> stack{{tree.root_id, false}};
    while (!stack.empty()) {
      auto [id, expanded] = stack.back();
      stack.pop_back();
      const tc::TreeNode& node = tree.nodes.at(id);
      if (node.is_leaf()) {
        tc::NodeStats s;
        s.count = static_cast<std::int64_t>(rng() % 30);  // zero possible
        s.label_sum = s.count == 0
                          ? 0.0
                          : static_cast<double>(rng() % static_cast<std::uint64_t>(s.count + 1));
        stats[id] = s;
        continue;
      }
      if (!expanded) {
        stack.push_back({id, true});
        for (int child : node.children) stack.push_back({child, false});
        continue;
      }
      tc::NodeStats s;
      for (int child : node.children) {
        s.count += stats.at(child).count;
        s.label_sum += stats.at(child).label_sum;
      }
      stats[id] = s;
    }
    return stats;
  };

  auto walk_paths = [](const tc::Tree& tree, const std::function<void(const std::vector<int>&)>& fn) {
    std::vector<std::vector<int>> stack{{tree.root_id}};
    while (!stack.empty()) {
      std::vector<int> path = std::move(stack.back());
      stack.pop_back();
      const tc::TreeNode& node = tree.nodes.at(path.back());
      if (node.is_leaf()) {
        fn(path);
        continue;
      }
      for (int child : node.children) {
        std::vector<int> extended = path;
        extended.push_back(child);
        stack.push_back(std::move(extended));
      }
    }
  };

  tu::RandomTreeOptions options;
  options.max_depth = 5;
  options.split_probability = 0.8;

  for (int trial = 0; trial < 1000; ++trial) {
    const tc::Tree tree = tu::build_random_tree(rng, options);
    const tc::TreeStats stats = synthetic_stats(tree);

    // Count conservation: parent equals the exact sum of its children.
    for (const auto& [id, node] : tree.nodes) {
      if (node.is_leaf()) continue;
      check(stats.at(id).count ==
                stats.at(node.children[0]).count + stats.at(node.children[1]).count,
            "count conservation");
    }

    const tc::BackpropScores scores = tc::backprop_scores(tree, stats);
    const auto li_simple = tc::compute_local_increments(tree, scores.simple);
    const auto li_weighted = tc::compute_local_increments(tree, scores.weighted);

    // Label variant: positive fractions where counts allow.
    std::map<int, double> fractions;
    for (const auto& [id, s] : stats) {
      if (s.count > 0) {
        fractions[id] = s.label_sum / static_cast<double>(s.count);
      }
    }

    walk_paths(tree, [&](const std::vector<int>& path) {
      const double tolerance = 1e-12 * static_cast<double>(path.size());
      double simple_sum = 0.0;
      double weighted_sum = 0.0;
      for (std::size_t i = 1; i < path.size(); ++i) {
        simple_sum += li_simple.at(path[i]);
        weighted_sum += li_weighted.at(path[i]);
      }
      check(std::abs(simple_sum - (scores.simple.at(path.back()) -
                                   scores.simple.at(path.front()))) <= tolerance,
            "simple telescoping");
      check(std::abs(weighted_sum - (scores.weighted.at(path.back()) -
                                     scores.weighted.at(path.front()))) <= tolerance,
            "weighted telescoping");

      // Label telescoping on fully covered paths.
      bool covered = true;
      for (int id : path) covered = covered && fractions.count(id) > 0;
      if (covered) {
        double label_sum = 0.0;
        for (std::size_t i = 1; i < path.size(); ++i) {
          label_sum += fractions.at(path[i]) - fractions.at(path[i - 1]);
        }
        check(std::abs(label_sum - (fractions.at(path.back()) -
                                    fractions.at(path.front()))) <= tolerance,
              "label telescoping");
      }
    });
  }

  // The same invariants through the real dataset-driven pipeline.
  for (int trial = 0; trial < 50; ++trial) {
    tu::RandomTreeOptions pipeline_options;
    pipeline_options.max_depth = 4;
    tc::Ensemble ensemble = tu::build_random_ensemble(rng, 2, tc::EnsembleKind::kGbdtSum,
                                                      pipeline_options);
    tc::Dataset dataset;
    dataset.catalog = ensemble.catalog;
    for (int r = 0; r < 64; ++r) {
      dataset.rows.push_back(tu::random_numeric_instance(rng, 5));
      dataset.labels.push_back(static_cast<double>(rng() % 2));
    }
    const tc::AnnotatedEnsemble model = tc::annotate(ensemble, dataset);
    for (std::size_t m = 0; m < ensemble.trees.size(); ++m) {
      for (const auto& [id, node] : ensemble.trees[m].nodes) {
        if (node.is_leaf()) continue;
        check(model.annotation(static_cast<int>(m), id).count ==
                  model.annotation(static_cast<int>(m), node.children[0]).count +
                      model.annotation(static_cast<int>(m), node.children[1]).count,
              "pipeline count conservation");
      }
    }
  }
}

// ---------------------------------------------------------------------------
// Criterion 5: bitwise oracle equivalence of explain_instance.
// ---------------------------------------------------------------------------
void criterion_5() {
  std::mt19937_64 rng(31337);
  int instances_checked = 0;
  while (instances_checked < 500) {
    tu::RandomTreeOptions options;
    options.max_depth = 4;  // <= 4 levels
    const int n_trees = 1 + static_cast<int>(rng() % 5);
    const tc::EnsembleKind kind =
        rng() % 2 == 0 ? tc::EnsembleKind::kGbdtSum : tc::EnsembleKind::kRfAverage;
    const tc::Ensemble ensemble = tu::build_random_ensemble(rng, n_trees, kind, options);

    tc::Dataset dataset;
    dataset.catalog = ensemble.catalog;
    for (int r = 0; r < 48; ++r) {
      dataset.rows.push_back(tu::random_numeric_instance(rng, 5));
      dataset.labels.push_back(static_cast<double>(rng() % 2));
    }
    const tc::AnnotatedEnsemble model = tc::annotate(ensemble, dataset);

    for (int i = 0; i < 25 && instances_checked < 500; ++i, ++instances_checked) {
      const tc::Instance instance = tu::random_numeric_instance(rng, 5);
      for (const tc::Variant variant : {tc::Variant::kSimple, tc::Variant::kWeighted}) {
        const tc::ContributionVector fc = tc::explain_instance(model, instance, variant);
        const std::vector<double> oracle = tu::oracle_explain(model, instance, variant);
        if (fc.contributions != oracle) {
          throw CheckFailure{"explain_instance differs bitwise from the path-walk oracle"};
        }
      }
    }
  }
}

// ---------------------------------------------------------------------------
// Criterion 6: directional consistency over 20 seeds (planted features).
// ---------------------------------------------------------------------------
void criterion_6() {
  const auto start = std::chrono::steady_clock::now();
  const std::vector<int> planted = {3, 11, 19, 27, 35, 43, 51, 59};
  int passes = 0;
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    const tc::Dataset dataset = tu::make_planted_dataset(1000, 60, planted, seed);
    tc::TrainConfig config;
    config.n_trees = 25;
    config.max_depth = 3;
    config.shrinkage = 0.3;
    config.min_samples_leaf = 10;
    const tc::GbdtFit fit = tc::fit_gbdt(dataset, config);
    const tc::AnnotatedEnsemble model = tc::annotate(fit.ensemble, dataset, 4);

    const tc::FeatureRanking fi = tc::gain_feature_importance(model, dataset, 4);
    const tc::BatchExplanation batch =
        tc::explain_batch(model, dataset, tc::Variant::kWeighted, 4);
    const tc::FeatureRanking fc = tc::fc_median_ranking(batch.distribution);

    std::vector<double> fi_scores(60, 0.0);
    for (const auto& [f, score] : fi.entries) fi_scores[static_cast<std::size_t>(f)] = score;
    std::vector<double> fc_scores(60, 0.0);
    for (const auto& [f, score] : fc.entries) fc_scores[static_cast<std::size_t>(f)] = score;

    const double rho = spearman(fi_scores, fc_scores);
    std::set<int> top10;
    for (int i = 0; i < 10; ++i) top10.insert(fc.entries[static_cast<std::size_t>(i)].first);
    int recovered = 0;
    for (int f : planted) recovered += top10.count(f) > 0 ? 1 : 0;

    if (rho > 0.0 && recovered >= 6) ++passes;
  }
  std::ostringstream os;
  os << "only " << passes << "/20 seeds passed (need >= 16)";
  check(passes >= 16, os.str());
  check(elapsed_seconds(start) < 120.0, "criterion 6 must finish within 2 min");
}

// ---------------------------------------------------------------------------
// Criterion 7: intersections.csv pipeline with RF, SIMPLE, WEIGHTED candidates.
// ---------------------------------------------------------------------------
void criterion_7() {
  const std::vector<int> planted = {2, 9, 16, 23, 30, 37, 44, 51};
  const tc::Dataset dataset = tu::make_planted_dataset(800, 60, planted, 99);

  tc::TrainConfig gbdt_config;
  gbdt_config.n_trees = 15;
  gbdt_config.max_depth = 3;
  gbdt_config.shrinkage = 0.3;
  gbdt_config.min_samples_leaf = 10;
  const tc::GbdtFit fit = tc::fit_gbdt(dataset, gbdt_config);
  const tc::AnnotatedEnsemble gbdt = tc::annotate(fit.ensemble, dataset, 4);

  tc::TrainConfig rf_config;
  rf_config.n_trees = 15;
  rf_config.max_depth = 4;
  rf_config.rf_feature_fraction = 0.4;
  rf_config.seed = 5;
  rf_config.min_samples_leaf = 5;
  const tc::Ensemble forest = tc::fit_random_forest(dataset, rf_config);
  const tc::AnnotatedEnsemble rf = tc::annotate(forest, dataset, 4);

  const std::vector<tc::CandidateSpec> candidates = {
      {"simple", &gbdt, tc::Variant::kSimple},
      {"weighted", &gbdt, tc::Variant::kWeighted},
      {"rf", &rf, tc::Variant::kLabel},
  };
  const std::vector<int> k_set = {10, 20, 30, 40, 50};
  const tc::ConsistencyReport report =
      tc::consistency_report(gbdt, dataset, tc::RankingMethod::kIv, candidates, k_set, 10, 4);

  const fs::path dir = fs::temp_directory_path() / "treecontrib_acceptance";
  fs::create_directories(dir);
  const fs::path intersections_path = dir / "intersections.csv";
  const fs::path consistency_path = dir / "consistency.csv";
  {
    std::ofstream out(intersections_path);
    out << tc::intersections_csv(report);
  }
  {
    std::ofstream out(consistency_path);
    out << tc::consistency_csv(report, dataset.catalog);
  }
  check(fs::exists(intersections_path) && fs::exists(consistency_path),
        "report files must exist");

  // Re-read the emitted file and assert bounds + monotonicity per candidate.
  const tc::CsvTable table = tc::read_csv_table(tu::read_file(intersections_path.string()));
  check(table.header == std::vector<std::string>{"k", "candidate", "size"},
        "intersections.csv header");
  check(table.rows.size() == k_set.size() * candidates.size(),
        "one intersections row per (k, candidate)");
  for (const auto& name : {"simple", "weighted", "rf"}) {
    int previous = -1;
    for (int k : k_set) {
      bool found = false;
      for (const auto& row : table.rows) {
        if (row[0] == std::to_string(k) && row[1] == name) {
          const int size = std::stoi(row[2]);
          check(size >= 0 && size <= k, "0 <= intersection(k) <= k");
          check(size >= previous, "intersection monotone in k");
          previous = size;
          found = true;
        }
      }
      check(found, std::string("missing intersections row for ") + name);
    }
  }
}

// ---------------------------------------------------------------------------
// Criterion 8: format round trips, exact prediction equality, byte stability.
// ---------------------------------------------------------------------------
void criterion_8() {
  const tc::Dataset dataset = tu::make_regression_dataset(300, 6, 2026);
  tc::TrainConfig config;
  config.n_trees = 6;
  config.max_depth = 3;
  config.shrinkage = 0.7;
  const tc::GbdtFit fit = tc::fit_gbdt(dataset, config);

  const std::string pmml_first = tc::serialize_pmml(fit.ensemble);
  const tc::Ensemble from_pmml = tc::parse_pmml(pmml_first);
  const std::string native_text =
      tc::serialize_native(tc::NativeModelDocument::from_ensemble(from_pmml));
  const tc::NativeModelDocument from_native = tc::parse_native(native_text);
  const tc::Ensemble back_to_pmml = tc::parse_pmml(tc::serialize_pmml(from_native.ensemble));

  std::mt19937_64 rng(4096);
  for (int i = 0; i < 1000; ++i) {
    const tc::Instance instance = tu::random_numeric_instance(rng, 6);
    const double p0 = tc::predict(fit.ensemble, instance);
    const double p1 = tc::predict(from_pmml, instance);
    const double p2 = tc::predict(from_native.ensemble, instance);
    const double p3 = tc::predict(back_to_pmml, instance);
    if (!(p0 == p1 && p1 == p2 && p2 == p3)) {
      throw CheckFailure{"predictions diverged across PMML/native round trips"};
    }
  }

  // Native serialize/parse byte stability.
  check(tc::serialize_native(tc::parse_native(native_text)) == native_text,
        "native serialization must be byte-stable");
  check(tc::serialize_native(tc::NativeModelDocument::from_ensemble(from_pmml)) == native_text,
        "serializing the same model twice must be byte-identical");
}

struct Criterion {
  int id;
  std::string description;
  std::function<void()> run;
};

}  // namespace

int main() {
  const std::vector<Criterion> criteria = {
      {1, "worked-example fixture: back-propagated scores and path contributions",
       criterion_1},
      {2, "local accuracy within 1e-9 on a 20-tree depth-4 GBDT over 2000 rows",
       criterion_2},
      {3, "LS special case: weighted scores = residual means; weighted FC = label FC",
       criterion_3},
      {4, "telescoping and count conservation over 1000 randomized trees", criterion_4},
      {5, "bitwise oracle equivalence of explain_instance on 500 instances", criterion_5},
      {6, "directional FI/FC-median consistency over 20 seeds", criterion_6},
      {7, "intersection report pipeline: bounds and monotonicity", criterion_7},
      {8, "PMML/native round trips: exact predictions and byte stability", criterion_8},
  };

  int failures = 0;
  for (const Criterion& criterion : criteria) {
    const auto start = std::chrono::steady_clock::now();
    std::string verdict = "PASS";
    std::string detail;
    try {
      criterion.run();
    } catch (const CheckFailure& failure) {
      verdict = "FAIL";
      detail = failure.message;
      ++failures;
    } catch (const std::exception& e) {
      verdict = "FAIL";
      detail = e.what();
      ++failures;
    }
    std::printf("[%s] criterion %d: %s (%.2fs)%s%s\n", verdict.c_str(), criterion.id,
                criterion.description.c_str(), elapsed_seconds(start),
                detail.empty() ? "" : " -- ", detail.c_str());
    std::fflush(stdout);
  }
  if (failures > 0) {
    std::printf("%d of %zu acceptance criteria FAILED\n", failures, criteria.size());
    return 1;
  }
  std::printf("all %zu acceptance criteria passed\n", criteria.size());
  return 0;
}
