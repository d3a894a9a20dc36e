#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <filesystem>
#include <fstream>

#include "cgvote/io.hpp"
#include "cgvote/synth.hpp"
#include "doctest.h"

using namespace cgvote;
namespace fs = std::filesystem;

namespace {

struct TempDir {
  fs::path path;
  TempDir() {
    path = fs::temp_directory_path() /
           ("cgvote_io_test_" + std::to_string(reinterpret_cast<std::uintptr_t>(this)));
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
};

void write_file(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  out << text;
}

PredictionFile sample_file() {
  PredictionFile file;
  file.sample_ids = {0, 1, 2, 5};
  file.true_labels = {0, 1, 1, 0};
  file.soft.resize(4, 2);
  file.soft << 0.75, 0.25, 0.1, 0.9, 0.4, 0.6, 1.0 / 3.0, 2.0 / 3.0;
  return file;
}

}  // namespace

TEST_CASE("prediction csv round-trips") {
  TempDir dir;
  const fs::path path = dir.path / "preds.csv";
  const PredictionFile original = sample_file();
  write_prediction_csv(path, original);
  const PredictionFile loaded = read_prediction_csv(path, 2);
  CHECK(loaded.sample_ids == original.sample_ids);
  CHECK(loaded.true_labels == original.true_labels);
  CHECK((loaded.soft - original.soft).cwiseAbs().maxCoeff() <= 1e-12);
}

TEST_CASE("prediction csv: near-1 rows renormalize, far rows reject") {
  TempDir dir;
  const fs::path ok = dir.path / "ok.csv";
  write_file(ok, "sample_id,true_label,p_0,p_1\n0,0,0.6000002,0.4\n");
  const PredictionFile loaded = read_prediction_csv(ok, 2);
  CHECK(std::abs(loaded.soft.row(0).sum() - 1.0) <= 1e-15);

  const fs::path bad = dir.path / "bad.csv";
  write_file(bad, "sample_id,true_label,p_0,p_1\n0,0,0.7,0.4\n");
  CHECK_THROWS_AS(read_prediction_csv(bad, 2), ValidationError);
}

TEST_CASE("prediction csv: structural validation") {
  TempDir dir;
  const fs::path wrong_header = dir.path / "h.csv";
  write_file(wrong_header, "id,label,p_0,p_1\n0,0,0.5,0.5\n");
  CHECK_THROWS_AS(read_prediction_csv(wrong_header, 2), ValidationError);

  const fs::path unsorted = dir.path / "u.csv";
  write_file(unsorted, "sample_id,true_label,p_0,p_1\n1,0,0.5,0.5\n0,1,0.5,0.5\n");
  CHECK_THROWS_AS(read_prediction_csv(unsorted, 2), ValidationError);

  const fs::path bad_label = dir.path / "l.csv";
  write_file(bad_label, "sample_id,true_label,p_0,p_1\n0,7,0.5,0.5\n");
  CHECK_THROWS_AS(read_prediction_csv(bad_label, 2), ValidationError);

  const fs::path negative = dir.path / "n.csv";
  write_file(negative, "sample_id,true_label,p_0,p_1\n0,0,-0.1,1.1\n");
  CHECK_THROWS_AS(read_prediction_csv(negative, 2), ValidationError);

  CHECK_THROWS_AS(read_prediction_csv(dir.path / "missing.csv", 2), ValidationError);
}

TEST_CASE("prediction csv: string labels map via the sorted unique set") {
  TempDir dir;
  const fs::path path = dir.path / "s.csv";
  write_file(path,
             "sample_id,true_label,p_0,p_1\n"
             "0,cat,0.8,0.2\n"
             "1,dog,0.3,0.7\n"
             "2,cat,0.6,0.4\n");
  const PredictionFile loaded = read_prediction_csv(path, 2);
  CHECK(loaded.true_labels == std::vector<int>{0, 1, 0});

  const fs::path incomplete = dir.path / "s2.csv";
  write_file(incomplete, "sample_id,true_label,p_0,p_1\n0,cat,0.8,0.2\n");
  CHECK_THROWS_AS(read_prediction_csv(incomplete, 2), ValidationError);
}

TEST_CASE("manifest round-trip and validation") {
  TempDir dir;
  Manifest manifest;
  manifest.dataset = "demo";
  manifest.class_count = 3;
  manifest.entries = {{"knn", "knn_m.csv", "knn_e.csv"}, {"svm", "svm_m.csv", "svm_e.csv"}};
  const fs::path path = dir.path / "manifest.json";
  write_manifest(path, manifest);
  const Manifest loaded = read_manifest(path);
  CHECK(loaded.dataset == "demo");
  CHECK(loaded.class_count == 3);
  REQUIRE(loaded.entries.size() == 2);
  CHECK(loaded.entries[1].name == "svm");
  CHECK(loaded.entries[1].ensemble_test == "svm_e.csv");

  const fs::path dup = dir.path / "dup.json";
  write_file(dup, R"({"classes":2,"classifiers":[
    {"name":"a","model_test":"x","ensemble_test":"y"},
    {"name":"a","model_test":"x","ensemble_test":"y"}]})");
  CHECK_THROWS_AS(read_manifest(dup), ValidationError);

  const fs::path single = dir.path / "single.json";
  write_file(single, R"({"classes":2,"classifiers":[
    {"name":"a","model_test":"x","ensemble_test":"y"}]})");
  CHECK_THROWS_AS(read_manifest(single), ValidationError);
}

TEST_CASE("load_bundle checks cross-classifier alignment") {
  TempDir dir;
  PredictionFile base = sample_file();
  write_prediction_csv(dir.path / "a_m.csv", base);
  write_prediction_csv(dir.path / "a_e.csv", base);
  PredictionFile shifted = base;
  shifted.sample_ids[2] = 3;  // misaligned id
  write_prediction_csv(dir.path / "b_m.csv", shifted);
  write_prediction_csv(dir.path / "b_e.csv", base);

  Manifest manifest;
  manifest.dataset = "demo";
  manifest.class_count = 2;
  manifest.entries = {{"a", "a_m.csv", "a_e.csv"}, {"b", "b_m.csv", "b_e.csv"}};

  try {
    load_bundle(manifest, dir.path);
    FAIL("expected a ValidationError");
  } catch (const ValidationError& e) {
    // the first offending sample id is named
    CHECK(std::string(e.what()).find("sample id mismatch at id 2") != std::string::npos);
  }

  PredictionFile relabeled = base;
  relabeled.true_labels[1] = 0;
  write_prediction_csv(dir.path / "b_m.csv", relabeled);
  try {
    load_bundle(manifest, dir.path);
    FAIL("expected a ValidationError");
  } catch (const ValidationError& e) {
    CHECK(std::string(e.what()).find("true-label mismatch at sample id 1") != std::string::npos);
  }

  write_prediction_csv(dir.path / "b_m.csv", base);
  const PredictionBundle bundle = load_bundle(manifest, dir.path);
  CHECK(bundle.classifier_count() == 2);
  CHECK(bundle.model_test.sample_count() == 4);
}

TEST_CASE("config: defaults, keys, and fail-closed unknowns") {
  TempDir dir;
  const fs::path path = dir.path / "config.json";
  write_file(path, R"({
    "vikor_v": 0.4,
    "bankruptcy_fraction": 0.9,
    "metrics": ["ACCURACY", "TPR"],
    "stage2_metric_weights": [1.0, 2.0],
    "value_concepts": ["SHAPLEY", "CONSENSUS"],
    "selection_policy": "SHAPLEY",
    "tie_rule": "highest_index",
    "split_ratios": [0.5, 0.25, 0.25],
    "seed": 77,
    "parallel": true
  })");
  const EnsembleConfig cfg = read_config(path);
  CHECK(cfg.vikor_v == 0.4);
  CHECK(cfg.bankruptcy_fraction == 0.9);
  CHECK(cfg.metrics == std::vector<Metric>{Metric::Accuracy, Metric::Tpr});
  CHECK(cfg.stage2_metric_weights.size() == 2);
  CHECK(cfg.concepts == std::vector<ValueConcept>{ValueConcept::Shapley, ValueConcept::Consensus});
  CHECK(cfg.selection_policy == "SHAPLEY");
  CHECK(cfg.tie_rule == TieRule::HighestIndex);
  CHECK(cfg.seed == 77);
  CHECK(cfg.parallel);

  const fs::path empty = dir.path / "empty.json";
  write_file(empty, "{}");
  const EnsembleConfig defaults = read_config(empty);
  CHECK(defaults.vikor_v == 0.5);
  CHECK(defaults.bankruptcy_fraction == 0.8);
  CHECK(defaults.metrics.size() == 5);
  CHECK(defaults.concepts.size() == 8);

  const fs::path typo = dir.path / "typo.json";
  write_file(typo, R"({"vikor_w": 0.4})");
  CHECK_THROWS_AS(read_config(typo), ValidationError);

  const fs::path invalid = dir.path / "invalid.json";
  write_file(invalid, R"({"vikor_v": 2.0})");
  CHECK_THROWS_AS(read_config(invalid), ValidationError);
}

TEST_CASE("game files: demands form, table form, round-trip") {
  TempDir dir;
  const fs::path demands_path = dir.path / "game1.json";
  write_file(demands_path, R"({"demands": [100.0, 200.0, 300.0], "fraction": 0.8})");
  const CoalitionGame from_demands = read_game_file(demands_path);
  CHECK(from_demands.player_count() == 3);
  CHECK(std::abs(from_demands.value(0b110) - 380.0) <= 1e-9);

  const fs::path table_path = dir.path / "game2.json";
  write_file(table_path, R"({"table": [0.0, 0.0, 80.0, 180.0, 180.0, 280.0, 380.0, 480.0]})");
  const CoalitionGame from_table = read_game_file(table_path);
  CHECK(from_table.player_count() == 3);
  CHECK(from_table.value(0b011) == 180.0);
  CHECK(from_table.demands.size() == 0);

  const fs::path rt = dir.path / "rt.json";
  write_game_file(rt, from_demands);
  const CoalitionGame reloaded = read_game_file(rt);
  CHECK((reloaded.table.array() == from_demands.table.array()).all());
  write_game_file(rt, from_table);
  const CoalitionGame reloaded_table = read_game_file(rt);
  CHECK((reloaded_table.table.array() == from_table.table.array()).all());

  const fs::path both = dir.path / "both.json";
  write_file(both, R"({"demands": [1.0, 2.0], "table": [0,0,0,1]})");
  CHECK_THROWS_AS(read_game_file(both), ValidationError);
  const fs::path neither = dir.path / "neither.json";
  write_file(neither, R"({"fraction": 0.8})");
  CHECK_THROWS_AS(read_game_file(neither), ValidationError);
  const fs::path odd = dir.path / "odd.json";
  write_file(odd, R"({"table": [0, 1, 2]})");
  CHECK_THROWS_AS(read_game_file(odd), std::exception);
}

TEST_CASE("weights file round-trips") {
  TempDir dir;
  WeightsFile file;
  file.classifier_names = {"a", "b", "c"};
  file.chosen = "ENSC";
  WeightVector w1;
  w1.weights = (Eigen::VectorXd(3) << 0.5, 0.3, 0.2).finished();
  w1.provenance = "ENSC";
  WeightVector w2;
  w2.weights = Eigen::VectorXd::Constant(3, 1.0 / 3.0);
  w2.provenance = "SWV";
  w2.uniform_fallback = true;
  w2.clamp_fired = true;
  file.entries = {{"ENSC", w1}, {"SWV", w2}};
  file.evaluation = (Eigen::VectorXd(3) << 1.0, 0.5, 0.25).finished();
  file.diagnostics = {"note"};

  const fs::path path = dir.path / "weights.json";
  write_weights_file(path, file);
  const WeightsFile loaded = read_weights_file(path);
  CHECK(loaded.classifier_names == file.classifier_names);
  CHECK(loaded.chosen == "ENSC");
  REQUIRE(loaded.entries.size() == 2);
  CHECK(loaded.entries[0].first == "ENSC");
  CHECK((loaded.entries[0].second.weights.array() == w1.weights.array()).all());
  CHECK(loaded.entries[1].second.uniform_fallback);
  CHECK(loaded.entries[1].second.clamp_fired);
  CHECK((loaded.evaluation.array() == file.evaluation.array()).all());
  CHECK(loaded.diagnostics == file.diagnostics);
}

TEST_CASE("report emission: json round-trip is exact, grids render") {
  SynthSpec spec;
  spec.samples_per_split = 400;
  spec.class_probs = (Eigen::VectorXd(3) << 0.5, 0.3, 0.2).finished();
  spec.skills = (Eigen::VectorXd(3) << 2.0, 1.0, 0.4).finished();
  spec.seed = 4;
  const Report report = run_pipeline(generate(spec), EnsembleConfig{});

  const std::string json = emit_report(report, ReportFormat::Json);
  const Report reparsed = parse_report_json(json);
  CHECK(reparsed == report);
  CHECK(emit_report(reparsed, ReportFormat::Json) == json);

  const std::string csv = emit_report(report, ReportFormat::Csv);
  CHECK(csv.find("data,Non-weight,SWV,RSWV,BWWV,QBWWV,WMV,Proposed") != std::string::npos);
  CHECK(csv.find("data,Shapley,Banzhaf,SO,CIS,ENSC,ENPAC,ENBC,CON") != std::string::npos);

  const std::string md = emit_report(report, ReportFormat::Md);
  CHECK(md.find("| Data | Non-weight | SWV | RSWV | BWWV | QBWWV | WMV | Proposed |") !=
        std::string::npos);
  CHECK(md.find("| Data | Shapley | Banzhaf | SO | CIS | ENSC | ENPAC | ENBC | CON |") !=
        std::string::npos);
  // four decimal places in the grids
  CHECK(md.find("synthetic") != std::string::npos);
}

TEST_CASE("report format names") {
  CHECK(report_format_from_string("json") == ReportFormat::Json);
  CHECK(report_format_from_string("csv") == ReportFormat::Csv);
  CHECK(report_format_from_string("md") == ReportFormat::Md);
  CHECK_THROWS_AS(report_format_from_string("xml"), ValidationError);
}
