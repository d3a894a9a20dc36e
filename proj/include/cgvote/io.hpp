#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "cgvote/game.hpp"
#include "cgvote/pipeline.hpp"

namespace cgvote {

/// One prediction file: header `sample_id,true_label,p_0,...,p_{m-1}`,
/// rows in strictly ascending sample_id. Rows whose probabilities sum to 1
/// within 1e-6 are renormalized; anything further off is rejected.
struct PredictionFile {
  std::vector<std::int64_t> sample_ids;
  std::vector<int> true_labels;
  Eigen::MatrixXd soft;
};

PredictionFile read_prediction_csv(const std::filesystem::path& path, int class_count);
void write_prediction_csv(const std::filesystem::path& path, const PredictionFile& file);

struct ManifestEntry {
  std::string name;
  std::string model_test;    // path, relative to the manifest's directory
  std::string ensemble_test;
};

struct Manifest {
  std::string dataset;
  int class_count = 0;
  std::vector<ManifestEntry> entries;
};

Manifest read_manifest(const std::filesystem::path& path);
void write_manifest(const std::filesystem::path& path, const Manifest& manifest);

/// Read every prediction file named by the manifest and check that, within
/// each split, all classifiers share the identical ordered sample ids and
/// true labels. The first offending sample id is named in the error.
PredictionBundle load_bundle(const Manifest& manifest,
                             const std::filesystem::path& manifest_dir);

/// JSON config; unknown keys are rejected so typos fail loudly.
EnsembleConfig read_config(const std::filesystem::path& path);
std::string config_to_json(const EnsembleConfig& cfg);

/// Standalone game files for testing: either {"demands": [...], "fraction": f}
/// or an explicit {"table": [...]} of 2^n reals in coalition-bitmask order
/// (bit i = player i, index 0 = empty coalition).
CoalitionGame read_game_file(const std::filesystem::path& path);
void write_game_file(const std::filesystem::path& path, const CoalitionGame& game);

/// Weight file: tag -> weight entry for every computed concept and baseline,
/// plus the chosen tag, the evaluation vector and diagnostics.
struct WeightsFile {
  std::vector<std::string> classifier_names;
  std::string chosen;
  std::vector<std::pair<std::string, WeightVector>> entries;
  Eigen::VectorXd evaluation;
  std::vector<std::string> diagnostics;
};

WeightsFile read_weights_file(const std::filesystem::path& path);
void write_weights_file(const std::filesystem::path& path, const WeightsFile& weights);

enum class ReportFormat { Json, Csv, Md };
ReportFormat report_format_from_string(std::string_view name);

/// json carries the full report at full precision; csv and md render the two
/// accuracy grids with four decimal places.
std::string emit_report(const Report& report, ReportFormat format);
Report parse_report_json(const std::string& text);

}  // namespace cgvote
