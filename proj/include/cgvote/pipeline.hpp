#pragma once

#include <Eigen/Dense>
#include <array>
#include <cstdint>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "cgvote/game.hpp"
#include "cgvote/mcdm.hpp"
#include "cgvote/metrics.hpp"
#include "cgvote/types.hpp"
#include "cgvote/voting.hpp"

namespace cgvote {

/// Soft outputs of every classifier on one evaluation split. All classifiers
/// cover the identical ordered sample-id sequence with identical true labels.
struct PredictionSplit {
  std::vector<std::int64_t> sample_ids;
  std::vector<int> true_labels;
  std::vector<Eigen::MatrixXd> soft;  // per classifier: samples x classes

  int sample_count() const { return static_cast<int>(sample_ids.size()); }
};

struct PredictionBundle {
  std::string dataset;
  int class_count = 0;
  std::vector<std::string> classifier_names;
  PredictionSplit model_test;
  PredictionSplit ensemble_test;

  int classifier_count() const { return static_cast<int>(classifier_names.size()); }
  void validate() const;  // alignment, shapes, n >= 2
};

struct EnsembleConfig {
  double vikor_v = 0.5;
  double bankruptcy_fraction = 0.8;
  std::vector<Metric> metrics{kAllMetrics.begin(), kAllMetrics.end()};
  Eigen::VectorXd stage2_metric_weights;  // empty = equal weights
  std::vector<ValueConcept> concepts{kAllConcepts.begin(), kAllConcepts.end()};
  std::string selection_policy = "auto";  // "auto" or a value-concept tag
  TieRule tie_rule = TieRule::LowestIndex;
  std::array<double, 3> split_ratios{0.6, 0.2, 0.2};  // train/model/ensemble
  std::uint64_t seed = 0;
  bool parallel = false;

  void validate() const;
};

/// Index sets of a deterministic three-way stratified split. Per-class
/// counts follow the ratios under largest-remainder rounding; every class
/// must land in all three splits.
struct SplitIndices {
  std::vector<int> train;
  std::vector<int> model_test;
  std::vector<int> ensemble_test;
};

SplitIndices stratified_split(std::span<const int> labels,
                              const std::array<double, 3>& ratios,
                              std::uint64_t seed);

/// Everything produced while turning model-test predictions into weights:
/// the intermediate stages are retained for reporting.
struct DerivedWeights {
  std::vector<ConfusionMatrix> confusions;   // model-test, per classifier
  std::vector<ClassifierStats> stats;        // model-test, per classifier
  Eigen::VectorXd class_criteria_weights;    // imbalance weights p
  Eigen::MatrixXd stage1;                    // n x s inverted compromise scores
  Eigen::VectorXd evaluation;                // z
  CoalitionGame game;
  std::vector<Allocation> allocations;       // one per computed concept
  std::vector<std::pair<ValueConcept, WeightVector>> concept_weights;
  std::vector<std::string> diagnostics;
};

/// Run the weight-derivation chain on the model-test split: hard predictions
/// -> confusion matrices -> metric tensor -> imbalance class weights ->
/// two-stage compromise -> bankruptcy game -> one allocation and weight
/// vector per configured concept. ENPAC is skipped with a diagnostic when
/// n < 3. An all-zero evaluation vector is diagnosed and every concept falls
/// back to uniform weights.
DerivedWeights derive_weights(const PredictionBundle& bundle, const EnsembleConfig& cfg);

/// Pick the operating concept: each concept's weights are scored by soft
/// voting on the model-test split (the split the weights were derived from,
/// keeping the ensemble-test split untouched for final reporting) and the
/// most accurate wins; ties break in fixed concept order. A non-"auto"
/// selection policy forces that concept.
ValueConcept select_value(const std::vector<std::pair<ValueConcept, WeightVector>>& weights,
                          const PredictionSplit& selection_split,
                          const EnsembleConfig& cfg);

/// Accuracy grids shaped like the comparison tables: one row of per-method
/// accuracies (plain soft averaging, the five baselines, and the proposed
/// game-derived vote) and one row of per-concept accuracies, all measured on
/// the ensemble-test split.
struct Report {
  std::string dataset;
  int class_count = 0;
  std::vector<std::string> classifier_names;
  std::string chosen_concept;
  std::vector<std::pair<std::string, double>> method_accuracy;
  std::vector<std::pair<std::string, double>> value_accuracy;
  std::vector<std::pair<std::string, WeightVector>> weight_vectors;
  Eigen::VectorXd evaluation;  // z
  double estate = 0.0;
  std::vector<std::string> diagnostics;
  // settings recorded for reproducibility
  double vikor_v = 0.5;
  double bankruptcy_fraction = 0.8;
  std::string tie_rule = "lowest_index";
  std::string selection_split = "model_test";

  bool operator==(const Report& other) const;
};

inline constexpr std::array<std::string_view, 7> kMethodColumns = {
    "Non-weight", "SWV", "RSWV", "BWWV", "QBWWV", "WMV", "Proposed"};

Report evaluate_methods(const PredictionBundle& bundle, const DerivedWeights& derived,
                        ValueConcept chosen, const EnsembleConfig& cfg);

/// derive_weights + select_value + evaluate_methods in one call.
Report run_pipeline(const PredictionBundle& bundle, const EnsembleConfig& cfg);

/// Fraction of positions where prediction equals truth.
double accuracy_of(std::span<const int> predictions, std::span<const int> truth);

}  // namespace cgvote
