#include "cgvote/pipeline.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "cgvote/rng.hpp"

namespace cgvote {

void PredictionBundle::validate() const {
  if (classifier_count() < 2) {
    throw ValidationError("at least 2 classifiers are required");
  }
  if (class_count < 2) throw ValidationError("at least 2 classes are required");
  for (const PredictionSplit* split : {&model_test, &ensemble_test}) {
    if (split->sample_count() < 1) throw ValidationError("a split has no samples");
    if (static_cast<int>(split->soft.size()) != classifier_count()) {
      throw ValidationError("soft output count does not match the classifier list");
    }
    for (const Eigen::MatrixXd& soft : split->soft) {
      if (soft.rows() != split->sample_count() || soft.cols() != class_count) {
        throw ValidationError("soft output shape does not match the split");
      }
    }
    for (int label : split->true_labels) {
      if (label < 0 || label >= class_count) {
        throw ValidationError("true label out of range [0, m)");
      }
    }
  }
}

void EnsembleConfig::validate() const {
  if (vikor_v < 0.0 || vikor_v > 1.0) throw ValidationError("vikor_v must lie in [0, 1]");
  if (!(bankruptcy_fraction > 0.0 && bankruptcy_fraction <= 1.0)) {
    throw ValidationError("bankruptcy_fraction must lie in (0, 1]");
  }
  if (metrics.empty()) throw ValidationError("at least one metric is required");
  if (concepts.empty()) throw ValidationError("at least one value concept is required");
  for (std::size_t a = 0; a < metrics.size(); ++a) {
    for (std::size_t b = a + 1; b < metrics.size(); ++b) {
      if (metrics[a] == metrics[b]) throw ValidationError("duplicate metric in config");
    }
  }
  for (std::size_t a = 0; a < concepts.size(); ++a) {
    for (std::size_t b = a + 1; b < concepts.size(); ++b) {
      if (concepts[a] == concepts[b]) throw ValidationError("duplicate value concept in config");
    }
  }
  if (stage2_metric_weights.size() != 0) {
    if (stage2_metric_weights.size() != static_cast<Eigen::Index>(metrics.size())) {
      throw ValidationError("stage2_metric_weights must match the metric list");
    }
    if ((stage2_metric_weights.array() <= 0.0).any()) {
      throw ValidationError("stage2_metric_weights must be positive");
    }
  }
  if (selection_policy != "auto" && !concept_from_string(selection_policy)) {
    throw ValidationError("selection_policy must be \"auto\" or a value-concept tag");
  }
  double ratio_sum = 0.0;
  for (double ratio : split_ratios) {
    if (ratio <= 0.0) throw ValidationError("split ratios must be positive");
    ratio_sum += ratio;
  }
  if (std::abs(ratio_sum - 1.0) > 1e-9) throw ValidationError("split ratios must sum to 1");
}

SplitIndices stratified_split(std::span<const int> labels,
                              const std::array<double, 3>& ratios, std::uint64_t seed) {
  double ratio_sum = 0.0;
  for (double ratio : ratios) {
    if (ratio <= 0.0) throw ValidationError("split ratios must be positive");
    ratio_sum += ratio;
  }
  if (std::abs(ratio_sum - 1.0) > 1e-9) throw ValidationError("split ratios must sum to 1");
  if (labels.empty()) throw ValidationError("no labels to split");

  int class_count = 0;
  for (int label : labels) {
    if (label < 0) throw ValidationError("labels must be nonnegative");
    class_count = std::max(class_count, label + 1);
  }

  std::vector<std::vector<int>> by_class(class_count);
  for (std::size_t idx = 0; idx < labels.size(); ++idx) {
    by_class[labels[idx]].push_back(static_cast<int>(idx));
  }

  SplitIndices out;
  SplitMix64 root(seed);
  for (int cls = 0; cls < class_count; ++cls) {
    std::vector<int>& members = by_class[cls];
    const int count = static_cast<int>(members.size());

    // Largest-remainder apportionment of this class across the three splits.
    std::array<int, 3> take{};
    std::array<double, 3> fraction{};
    int assigned = 0;
    for (int s = 0; s < 3; ++s) {
      const double target = count * ratios[s];
      take[s] = static_cast<int>(std::floor(target));
      fraction[s] = target - take[s];
      assigned += take[s];
    }
    for (int left = count - assigned; left > 0; --left) {
      int pick = 0;
      for (int s = 1; s < 3; ++s) {
        if (fraction[s] > fraction[pick]) pick = s;
      }
      ++take[pick];
      fraction[pick] = -1.0;
    }
    if (take[0] == 0 || take[1] == 0 || take[2] == 0) {
      throw ValidationError("class " + std::to_string(cls) +
                            " is too small to appear in all three splits");
    }

    // Deterministic per-class shuffle; the class id picks the substream.
    SplitMix64 rng = root.derive(static_cast<std::uint64_t>(cls));
    for (int i = count - 1; i > 0; --i) {
      const int j = static_cast<int>(rng.next_below(static_cast<std::uint64_t>(i) + 1));
      std::swap(members[i], members[j]);
    }

    out.train.insert(out.train.end(), members.begin(), members.begin() + take[0]);
    out.model_test.insert(out.model_test.end(), members.begin() + take[0],
                          members.begin() + take[0] + take[1]);
    out.ensemble_test.insert(out.ensemble_test.end(), members.begin() + take[0] + take[1],
                             members.end());
  }
  return out;
}

namespace {

std::vector<std::vector<int>> hard_predictions(const PredictionSplit& split, TieRule tie) {
  std::vector<std::vector<int>> preds(split.soft.size());
  for (std::size_t i = 0; i < split.soft.size(); ++i) {
    const Eigen::MatrixXd& soft = split.soft[i];
    preds[i].resize(static_cast<std::size_t>(soft.rows()));
    for (Eigen::Index row = 0; row < soft.rows(); ++row) {
      preds[i][static_cast<std::size_t>(row)] = argmax_class(soft.row(row), tie);
    }
  }
  return preds;
}

int degenerate_columns(const Eigen::MatrixXd& matrix) {
  int count = 0;
  for (Eigen::Index j = 0; j < matrix.cols(); ++j) {
    if (matrix.col(j).maxCoeff() == matrix.col(j).minCoeff()) ++count;
  }
  return count;
}

}  // namespace

double accuracy_of(std::span<const int> predictions, std::span<const int> truth) {
  if (predictions.size() != truth.size() || predictions.empty()) {
    throw std::invalid_argument("prediction/truth length mismatch");
  }
  std::size_t hits = 0;
  for (std::size_t i = 0; i < predictions.size(); ++i) {
    if (predictions[i] == truth[i]) ++hits;
  }
  return static_cast<double>(hits) / static_cast<double>(predictions.size());
}

DerivedWeights derive_weights(const PredictionBundle& bundle, const EnsembleConfig& cfg) {
  bundle.validate();
  cfg.validate();
  const int n = bundle.classifier_count();
  const int m = bundle.class_count;

  DerivedWeights derived;

  const std::vector<std::vector<int>> preds = hard_predictions(bundle.model_test, cfg.tie_rule);
  for (int i = 0; i < n; ++i) {
    derived.confusions.push_back(build_confusion(bundle.model_test.true_labels, preds[i], m));
    derived.stats.push_back(overall_stats(derived.confusions.back()));
  }

  Eigen::VectorXi class_counts = Eigen::VectorXi::Zero(m);
  for (int label : bundle.model_test.true_labels) ++class_counts[label];
  if ((class_counts.array() < 1).any()) {
    throw ValidationError("every class must appear in the model-test split");
  }
  derived.class_criteria_weights = class_weights(class_counts);

  MetricTensor tensor = select_metrics(metric_tensor(derived.confusions), cfg.metrics);
  const int s = tensor.metric_count();

  int degenerate = 0;
  for (const Eigen::MatrixXd& slice : tensor.slices) degenerate += degenerate_columns(slice);
  if (degenerate > 0) {
    derived.diagnostics.push_back("stage1: " + std::to_string(degenerate) +
                                  " degenerate class criteria (no spread across classifiers)");
  }

  derived.stage1 = stage1_scores(tensor, derived.class_criteria_weights, cfg.vikor_v,
                                 cfg.parallel);

  Eigen::VectorXd metric_weights = cfg.stage2_metric_weights.size() != 0
                                       ? cfg.stage2_metric_weights
                                       : Eigen::VectorXd::Ones(s);
  const int stage2_degenerate = degenerate_columns(derived.stage1);
  if (stage2_degenerate > 0) {
    derived.diagnostics.push_back("stage2: " + std::to_string(stage2_degenerate) +
                                  " degenerate metric criteria");
  }
  derived.evaluation = stage2_evaluation(derived.stage1, metric_weights, cfg.vikor_v);

  if (derived.evaluation.sum() == 0.0) {
    derived.diagnostics.push_back(
        "evaluation vector is all zero; every concept falls back to uniform weights");
  }
  derived.game = bankruptcy_game(derived.evaluation, cfg.bankruptcy_fraction);

  std::vector<ValueConcept> computable;
  for (ValueConcept concept_tag : cfg.concepts) {
    if (concept_tag == ValueConcept::Enpac && n < 3) {
      derived.diagnostics.push_back("ENPAC skipped: requires at least 3 classifiers");
      continue;
    }
    computable.push_back(concept_tag);
  }
  if (computable.empty()) throw ValidationError("no value concept is computable");

  derived.allocations = allocate_all(derived.game, computable, cfg.parallel);
  for (const Allocation& allocation : derived.allocations) {
    WeightVector weights = normalize(allocation);
    if (weights.uniform_fallback) {
      derived.diagnostics.push_back(std::string(to_string(allocation.concept_tag)) +
                                    ": all clamped values zero, uniform fallback");
    }
    derived.concept_weights.emplace_back(allocation.concept_tag, std::move(weights));
  }
  return derived;
}

ValueConcept select_value(const std::vector<std::pair<ValueConcept, WeightVector>>& weights,
                          const PredictionSplit& selection_split, const EnsembleConfig& cfg) {
  if (weights.empty()) throw ValidationError("no concept weights to select from");
  if (cfg.selection_policy != "auto") {
    const auto forced = concept_from_string(cfg.selection_policy);
    for (const auto& [concept_tag, unused] : weights) {
      if (concept_tag == *forced) return concept_tag;
    }
    throw ValidationError("selection_policy names a concept that was not computed");
  }

  // Ties break in the fixed concept order, independent of the input order.
  double best_accuracy = -1.0;
  ValueConcept best = weights.front().first;
  for (ValueConcept candidate : kAllConcepts) {
    for (const auto& [concept_tag, weight_vector] : weights) {
      if (concept_tag != candidate) continue;
      const std::vector<int> predictions =
          soft_weighted_vote(selection_split.soft, weight_vector.weights, cfg.tie_rule);
      const double accuracy = accuracy_of(predictions, selection_split.true_labels);
      if (accuracy > best_accuracy) {
        best_accuracy = accuracy;
        best = concept_tag;
      }
    }
  }
  return best;
}

Report evaluate_methods(const PredictionBundle& bundle, const DerivedWeights& derived,
                        ValueConcept chosen, const EnsembleConfig& cfg) {
  const int n = bundle.classifier_count();

  Report report;
  report.dataset = bundle.dataset;
  report.class_count = bundle.class_count;
  report.classifier_names = bundle.classifier_names;
  report.chosen_concept = to_string(chosen);
  report.evaluation = derived.evaluation;
  report.estate = derived.game.estate;
  report.diagnostics = derived.diagnostics;
  report.vikor_v = cfg.vikor_v;
  report.bankruptcy_fraction = cfg.bankruptcy_fraction;
  report.tie_rule = to_string(cfg.tie_rule);
  report.selection_split = "model_test";

  const PredictionSplit& test = bundle.ensemble_test;
  const auto score = [&](const Eigen::VectorXd& weights) {
    return accuracy_of(soft_weighted_vote(test.soft, weights, cfg.tie_rule), test.true_labels);
  };

  const Eigen::VectorXd uniform = Eigen::VectorXd::Constant(n, 1.0 / n);
  report.method_accuracy.emplace_back("Non-weight", score(uniform));

  std::vector<std::pair<std::string, WeightVector>> baselines;
  for (BaselineScheme scheme : kAllBaselines) {
    WeightVector weights = baseline_weights(scheme, derived.stats, bundle.class_count);
    if (weights.clamp_fired) {
      report.diagnostics.push_back(std::string(to_string(scheme)) +
                                   ": negative raw scores clamped to zero");
    }
    if (weights.uniform_fallback) {
      report.diagnostics.push_back(std::string(to_string(scheme)) +
                                   ": all clamped scores zero, uniform fallback");
    }
    baselines.emplace_back(to_string(scheme), std::move(weights));
  }
  // Fixed column order of the method-comparison grid.
  const std::array<BaselineScheme, 5> method_order = {
      BaselineScheme::Swv, BaselineScheme::Rswv, BaselineScheme::Bwwv,
      BaselineScheme::Qbwwv, BaselineScheme::Wmv};
  for (BaselineScheme scheme : method_order) {
    for (const auto& [tag, weights] : baselines) {
      if (tag == to_string(scheme)) {
        report.method_accuracy.emplace_back(tag, score(weights.weights));
      }
    }
  }

  // Concepts render in fixed tag order regardless of configuration order.
  double proposed_accuracy = 0.0;
  for (ValueConcept candidate : kAllConcepts) {
    for (const auto& [concept_tag, weights] : derived.concept_weights) {
      if (concept_tag != candidate) continue;
      const double accuracy = score(weights.weights);
      report.value_accuracy.emplace_back(to_string(concept_tag), accuracy);
      if (concept_tag == chosen) proposed_accuracy = accuracy;
    }
  }
  report.method_accuracy.emplace_back("Proposed", proposed_accuracy);

  for (auto& [tag, weights] : baselines) {
    report.weight_vectors.emplace_back(tag, std::move(weights));
  }
  for (ValueConcept candidate : kAllConcepts) {
    for (const auto& [concept_tag, weights] : derived.concept_weights) {
      if (concept_tag == candidate) {
        report.weight_vectors.emplace_back(std::string(to_string(concept_tag)), weights);
      }
    }
  }
  return report;
}

Report run_pipeline(const PredictionBundle& bundle, const EnsembleConfig& cfg) {
  const DerivedWeights derived = derive_weights(bundle, cfg);
  const ValueConcept chosen = select_value(derived.concept_weights, bundle.model_test, cfg);
  return evaluate_methods(bundle, derived, chosen, cfg);
}

namespace {

bool vectors_equal(const Eigen::VectorXd& a, const Eigen::VectorXd& b) {
  return a.size() == b.size() && (a.array() == b.array()).all();
}

bool weight_vector_equal(const WeightVector& a, const WeightVector& b) {
  return vectors_equal(a.weights, b.weights) && a.provenance == b.provenance &&
         a.uniform_fallback == b.uniform_fallback && a.clamp_fired == b.clamp_fired;
}

}  // namespace

bool Report::operator==(const Report& other) const {
  if (!(dataset == other.dataset && class_count == other.class_count &&
        classifier_names == other.classifier_names &&
        chosen_concept == other.chosen_concept &&
        method_accuracy == other.method_accuracy &&
        value_accuracy == other.value_accuracy &&
        vectors_equal(evaluation, other.evaluation) &&
        estate == other.estate && diagnostics == other.diagnostics &&
        vikor_v == other.vikor_v && bankruptcy_fraction == other.bankruptcy_fraction &&
        tie_rule == other.tie_rule && selection_split == other.selection_split)) {
    return false;
  }
  if (weight_vectors.size() != other.weight_vectors.size()) return false;
  for (std::size_t i = 0; i < weight_vectors.size(); ++i) {
    if (weight_vectors[i].first != other.weight_vectors[i].first ||
        !weight_vector_equal(weight_vectors[i].second, other.weight_vectors[i].second)) {
      return false;
    }
  }
  return true;
}

}  // namespace cgvote
