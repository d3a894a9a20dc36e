#pragma once

#include <Eigen/Dense>
#include <array>
#include <optional>
#include <vector>

#include "cgvote/game.hpp"
#include "cgvote/metrics.hpp"
#include "cgvote/types.hpp"

namespace cgvote {

enum class BaselineScheme {
  Swv = 0,   // accuracy-proportional
  Wmv,       // log-odds of accuracy
  Rswv,      // rescaled by error count, zeroing at-or-below-chance classifiers
  Bwwv,      // linear best-worst error interpolation
  Qbwwv,     // quadratic best-worst error interpolation
};

inline constexpr std::array<BaselineScheme, 5> kAllBaselines = {
    BaselineScheme::Swv, BaselineScheme::Wmv, BaselineScheme::Rswv,
    BaselineScheme::Bwwv, BaselineScheme::Qbwwv};

std::string_view to_string(BaselineScheme scheme);
std::optional<BaselineScheme> baseline_from_string(std::string_view name);

/// Raw per-classifier scores for one baseline scheme, before clamping and
/// normalization. Exposed so the fixtures can pin the pre-normalization
/// values.
Eigen::VectorXd baseline_raw_scores(BaselineScheme scheme,
                                    const std::vector<ClassifierStats>& stats,
                                    int class_count);

/// Baseline weighting rule evaluated on per-classifier statistics, clamped
/// at zero and normalized to the simplex. WMV scores are log-odds with
/// accuracy clamped into [1e-6, 1-1e-6]; classifiers below 0.5 accuracy get a
/// negative raw score which the normalization zeroes (clamp_fired is set).
WeightVector baseline_weights(BaselineScheme scheme,
                              const std::vector<ClassifierStats>& stats,
                              int class_count);

/// Weighted plurality over hard predictions: per sample,
/// argmax_j sum_i w_i * [pred_i == j]. Uniform weights give simple majority
/// voting.
std::vector<int> hard_majority_vote(const std::vector<std::vector<int>>& hard_preds,
                                    const Eigen::Ref<const Eigen::VectorXd>& weights,
                                    int class_count, TieRule tie = TieRule::LowestIndex);

/// Weighted soft vote: per sample, argmax_j sum_i w_i * soft_i(sample, j).
/// Uniform weights reproduce simple average voting. Every soft matrix must
/// share the same samples x classes shape and have rows summing to 1 within
/// 1e-6.
std::vector<int> soft_weighted_vote(const std::vector<Eigen::MatrixXd>& soft_outputs,
                                    const Eigen::Ref<const Eigen::VectorXd>& weights,
                                    TieRule tie = TieRule::LowestIndex);

}  // namespace cgvote
