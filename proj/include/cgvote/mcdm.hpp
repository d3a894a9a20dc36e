#pragma once

#include <Eigen/Dense>

#include "cgvote/metrics.hpp"

namespace cgvote {

/// VIKOR parameters: the strategy weight v in [0,1] blending group utility
/// against individual regret, and one positive weight per criterion.
struct VikorParams {
  double strategy_weight = 0.5;
  Eigen::VectorXd criteria_weights;
};

/// One score per alternative: group utility S, individual regret R, and the
/// compromise index Q. Q lies in [0,1] whenever S and R are non-degenerate.
struct VikorScores {
  Eigen::VectorXd group_utility;      // S
  Eigen::VectorXd individual_regret;  // R
  Eigen::VectorXd compromise;         // Q
};

/// Imbalance-aware criteria weights from per-class instance counts:
/// p_j = m * exp(-m * count_j / total). Strictly positive, strictly
/// decreasing in class share, so minority classes weigh more.
Eigen::VectorXd class_weights(const Eigen::Ref<const Eigen::VectorXi>& class_counts);

/// VIKOR compromise scoring of a benefit-oriented decision matrix
/// (alternatives x criteria, larger is better). Any fraction whose
/// denominator vanishes (constant criterion column, or degenerate S or R
/// spread) contributes 0, so all-equal alternatives score Q = 0.
VikorScores vikor_scores(const Eigen::Ref<const Eigen::MatrixXd>& decision,
                         const VikorParams& params);

/// Per-metric compromise of the classifier tensor: for each metric slice run
/// VIKOR with classifiers as alternatives and classes as criteria, then invert
/// so larger is better. Returns the n x s score matrix with
/// y(i,k) = (Qmax(k) + Qmin(k)) - Q_i(k).
/// With `parallel` the per-metric runs execute concurrently; each metric
/// writes only its own column, so the result is identical to sequential.
Eigen::MatrixXd stage1_scores(const MetricTensor& tensor,
                              const Eigen::Ref<const Eigen::VectorXd>& class_criteria_weights,
                              double strategy_weight, bool parallel = false);

/// Cross-metric compromise of the stage-1 scores: VIKOR with the s metric
/// columns as criteria, inverted the same way. The result z is the
/// per-classifier global evaluation, nonnegative by construction.
Eigen::VectorXd stage2_evaluation(const Eigen::Ref<const Eigen::MatrixXd>& stage1,
                                  const Eigen::Ref<const Eigen::VectorXd>& metric_weights,
                                  double strategy_weight);

}  // namespace cgvote
