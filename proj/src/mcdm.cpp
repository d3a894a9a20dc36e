#include "cgvote/mcdm.hpp"

#include <cmath>
#include <future>
#include <vector>

namespace cgvote {

Eigen::VectorXd class_weights(const Eigen::Ref<const Eigen::VectorXi>& class_counts) {
  const int m = static_cast<int>(class_counts.size());
  if (m < 2) throw std::invalid_argument("class weights need at least 2 classes");
  if ((class_counts.array() < 1).any()) {
    throw std::invalid_argument("class counts must all be positive");
  }
  const double total = class_counts.cast<double>().sum();
  Eigen::VectorXd p(m);
  for (int j = 0; j < m; ++j) {
    const double share = static_cast<double>(class_counts[j]) / total;
    p[j] = static_cast<double>(m) * std::exp(-static_cast<double>(m) * share);
  }
  return p;
}

VikorScores vikor_scores(const Eigen::Ref<const Eigen::MatrixXd>& decision,
                         const VikorParams& params) {
  const int alternatives = static_cast<int>(decision.rows());
  const int criteria = static_cast<int>(decision.cols());
  if (alternatives < 2) throw std::invalid_argument("VIKOR needs at least 2 alternatives");
  if (criteria < 1) throw std::invalid_argument("VIKOR needs at least 1 criterion");
  if (params.criteria_weights.size() != criteria) {
    throw std::invalid_argument("criteria weight count does not match the decision matrix");
  }
  if ((params.criteria_weights.array() <= 0.0).any()) {
    throw std::invalid_argument("criteria weights must be positive");
  }
  if (params.strategy_weight < 0.0 || params.strategy_weight > 1.0) {
    throw std::invalid_argument("strategy weight must lie in [0, 1]");
  }
  if (!decision.allFinite()) throw std::invalid_argument("decision matrix must be finite");

  // Range-normalized weighted distance from the per-criterion ideal. A
  // constant column has no discriminating information and contributes 0.
  Eigen::MatrixXd terms = Eigen::MatrixXd::Zero(alternatives, criteria);
  for (int j = 0; j < criteria; ++j) {
    const double best = decision.col(j).maxCoeff();
    const double worst = decision.col(j).minCoeff();
    const double range = best - worst;
    if (range > 0.0) {
      terms.col(j) = params.criteria_weights[j] * (best - decision.col(j).array()) / range;
    }
  }

  VikorScores scores;
  scores.group_utility = terms.rowwise().sum();
  scores.individual_regret = terms.rowwise().maxCoeff();

  const double s_best = scores.group_utility.minCoeff();
  const double s_worst = scores.group_utility.maxCoeff();
  const double r_best = scores.individual_regret.minCoeff();
  const double r_worst = scores.individual_regret.maxCoeff();
  const double v = params.strategy_weight;

  scores.compromise = Eigen::VectorXd::Zero(alternatives);
  if (s_worst > s_best) {
    scores.compromise += v * (scores.group_utility.array() - s_best).matrix() / (s_worst - s_best);
  }
  if (r_worst > r_best) {
    scores.compromise +=
        (1.0 - v) * (scores.individual_regret.array() - r_best).matrix() / (r_worst - r_best);
  }
  return scores;
}

namespace {

// Invert a compromise column so larger means better, preserving the spread:
// y_i = (Qmax + Qmin) - Q_i.
Eigen::VectorXd invert_compromise(const Eigen::VectorXd& q) {
  const double offset = q.maxCoeff() + q.minCoeff();
  return (offset - q.array()).matrix();
}

}  // namespace

Eigen::MatrixXd stage1_scores(const MetricTensor& tensor,
                              const Eigen::Ref<const Eigen::VectorXd>& class_criteria_weights,
                              double strategy_weight, bool parallel) {
  const int n = tensor.classifier_count();
  const int s = tensor.metric_count();
  if (n < 2 || s < 1) throw std::invalid_argument("stage 1 needs >= 2 classifiers and >= 1 metric");
  if (class_criteria_weights.size() != tensor.class_count()) {
    throw std::invalid_argument("class weight count does not match the tensor");
  }

  VikorParams params;
  params.strategy_weight = strategy_weight;
  params.criteria_weights = class_criteria_weights;

  Eigen::MatrixXd y(n, s);
  auto run_metric = [&](int k) {
    y.col(k) = invert_compromise(vikor_scores(tensor.slices[k], params).compromise);
  };
  if (parallel) {
    std::vector<std::future<void>> tasks;
    tasks.reserve(s);
    for (int k = 0; k < s; ++k) {
      tasks.push_back(std::async(std::launch::async, run_metric, k));
    }
    for (auto& task : tasks) task.get();
  } else {
    for (int k = 0; k < s; ++k) run_metric(k);
  }
  return y;
}

Eigen::VectorXd stage2_evaluation(const Eigen::Ref<const Eigen::MatrixXd>& stage1,
                                  const Eigen::Ref<const Eigen::VectorXd>& metric_weights,
                                  double strategy_weight) {
  VikorParams params;
  params.strategy_weight = strategy_weight;
  params.criteria_weights = metric_weights;
  return invert_compromise(vikor_scores(stage1, params).compromise);
}

}  // namespace cgvote
