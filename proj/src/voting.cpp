#include "cgvote/voting.hpp"

#include <cmath>

namespace cgvote {

std::string_view to_string(BaselineScheme scheme) {
  switch (scheme) {
    case BaselineScheme::Swv: return "SWV";
    case BaselineScheme::Wmv: return "WMV";
    case BaselineScheme::Rswv: return "RSWV";
    case BaselineScheme::Bwwv: return "BWWV";
    case BaselineScheme::Qbwwv: return "QBWWV";
  }
  return "SWV";
}

std::optional<BaselineScheme> baseline_from_string(std::string_view name) {
  for (BaselineScheme s : kAllBaselines) {
    if (to_string(s) == name) return s;
  }
  return std::nullopt;
}

Eigen::VectorXd baseline_raw_scores(BaselineScheme scheme,
                                    const std::vector<ClassifierStats>& stats,
                                    int class_count) {
  const int n = static_cast<int>(stats.size());
  if (n < 2) throw std::invalid_argument("baseline weighting needs at least 2 classifiers");
  if (class_count < 2) throw std::invalid_argument("baseline weighting needs at least 2 classes");

  Eigen::VectorXd raw(n);
  switch (scheme) {
    case BaselineScheme::Swv: {
      for (int i = 0; i < n; ++i) raw[i] = stats[i].accuracy;
      break;
    }
    case BaselineScheme::Wmv: {
      for (int i = 0; i < n; ++i) {
        const double a = std::clamp(stats[i].accuracy, 1e-6, 1.0 - 1e-6);
        raw[i] = std::log(a / (1.0 - a));
      }
      break;
    }
    case BaselineScheme::Rswv: {
      // Sample-count reading: 1 - m*errors/(N*(m-1)) zeroes classifiers at
      // or below chance accuracy 1/m. The alternative reading with the
      // classifier count in the denominator, 1 - m*e_i/(n*(m-1)), does not
      // produce that cutoff and is not used.
      const std::int64_t samples = stats.front().sample_count;
      for (int i = 0; i < n; ++i) {
        if (stats[i].sample_count != samples) {
          throw std::invalid_argument("RSWV requires a consistent sample count across classifiers");
        }
        const double scaled = static_cast<double>(class_count) *
                              static_cast<double>(stats[i].error_count) /
                              (static_cast<double>(samples) * (class_count - 1));
        raw[i] = std::max(0.0, 1.0 - scaled);
      }
      break;
    }
    case BaselineScheme::Bwwv:
    case BaselineScheme::Qbwwv: {
      double e_best = stats.front().error_rate;
      double e_worst = stats.front().error_rate;
      for (const ClassifierStats& s : stats) {
        e_best = std::min(e_best, s.error_rate);
        e_worst = std::max(e_worst, s.error_rate);
      }
      for (int i = 0; i < n; ++i) {
        // Equal classifiers: no spread to interpolate, everyone scores 1.
        const double linear =
            e_worst > e_best ? (e_worst - stats[i].error_rate) / (e_worst - e_best) : 1.0;
        raw[i] = scheme == BaselineScheme::Bwwv ? linear : linear * linear;
      }
      break;
    }
  }
  return raw;
}

WeightVector baseline_weights(BaselineScheme scheme,
                              const std::vector<ClassifierStats>& stats,
                              int class_count) {
  return normalize_raw(baseline_raw_scores(scheme, stats, class_count),
                       std::string(to_string(scheme)));
}

std::vector<int> hard_majority_vote(const std::vector<std::vector<int>>& hard_preds,
                                    const Eigen::Ref<const Eigen::VectorXd>& weights,
                                    int class_count, TieRule tie) {
  const int n = static_cast<int>(hard_preds.size());
  if (n < 1 || weights.size() != n) {
    throw std::invalid_argument("one weight per classifier is required");
  }
  const std::size_t samples = hard_preds.front().size();
  for (const std::vector<int>& preds : hard_preds) {
    if (preds.size() != samples) {
      throw std::invalid_argument("hard prediction sequences must share their length");
    }
  }
  std::vector<int> out(samples);
  Eigen::RowVectorXd tally(class_count);
  for (std::size_t row = 0; row < samples; ++row) {
    tally.setZero();
    for (int i = 0; i < n; ++i) {
      const int label = hard_preds[i][row];
      if (label < 0 || label >= class_count) {
        throw std::invalid_argument("hard prediction out of class range");
      }
      tally[label] += weights[i];
    }
    out[row] = argmax_class(tally, tie);
  }
  return out;
}

std::vector<int> soft_weighted_vote(const std::vector<Eigen::MatrixXd>& soft_outputs,
                                    const Eigen::Ref<const Eigen::VectorXd>& weights,
                                    TieRule tie) {
  const int n = static_cast<int>(soft_outputs.size());
  if (n < 1 || weights.size() != n) {
    throw std::invalid_argument("one weight per classifier is required");
  }
  const Eigen::Index samples = soft_outputs.front().rows();
  const Eigen::Index classes = soft_outputs.front().cols();
  for (const Eigen::MatrixXd& soft : soft_outputs) {
    if (soft.rows() != samples || soft.cols() != classes) {
      throw std::invalid_argument("soft output matrices must share their shape");
    }
    if (((soft.rowwise().sum().array() - 1.0).abs() > 1e-6).any()) {
      throw std::invalid_argument("soft output rows must sum to 1 within 1e-6");
    }
  }
  Eigen::MatrixXd blended = weights[0] * soft_outputs[0];
  for (int i = 1; i < n; ++i) blended += weights[i] * soft_outputs[i];
  std::vector<int> out(static_cast<std::size_t>(samples));
  for (Eigen::Index row = 0; row < samples; ++row) {
    out[static_cast<std::size_t>(row)] = argmax_class(blended.row(row), tie);
  }
  return out;
}

}  // namespace cgvote
