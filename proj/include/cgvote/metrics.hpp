#pragma once

#include <Eigen/Dense>
#include <array>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "cgvote/types.hpp"

namespace cgvote {

/// m x m count table; counts(t, p) = samples with true class t predicted p.
struct ConfusionMatrix {
  Eigen::MatrixXi counts;

  int class_count() const { return static_cast<int>(counts.rows()); }
  std::int64_t total() const { return counts.cast<std::int64_t>().sum(); }
  std::int64_t trace() const { return counts.cast<std::int64_t>().trace(); }
};

/// One-vs-rest counts for a single class. tp+fp+fn+tn equals the matrix total.
struct BinaryCounts {
  std::int64_t tp = 0;
  std::int64_t fp = 0;
  std::int64_t fn = 0;
  std::int64_t tn = 0;
};

struct ClassifierStats {
  double accuracy = 0.0;
  double error_rate = 0.0;
  std::int64_t error_count = 0;
  std::int64_t sample_count = 0;
};

/// Per-class metric columns, in the fixed order recorded in output files.
enum class Metric { Accuracy = 0, Ppv = 1, Npv = 2, Tpr = 3, Tnr = 4 };

inline constexpr int kMetricCount = 5;
inline constexpr std::array<Metric, kMetricCount> kAllMetrics = {
    Metric::Accuracy, Metric::Ppv, Metric::Npv, Metric::Tpr, Metric::Tnr};

std::string_view to_string(Metric metric);
Metric metric_from_string(std::string_view name);

/// n classifiers x m classes x s metrics, stored as one n x m matrix per
/// metric. All entries lie in [0, 1].
struct MetricTensor {
  std::vector<Metric> metrics;          // column meaning of each slice
  std::vector<Eigen::MatrixXd> slices;  // slices[k] is n x m

  int classifier_count() const {
    return slices.empty() ? 0 : static_cast<int>(slices.front().rows());
  }
  int class_count() const {
    return slices.empty() ? 0 : static_cast<int>(slices.front().cols());
  }
  int metric_count() const { return static_cast<int>(slices.size()); }
};

/// Count true/predicted pairs into an m x m confusion matrix.
/// Rejects length mismatches and labels outside [0, m).
ConfusionMatrix build_confusion(std::span<const int> true_labels,
                                std::span<const int> predicted, int class_count);

BinaryCounts one_vs_rest(const ConfusionMatrix& cm, int cls);

/// m x 5 table of ACCURACY, PPV, NPV, TPR, TNR per class under one-vs-rest
/// reduction. Any 0/0 ratio is defined as 0, which keeps every entry in [0,1].
Eigen::MatrixXd per_class_metrics(const ConfusionMatrix& cm);

/// Stack per_class_metrics for n >= 2 classifiers sharing the same class set.
MetricTensor metric_tensor(const std::vector<ConfusionMatrix>& cms);

/// Keep only the requested metric slices, in the requested order.
MetricTensor select_metrics(const MetricTensor& tensor, std::span<const Metric> keep);

/// Trace-based accuracy, error rate and error count.
ClassifierStats overall_stats(const ConfusionMatrix& cm);

/// Index of the row maximum; exact ties resolved by `tie`.
int argmax_class(const Eigen::Ref<const Eigen::RowVectorXd>& soft_row,
                 TieRule tie = TieRule::LowestIndex);

/// Map arbitrary label strings to dense indices [0, m) via the sorted unique
/// label set. Returns the encoded labels and the sorted class names.
std::pair<std::vector<int>, std::vector<std::string>> encode_labels(
    const std::vector<std::string>& raw);

}  // namespace cgvote
