#include "cgvote/metrics.hpp"

#include <algorithm>
#include <set>

namespace cgvote {

std::string_view to_string(TieRule rule) {
  switch (rule) {
    case TieRule::LowestIndex: return "lowest_index";
    case TieRule::HighestIndex: return "highest_index";
  }
  return "lowest_index";
}

TieRule tie_rule_from_string(std::string_view name) {
  if (name == "lowest_index") return TieRule::LowestIndex;
  if (name == "highest_index") return TieRule::HighestIndex;
  throw ValidationError("unknown tie rule: " + std::string(name));
}

std::string_view to_string(Metric metric) {
  switch (metric) {
    case Metric::Accuracy: return "ACCURACY";
    case Metric::Ppv: return "PPV";
    case Metric::Npv: return "NPV";
    case Metric::Tpr: return "TPR";
    case Metric::Tnr: return "TNR";
  }
  return "ACCURACY";
}

Metric metric_from_string(std::string_view name) {
  for (Metric m : kAllMetrics) {
    if (to_string(m) == name) return m;
  }
  throw ValidationError("unknown metric: " + std::string(name));
}

ConfusionMatrix build_confusion(std::span<const int> true_labels,
                                std::span<const int> predicted, int class_count) {
  if (class_count < 2) {
    throw std::invalid_argument("confusion matrix needs at least 2 classes");
  }
  if (true_labels.empty() || true_labels.size() != predicted.size()) {
    throw std::invalid_argument("true/predicted label sequences must have equal nonzero length");
  }
  Eigen::MatrixXi counts = Eigen::MatrixXi::Zero(class_count, class_count);
  for (std::size_t i = 0; i < true_labels.size(); ++i) {
    const int t = true_labels[i];
    const int p = predicted[i];
    if (t < 0 || t >= class_count || p < 0 || p >= class_count) {
      throw std::invalid_argument("label out of range [0, m) at position " + std::to_string(i));
    }
    ++counts(t, p);
  }
  return ConfusionMatrix{std::move(counts)};
}

BinaryCounts one_vs_rest(const ConfusionMatrix& cm, int cls) {
  const int m = cm.class_count();
  if (cls < 0 || cls >= m) throw std::invalid_argument("class index out of range");
  BinaryCounts b;
  b.tp = cm.counts(cls, cls);
  b.fp = cm.counts.col(cls).cast<std::int64_t>().sum() - b.tp;
  b.fn = cm.counts.row(cls).cast<std::int64_t>().sum() - b.tp;
  b.tn = cm.total() - b.tp - b.fp - b.fn;
  return b;
}

namespace {

// 0/0 -> 0: an empty denominator carries no information, and 0 is the
// pessimistic choice that keeps every entry inside [0, 1].
double safe_ratio(std::int64_t num, std::int64_t den) {
  return den > 0 ? static_cast<double>(num) / static_cast<double>(den) : 0.0;
}

}  // namespace

Eigen::MatrixXd per_class_metrics(const ConfusionMatrix& cm) {
  const int m = cm.class_count();
  if (m < 2 || cm.total() < 1 || (cm.counts.array() < 0).any()) {
    throw std::invalid_argument("invalid confusion matrix");
  }
  Eigen::MatrixXd out(m, kMetricCount);
  const std::int64_t total = cm.total();
  for (int j = 0; j < m; ++j) {
    const BinaryCounts b = one_vs_rest(cm, j);
    out(j, static_cast<int>(Metric::Accuracy)) = safe_ratio(b.tp + b.tn, total);
    out(j, static_cast<int>(Metric::Ppv)) = safe_ratio(b.tp, b.tp + b.fp);
    out(j, static_cast<int>(Metric::Npv)) = safe_ratio(b.tn, b.tn + b.fn);
    out(j, static_cast<int>(Metric::Tpr)) = safe_ratio(b.tp, b.tp + b.fn);
    out(j, static_cast<int>(Metric::Tnr)) = safe_ratio(b.tn, b.tn + b.fp);
  }
  return out;
}

MetricTensor metric_tensor(const std::vector<ConfusionMatrix>& cms) {
  const int n = static_cast<int>(cms.size());
  if (n < 2) throw std::invalid_argument("metric tensor needs at least 2 classifiers");
  const int m = cms.front().class_count();
  for (const ConfusionMatrix& cm : cms) {
    if (cm.class_count() != m) {
      throw std::invalid_argument("all confusion matrices must share the class count");
    }
  }
  MetricTensor tensor;
  tensor.metrics.assign(kAllMetrics.begin(), kAllMetrics.end());
  tensor.slices.assign(kMetricCount, Eigen::MatrixXd(n, m));
  for (int i = 0; i < n; ++i) {
    const Eigen::MatrixXd table = per_class_metrics(cms[i]);  // m x s
    for (int k = 0; k < kMetricCount; ++k) {
      tensor.slices[k].row(i) = table.col(k).transpose();
    }
  }
  return tensor;
}

MetricTensor select_metrics(const MetricTensor& tensor, std::span<const Metric> keep) {
  if (keep.empty()) throw std::invalid_argument("metric selection must be nonempty");
  MetricTensor out;
  for (Metric wanted : keep) {
    const auto it = std::find(tensor.metrics.begin(), tensor.metrics.end(), wanted);
    if (it == tensor.metrics.end()) {
      throw std::invalid_argument("metric not present in tensor: " +
                                  std::string(to_string(wanted)));
    }
    out.metrics.push_back(wanted);
    out.slices.push_back(tensor.slices[static_cast<std::size_t>(it - tensor.metrics.begin())]);
  }
  return out;
}

ClassifierStats overall_stats(const ConfusionMatrix& cm) {
  ClassifierStats s;
  s.sample_count = cm.total();
  if (s.sample_count < 1) throw std::invalid_argument("empty confusion matrix");
  s.accuracy = static_cast<double>(cm.trace()) / static_cast<double>(s.sample_count);
  s.error_rate = 1.0 - s.accuracy;
  s.error_count = s.sample_count - cm.trace();
  return s;
}

int argmax_class(const Eigen::Ref<const Eigen::RowVectorXd>& soft_row, TieRule tie) {
  const int m = static_cast<int>(soft_row.size());
  if (m == 0) throw std::invalid_argument("argmax over an empty row");
  int best = 0;
  for (int j = 1; j < m; ++j) {
    if (tie == TieRule::LowestIndex ? soft_row[j] > soft_row[best]
                                    : soft_row[j] >= soft_row[best]) {
      best = j;
    }
  }
  return best;
}

std::pair<std::vector<int>, std::vector<std::string>> encode_labels(
    const std::vector<std::string>& raw) {
  std::set<std::string> unique(raw.begin(), raw.end());
  std::vector<std::string> classes(unique.begin(), unique.end());
  std::vector<int> encoded;
  encoded.reserve(raw.size());
  for (const std::string& label : raw) {
    const auto it = std::lower_bound(classes.begin(), classes.end(), label);
    encoded.push_back(static_cast<int>(it - classes.begin()));
  }
  return {std::move(encoded), std::move(classes)};
}

}  // namespace cgvote
