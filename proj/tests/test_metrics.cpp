#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <numeric>
#include <vector>

#include "cgvote/metrics.hpp"
#include "cgvote/rng.hpp"
#include "doctest.h"

using namespace cgvote;

namespace {

ConfusionMatrix cm_from(std::initializer_list<std::initializer_list<int>> rows) {
  const int m = static_cast<int>(rows.size());
  Eigen::MatrixXi counts(m, m);
  int r = 0;
  for (const auto& row : rows) {
    int c = 0;
    for (int value : row) counts(r, c++) = value;
    ++r;
  }
  return ConfusionMatrix{counts};
}

std::pair<std::vector<int>, std::vector<int>> random_labels(SplitMix64& rng, int samples, int m) {
  std::vector<int> truth(samples), pred(samples);
  for (int i = 0; i < samples; ++i) {
    truth[i] = static_cast<int>(rng.next_below(m));
    pred[i] = static_cast<int>(rng.next_below(m));
  }
  return {truth, pred};
}

}  // namespace

TEST_CASE("build_confusion: counts and validation") {
  const std::vector<int> perfect_true{0, 1};
  const std::vector<int> perfect_pred{0, 1};
  const ConfusionMatrix perfect = build_confusion(perfect_true, perfect_pred, 2);
  CHECK(perfect.counts(0, 0) == 1);
  CHECK(perfect.counts(1, 1) == 1);
  CHECK(perfect.counts(0, 1) == 0);
  CHECK(perfect.counts(1, 0) == 0);

  const std::vector<int> t2{0, 0, 1};
  const std::vector<int> p2{1, 0, 1};
  const ConfusionMatrix mixed = build_confusion(t2, p2, 2);
  CHECK(mixed.counts(0, 0) == 1);
  CHECK(mixed.counts(0, 1) == 1);
  CHECK(mixed.counts(1, 0) == 0);
  CHECK(mixed.counts(1, 1) == 1);

  const std::vector<int> single{0};
  const ConfusionMatrix wide = build_confusion(single, single, 3);
  CHECK(wide.class_count() == 3);
  CHECK(wide.counts(0, 0) == 1);
  CHECK(wide.total() == 1);

  const std::vector<int> three{0, 1, 0};
  CHECK_THROWS_AS(build_confusion(three, single, 2), std::invalid_argument);
  const std::vector<int> out_of_range{0, 2};
  const std::vector<int> ok{0, 1};
  CHECK_THROWS_AS(build_confusion(out_of_range, ok, 2), std::invalid_argument);
  CHECK_THROWS_AS(build_confusion(ok, ok, 1), std::invalid_argument);
  CHECK_THROWS_AS(build_confusion(std::vector<int>{}, std::vector<int>{}, 2),
                  std::invalid_argument);
}

TEST_CASE("per_class_metrics: worked examples") {
  const Eigen::MatrixXd perfect = per_class_metrics(cm_from({{5, 0}, {0, 5}}));
  CHECK((perfect.array() == 1.0).all());

  const Eigen::MatrixXd mixed = per_class_metrics(cm_from({{8, 2}, {1, 9}}));
  CHECK(std::abs(mixed(0, 0) - 0.85) <= 1e-12);        // ACC
  CHECK(std::abs(mixed(0, 1) - 8.0 / 9.0) <= 1e-12);   // PPV
  CHECK(std::abs(mixed(0, 2) - 9.0 / 11.0) <= 1e-12);  // NPV
  CHECK(std::abs(mixed(0, 3) - 0.8) <= 1e-12);         // TPR
  CHECK(std::abs(mixed(0, 4) - 0.9) <= 1e-12);         // TNR

  // degenerate ratios collapse to 0
  const Eigen::MatrixXd degenerate = per_class_metrics(cm_from({{0, 3}, {0, 7}}));
  CHECK(degenerate(0, static_cast<int>(Metric::Tpr)) == 0.0);
  CHECK(degenerate(0, static_cast<int>(Metric::Ppv)) == 0.0);
}

TEST_CASE("per-class metrics stay in [0,1]; one-vs-rest counts reconcile") {
  SplitMix64 rng(21);
  for (int trial = 0; trial < 30; ++trial) {
    const int m = 2 + static_cast<int>(rng.next_below(5));
    const int samples = 20 + static_cast<int>(rng.next_below(200));
    auto [truth, pred] = random_labels(rng, samples, m);
    const ConfusionMatrix cm = build_confusion(truth, pred, m);
    const Eigen::MatrixXd table = per_class_metrics(cm);
    CHECK((table.array() >= 0.0).all());
    CHECK((table.array() <= 1.0).all());

    std::int64_t tp_sum = 0;
    for (int j = 0; j < m; ++j) {
      const BinaryCounts b = one_vs_rest(cm, j);
      CHECK(b.tp + b.fp + b.fn + b.tn == cm.total());
      tp_sum += b.tp;
    }
    CHECK(tp_sum == cm.trace());
  }
}

TEST_CASE("relabeling permutes confusion rows/columns and metric rows") {
  SplitMix64 rng(22);
  const int m = 4;
  auto [truth, pred] = random_labels(rng, 120, m);
  const ConfusionMatrix base = build_confusion(truth, pred, m);
  const Eigen::MatrixXd base_metrics = per_class_metrics(base);

  std::vector<int> perm(m);
  std::iota(perm.begin(), perm.end(), 0);
  for (int i = m - 1; i > 0; --i) std::swap(perm[i], perm[rng.next_below(i + 1)]);

  std::vector<int> truth2(truth.size()), pred2(pred.size());
  for (std::size_t i = 0; i < truth.size(); ++i) {
    truth2[i] = perm[truth[i]];
    pred2[i] = perm[pred[i]];
  }
  const ConfusionMatrix relabeled = build_confusion(truth2, pred2, m);
  const Eigen::MatrixXd relabeled_metrics = per_class_metrics(relabeled);
  for (int t = 0; t < m; ++t) {
    for (int p = 0; p < m; ++p) {
      CHECK(relabeled.counts(perm[t], perm[p]) == base.counts(t, p));
    }
    CHECK((relabeled_metrics.row(perm[t]).array() == base_metrics.row(t).array()).all());
  }
}

TEST_CASE("overall_stats: worked examples and recount") {
  const ClassifierStats perfect = overall_stats(cm_from({{5, 0}, {0, 5}}));
  CHECK(perfect.accuracy == 1.0);
  CHECK(perfect.error_rate == 0.0);
  CHECK(perfect.error_count == 0);
  CHECK(perfect.sample_count == 10);

  const ClassifierStats mixed = overall_stats(cm_from({{8, 2}, {1, 9}}));
  CHECK(std::abs(mixed.accuracy - 0.85) <= 1e-12);
  CHECK(std::abs(mixed.error_rate - 0.15) <= 1e-12);
  CHECK(mixed.error_count == 3);
  CHECK(mixed.sample_count == 20);
  CHECK(std::abs(mixed.accuracy + mixed.error_rate - 1.0) <= 1e-12);

  const ClassifierStats wrong = overall_stats(cm_from({{0, 1}, {1, 0}}));
  CHECK(wrong.accuracy == 0.0);
  CHECK(wrong.error_rate == 1.0);

  SplitMix64 rng(23);
  auto [truth, pred] = random_labels(rng, 333, 3);
  const ClassifierStats stats = overall_stats(build_confusion(truth, pred, 3));
  std::size_t hits = 0;
  for (std::size_t i = 0; i < truth.size(); ++i) hits += truth[i] == pred[i];
  CHECK(stats.accuracy == static_cast<double>(hits) / 333.0);
}

TEST_CASE("metric_tensor: stacking and validation") {
  const ConfusionMatrix a = cm_from({{5, 0}, {0, 5}});
  const ConfusionMatrix b = cm_from({{8, 2}, {1, 9}});
  const MetricTensor tensor = metric_tensor({a, b});
  CHECK(tensor.classifier_count() == 2);
  CHECK(tensor.class_count() == 2);
  CHECK(tensor.metric_count() == kMetricCount);
  CHECK((tensor.slices[0].row(0).array() == 1.0).all());
  CHECK(std::abs(tensor.slices[static_cast<int>(Metric::Tpr)](1, 0) - 0.8) <= 1e-12);
  CHECK(std::abs(tensor.slices[static_cast<int>(Metric::Ppv)](1, 0) - 8.0 / 9.0) <= 1e-12);

  const MetricTensor twin = metric_tensor({b, b});
  for (const Eigen::MatrixXd& slice : twin.slices) {
    CHECK((slice.row(0).array() == slice.row(1).array()).all());
  }

  CHECK_THROWS_AS(metric_tensor({a}), std::invalid_argument);
  const ConfusionMatrix wide = cm_from({{1, 0, 0}, {0, 1, 0}, {0, 0, 1}});
  CHECK_THROWS_AS(metric_tensor({a, wide}), std::invalid_argument);
}

TEST_CASE("select_metrics subsets slices in order") {
  const MetricTensor tensor =
      metric_tensor({cm_from({{5, 0}, {0, 5}}), cm_from({{8, 2}, {1, 9}})});
  const Metric keep[] = {Metric::Tnr, Metric::Accuracy};
  const MetricTensor subset = select_metrics(tensor, keep);
  CHECK(subset.metric_count() == 2);
  CHECK(subset.metrics[0] == Metric::Tnr);
  CHECK(subset.metrics[1] == Metric::Accuracy);
  CHECK((subset.slices[1].array() ==
         tensor.slices[static_cast<int>(Metric::Accuracy)].array())
            .all());
}

TEST_CASE("argmax_class: ties and validation") {
  Eigen::RowVectorXd row(3);
  row << 0.2, 0.5, 0.3;
  CHECK(argmax_class(row) == 1);

  Eigen::RowVectorXd tie(2);
  tie << 0.5, 0.5;
  CHECK(argmax_class(tie) == 0);
  CHECK(argmax_class(tie, TieRule::HighestIndex) == 1);

  Eigen::RowVectorXd onehot(3);
  onehot << 1.0, 0.0, 0.0;
  CHECK(argmax_class(onehot) == 0);

  CHECK_THROWS_AS(argmax_class(Eigen::RowVectorXd()), std::invalid_argument);
}

TEST_CASE("encode_labels maps via the sorted unique set") {
  const std::vector<std::string> raw{"dog", "cat", "dog", "bird"};
  const auto [encoded, classes] = encode_labels(raw);
  CHECK(classes == std::vector<std::string>{"bird", "cat", "dog"});
  CHECK(encoded == std::vector<int>{2, 1, 2, 0});
}
