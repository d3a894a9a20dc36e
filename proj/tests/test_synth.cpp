#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <cmath>

#include "cgvote/metrics.hpp"
#include "cgvote/pipeline.hpp"
#include "cgvote/synth.hpp"
#include "doctest.h"

using namespace cgvote;

namespace {

SynthSpec make_spec(int samples, std::initializer_list<double> probs,
                    std::initializer_list<double> skills, std::uint64_t seed) {
  SynthSpec spec;
  spec.samples_per_split = samples;
  spec.class_probs = Eigen::VectorXd(static_cast<Eigen::Index>(probs.size()));
  Eigen::Index i = 0;
  for (double p : probs) spec.class_probs[i++] = p;
  spec.skills = Eigen::VectorXd(static_cast<Eigen::Index>(skills.size()));
  i = 0;
  for (double b : skills) spec.skills[i++] = b;
  spec.seed = seed;
  return spec;
}

double split_accuracy(const PredictionSplit& split, int classifier) {
  std::vector<int> predictions(split.sample_count());
  for (int row = 0; row < split.sample_count(); ++row) {
    predictions[row] = argmax_class(split.soft[classifier].row(row));
  }
  return accuracy_of(predictions, split.true_labels);
}

}  // namespace

TEST_CASE("spec validation") {
  CHECK_THROWS_AS(generate(make_spec(5, {0.5, 0.5}, {1.0, 1.0}, 0)), ValidationError);
  CHECK_THROWS_AS(generate(make_spec(100, {0.7, 0.7}, {1.0, 1.0}, 0)), ValidationError);
  CHECK_THROWS_AS(generate(make_spec(100, {0.5, 0.5}, {-1.0, 1.0}, 0)), ValidationError);
  CHECK_THROWS_AS(generate(make_spec(100, {1.0}, {1.0, 1.0}, 0)), ValidationError);
  CHECK_THROWS_AS(generate(make_spec(100, {0.5, 0.5}, {1.0}, 0)), ValidationError);
}

TEST_CASE("rows are valid distributions summing to exactly 1") {
  const PredictionBundle bundle = generate(make_spec(200, {0.4, 0.3, 0.2, 0.1}, {0.0, 2.0}, 5));
  for (const PredictionSplit* split : {&bundle.model_test, &bundle.ensemble_test}) {
    for (const Eigen::MatrixXd& soft : split->soft) {
      for (Eigen::Index row = 0; row < soft.rows(); ++row) {
        CHECK(soft.row(row).sum() == 1.0);
        CHECK((soft.row(row).array() > 0.0).all());
        CHECK((soft.row(row).array() < 1.0).all());
      }
    }
  }
}

TEST_CASE("determinism: same spec same bytes, different seed different draws") {
  const SynthSpec spec = make_spec(150, {0.5, 0.5}, {1.0, 0.5}, 99);
  const PredictionBundle a = generate(spec);
  const PredictionBundle b = generate(spec);
  REQUIRE(a.model_test.soft.size() == b.model_test.soft.size());
  CHECK(a.model_test.true_labels == b.model_test.true_labels);
  CHECK(a.ensemble_test.true_labels == b.ensemble_test.true_labels);
  for (std::size_t i = 0; i < a.model_test.soft.size(); ++i) {
    CHECK((a.model_test.soft[i].array() == b.model_test.soft[i].array()).all());
    CHECK((a.ensemble_test.soft[i].array() == b.ensemble_test.soft[i].array()).all());
  }

  SynthSpec other = spec;
  other.seed = 100;
  const PredictionBundle c = generate(other);
  CHECK((a.model_test.soft[0].array() != c.model_test.soft[0].array()).any());

  // the two splits come from distinct substreams
  CHECK((a.model_test.soft[0].array() != a.ensemble_test.soft[0].array()).any());
  CHECK(a.model_test.sample_ids.front() == 0);
  CHECK(a.ensemble_test.sample_ids.front() == 150);
}

TEST_CASE("zero boost scores at chance level") {
  const PredictionBundle bundle = generate(make_spec(100000, {0.25, 0.25, 0.25, 0.25}, {0.0, 0.0}, 7));
  const double accuracy = split_accuracy(bundle.model_test, 0);
  CHECK(std::abs(accuracy - 0.25) <= 0.01);
}

TEST_CASE("huge boost predicts the truth essentially always") {
  const PredictionBundle bundle = generate(make_spec(10000, {0.4, 0.3, 0.3}, {1e6, 0.0}, 8));
  CHECK(split_accuracy(bundle.model_test, 0) >= 0.999);
}

TEST_CASE("accuracy is monotone in the boost") {
  const PredictionBundle bundle =
      generate(make_spec(10000, {0.4, 0.3, 0.2, 0.1}, {0.0, 0.5, 1.0, 2.0, 5.0}, 9));
  std::vector<double> accuracy;
  for (int i = 0; i < 5; ++i) accuracy.push_back(split_accuracy(bundle.model_test, i));
  int inversions = 0;
  for (int i = 1; i < 5; ++i) {
    if (accuracy[i] < accuracy[i - 1]) {
      ++inversions;
      CHECK(accuracy[i - 1] - accuracy[i] <= 0.01);
    }
  }
  CHECK(inversions <= 1);
  CHECK(accuracy[4] > accuracy[0] + 0.3);  // the trend is unmistakable
}

TEST_CASE("class frequencies match the requested distribution") {
  const Eigen::VectorXd probs = (Eigen::VectorXd(4) << 0.4, 0.3, 0.2, 0.1).finished();
  SynthSpec spec;
  spec.samples_per_split = 10000;
  spec.class_probs = probs;
  spec.skills = Eigen::VectorXd::Ones(2);
  spec.seed = 10;
  const PredictionBundle bundle = generate(spec);
  Eigen::VectorXd counts = Eigen::VectorXd::Zero(4);
  for (int label : bundle.model_test.true_labels) counts[label] += 1.0;
  for (int j = 0; j < 4; ++j) {
    const double expected = probs[j] * 10000;
    const double stderr3 = 3.0 * std::sqrt(probs[j] * (1 - probs[j]) * 10000);
    CHECK(std::abs(counts[j] - expected) <= stderr3);
  }
}
