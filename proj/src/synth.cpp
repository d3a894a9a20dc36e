#include "cgvote/synth.hpp"

#include <cmath>

#include "cgvote/rng.hpp"

namespace cgvote {

void SynthSpec::validate() const {
  const int m = class_count();
  if (m < 2) throw ValidationError("synthetic spec needs at least 2 classes");
  if (classifier_count() < 2) throw ValidationError("synthetic spec needs at least 2 classifiers");
  if (samples_per_split < 10 * m) {
    throw ValidationError("samples per split must be at least 10x the class count");
  }
  if ((class_probs.array() <= 0.0).any()) {
    throw ValidationError("class probabilities must be positive");
  }
  if (std::abs(class_probs.sum() - 1.0) > 1e-9) {
    throw ValidationError("class probabilities must sum to 1");
  }
  if ((skills.array() < 0.0).any()) throw ValidationError("skills must be nonnegative");
}

namespace {

int sample_class(const Eigen::VectorXd& probs, double u) {
  double cumulative = 0.0;
  const int m = static_cast<int>(probs.size());
  for (int j = 0; j < m; ++j) {
    cumulative += probs[j];
    if (u < cumulative) return j;
  }
  return m - 1;
}

PredictionSplit generate_split(const SynthSpec& spec, SplitMix64 rng,
                               std::int64_t first_sample_id) {
  const int m = spec.class_count();
  const int n = spec.classifier_count();
  const int samples = spec.samples_per_split;

  PredictionSplit split;
  split.sample_ids.resize(samples);
  split.true_labels.resize(samples);
  split.soft.assign(n, Eigen::MatrixXd(samples, m));

  for (int row = 0; row < samples; ++row) {
    split.sample_ids[row] = first_sample_id + row;
    const int truth = sample_class(spec.class_probs, rng.next_unit());
    split.true_labels[row] = truth;
    for (int i = 0; i < n; ++i) {
      Eigen::RowVectorXd draw(m);
      for (int c = 0; c < m; ++c) draw[c] = rng.next_open01();
      draw[truth] += spec.skills[i];
      draw /= draw.sum();
      // Pin the row sum to exactly 1 by giving the last entry the remainder.
      double partial = 0.0;
      for (int c = 0; c < m - 1; ++c) partial += draw[c];
      draw[m - 1] = 1.0 - partial;
      split.soft[i].row(row) = draw;
    }
  }
  return split;
}

}  // namespace

PredictionBundle generate(const SynthSpec& spec) {
  spec.validate();
  const SplitMix64 root(spec.seed);

  PredictionBundle bundle;
  bundle.dataset = "synthetic";
  bundle.class_count = spec.class_count();
  for (int i = 0; i < spec.classifier_count(); ++i) {
    bundle.classifier_names.push_back("clf_" + std::to_string(i));
  }
  bundle.model_test = generate_split(spec, root.derive(0), 0);
  bundle.ensemble_test = generate_split(spec, root.derive(1), spec.samples_per_split);
  return bundle;
}

}  // namespace cgvote
