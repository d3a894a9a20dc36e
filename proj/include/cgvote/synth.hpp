#pragma once

#include <Eigen/Dense>
#include <cstdint>

#include "cgvote/pipeline.hpp"

namespace cgvote {

/// Specification for a reproducible synthetic multi-classifier corpus.
/// Each classifier i has a truth boost b_i >= 0: its soft row for a sample
/// with true class y is (u + b_i * e_y) / (sum u + b_i) with u_c independent
/// uniform(0,1) draws, so expected accuracy grows with b_i (1/m at b=0,
/// approaching 1 as b grows).
struct SynthSpec {
  int samples_per_split = 0;
  Eigen::VectorXd class_probs;  // simplex over classes
  Eigen::VectorXd skills;       // b_i per classifier
  std::uint64_t seed = 0;

  int class_count() const { return static_cast<int>(class_probs.size()); }
  int classifier_count() const { return static_cast<int>(skills.size()); }
  void validate() const;
};

/// Generate the model-test and ensemble-test splits from two independent
/// substreams of the seed. Rows sum to 1 exactly; identical specs produce
/// bit-identical bundles.
PredictionBundle generate(const SynthSpec& spec);

}  // namespace cgvote
