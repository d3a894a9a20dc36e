#pragma once

#include <Eigen/Dense>
#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace cgvote {

/// Transferable-utility coalition game over up to kMaxPlayers players.
/// The characteristic function is a fully materialized table indexed by
/// coalition bitmask (bit i = player i, index 0 = empty coalition).
struct CoalitionGame {
  static constexpr int kMaxPlayers = 20;

  Eigen::VectorXd demands;       // empty for games loaded from an explicit table
  double estate = 0.0;           // worth of the grand coalition
  double estate_fraction = 0.0;  // the fraction W/sum(z); 0 for explicit tables
  Eigen::VectorXd table;         // 2^n entries

  int player_count() const;
  std::uint32_t full_mask() const {
    return static_cast<std::uint32_t>(table.size()) - 1u;
  }
  double value(std::uint32_t coalition) const { return table[coalition]; }
};

/// Bankruptcy-style game over nonnegative demands z: the estate is
/// `estate_fraction` of the total demand mass, and each coalition keeps
/// whatever remains of the estate after paying every outsider's demand,
/// floored at zero:
///   v(O) = max(0, W - sum_{i not in O} z_i),  W = fraction * sum z.
/// The table is monotone and nonnegative; v(full) = W exactly.
/// An all-zero z produces the all-zero game (callers fall back to uniform
/// weights downstream).
CoalitionGame bankruptcy_game(const Eigen::Ref<const Eigen::VectorXd>& demands,
                              double estate_fraction = 0.8);

/// Wrap an explicit characteristic table (size must be a power of two,
/// 2 <= n <= kMaxPlayers). demands stay empty; estate = table[full].
CoalitionGame game_from_table(Eigen::VectorXd table);

enum class ValueConcept {
  Shapley = 0,
  Banzhaf,
  Solidarity,
  Cis,
  Ensc,
  Enpac,
  Enbc,
  Consensus,
};

inline constexpr std::array<ValueConcept, 8> kAllConcepts = {
    ValueConcept::Shapley, ValueConcept::Banzhaf, ValueConcept::Solidarity,
    ValueConcept::Cis,     ValueConcept::Ensc,    ValueConcept::Enpac,
    ValueConcept::Enbc,    ValueConcept::Consensus};

std::string_view to_string(ValueConcept concept_tag);
std::optional<ValueConcept> concept_from_string(std::string_view name);

/// One payoff per player under a single value concept. Every concept except
/// Banzhaf is efficient: the payoffs sum to the grand coalition's worth.
struct Allocation {
  ValueConcept concept_tag = ValueConcept::Shapley;
  Eigen::VectorXd values;
};

/// Compute one value concept on the game.
///  - Shapley: subset-weighted average of marginal contributions.
///  - Banzhaf: marginal contributions weighted uniformly by 1/2^(n-1).
///  - Solidarity: Shapley-style coalition weights applied to the average
///    marginal contribution of each coalition's members.
///  - CIS: standalone worth plus an equal share of the remaining surplus.
///  - ENSC: separable contribution v(N)-v(N\{i}) plus equal surplus share.
///  - ENPAC: pairwise-removal contribution plus equal surplus share;
///    requires n >= 3 (the formula divides by n-2).
///  - ENBC: Banzhaf contribution plus equal surplus share.
///  - Consensus: recursive generalization of the 2-player standard solution,
///    evaluated by dynamic programming over coalition bitmasks.
Allocation allocate(const CoalitionGame& game, ValueConcept concept_tag);

/// Compute several concepts; with `parallel` each concept runs in its own
/// task writing a preallocated slot, so results match sequential execution.
std::vector<Allocation> allocate_all(const CoalitionGame& game,
                                     std::span<const ValueConcept> concepts,
                                     bool parallel = false);

/// Permutation-form Shapley value: the marginal contribution of each player
/// averaged over all |N|! join orders. Exponentially slower than allocate()
/// and limited to n <= 9; kept as an independent cross-check.
Allocation shapley_permutation_oracle(const CoalitionGame& game);

/// Weights on the probability simplex plus where they came from.
struct WeightVector {
  Eigen::VectorXd weights;
  std::string provenance;        // value-concept or baseline-scheme tag
  bool uniform_fallback = false; // all clamped scores were zero
  bool clamp_fired = false;      // some negative raw score was clamped
};

/// Clamp negative payoffs to zero and normalize to the simplex. If every
/// clamped payoff is zero the output is uniform and flagged as a fallback.
WeightVector normalize(const Allocation& allocation);
WeightVector normalize_raw(const Eigen::Ref<const Eigen::VectorXd>& raw,
                           std::string provenance);

}  // namespace cgvote
