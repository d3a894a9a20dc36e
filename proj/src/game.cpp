#include "cgvote/game.hpp"

#include <algorithm>
#include <bit>
#include <future>
#include <numeric>
#include <stdexcept>

namespace cgvote {

namespace {

bool is_power_of_two(std::size_t x) { return x != 0 && (x & (x - 1)) == 0; }

int players_of_table(const Eigen::VectorXd& table) {
  const auto size = static_cast<std::size_t>(table.size());
  if (!is_power_of_two(size) || size < 4) {
    throw std::invalid_argument("characteristic table size must be 2^n with n >= 2");
  }
  return std::countr_zero(size);
}

// C(n, k) for n <= 20: exact in 64-bit, used to form the Shapley/Solidarity
// coalition weights as 1 / (n * C(n-1, s)) without 20!-sized intermediates.
std::int64_t binomial(int n, int k) {
  std::int64_t result = 1;
  for (int i = 1; i <= k; ++i) result = result * (n - k + i) / i;
  return result;
}

}  // namespace

int CoalitionGame::player_count() const { return players_of_table(table); }

CoalitionGame bankruptcy_game(const Eigen::Ref<const Eigen::VectorXd>& demands,
                              double estate_fraction) {
  const int n = static_cast<int>(demands.size());
  if (n < 2 || n > CoalitionGame::kMaxPlayers) {
    throw std::invalid_argument("bankruptcy game needs between 2 and 20 players");
  }
  if ((demands.array() < 0.0).any()) {
    throw std::invalid_argument("demands must be nonnegative");
  }
  if (!(estate_fraction > 0.0 && estate_fraction <= 1.0)) {
    throw std::invalid_argument("estate fraction must lie in (0, 1]");
  }

  const std::uint32_t size = 1u << n;
  // Subset sums share one accumulation order so that v(full) = W holds
  // exactly and v(empty) is exactly zero for fraction <= 1.
  Eigen::VectorXd inside(size);
  inside[0] = 0.0;
  for (std::uint32_t mask = 1; mask < size; ++mask) {
    const std::uint32_t low = mask & (~mask + 1u);
    inside[mask] = inside[mask ^ low] + demands[std::countr_zero(low)];
  }
  const double total = inside[size - 1];
  const double estate = estate_fraction * total;

  CoalitionGame game;
  game.demands = demands;
  game.estate = estate;
  game.estate_fraction = estate_fraction;
  game.table.resize(size);
  for (std::uint32_t mask = 0; mask < size; ++mask) {
    game.table[mask] = std::max(0.0, estate - (total - inside[mask]));
  }
  return game;
}

CoalitionGame game_from_table(Eigen::VectorXd table) {
  const int n = players_of_table(table);
  if (n > CoalitionGame::kMaxPlayers) {
    throw std::invalid_argument("characteristic table exceeds the 20-player cap");
  }
  if (!table.allFinite()) throw std::invalid_argument("table entries must be finite");
  CoalitionGame game;
  game.estate = table[table.size() - 1];
  game.table = std::move(table);
  return game;
}

std::string_view to_string(ValueConcept concept_tag) {
  switch (concept_tag) {
    case ValueConcept::Shapley: return "SHAPLEY";
    case ValueConcept::Banzhaf: return "BANZHAF";
    case ValueConcept::Solidarity: return "SOLIDARITY";
    case ValueConcept::Cis: return "CIS";
    case ValueConcept::Ensc: return "ENSC";
    case ValueConcept::Enpac: return "ENPAC";
    case ValueConcept::Enbc: return "ENBC";
    case ValueConcept::Consensus: return "CONSENSUS";
  }
  return "SHAPLEY";
}

std::optional<ValueConcept> concept_from_string(std::string_view name) {
  for (ValueConcept c : kAllConcepts) {
    if (to_string(c) == name) return c;
  }
  return std::nullopt;
}

namespace {

Eigen::VectorXd shapley_values(const CoalitionGame& game) {
  const int n = game.player_count();
  const std::uint32_t size = 1u << n;
  // weight for a coalition of s outsiders already present:
  // s!(n-s-1)!/n! = 1 / (n * C(n-1, s)).
  std::vector<double> weight(static_cast<std::size_t>(n));
  for (int s = 0; s < n; ++s) {
    weight[s] = 1.0 / (static_cast<double>(n) * static_cast<double>(binomial(n - 1, s)));
  }
  Eigen::VectorXd values = Eigen::VectorXd::Zero(n);
  for (int i = 0; i < n; ++i) {
    const std::uint32_t bit = 1u << i;
    double acc = 0.0;
    for (std::uint32_t mask = 0; mask < size; ++mask) {
      if (mask & bit) continue;
      acc += weight[std::popcount(mask)] * (game.table[mask | bit] - game.table[mask]);
    }
    values[i] = acc;
  }
  return values;
}

Eigen::VectorXd banzhaf_values(const CoalitionGame& game) {
  const int n = game.player_count();
  const std::uint32_t size = 1u << n;
  const double weight = 1.0 / static_cast<double>(1u << (n - 1));
  Eigen::VectorXd values = Eigen::VectorXd::Zero(n);
  for (int i = 0; i < n; ++i) {
    const std::uint32_t bit = 1u << i;
    double acc = 0.0;
    for (std::uint32_t mask = 0; mask < size; ++mask) {
      if (mask & bit) continue;
      acc += game.table[mask | bit] - game.table[mask];
    }
    values[i] = weight * acc;
  }
  return values;
}

Eigen::VectorXd solidarity_values(const CoalitionGame& game) {
  const int n = game.player_count();
  const std::uint32_t size = 1u << n;
  // Average marginal contribution of each coalition's own members.
  Eigen::VectorXd average_marginal(size);
  average_marginal[0] = 0.0;
  for (std::uint32_t mask = 1; mask < size; ++mask) {
    double acc = 0.0;
    for (std::uint32_t rest = mask; rest != 0;) {
      const std::uint32_t low = rest & (~rest + 1u);
      acc += game.table[mask] - game.table[mask ^ low];
      rest ^= low;
    }
    average_marginal[mask] = acc / static_cast<double>(std::popcount(mask));
  }
  // Same coalition weights as Shapley, written for coalitions containing i:
  // (n-c)!(c-1)!/n! = 1 / (n * C(n-1, c-1)).
  std::vector<double> weight(static_cast<std::size_t>(n) + 1);
  for (int c = 1; c <= n; ++c) {
    weight[c] = 1.0 / (static_cast<double>(n) * static_cast<double>(binomial(n - 1, c - 1)));
  }
  Eigen::VectorXd values = Eigen::VectorXd::Zero(n);
  for (int i = 0; i < n; ++i) {
    const std::uint32_t bit = 1u << i;
    double acc = 0.0;
    for (std::uint32_t mask = 1; mask < size; ++mask) {
      if (mask & bit) acc += weight[std::popcount(mask)] * average_marginal[mask];
    }
    values[i] = acc;
  }
  return values;
}

// Individual component plus an equal share of what remains of v(N); shared
// by CIS, ENSC, ENPAC and ENBC, which differ only in the component.
Eigen::VectorXd egalitarian_surplus(const CoalitionGame& game,
                                    const Eigen::VectorXd& component) {
  const int n = game.player_count();
  const double surplus = (game.table[game.full_mask()] - component.sum()) / n;
  return (component.array() + surplus).matrix();
}

Eigen::VectorXd cis_values(const CoalitionGame& game) {
  const int n = game.player_count();
  Eigen::VectorXd standalone(n);
  for (int i = 0; i < n; ++i) standalone[i] = game.table[1u << i];
  return egalitarian_surplus(game, standalone);
}

Eigen::VectorXd ensc_values(const CoalitionGame& game) {
  const int n = game.player_count();
  const std::uint32_t full = game.full_mask();
  Eigen::VectorXd separable(n);
  for (int i = 0; i < n; ++i) {
    separable[i] = game.table[full] - game.table[full ^ (1u << i)];
  }
  return egalitarian_surplus(game, separable);
}

Eigen::VectorXd enpac_values(const CoalitionGame& game) {
  const int n = game.player_count();
  if (n < 3) {
    throw std::invalid_argument("ENPAC requires at least 3 players (divides by n - 2)");
  }
  const std::uint32_t full = game.full_mask();
  Eigen::VectorXd pairwise(n);
  for (int i = 0; i < n; ++i) {
    double acc = 0.0;
    for (int j = 0; j < n; ++j) {
      if (j == i) continue;
      acc += game.table[full ^ (1u << i) ^ (1u << j)];
    }
    pairwise[i] = game.table[full] - acc / static_cast<double>(n - 2);
  }
  return egalitarian_surplus(game, pairwise);
}

Eigen::VectorXd enbc_values(const CoalitionGame& game) {
  return egalitarian_surplus(game, banzhaf_values(game));
}

// Consensus value. The reduced game after a player leaves differs from the
// original only at its own grand coalition, whose worth we call T; the
// allocation is affine in T with slope 1/|M| (proved by induction on |M|),
// so a per-player DP over coalition bitmasks carries just the offset b:
//   cov_i(M, T) = T/|M| + b_i(M)
//   b_i({i}) = 0
//   b_i(M) = ( sum_{j in M\{i}} [ (v(M\{j}) - v({j})) / (2(|M|-1)) + b_i(M\{j}) ]
//             + (v({i}) - v(M\{i})) / 2 ) / |M|
// and the player leaving last grounds the recursion at the 2-player standard
// solution, which the same formulas reproduce.
Eigen::VectorXd consensus_values(const CoalitionGame& game) {
  const int n = game.player_count();
  const std::uint32_t size = 1u << n;
  const std::uint32_t full = game.full_mask();
  Eigen::VectorXd values(n);
  // Reused across players: every slot read for player i was written for
  // player i (all subproblems of a mask containing i also contain i).
  std::vector<double> offset(size);
  for (int i = 0; i < n; ++i) {
    const std::uint32_t bit = 1u << i;
    offset[bit] = 0.0;
    for (std::uint32_t mask = bit + 1; mask < size; ++mask) {
      if (!(mask & bit)) continue;
      const int members = std::popcount(mask);
      double acc = (game.table[bit] - game.table[mask ^ bit]) / 2.0;
      for (std::uint32_t rest = mask ^ bit; rest != 0;) {
        const std::uint32_t low = rest & (~rest + 1u);
        const std::uint32_t sub = mask ^ low;
        acc += (game.table[sub] - game.table[low]) / (2.0 * (members - 1)) + offset[sub];
        rest ^= low;
      }
      offset[mask] = acc / static_cast<double>(members);
    }
    values[i] = game.table[full] / static_cast<double>(n) + offset[full];
  }
  return values;
}

}  // namespace

Allocation allocate(const CoalitionGame& game, ValueConcept concept_tag) {
  Allocation allocation;
  allocation.concept_tag = concept_tag;
  switch (concept_tag) {
    case ValueConcept::Shapley: allocation.values = shapley_values(game); break;
    case ValueConcept::Banzhaf: allocation.values = banzhaf_values(game); break;
    case ValueConcept::Solidarity: allocation.values = solidarity_values(game); break;
    case ValueConcept::Cis: allocation.values = cis_values(game); break;
    case ValueConcept::Ensc: allocation.values = ensc_values(game); break;
    case ValueConcept::Enpac: allocation.values = enpac_values(game); break;
    case ValueConcept::Enbc: allocation.values = enbc_values(game); break;
    case ValueConcept::Consensus: allocation.values = consensus_values(game); break;
  }
  return allocation;
}

std::vector<Allocation> allocate_all(const CoalitionGame& game,
                                     std::span<const ValueConcept> concepts,
                                     bool parallel) {
  std::vector<Allocation> out(concepts.size());
  if (parallel) {
    std::vector<std::future<void>> tasks;
    tasks.reserve(concepts.size());
    for (std::size_t k = 0; k < concepts.size(); ++k) {
      tasks.push_back(std::async(std::launch::async,
                                 [&, k] { out[k] = allocate(game, concepts[k]); }));
    }
    for (auto& task : tasks) task.get();
  } else {
    for (std::size_t k = 0; k < concepts.size(); ++k) out[k] = allocate(game, concepts[k]);
  }
  return out;
}

Allocation shapley_permutation_oracle(const CoalitionGame& game) {
  const int n = game.player_count();
  if (n > 9) {
    throw std::invalid_argument("permutation oracle enumerates |N|! orders; capped at n <= 9");
  }
  std::vector<int> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), 0);
  Eigen::VectorXd sums = Eigen::VectorXd::Zero(n);
  std::int64_t permutations = 0;
  do {
    std::uint32_t joined = 0;
    for (int player : order) {
      const std::uint32_t with = joined | (1u << player);
      sums[player] += game.table[with] - game.table[joined];
      joined = with;
    }
    ++permutations;
  } while (std::next_permutation(order.begin(), order.end()));
  Allocation allocation;
  allocation.concept_tag = ValueConcept::Shapley;
  allocation.values = sums / static_cast<double>(permutations);
  return allocation;
}

WeightVector normalize_raw(const Eigen::Ref<const Eigen::VectorXd>& raw,
                           std::string provenance) {
  const int n = static_cast<int>(raw.size());
  if (n < 1) throw std::invalid_argument("cannot normalize an empty score vector");
  WeightVector out;
  out.provenance = std::move(provenance);
  out.clamp_fired = (raw.array() < 0.0).any();
  const Eigen::VectorXd clamped = raw.cwiseMax(0.0);
  const double mass = clamped.sum();
  if (mass > 0.0) {
    out.weights = clamped / mass;
  } else {
    out.weights = Eigen::VectorXd::Constant(n, 1.0 / n);
    out.uniform_fallback = true;
  }
  return out;
}

WeightVector normalize(const Allocation& allocation) {
  return normalize_raw(allocation.values, std::string(to_string(allocation.concept_tag)));
}

}  // namespace cgvote
