#pragma once

// Tabular first-visit Monte Carlo control over (state, action) pairs.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <map>
#include <vector>

#include "rram_mc/cartpole.hpp"
#include "rram_mc/error.hpp"
#include "rram_mc/random.hpp"

namespace rram_mc {

inline constexpr std::size_t kNumPairs = kNumStates * kNumActions;

struct AgentConfig {
  double gamma = 0.99;
  double epsilon_start = 1.0;
  double epsilon_decay = 0.995;
  double epsilon_min = 0.01;
  double r_max = 500.0;

  void validate() const {
    if (!(gamma > 0.0 && gamma <= 1.0)) throw InvalidInput("gamma must lie in (0, 1]");
    if (!(epsilon_start >= 0.0 && epsilon_start <= 1.0)) throw InvalidInput("epsilon_start must lie in [0, 1]");
    if (!(epsilon_min >= 0.0 && epsilon_min <= 1.0)) throw InvalidInput("epsilon_min must lie in [0, 1]");
    if (!(epsilon_decay > 0.0 && epsilon_decay <= 1.0)) throw InvalidInput("epsilon_decay must lie in (0, 1]");
    if (!(r_max > 0.0)) throw InvalidInput("r_max must be positive");
  }

  double epsilon_at(std::size_t episode) const {
    return std::max(epsilon_min, epsilon_start * std::pow(epsilon_decay, static_cast<double>(episode)));
  }
};

struct StateAction {
  StateIndex state;
  Action action = Action::Left;

  std::size_t flat() const { return state.value * kNumActions + action_index(action); }
  auto operator<=>(const StateAction&) const = default;
};

struct TraceStep {
  StateIndex state;
  Action action = Action::Left;
  double reward = 0.0;
};

struct EpisodeTrace {
  std::vector<TraceStep> steps;

  std::size_t size() const { return steps.size(); }
  bool empty() const { return steps.empty(); }
  double total_reward() const {
    double r = 0.0;
    for (const auto& s : steps) r += s.reward;
    return r;
  }
};

// First-visit discounted returns, keyed by (state, action).
using ReturnsMap = std::map<StateAction, double>;

// Accumulates backward; earlier visits overwrite later ones, leaving the
// return from each pair's first occurrence.
inline ReturnsMap compute_returns(const EpisodeTrace& trace, double gamma) {
  if (trace.empty()) throw InvalidInput("cannot compute returns of an empty trace");
  ReturnsMap out;
  double g = 0.0;
  for (auto it = trace.steps.rbegin(); it != trace.steps.rend(); ++it) {
    g = it->reward + gamma * g;
    out[StateAction{it->state, it->action}] = g;
  }
  return out;
}

struct DigitalValueTable {
  std::array<double, kNumPairs> values{};
  std::array<std::uint64_t, kNumPairs> visit_counts{};

  double value(StateIndex s, Action a) const { return values[StateAction{s, a}.flat()]; }
  std::uint64_t visits(StateIndex s, Action a) const { return visit_counts[StateAction{s, a}.flat()]; }
};

// Incremental-mean update: v <- v + (G - v) / N.
inline void digital_update(DigitalValueTable& table, const ReturnsMap& returns) {
  for (const auto& [pair, g] : returns) {
    const std::size_t k = pair.flat();
    const std::uint64_t n = ++table.visit_counts[k];
    table.values[k] += (g - table.values[k]) / static_cast<double>(n);
  }
}

// Epsilon-greedy with uniform tie breaking. One uniform draw is always
// consumed for the exploration test so the stream layout does not depend on
// the values.
inline Action select_action(double q_left, double q_right, double epsilon, Rng& rng) {
  if (!(epsilon >= 0.0 && epsilon <= 1.0)) throw InvalidInput("epsilon must lie in [0, 1]");
  const double u = uniform01(rng);
  if (u < epsilon || q_left == q_right) return uniform01(rng) < 0.5 ? Action::Left : Action::Right;
  return q_left > q_right ? Action::Left : Action::Right;
}

// Maps an unbounded return onto the representable weight interval [0.4, 1.2].
inline double normalize_return(double g, double r_max) {
  if (!(r_max > 0.0)) throw InvalidInput("r_max must be positive");
  return 0.4 + 0.8 * std::clamp(g / r_max, 0.0, 1.0);
}

}  // namespace rram_mc
