#include <gtest/gtest.h>

#include <cmath>
#include <numeric>
#include <set>
#include <vector>

#include "rram_mc/mc_agent.hpp"

namespace rram_mc {
namespace {

EpisodeTrace trace_of(std::vector<TraceStep> steps) { return EpisodeTrace{std::move(steps)}; }

TEST(SelectAction, GreedyWhenEpsilonZero) {
  Rng rng(1);
  for (int i = 0; i < 1000; ++i) EXPECT_EQ(select_action(0.9, 0.5, 0.0, rng), Action::Left);
  for (int i = 0; i < 1000; ++i) EXPECT_EQ(select_action(0.1, 0.5, 0.0, rng), Action::Right);
}

TEST(SelectAction, UniformWhenEpsilonOne) {
  Rng rng(2);
  const int n = 10000;
  int left = 0;
  for (int i = 0; i < n; ++i) left += select_action(0.9, 0.1, 1.0, rng) == Action::Left;
  const double sigma = std::sqrt(n * 0.25);
  EXPECT_NEAR(left, n / 2, 3 * sigma);
}

TEST(SelectAction, TiesBrokenRandomly) {
  Rng rng(3);
  std::set<Action> seen;
  for (int i = 0; i < 100; ++i) seen.insert(select_action(0.7, 0.7, 0.0, rng));
  EXPECT_EQ(seen.size(), 2u);
  EXPECT_THROW(select_action(0, 0, 1.5, rng), InvalidInput);
}

TEST(ComputeReturns, DiscountedDistinctStates) {
  const auto r = compute_returns(trace_of({{{0}, Action::Left, 1}, {{1}, Action::Left, 1}, {{2}, Action::Left, 1}}), 0.9);
  ASSERT_EQ(r.size(), 3u);
  EXPECT_NEAR(r.at({{0}, Action::Left}), 2.71, 1e-12);
  EXPECT_NEAR(r.at({{1}, Action::Left}), 1.9, 1e-12);
  EXPECT_NEAR(r.at({{2}, Action::Left}), 1.0, 1e-12);
}

TEST(ComputeReturns, UndiscountedCountsRemainingSteps) {
  std::vector<TraceStep> steps;
  for (std::size_t t = 0; t < 30; ++t) steps.push_back({{t}, Action::Right, 1.0});
  const auto r = compute_returns(trace_of(steps), 1.0);
  for (std::size_t t = 0; t < 30; ++t) EXPECT_EQ(r.at({{t}, Action::Right}), static_cast<double>(30 - t));
}

TEST(ComputeReturns, FirstVisitKeepsEarliestOccurrence) {
  // (5, Left) at steps 0 and 2; gamma 0.9, unit rewards.
  const auto r = compute_returns(trace_of({{{5}, Action::Left, 1},
                                           {{7}, Action::Right, 1},
                                           {{5}, Action::Left, 1},
                                           {{9}, Action::Left, 1}}),
                                 0.9);
  ASSERT_EQ(r.size(), 3u);
  EXPECT_NEAR(r.at({{5}, Action::Left}), 3.439, 1e-12);
  EXPECT_NEAR(r.at({{7}, Action::Right}), 2.71, 1e-12);
  EXPECT_NEAR(r.at({{9}, Action::Left}), 1.0, 1e-12);
  EXPECT_THROW(compute_returns(EpisodeTrace{}, 0.9), InvalidInput);
}

TEST(ComputeReturns, PropertyFirstVisitAgainstForwardOracle) {
  Rng rng(4);
  for (int trial = 0; trial < 200; ++trial) {
    std::vector<TraceStep> steps;
    const std::size_t len = 1 + rng() % 60;
    for (std::size_t t = 0; t < len; ++t)
      steps.push_back({{rng() % 6}, rng() % 2 ? Action::Left : Action::Right, uniform(rng, 0, 2)});
    const double gamma = uniform(rng, 0.5, 1.0);
    const auto r = compute_returns(trace_of(steps), gamma);

    std::set<StateAction> distinct;
    for (const auto& s : steps) distinct.insert({s.state, s.action});
    EXPECT_EQ(r.size(), distinct.size());

    // Forward oracle: explicit discounted sum from the first occurrence.
    std::set<StateAction> done;
    for (std::size_t t = 0; t < len; ++t) {
      const StateAction key{steps[t].state, steps[t].action};
      if (!done.insert(key).second) continue;
      double g = 0.0, discount = 1.0;
      for (std::size_t k = t; k < len; ++k, discount *= gamma) g += discount * steps[k].reward;
      EXPECT_NEAR(r.at(key), g, 1e-9 * std::max(1.0, g));
    }
  }
}

TEST(DigitalUpdate, IncrementalMeanArithmetic) {
  DigitalValueTable t;
  const StateAction k{{3}, Action::Right};
  digital_update(t, {{k, 10.0}});
  EXPECT_EQ(t.values[k.flat()], 10.0);
  EXPECT_EQ(t.visit_counts[k.flat()], 1u);
  digital_update(t, {{k, 20.0}});
  EXPECT_EQ(t.values[k.flat()], 15.0);
  digital_update(t, {{k, 15.0}});
  EXPECT_EQ(t.values[k.flat()], 15.0);
  EXPECT_EQ(t.visit_counts[k.flat()], 3u);
}

TEST(DigitalUpdate, PropertyEqualsBruteForceMean) {
  Rng rng(6);
  for (int trial = 0; trial < 100; ++trial) {
    DigitalValueTable t;
    const StateAction k{{rng() % kNumStates}, rng() % 2 ? Action::Left : Action::Right};
    std::vector<double> seen;
    const std::size_t n = 1 + rng() % 3000;
    for (std::size_t i = 0; i < n; ++i) {
      const double g = uniform(rng, 0, 100);
      seen.push_back(g);
      digital_update(t, {{k, g}});
    }
    const double mean = std::accumulate(seen.begin(), seen.end(), 0.0) / static_cast<double>(seen.size());
    EXPECT_LE(std::abs(t.values[k.flat()] - mean), 1e-9 * std::abs(mean));
    EXPECT_EQ(t.visit_counts[k.flat()], n);
  }
}

TEST(NormalizeReturn, AffineClampedMap) {
  EXPECT_EQ(normalize_return(0.0, 500), 0.4);
  EXPECT_DOUBLE_EQ(normalize_return(500.0, 500), 1.2);
  EXPECT_EQ(normalize_return(-3.0, 500), 0.4);
  EXPECT_DOUBLE_EQ(normalize_return(9000.0, 500), 1.2);
  EXPECT_NEAR(normalize_return(250.0, 500), 0.8, 1e-15);
  EXPECT_THROW(normalize_return(1.0, 0.0), InvalidInput);
}

TEST(NormalizeReturn, MonotoneProperty) {
  Rng rng(10);
  for (int i = 0; i < 5000; ++i) {
    double a = uniform(rng, -100, 600), b = uniform(rng, -100, 600);
    if (a > b) std::swap(a, b);
    EXPECT_LE(normalize_return(a, 500), normalize_return(b, 500));
    if (a > 0 && b < 500 && a < b) {
      EXPECT_LT(normalize_return(a, 500), normalize_return(b, 500));
    }
  }
}

TEST(AgentConfig, EpsilonSchedule) {
  const AgentConfig c;
  EXPECT_EQ(c.epsilon_at(0), 1.0);
  for (std::size_t k : {1u, 10u, 300u, 918u, 919u, 1499u})
    EXPECT_DOUBLE_EQ(c.epsilon_at(k), std::max(0.01, std::pow(0.995, static_cast<double>(k))));
  EXPECT_EQ(c.epsilon_at(1499), 0.01);
  for (std::size_t k = 0; k < 1500; ++k) {
    ASSERT_GE(c.epsilon_at(k), 0.0);
    ASSERT_LE(c.epsilon_at(k), 1.0);
  }
  AgentConfig bad;
  bad.gamma = 0.0;
  EXPECT_THROW(bad.validate(), InvalidInput);
}

}  // namespace
}  // namespace rram_mc
