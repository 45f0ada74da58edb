#include <gtest/gtest.h>

#include <cmath>
#include <set>

#include "rram_mc/cartpole.hpp"

namespace rram_mc {
namespace {

TEST(CartPole, StepFromRestPushingRight) {
  const EnvParams p;
  const StepResult r = step({0, 0, 0, 0}, Action::Right, p);
  // x_acc = 9.7560976 m/s^2, theta_acc = -14.634146 rad/s^2, one 20 ms Euler step.
  EXPECT_EQ(r.next.x, 0.0);
  EXPECT_EQ(r.next.theta, 0.0);
  EXPECT_NEAR(r.next.x_dot, 0.19512195121951220, 1e-12);
  EXPECT_NEAR(r.next.theta_dot, -0.29268292682926830, 1e-12);
  EXPECT_EQ(r.reward, 1.0);
  EXPECT_FALSE(r.done);
}

TEST(CartPole, LargeAngleTerminatesEitherWay) {
  const EnvParams p;
  for (Action a : {Action::Left, Action::Right}) EXPECT_TRUE(step({0, 0, 0.3, 0}, a, p).done);
}

TEST(CartPole, EpisodeCapEndsEpisode) {
  EnvParams p;
  p.max_steps = 3;
  EXPECT_FALSE(step({0, 0, 0, 0}, Action::Left, p, 0).done);
  EXPECT_FALSE(step({0, 0, 0, 0}, Action::Left, p, 1).done);
  EXPECT_TRUE(step({0, 0, 0, 0}, Action::Left, p, 2).done);
}

TEST(CartPole, WrapperRejectsSteppingTerminatedEpisode) {
  EnvParams p;
  p.max_steps = 2;
  CartPole env(p);
  Rng rng(1);
  EXPECT_THROW(env.step(Action::Left), InvalidInput);  // never reset
  env.reset(rng);
  env.step(Action::Left);
  EXPECT_TRUE(env.step(Action::Left).done);
  EXPECT_THROW(env.step(Action::Right), InvalidInput);
  EXPECT_THROW(step({NAN, 0, 0, 0}, Action::Left, p), InvalidInput);
}

TEST(CartPole, MirrorSymmetry) {
  Rng rng(3);
  const EnvParams p;
  for (int i = 0; i < 500; ++i) {
    const CartState s{uniform(rng, -2, 2), uniform(rng, -2, 2), uniform(rng, -0.2, 0.2), uniform(rng, -2, 2)};
    for (Action a : {Action::Left, Action::Right}) {
      const CartState direct = dynamics(s, a, p);
      const CartState mirror = dynamics(s.mirrored(), mirrored(a), p).mirrored();
      EXPECT_NEAR(direct.x, mirror.x, 1e-14);
      EXPECT_NEAR(direct.x_dot, mirror.x_dot, 1e-14);
      EXPECT_NEAR(direct.theta, mirror.theta, 1e-14);
      EXPECT_NEAR(direct.theta_dot, mirror.theta_dot, 1e-14);
    }
  }
}

TEST(CartPole, Deterministic) {
  const EnvParams p;
  const CartState s{0.1, -0.2, 0.03, 0.4};
  EXPECT_EQ(dynamics(s, Action::Left, p), dynamics(s, Action::Left, p));
}

TEST(CartPole, ResetBoundsAndReproducibility) {
  Rng a(17), b(17);
  const EnvParams p;
  for (int i = 0; i < 10000; ++i) {
    const CartState s = reset_state(a);
    EXPECT_EQ(s, reset_state(b));
    for (double v : {s.x, s.x_dot, s.theta, s.theta_dot}) {
      ASSERT_GE(v, -0.05);
      ASSERT_LE(v, 0.05);
    }
    ASSERT_FALSE(is_terminal(s, p));
  }
}

// With no control force the upright pole is a saddle. Near theta = 0 the
// linearized equation is theta'' = lambda^2 theta with
// lambda^2 = g / (l (4/3 - m_p / (m_c + m_p))); force alternates each step so
// the net push nearly cancels, and the measured exponential growth rate must
// match lambda within 5%.
TEST(CartPole, SmallAngleDynamicsMatchLinearization) {
  EnvParams p;
  const double lambda =
      std::sqrt(p.gravity / (p.pole_half_length * (4.0 / 3.0 - p.pole_mass / (p.cart_mass + p.pole_mass))));
  EXPECT_NEAR(lambda, 3.97185, 1e-4);

  // Start on the unstable eigenvector so there is no transient.
  EnvParams free = p;
  free.force_mag = 1e-12;
  CartState s{0, 0, 1e-6, lambda * 1e-6};
  const double theta0 = s.theta;
  const int steps = 20;
  for (int i = 0; i < steps; ++i) s = dynamics(s, i % 2 ? Action::Left : Action::Right, free);
  const double rate = std::log(s.theta / theta0) / (steps * p.dt);
  EXPECT_NEAR(rate / lambda, 1.0, 0.05);
}

TEST(Discretize, HandEvaluatedBins) {
  const CartState a{0, 0, 0.05, 0.1};
  EXPECT_EQ(bin_state(a), (StateBins{1, 1, 2, 1}));
  EXPECT_EQ(discretize(a).value, 37u);  // ((1*3+1)*4+2)*2+1

  const CartState b{0, 0, -0.15, -1};
  EXPECT_EQ(bin_state(b), (StateBins{1, 1, 0, 0}));
  EXPECT_EQ(discretize(b).value, 32u);  // ((1*3+1)*4+0)*2+0
}

TEST(Discretize, RejectsTerminal) {
  EXPECT_THROW(discretize({0, 0, 0.25, 0}), InvalidInput);
  EXPECT_THROW(discretize({2.5, 0, 0, 0}), InvalidInput);
}

TEST(Discretize, IndexBijection) {
  std::set<std::size_t> seen;
  for (std::size_t x = 0; x < 3; ++x)
    for (std::size_t xd = 0; xd < 3; ++xd)
      for (std::size_t th = 0; th < 4; ++th)
        for (std::size_t thd = 0; thd < 2; ++thd) {
          const StateBins b{x, xd, th, thd};
          const StateIndex s = to_index(b);
          EXPECT_LT(s.value, kNumStates);
          EXPECT_EQ(to_bins(s), b);
          seen.insert(s.value);
        }
  EXPECT_EQ(seen.size(), kNumStates);
}

TEST(Discretize, TotalOverNonTerminalStates) {
  Rng rng(8);
  const EnvParams p;
  std::set<std::size_t> hit;
  for (int i = 0; i < 200000; ++i) {
    const CartState s{uniform(rng, -2.4, 2.4), uniform(rng, -2, 2), uniform(rng, -0.2094, 0.2094),
                      uniform(rng, -2, 2)};
    const StateIndex idx = discretize(s, p);
    ASSERT_LT(idx.value, kNumStates);
    hit.insert(idx.value);
  }
  EXPECT_EQ(hit.size(), kNumStates);
  // Boundary values land in the upper bin.
  EXPECT_EQ(bin_state({0.8, 0.5, 0.0, 0.0}), (StateBins{2, 2, 2, 1}));
  EXPECT_EQ(bin_state({-0.8, -0.5, -0.1, 0.0}), (StateBins{1, 1, 1, 1}));
}

}  // namespace
}  // namespace rram_mc
