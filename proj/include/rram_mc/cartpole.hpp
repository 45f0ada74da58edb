#pragma once

#include <cmath>
#include <cstdint>
#include <string>

#include "rram_mc/error.hpp"
#include "rram_mc/random.hpp"

namespace rram_mc {

struct CartState {
  double x = 0.0;          // m
  double x_dot = 0.0;      // m/s
  double theta = 0.0;      // rad, 0 is upright
  double theta_dot = 0.0;  // rad/s

  bool finite() const {
    return std::isfinite(x) && std::isfinite(x_dot) && std::isfinite(theta) && std::isfinite(theta_dot);
  }
  CartState mirrored() const { return {-x, -x_dot, -theta, -theta_dot}; }
  bool operator==(const CartState&) const = default;
};

struct EnvParams {
  double gravity = 9.8;
  double cart_mass = 1.0;
  double pole_mass = 0.1;
  double pole_half_length = 0.5;
  double force_mag = 10.0;
  double dt = 0.02;
  double x_limit = 2.4;
  double theta_limit = 0.2094;
  std::uint32_t max_steps = 500;

  void validate() const {
    if (!(gravity > 0 && cart_mass > 0 && pole_mass > 0 && pole_half_length > 0 && force_mag > 0 &&
          dt > 0 && x_limit > 0 && theta_limit > 0 && max_steps > 0))
      throw InvalidInput("environment parameters must all be positive");
  }
};

enum class Action : std::uint8_t { Left = 0, Right = 1 };

inline constexpr std::size_t kNumActions = 2;
inline constexpr std::size_t kNumStates = 72;

inline std::size_t action_index(Action a) { return static_cast<std::size_t>(a); }
inline Action mirrored(Action a) { return a == Action::Left ? Action::Right : Action::Left; }

inline bool is_terminal(const CartState& s, const EnvParams& p) {
  return std::abs(s.x) > p.x_limit || std::abs(s.theta) > p.theta_limit;
}

inline CartState reset_state(Rng& rng) {
  return {uniform(rng, -0.05, 0.05), uniform(rng, -0.05, 0.05), uniform(rng, -0.05, 0.05),
          uniform(rng, -0.05, 0.05)};
}

// One explicit-Euler step of the frictionless cart-pole equations of motion.
inline CartState dynamics(const CartState& s, Action a, const EnvParams& p) {
  const double force = a == Action::Right ? p.force_mag : -p.force_mag;
  const double total_mass = p.cart_mass + p.pole_mass;
  const double pole_moment = p.pole_mass * p.pole_half_length;
  const double cos_t = std::cos(s.theta);
  const double sin_t = std::sin(s.theta);

  const double temp = (force + pole_moment * s.theta_dot * s.theta_dot * sin_t) / total_mass;
  const double theta_acc = (p.gravity * sin_t - cos_t * temp) /
                           (p.pole_half_length * (4.0 / 3.0 - p.pole_mass * cos_t * cos_t / total_mass));
  const double x_acc = temp - pole_moment * theta_acc * cos_t / total_mass;

  return {s.x + p.dt * s.x_dot, s.x_dot + p.dt * x_acc, s.theta + p.dt * s.theta_dot,
          s.theta_dot + p.dt * theta_acc};
}

struct StepResult {
  CartState next;
  double reward = 1.0;
  bool done = false;
};

// `steps_taken` counts steps already taken this episode; the step that
// brings the count to max_steps ends the episode.
inline StepResult step(const CartState& s, Action a, const EnvParams& p, std::uint32_t steps_taken = 0) {
  if (!s.finite()) throw InvalidInput("cart state must be finite");
  StepResult r;
  r.next = dynamics(s, a, p);
  r.done = is_terminal(r.next, p) || steps_taken + 1 >= p.max_steps;
  return r;
}

// Episode wrapper that refuses to advance after termination.
class CartPole {
 public:
  explicit CartPole(EnvParams params) : params_(params) { params_.validate(); }

  const CartState& reset(Rng& rng) {
    state_ = reset_state(rng);
    steps_ = 0;
    done_ = false;
    return state_;
  }

  StepResult step(Action a) {
    if (done_) throw InvalidInput("cannot step a terminated episode");
    StepResult r = rram_mc::step(state_, a, params_, steps_);
    state_ = r.next;
    ++steps_;
    done_ = r.done;
    return r;
  }

  const CartState& state() const { return state_; }
  std::uint32_t steps() const { return steps_; }
  bool done() const { return done_; }
  const EnvParams& params() const { return params_; }

 private:
  EnvParams params_;
  CartState state_;
  std::uint32_t steps_ = 0;
  bool done_ = true;
};

struct StateIndex {
  std::size_t value = 0;
  bool operator==(const StateIndex&) const = default;
  auto operator<=>(const StateIndex&) const = default;
};

struct StateBins {
  std::size_t x = 0;      // [0, 3)
  std::size_t x_dot = 0;  // [0, 3)
  std::size_t theta = 0;  // [0, 4)
  std::size_t theta_dot = 0;  // [0, 2)
  bool operator==(const StateBins&) const = default;
};

inline StateIndex to_index(const StateBins& b) {
  if (b.x >= 3 || b.x_dot >= 3 || b.theta >= 4 || b.theta_dot >= 2) throw InvalidInput("bin out of range");
  return {((b.x * 3 + b.x_dot) * 4 + b.theta) * 2 + b.theta_dot};
}

inline StateBins to_bins(StateIndex s) {
  if (s.value >= kNumStates) throw InvalidInput("state index out of range");
  StateBins b;
  std::size_t v = s.value;
  b.theta_dot = v % 2; v /= 2;
  b.theta = v % 4; v /= 4;
  b.x_dot = v % 3; v /= 3;
  b.x = v;
  return b;
}

// Lower bin edges are inclusive: a value exactly on a boundary goes to the
// upper bin.
inline StateBins bin_state(const CartState& s) {
  StateBins b;
  b.x = s.x < -0.8 ? 0 : (s.x < 0.8 ? 1 : 2);
  b.x_dot = s.x_dot < -0.5 ? 0 : (s.x_dot < 0.5 ? 1 : 2);
  b.theta = s.theta < -0.10 ? 0 : (s.theta < 0.0 ? 1 : (s.theta < 0.10 ? 2 : 3));
  b.theta_dot = s.theta_dot < 0.0 ? 0 : 1;
  return b;
}

inline StateIndex discretize(const CartState& s, const EnvParams& p = {}) {
  if (!s.finite() || is_terminal(s, p)) throw InvalidInput("cannot discretize a terminal state");
  return to_index(bin_state(s));
}

}  // namespace rram_mc
