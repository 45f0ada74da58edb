#pragma once

// Training loop in three modes: the digital incremental-mean reference, and
// in-situ Manhattan training on the crossbar with and without device noise.
//
// Episode-end in-situ update:
//   1. program each visited pair's return cell to its normalized return;
//      unvisited return cells are copied from the paired weight cell
//   2. differential read of every weight/return row pair
//   3. one SET or RESET pulse per weight cell by the sign of its bitline
//      current, applied a whole row at a time

#include <array>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "rram_mc/cartpole.hpp"
#include "rram_mc/crossbar.hpp"
#include "rram_mc/device_model.hpp"
#include "rram_mc/error.hpp"
#include "rram_mc/mc_agent.hpp"
#include "rram_mc/random.hpp"

namespace rram_mc {

static_assert(kNumPairs == kMatrixCells, "state-action table must fill one crossbar matrix");

enum class Mode { Digital, Crossbar, CrossbarNoisy };

inline std::string_view to_string(Mode m) {
  switch (m) {
    case Mode::Digital: return "digital";
    case Mode::Crossbar: return "crossbar";
    case Mode::CrossbarNoisy: return "crossbar-noisy";
  }
  return "?";
}

inline Mode parse_mode(std::string_view s) {
  if (s == "digital") return Mode::Digital;
  if (s == "crossbar") return Mode::Crossbar;
  if (s == "crossbar-noisy") return Mode::CrossbarNoisy;
  throw InvalidInput("unknown mode '" + std::string(s) + "' (expected digital, crossbar or crossbar-noisy)");
}

inline bool uses_crossbar(Mode m) { return m != Mode::Digital; }
inline bool is_noisy(Mode m) { return m == Mode::CrossbarNoisy; }

struct RunConfig {
  Mode mode = Mode::Crossbar;
  std::size_t episodes = 1500;
  std::uint64_t seed = 0;
  DeviceParams device;
  EnvParams env;
  AgentConfig agent;
  double program_tolerance = 4e-6;        // S
  std::uint32_t max_program_pulses = 100;
  double sigma_read = 0.0;                // A, per bitline current in noisy mode
  double weight_ratio = kDefaultWeightRatio;

  void validate() const {
    if (episodes == 0) throw InvalidInput("episodes must be positive");
    if (!(program_tolerance > 0.0)) throw InvalidInput("program_tolerance must be positive");
    if (max_program_pulses == 0) throw InvalidInput("max_program_pulses must be positive");
    if (!(sigma_read >= 0.0)) throw InvalidInput("sigma_read must be non-negative");
    if (!(weight_ratio > 0.0)) throw InvalidInput("weight_ratio must be positive");
    device.validate();
    env.validate();
    agent.validate();
  }
};

struct CellAddress {
  std::size_t row = 0;
  std::size_t col = 0;
};

// Pair p = 2 * state + action lives at (p / 24, p % 24) in both matrices.
inline CellAddress cell_for(StateAction pair) {
  const std::size_t p = pair.flat();
  return {p / kBitlines, p % kBitlines};
}

// Bitline current equivalent of one programming tolerance. A copied return
// cell may sit anywhere within the tolerance of its weight cell, so currents
// up to this magnitude carry no update information.
inline double dead_band_threshold(const RunConfig& cfg) {
  return cfg.device.v_read * cfg.program_tolerance;
}

struct UpdateDecision {
  std::size_t row = 0;
  std::array<int, kBitlines> signs{};
};

inline int current_sign(double current, double dead_band) {
  if (std::abs(current) <= dead_band) return 0;
  return (current > 0.0) - (current < 0.0);
}

inline UpdateDecision decide_update(const DifferentialReadResult& read, double dead_band) {
  UpdateDecision d;
  d.row = read.row;
  for (std::size_t j = 0; j < kBitlines; ++j) d.signs[j] = current_sign(read.currents[j], dead_band);
  return d;
}

using SignGrid = std::array<int, kNumPairs>;

struct InSituOutcome {
  std::uint64_t return_pulses = 0;
  std::uint64_t weight_pulses = 0;
  std::uint64_t verify_reads = 0;
  std::uint64_t program_failures = 0;
  SignGrid signs{};
};

// Step 1.
inline RowProgramOutcome map_returns(Crossbar& xbar, const ReturnsMap& returns, const RunConfig& cfg,
                                     Rng& rng) {
  std::array<std::optional<double>, kNumPairs> visited{};
  for (const auto& [pair, g] : returns) visited[pair.flat()] = g;

  RowProgramOutcome total;
  for (std::size_t row = 0; row < kMatrixRows; ++row) {
    std::array<double, kBitlines> targets{};
    for (std::size_t col = 0; col < kBitlines; ++col) {
      const auto& g = visited[row * kBitlines + col];
      targets[col] = g ? xbar.codec().encode(normalize_return(*g, cfg.agent.r_max))
                       : xbar.read_copy_source(row, col);
    }
    const RowProgramOutcome o = xbar.program_return_row(row, targets, cfg.program_tolerance,
                                                        cfg.max_program_pulses, rng, is_noisy(cfg.mode));
    total.pulses += o.pulses;
    total.verify_reads += o.verify_reads;
    total.failures += o.failures;
  }
  return total;
}

struct RowUpdateOutcome {
  std::uint64_t weight_pulses = 0;
  SignGrid signs{};
};

// Steps 2 and 3: read every row pair, then pulse each weight row in parallel.
inline RowUpdateOutcome read_and_update(Crossbar& xbar, const RunConfig& cfg, Rng& rng) {
  const bool noise = is_noisy(cfg.mode);
  const double band = dead_band_threshold(cfg);
  std::array<UpdateDecision, kMatrixRows> decisions{};
  for (std::size_t row = 0; row < kMatrixRows; ++row)
    decisions[row] = decide_update(xbar.differential_row_read(row, rng, noise, cfg.sigma_read), band);

  RowUpdateOutcome out;
  for (const UpdateDecision& d : decisions) {
    out.weight_pulses += xbar.manhattan_row_update(d.row, d.signs, rng, noise);
    for (std::size_t j = 0; j < kBitlines; ++j) out.signs[d.row * kBitlines + j] = d.signs[j];
  }
  return out;
}

inline InSituOutcome in_situ_update(Crossbar& xbar, const ReturnsMap& returns, const RunConfig& cfg,
                                    Rng& rng) {
  const RowProgramOutcome programmed = map_returns(xbar, returns, cfg, rng);
  const RowUpdateOutcome updated = read_and_update(xbar, cfg, rng);
  InSituOutcome out;
  out.return_pulses = programmed.pulses;
  out.verify_reads = programmed.verify_reads;
  out.program_failures = programmed.failures;
  out.weight_pulses = updated.weight_pulses;
  out.signs = updated.signs;
  return out;
}

// `values(state)` yields the (left, right) action values for that state.
template <class ValueLookup>
EpisodeTrace run_episode(CartPole& env, ValueLookup&& values, double epsilon, Rng& env_rng, Rng& policy_rng) {
  EpisodeTrace trace;
  env.reset(env_rng);
  while (!env.done()) {
    const StateIndex s = discretize(env.state(), env.params());
    const auto [q_left, q_right] = values(s);
    const Action a = select_action(q_left, q_right, epsilon, policy_rng);
    const StepResult r = env.step(a);
    trace.steps.push_back({s, a, r.reward});
  }
  return trace;
}

// q-values of the crossbar agent: decoded weight conductances, each lookup a
// charged single-cell read.
inline std::pair<double, double> crossbar_values(Crossbar& xbar, StateIndex s, const RunConfig& cfg, Rng& rng) {
  const bool noise = is_noisy(cfg.mode);
  auto lookup = [&](Action a) {
    const CellAddress c = cell_for({s, a});
    return xbar.codec().decode(xbar.sense(Matrix::Weight, c.row, c.col, rng, noise, cfg.sigma_read));
  };
  const double left = lookup(Action::Left);
  const double right = lookup(Action::Right);
  return {left, right};
}

struct MetricsLog {
  Mode mode = Mode::Digital;
  std::uint64_t seed = 0;
  std::vector<double> reward;
  std::vector<double> epsilon;
  std::vector<double> episode_energy;
  std::vector<double> cumulative_energy;
  std::vector<std::uint64_t> weight_pulses;
  std::vector<std::uint64_t> return_pulses;
  std::vector<std::uint64_t> read_events;
  EnergyLedger energy;
  std::uint64_t program_failures = 0;
  std::array<std::uint64_t, kNumPairs> weight_writes{};
  std::array<std::uint64_t, kNumPairs> return_writes{};
  std::optional<Crossbar> final_crossbar;
  std::optional<DigitalValueTable> final_table;

  std::size_t episodes() const { return reward.size(); }

  double mean_reward_last(std::size_t n) const {
    if (reward.empty()) return 0.0;
    n = std::min(n, reward.size());
    return std::accumulate(reward.end() - static_cast<std::ptrdiff_t>(n), reward.end(), 0.0) /
           static_cast<double>(n);
  }

  // Trailing mean over up to `window` most recent episodes.
  std::vector<double> reward_moving_average(std::size_t window = 100) const {
    std::vector<double> out(reward.size());
    double sum = 0.0;
    for (std::size_t i = 0; i < reward.size(); ++i) {
      sum += reward[i];
      if (i >= window) sum -= reward[i - window];
      out[i] = sum / static_cast<double>(std::min(i + 1, window));
    }
    return out;
  }

  std::uint64_t max_writes(Matrix m) const {
    const auto& w = m == Matrix::Weight ? weight_writes : return_writes;
    return *std::max_element(w.begin(), w.end());
  }
};

struct EpisodeView {
  std::size_t index = 0;
  const EpisodeTrace& trace;
  const ReturnsMap& returns;
  const InSituOutcome* update = nullptr;  // null in digital mode
};

struct NoObserver {
  void operator()(const EpisodeView&) const {}
};

template <class Observer = NoObserver>
MetricsLog train(const RunConfig& cfg, Observer&& observer = {}) {
  cfg.validate();
  Rng env_rng = make_rng(cfg.seed, Stream::Environment);
  Rng policy_rng = make_rng(cfg.seed, Stream::Policy);
  Rng init_rng = make_rng(cfg.seed, Stream::DeviceInit);
  Rng noise_rng = make_rng(cfg.seed, Stream::DeviceNoise);

  CartPole env(cfg.env);
  MetricsLog log;
  log.mode = cfg.mode;
  log.seed = cfg.seed;

  std::optional<Crossbar> xbar;
  DigitalValueTable table;
  if (uses_crossbar(cfg.mode)) xbar.emplace(cfg.device, init_rng, is_noisy(cfg.mode), cfg.weight_ratio);

  double cumulative = 0.0;
  for (std::size_t k = 0; k < cfg.episodes; ++k) {
    const double eps = cfg.agent.epsilon_at(k);
    const double energy_before = xbar ? xbar->energy().total() : 0.0;
    const std::uint64_t reads_before = xbar ? xbar->read_events() : 0;

    EpisodeTrace trace;
    if (xbar) {
      trace = run_episode(env, [&](StateIndex s) { return crossbar_values(*xbar, s, cfg, noise_rng); }, eps,
                          env_rng, policy_rng);
    } else {
      trace = run_episode(
          env, [&](StateIndex s) { return std::pair{table.value(s, Action::Left), table.value(s, Action::Right)}; },
          eps, env_rng, policy_rng);
    }
    const ReturnsMap returns = compute_returns(trace, cfg.agent.gamma);

    InSituOutcome update;
    if (xbar) {
      update = in_situ_update(*xbar, returns, cfg, noise_rng);
      log.program_failures += update.program_failures;
    } else {
      digital_update(table, returns);
    }

    const double episode_energy = xbar ? xbar->energy().total() - energy_before : 0.0;
    cumulative += episode_energy;
    log.reward.push_back(trace.total_reward());
    log.epsilon.push_back(eps);
    log.episode_energy.push_back(episode_energy);
    log.cumulative_energy.push_back(cumulative);
    log.weight_pulses.push_back(update.weight_pulses);
    log.return_pulses.push_back(update.return_pulses);
    log.read_events.push_back(xbar ? xbar->read_events() - reads_before : 0);

    observer(EpisodeView{k, trace, returns, xbar ? &update : nullptr});
  }

  if (xbar) {
    log.energy = xbar->energy();
    for (std::size_t p = 0; p < kNumPairs; ++p) {
      const CellAddress c{p / kBitlines, p % kBitlines};
      log.weight_writes[p] = xbar->cell(Matrix::Weight, c.row, c.col).writes();
      log.return_writes[p] = xbar->cell(Matrix::Return, c.row, c.col).writes();
    }
    log.final_crossbar = std::move(xbar);
  } else {
    log.final_table = table;
  }
  return log;
}

}  // namespace rram_mc
