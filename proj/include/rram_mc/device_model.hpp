#pragma once

// Behavioral model of one passive RRAM cell: state-dependent conductance
// response to fixed SET/RESET pulses, device-to-device and cycle-to-cycle
// variation, closed-loop program-and-verify, and pulse/read energy.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <sstream>

#include "rram_mc/error.hpp"
#include "rram_mc/random.hpp"

namespace rram_mc {

struct DeviceParams {
  double g_min = 100e-6;     // S
  double g_max = 300e-6;     // S
  double a_set = 10e-6;      // S per pulse, at the fully open window
  double a_reset = 10e-6;    // S per pulse, at the fully open window
  double sigma_c2c = 1e-6;   // S, additive per-pulse noise
  double sigma_d2d = 0.10;   // relative, fixed per device
  double v_set = 0.8;        // V
  double v_reset = -0.8;     // V
  double v_read = 0.4;       // V
  double t_pulse = 100e-9;   // s
  double t_read = 100e-9;    // s

  double window() const { return g_max - g_min; }

  void validate() const {
    auto fail = [](const char* what) { throw InvalidInput(std::string("device parameters: ") + what); };
    if (!(g_min < g_max)) fail("g_min must be below g_max");
    if (!(g_min > 0.0)) fail("g_min must be positive");
    if (!(a_set > 0.0)) fail("a_set must be positive");
    if (!(a_reset > 0.0)) fail("a_reset must be positive");
    if (!(sigma_c2c >= 0.0) || !(sigma_d2d >= 0.0)) fail("noise deviations must be non-negative");
    if (!(v_set > 0.0) || !(v_reset < 0.0)) fail("require v_set > 0 > v_reset");
    if (!(v_read > 0.0)) fail("v_read must be positive");
    if (!(t_pulse > 0.0) || !(t_read > 0.0)) fail("pulse and read durations must be positive");
  }
};

struct PulseSpec {
  double voltage = 0.0;
  double duration = 100e-9;

  static PulseSpec set(const DeviceParams& p) { return {p.v_set, p.t_pulse}; }
  static PulseSpec reset(const DeviceParams& p) { return {p.v_reset, p.t_pulse}; }
  static PulseSpec none(const DeviceParams& p) { return {0.0, p.t_pulse}; }
};

enum class PulseKind { None, Set, Reset };

// Only the three programmed amplitudes are legal; anything else is a caller bug.
inline PulseKind classify(const PulseSpec& pulse, const DeviceParams& p) {
  if (!(pulse.duration > 0.0)) throw InvalidInput("pulse duration must be positive");
  if (pulse.voltage == 0.0) return PulseKind::None;
  if (pulse.voltage == p.v_set) return PulseKind::Set;
  if (pulse.voltage == p.v_reset) return PulseKind::Reset;
  std::ostringstream msg;
  msg << "pulse voltage " << pulse.voltage << " V is not one of {" << p.v_set << ", " << p.v_reset
      << ", 0}";
  throw InvalidInput(msg.str());
}

class RramCell {
 public:
  RramCell() = default;
  RramCell(double conductance, double variation) : g_(conductance), kd_(variation) {}

  double conductance() const { return g_; }
  // Fixed multiplicative factor on this device's pulse response.
  double variation() const { return kd_; }
  std::uint64_t writes() const { return writes_; }

 private:
  friend double apply_pulse(RramCell&, const PulseSpec&, const DeviceParams&, Rng&, bool);

  double g_ = 0.0;
  double kd_ = 1.0;
  std::uint64_t writes_ = 0;
};

// Noise-free conductance change of one pulse. The step shrinks linearly as g
// approaches the boundary it is moving toward, so SET saturates at g_max and
// RESET at g_min.
inline double expected_change(double g, PulseKind kind, const DeviceParams& p) {
  const double x = std::clamp((g - p.g_min) / p.window(), 0.0, 1.0);
  switch (kind) {
    case PulseKind::Set: return p.a_set * (1.0 - x);
    case PulseKind::Reset: return -p.a_reset * x;
    case PulseKind::None: break;
  }
  return 0.0;
}

// Applies one pulse and returns the realized (post-clamp) conductance change.
inline double apply_pulse(RramCell& cell, const PulseSpec& pulse, const DeviceParams& p, Rng& rng,
                          bool noise_enabled) {
  const PulseKind kind = classify(pulse, p);
  if (kind == PulseKind::None) return 0.0;
  double delta = expected_change(cell.g_, kind, p);
  if (noise_enabled) delta = cell.kd_ * delta + gaussian(rng, 0.0, p.sigma_c2c);
  const double before = cell.g_;
  cell.g_ = std::clamp(before + delta, p.g_min, p.g_max);
  ++cell.writes_;
  return cell.g_ - before;
}

inline double pulse_energy(double g_before, double g_after, const PulseSpec& pulse) {
  if (pulse.voltage == 0.0) return 0.0;
  return pulse.voltage * pulse.voltage * 0.5 * (g_before + g_after) * pulse.duration;
}

inline double read_energy(double g, const DeviceParams& p) {
  return p.v_read * p.v_read * g * p.t_read;
}

struct ProgramOutcome {
  std::uint32_t pulses = 0;
  std::uint32_t verify_reads = 0;
  double write_energy = 0.0;
  double verify_energy = 0.0;
  bool converged = true;
};

// Closed-loop write: read, compare against the tolerance band, pulse toward
// the target, repeat. Exhausting max_pulses is reported through
// ProgramOutcome::converged and leaves the cell at its best-effort state.
inline ProgramOutcome program_to_target(RramCell& cell, double target, double tolerance,
                                        std::uint32_t max_pulses, const DeviceParams& p, Rng& rng,
                                        bool noise_enabled) {
  if (!(target >= p.g_min && target <= p.g_max)) {
    std::ostringstream msg;
    msg << "program target " << target << " S outside [" << p.g_min << ", " << p.g_max << "]";
    throw InvalidInput(msg.str());
  }
  if (!(tolerance > 0.0)) throw InvalidInput("program tolerance must be positive");

  ProgramOutcome out;
  for (;;) {
    ++out.verify_reads;
    out.verify_energy += read_energy(cell.conductance(), p);
    const double g = cell.conductance();
    if (std::abs(g - target) <= tolerance) return out;
    if (out.pulses == max_pulses) {
      out.converged = false;
      return out;
    }
    const PulseSpec pulse = g < target ? PulseSpec::set(p) : PulseSpec::reset(p);
    apply_pulse(cell, pulse, p, rng, noise_enabled);
    out.write_energy += pulse_energy(g, cell.conductance(), pulse);
    ++out.pulses;
  }
}

}  // namespace rram_mc
