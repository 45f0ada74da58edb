#pragma once

// 12x24 passive array split into a 6x24 weight matrix (physical rows 0-5)
// and a 6x24 return matrix (physical rows 6-11). Weight row i and return row
// i share the same 24 bitlines, which is what makes the differential read
// possible.

#include <algorithm>
#include <array>
#include <cstddef>
#include <cstdint>
#include <ostream>
#include <span>
#include <string>

#include "rram_mc/device_model.hpp"
#include "rram_mc/error.hpp"
#include "rram_mc/format.hpp"
#include "rram_mc/random.hpp"

namespace rram_mc {

inline constexpr std::size_t kArrayRows = 12;
inline constexpr std::size_t kMatrixRows = 6;
inline constexpr std::size_t kBitlines = 24;
inline constexpr std::size_t kMatrixCells = kMatrixRows * kBitlines;
inline constexpr double kInitialConductance = 200e-6;
inline constexpr double kDefaultWeightRatio = 2.5e-4;

enum class Matrix { Weight, Return };

class WeightCodec {
 public:
  WeightCodec(const DeviceParams& p, double rho = kDefaultWeightRatio)
      : rho_(rho), g_min_(p.g_min), g_max_(p.g_max) {
    if (!(rho > 0.0)) throw InvalidInput("weight ratio must be positive");
  }

  double encode(double w) const { return std::clamp(w * rho_, g_min_, g_max_); }
  double decode(double g) const { return g / rho_; }
  double rho() const { return rho_; }
  double w_min() const { return g_min_ / rho_; }
  double w_max() const { return g_max_ / rho_; }

 private:
  double rho_;
  double g_min_;
  double g_max_;
};

struct EnergyLedger {
  double write = 0.0;      // SET/RESET pulses
  double verify = 0.0;     // program-and-verify reads, copy-source reads
  double read = 0.0;       // differential row reads
  double inference = 0.0;  // q-value lookups during rollouts

  double total() const { return write + verify + read + inference; }
};

struct DifferentialReadResult {
  std::size_t row = 0;
  std::array<double, kBitlines> currents{};
};

struct RowProgramOutcome {
  std::uint32_t pulses = 0;
  std::uint32_t verify_reads = 0;
  std::uint32_t failures = 0;
};

class Crossbar {
 public:
  // All cells start at the initial conductance. Per-device variation factors
  // are sampled only when `sample_variation` is set; otherwise every kd is 1.
  Crossbar(const DeviceParams& params, Rng& rng, bool sample_variation,
           double weight_ratio = kDefaultWeightRatio)
      : params_(params), codec_(params, weight_ratio) {
    params_.validate();
    if (kInitialConductance < params_.g_min || kInitialConductance > params_.g_max)
      throw InvalidInput("initial conductance lies outside the device window");
    for (auto& c : cells_) {
      const double kd = sample_variation ? std::max(0.0, gaussian(rng, 1.0, params_.sigma_d2d)) : 1.0;
      c = RramCell(kInitialConductance, kd);
    }
  }

  static std::size_t physical_row(Matrix m, std::size_t row) {
    check_row(row);
    return m == Matrix::Weight ? row : row + kMatrixRows;
  }

  const RramCell& cell(Matrix m, std::size_t row, std::size_t col) const {
    return physical_cell(physical_row(m, row), col);
  }

  const RramCell& physical_cell(std::size_t prow, std::size_t col) const {
    if (prow >= kArrayRows || col >= kBitlines) throw InvalidInput("cell index out of range");
    return cells_[prow * kBitlines + col];
  }

  const DeviceParams& params() const { return params_; }
  const WeightCodec& codec() const { return codec_; }
  const EnergyLedger& energy() const { return energy_; }
  std::uint64_t write_pulses(Matrix m) const { return m == Matrix::Weight ? weight_pulses_ : return_pulses_; }
  std::uint64_t read_events() const { return read_events_; }

  // Step 2 of the episode-end update: -V_READ on weight wordline `row`,
  // +V_READ on the paired return wordline, all bitlines grounded.
  DifferentialReadResult differential_row_read(std::size_t row, Rng& rng, bool noise_enabled,
                                               double sigma_read = 0.0) {
    DifferentialReadResult out;
    out.row = row;
    const std::size_t wrow = physical_row(Matrix::Weight, row);
    const std::size_t rrow = physical_row(Matrix::Return, row);
    for (std::size_t j = 0; j < kBitlines; ++j) {
      const double gw = at(wrow, j).conductance();
      const double gr = at(rrow, j).conductance();
      double current = (gr - gw) * params_.v_read;
      if (noise_enabled) current += gaussian(rng, 0.0, sigma_read);
      out.currents[j] = current;
      energy_.read += read_energy(gw, params_) + read_energy(gr, params_);
    }
    ++read_events_;
    return out;
  }

  // One Manhattan step for a whole weight row: wordline grounded, +V_SET or
  // V_RESET on each bitline by sign. Returns the number of pulsed cells.
  std::size_t manhattan_row_update(std::size_t row, std::span<const int> signs, Rng& rng,
                                   bool noise_enabled) {
    if (signs.size() != kBitlines) throw InvalidInput("row update needs exactly 24 signs");
    for (int s : signs)
      if (s < -1 || s > 1) throw InvalidInput("update sign must be -1, 0 or +1");
    const std::size_t wrow = physical_row(Matrix::Weight, row);
    std::size_t pulsed = 0;
    for (std::size_t j = 0; j < kBitlines; ++j) {
      if (signs[j] == 0) continue;
      const PulseSpec pulse = signs[j] > 0 ? PulseSpec::set(params_) : PulseSpec::reset(params_);
      RramCell& c = at(wrow, j);
      const double before = c.conductance();
      apply_pulse(c, pulse, params_, rng, noise_enabled);
      energy_.write += pulse_energy(before, c.conductance(), pulse);
      ++pulsed;
    }
    weight_pulses_ += pulsed;
    return pulsed;
  }

  // Step 1 of the episode-end update: closed-loop write of each return cell
  // in `row`. Targets are validated before any cell is touched.
  RowProgramOutcome program_return_row(std::size_t row, std::span<const double> targets,
                                       double tolerance, std::uint32_t max_pulses, Rng& rng,
                                       bool noise_enabled) {
    if (targets.size() != kBitlines) throw InvalidInput("row program needs exactly 24 targets");
    for (double t : targets)
      if (!(t >= params_.g_min && t <= params_.g_max))
        throw InvalidInput("return target " + std::to_string(t) + " S outside the device window");
    if (!(tolerance > 0.0)) throw InvalidInput("program tolerance must be positive");
    const std::size_t rrow = physical_row(Matrix::Return, row);
    RowProgramOutcome out;
    for (std::size_t j = 0; j < kBitlines; ++j) {
      const ProgramOutcome o =
          program_to_target(at(rrow, j), targets[j], tolerance, max_pulses, params_, rng, noise_enabled);
      out.pulses += o.pulses;
      out.verify_reads += o.verify_reads;
      out.failures += o.converged ? 0 : 1;
      energy_.write += o.write_energy;
      energy_.verify += o.verify_energy;
    }
    return_pulses_ += out.pulses;
    read_events_ += out.verify_reads;
    return out;
  }

  // Reads one weight cell so its conductance can serve as a copy target for
  // the paired return cell. Charged to the verify ledger.
  double read_copy_source(std::size_t row, std::size_t col) {
    const double g = at(physical_row(Matrix::Weight, row), col).conductance();
    energy_.verify += read_energy(g, params_);
    ++read_events_;
    return g;
  }

  // Single-cell read used for action selection.
  double sense(Matrix m, std::size_t row, std::size_t col, Rng& rng, bool noise_enabled,
               double sigma_read = 0.0) {
    const double g = at(physical_row(m, row), col).conductance();
    energy_.inference += read_energy(g, params_);
    ++read_events_;
    if (noise_enabled && sigma_read > 0.0) return g + gaussian(rng, 0.0, sigma_read / params_.v_read);
    return g;
  }

  // Flat state dump: row, col, conductance_siemens, kd, writes.
  void dump_csv(std::ostream& os) const {
    os << "row,col,conductance_siemens,kd,writes\n";
    for (std::size_t r = 0; r < kArrayRows; ++r)
      for (std::size_t c = 0; c < kBitlines; ++c) {
        const RramCell& cell = at(r, c);
        os << r << ',' << c << ',' << format_g9(cell.conductance()) << ','
           << format_g9(cell.variation()) << ',' << cell.writes() << '\n';
      }
  }

 private:
  static void check_row(std::size_t row) {
    if (row >= kMatrixRows) throw InvalidInput("matrix row " + std::to_string(row) + " out of range [0, 6)");
  }

  RramCell& at(std::size_t prow, std::size_t col) { return cells_[prow * kBitlines + col]; }
  const RramCell& at(std::size_t prow, std::size_t col) const { return cells_[prow * kBitlines + col]; }

  DeviceParams params_;
  WeightCodec codec_;
  std::array<RramCell, kArrayRows * kBitlines> cells_{};
  EnergyLedger energy_;
  std::uint64_t weight_pulses_ = 0;
  std::uint64_t return_pulses_ = 0;
  std::uint64_t read_events_ = 0;
};

}  // namespace rram_mc
