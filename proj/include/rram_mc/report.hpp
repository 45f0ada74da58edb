#pragma once

// Run artifacts: metrics.csv, summary.json, crossbar_final.csv per run, a
// manifest for each invocation, and overlay CSVs for plotting.

#include <openssl/evp.h>

#include <algorithm>
#include <array>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <future>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "rram_mc/config.hpp"
#include "rram_mc/error.hpp"
#include "rram_mc/format.hpp"
#include "rram_mc/trainer.hpp"

namespace rram_mc {

namespace fs = std::filesystem;

inline constexpr const char* kMetricsHeader =
    "episode,reward,reward_ma100,episode_energy_j,cumulative_energy_j,weight_pulses,return_pulses,epsilon";

// Published reference figures. They are echoed into every summary next to
// the simulated values and never computed.
struct ReportConstants {
  static constexpr double area_1t1r_mm2 = 12.23;
  static constexpr double area_passive_um2 = 103.68;
  static constexpr double cumulative_energy_noise_free_uj = 28.0;
  static constexpr double cumulative_energy_noisy_uj = 37.5;
  static constexpr double endurance_cycles = 1e5;
};

inline nlohmann::json reference_constants_json() {
  auto entry = [](double v, const char* unit) {
    return nlohmann::json{{"value", v}, {"unit", unit}, {"source", "paper"}};
  };
  return {{"area_1t1r", entry(ReportConstants::area_1t1r_mm2, "mm^2")},
          {"area_passive", entry(ReportConstants::area_passive_um2, "um^2")},
          {"cumulative_energy_noise_free", entry(ReportConstants::cumulative_energy_noise_free_uj, "uJ")},
          {"cumulative_energy_noisy", entry(ReportConstants::cumulative_energy_noisy_uj, "uJ")},
          {"endurance", entry(ReportConstants::endurance_cycles, "cycles")}};
}

inline void write_metrics_csv(std::ostream& os, const MetricsLog& log) {
  const std::vector<double> ma = log.reward_moving_average(100);
  os << kMetricsHeader << '\n';
  for (std::size_t i = 0; i < log.episodes(); ++i) {
    os << (i + 1) << ',' << format_g9(log.reward[i]) << ',' << format_g9(ma[i]) << ','
       << format_g9(log.episode_energy[i]) << ',' << format_g9(log.cumulative_energy[i]) << ','
       << log.weight_pulses[i] << ',' << log.return_pulses[i] << ',' << format_g9(log.epsilon[i]) << '\n';
  }
}

inline nlohmann::json summary_json(const MetricsLog& log, const RunConfig& cfg) {
  std::uint64_t weight_total = 0, return_total = 0;
  for (auto p : log.weight_pulses) weight_total += p;
  for (auto p : log.return_pulses) return_total += p;
  const double cumulative = log.cumulative_energy.empty() ? 0.0 : log.cumulative_energy.back();
  return {
      {"mode", std::string(to_string(log.mode))},
      {"seed", log.seed},
      {"episodes", log.episodes()},
      {"final_mean_reward_last100", log.mean_reward_last(100)},
      {"mean_reward_all", log.mean_reward_last(log.episodes())},
      {"max_writes", {{"weight", log.max_writes(Matrix::Weight)}, {"return", log.max_writes(Matrix::Return)}}},
      {"total_pulses", {{"weight", weight_total}, {"return", return_total}}},
      {"program_failures", log.program_failures},
      {"energy_j",
       {{"write", log.energy.write},
        {"verify", log.energy.verify},
        {"read", log.energy.read},
        {"inference", log.energy.inference},
        {"write_plus_verify", log.energy.write + log.energy.verify},
        {"total", log.energy.total()}}},
      {"cumulative_energy_j", cumulative},
      {"reference_constants", reference_constants_json()},
      {"config", config_to_json(cfg)},
  };
}

inline std::string sha256_hex(std::string_view data) {
  std::array<unsigned char, EVP_MAX_MD_SIZE> digest{};
  unsigned int len = 0;
  if (EVP_Digest(data.data(), data.size(), digest.data(), &len, EVP_sha256(), nullptr) != 1)
    throw IoError("sha256 digest failed");
  static constexpr char hex[] = "0123456789abcdef";
  std::string out;
  out.reserve(2 * len);
  for (unsigned int i = 0; i < len; ++i) {
    out.push_back(hex[digest[i] >> 4]);
    out.push_back(hex[digest[i] & 0xf]);
  }
  return out;
}

inline std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot read '" + path.string() + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

// Writes `contents` and returns its checksum.
inline std::string write_file(const fs::path& path, const std::string& contents) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open '" + path.string() + "' for writing");
  out << contents;
  out.close();
  if (!out) throw IoError("failed writing '" + path.string() + "'");
  return sha256_hex(contents);
}

struct RunPlan {
  Mode mode = Mode::Digital;
  std::uint64_t seed = 0;
};

struct RunArtifacts {
  RunPlan plan;
  fs::path dir;
  std::map<std::string, std::string> checksums;  // file name -> sha256
  double final_mean_reward = 0.0;
  double cumulative_energy_j = 0.0;
};

struct RunManifest {
  std::string config_path;  // empty when running on defaults
  RunConfig config;         // resolved, before the per-run mode/seed are applied
  std::vector<Mode> modes;
  std::vector<std::uint64_t> seeds;
  fs::path out_dir;
  std::vector<RunArtifacts> runs;  // filled by run_experiment
};

inline std::string run_dir_name(Mode m, std::uint64_t seed) {
  return std::string(to_string(m)) + "_seed" + std::to_string(seed);
}

inline RunArtifacts execute_run(const RunConfig& base, RunPlan plan, const fs::path& out_dir) {
  RunConfig cfg = base;
  cfg.mode = plan.mode;
  cfg.seed = plan.seed;
  const MetricsLog log = train(cfg);

  RunArtifacts art;
  art.plan = plan;
  art.dir = out_dir / run_dir_name(plan.mode, plan.seed);
  std::error_code ec;
  fs::create_directories(art.dir, ec);
  if (ec) throw IoError("cannot create '" + art.dir.string() + "': " + ec.message());

  std::ostringstream metrics;
  write_metrics_csv(metrics, log);
  art.checksums["metrics.csv"] = write_file(art.dir / "metrics.csv", metrics.str());
  art.checksums["summary.json"] = write_file(art.dir / "summary.json", summary_json(log, cfg).dump(2) + "\n");
  if (log.final_crossbar) {
    std::ostringstream dump;
    log.final_crossbar->dump_csv(dump);
    art.checksums["crossbar_final.csv"] = write_file(art.dir / "crossbar_final.csv", dump.str());
  }
  art.final_mean_reward = log.mean_reward_last(100);
  art.cumulative_energy_j = log.cumulative_energy.back();
  return art;
}

inline nlohmann::json manifest_json(const RunManifest& m) {
  nlohmann::json runs = nlohmann::json::array();
  for (const auto& r : m.runs)
    runs.push_back({{"mode", std::string(to_string(r.plan.mode))},
                    {"seed", r.plan.seed},
                    {"dir", r.dir.filename().string()},
                    {"checksums", r.checksums}});
  nlohmann::json modes = nlohmann::json::array();
  for (Mode mode : m.modes) modes.push_back(std::string(to_string(mode)));
  return {{"config_path", m.config_path}, {"config", config_to_json(m.config)}, {"modes", modes},
          {"seeds", m.seeds},            {"runs", runs}};
}

// Runs every (mode, seed) combination, `jobs` at a time. Runs share nothing,
// so results do not depend on `jobs`.
inline void run_experiment(RunManifest& manifest, unsigned jobs = 1) {
  validate_config(manifest.config);
  if (manifest.modes.empty() || manifest.seeds.empty()) throw ConfigError("need at least one mode and one seed");
  std::error_code ec;
  fs::create_directories(manifest.out_dir, ec);
  if (ec) throw IoError("cannot create '" + manifest.out_dir.string() + "': " + ec.message());

  std::vector<RunPlan> plans;
  for (Mode m : manifest.modes)
    for (std::uint64_t s : manifest.seeds) plans.push_back({m, s});

  manifest.runs.assign(plans.size(), {});
  jobs = std::max(1u, jobs);
  for (std::size_t start = 0; start < plans.size(); start += jobs) {
    std::vector<std::future<RunArtifacts>> batch;
    const std::size_t stop = std::min(plans.size(), start + jobs);
    for (std::size_t i = start; i < stop; ++i)
      batch.push_back(std::async(std::launch::async, execute_run, std::cref(manifest.config), plans[i],
                                 std::cref(manifest.out_dir)));
    for (std::size_t i = start; i < stop; ++i) manifest.runs[i] = batch[i - start].get();
  }
  write_file(manifest.out_dir / "manifest.json", manifest_json(manifest).dump(2) + "\n");
}

// One metrics.csv read back for overlaying.
struct MetricsSeries {
  std::string label;
  std::vector<double> reward;
  std::vector<double> reward_ma100;
  std::vector<double> episode_energy;
  std::vector<double> cumulative_energy;
};

inline MetricsSeries read_metrics_csv(const fs::path& path, std::string label) {
  const std::string text = read_file(path);
  std::istringstream in(text);
  std::string line;
  if (!std::getline(in, line) || line != kMetricsHeader)
    throw IoError("'" + path.string() + "' does not start with the metrics header");
  MetricsSeries s;
  s.label = std::move(label);
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    std::vector<std::string> cols;
    std::istringstream row(line);
    for (std::string cell; std::getline(row, cell, ',');) cols.push_back(cell);
    if (cols.size() != 8) throw IoError(path.string() + ":" + std::to_string(line_no) + ": expected 8 columns");
    try {
      s.reward.push_back(std::stod(cols[1]));
      s.reward_ma100.push_back(std::stod(cols[2]));
      s.episode_energy.push_back(std::stod(cols[3]));
      s.cumulative_energy.push_back(std::stod(cols[4]));
    } catch (const std::exception&) {
      throw IoError(path.string() + ":" + std::to_string(line_no) + ": malformed number");
    }
  }
  return s;
}

// Reads <dir>/metrics.csv for each run directory, labelled by directory name.
inline std::vector<MetricsSeries> load_runs(const std::vector<fs::path>& run_dirs) {
  std::vector<MetricsSeries> out;
  for (const auto& dir : run_dirs) {
    fs::path d = dir;
    if (d.filename().empty()) d = d.parent_path();
    out.push_back(read_metrics_csv(d / "metrics.csv", d.filename().string()));
  }
  return out;
}

// Writes reward.csv, episode_energy.csv and cumulative_energy.csv, one
// episode per row and one column group per run.
inline std::vector<fs::path> emit_plot_data(const std::vector<MetricsSeries>& runs, const fs::path& out_dir) {
  if (runs.empty()) throw InvalidInput("plot needs at least one run");
  const std::size_t n = runs.front().reward.size();
  for (const auto& r : runs)
    if (r.reward.size() != n)
      throw InvalidInput("run '" + r.label + "' has " + std::to_string(r.reward.size()) + " episodes, expected " +
                         std::to_string(n) + " (from '" + runs.front().label + "')");

  std::error_code ec;
  fs::create_directories(out_dir, ec);
  if (ec) throw IoError("cannot create '" + out_dir.string() + "': " + ec.message());

  using Column = std::vector<double> MetricsSeries::*;
  auto emit = [&](const std::string& name, std::vector<std::pair<std::string, Column>> columns) {
    std::ostringstream os;
    os << "episode";
    for (const auto& r : runs)
      for (const auto& [suffix, col] : columns) os << ',' << r.label << '_' << suffix;
    os << '\n';
    for (std::size_t i = 0; i < n; ++i) {
      os << (i + 1);
      for (const auto& r : runs)
        for (const auto& [suffix, col] : columns) os << ',' << format_g9((r.*col)[i]);
      os << '\n';
    }
    const fs::path path = out_dir / name;
    write_file(path, os.str());
    return path;
  };

  return {emit("reward.csv", {{"reward", &MetricsSeries::reward}, {"reward_ma100", &MetricsSeries::reward_ma100}}),
          emit("episode_energy.csv", {{"episode_energy_j", &MetricsSeries::episode_energy}}),
          emit("cumulative_energy.csv", {{"cumulative_energy_j", &MetricsSeries::cumulative_energy}})};
}

}  // namespace rram_mc
