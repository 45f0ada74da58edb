// Command-line front end.
//
//   rram_mc run  --config <path> --mode <m>... --seed <n>... --episodes <k> --out <dir>
//   rram_mc plot --runs <dir>... --out <dir>
//   rram_mc config                      (print every key with its default)
//
// Exit codes: 0 success, 1 configuration error, 2 runtime or I/O error.

#include <CLI11.hpp>

#include <iostream>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include "rram_mc/config.hpp"
#include "rram_mc/report.hpp"

namespace {

constexpr int kExitConfig = 1;
constexpr int kExitRuntime = 2;

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"In-situ Monte Carlo reinforcement learning on a simulated passive RRAM crossbar"};
  app.require_subcommand(1);

  std::string config_path;
  std::vector<std::string> modes;
  std::vector<std::uint64_t> seeds;
  std::optional<std::size_t> episodes;
  std::string out_dir;
  unsigned jobs = std::max(1u, std::thread::hardware_concurrency());

  CLI::App* run = app.add_subcommand("run", "train one or more (mode, seed) runs and write metrics");
  run->add_option("--config", config_path, "key = value config file; every key is optional");
  run->add_option("--mode", modes, "digital, crossbar or crossbar-noisy (repeatable; default: run.mode)");
  run->add_option("--seed", seeds, "run seed (repeatable; default: run.seed)");
  run->add_option("--episodes", episodes, "override run.episodes");
  run->add_option("--out", out_dir, "output directory")->required();
  run->add_option("--jobs", jobs, "runs executed concurrently")->check(CLI::PositiveNumber);

  std::vector<std::string> run_dirs;
  std::string plot_out;
  CLI::App* plot = app.add_subcommand("plot", "overlay finished runs into plot-ready CSVs");
  plot->add_option("--runs", run_dirs, "run directories containing metrics.csv")->required();
  plot->add_option("--out", plot_out, "output directory")->required();

  CLI::App* show = app.add_subcommand("config", "print the fully resolved configuration");
  show->add_option("--config", config_path, "config file to resolve");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitConfig;
  }

  try {
    if (*show) {
      const rram_mc::RunConfig cfg = config_path.empty() ? rram_mc::RunConfig{} : rram_mc::load_config(config_path);
      std::cout << rram_mc::format_config(cfg);
      return 0;
    }

    if (*plot) {
      std::vector<rram_mc::fs::path> dirs(run_dirs.begin(), run_dirs.end());
      for (const auto& p : rram_mc::emit_plot_data(rram_mc::load_runs(dirs), plot_out))
        std::cout << "wrote " << p.string() << '\n';
      return 0;
    }

    rram_mc::RunManifest manifest;
    manifest.config_path = config_path;
    manifest.config = config_path.empty() ? rram_mc::RunConfig{} : rram_mc::load_config(config_path);
    if (episodes) manifest.config.episodes = *episodes;
    for (const auto& m : modes) {
      try {
        manifest.modes.push_back(rram_mc::parse_mode(m));
      } catch (const rram_mc::InvalidInput& e) {
        throw rram_mc::ConfigError(e.what());
      }
    }
    if (manifest.modes.empty()) manifest.modes.push_back(manifest.config.mode);
    manifest.seeds = seeds.empty() ? std::vector<std::uint64_t>{manifest.config.seed} : seeds;
    manifest.out_dir = out_dir;
    rram_mc::validate_config(manifest.config);

    rram_mc::run_experiment(manifest, jobs);
    for (const auto& r : manifest.runs)
      std::cout << r.dir.string() << "  last-100 mean reward " << rram_mc::format_g9(r.final_mean_reward)
                << "  cumulative energy " << rram_mc::format_g9(r.cumulative_energy_j) << " J\n";
    return 0;
  } catch (const rram_mc::ConfigError& e) {
    std::cerr << "configuration error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitRuntime;
  }
}
