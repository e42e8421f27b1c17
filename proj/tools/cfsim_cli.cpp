// Command-line front end: run a configuration, run a figure preset, or
// summarize an existing results directory.

#include <cstdint>
#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "cfsim/config.hpp"
#include "cfsim/results.hpp"

namespace {

struct Overrides {
  std::optional<std::uint64_t> seed;
  std::optional<int> drops;
  std::optional<int> blocks;
  int workers = 1;
};

void add_overrides(CLI::App* cmd, Overrides& o) {
  cmd->add_option("--seed", o.seed, "master seed");
  cmd->add_option("--workers", o.workers, "worker threads (output is identical for any value)")
      ->check(CLI::PositiveNumber);
  cmd->add_option("--drops", o.drops, "number of network drops")->check(CLI::PositiveNumber);
  cmd->add_option("--blocks", o.blocks, "coherence blocks per drop")
      ->check(CLI::Range(2, 1 << 30));
}

void execute(cfsim::SimConfig cfg, const Overrides& o, const std::string& out) {
  if (o.seed) cfg.master_seed = *o.seed;
  if (o.drops) cfg.n_drops = *o.drops;
  if (o.blocks) cfg.n_blocks = *o.blocks;
  cfsim::validate_config(cfg);
  std::cerr << "cfsim: " << cfg.n_drops << " drops x " << cfg.n_blocks
            << " blocks, n_d = " << cfg.n_d << ", " << o.workers
            << " worker(s) -> " << out << '\n';
  cfsim::run_experiment(cfg, out, o.workers);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Cell-free massive MIMO eMBB/URLLC coexistence simulator"};
  app.require_subcommand(1);

  std::string config_path, out_dir, in_dir;
  Overrides run_o, fig_o;

  auto* run = app.add_subcommand("run", "run a JSON configuration");
  run->add_option("--config", config_path, "configuration file")->required();
  run->add_option("--out", out_dir, "output directory")->required();
  add_overrides(run, run_o);

  std::string preset_name;
  for (const char* name : {"fig1", "fig2", "fig3"}) {
    auto* fig = app.add_subcommand(name, std::string("run the ") + name + " preset");
    fig->add_option("--out", out_dir, "output directory")->required();
    add_overrides(fig, fig_o);
    fig->callback([&preset_name, name] { preset_name = name; });
  }

  auto* summarize = app.add_subcommand("summarize", "rebuild summary.csv");
  summarize->add_option("--in", in_dir, "results directory")->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (run->parsed()) {
      execute(cfsim::load_config(config_path), run_o, out_dir);
    } else if (!preset_name.empty()) {
      execute(cfsim::preset(preset_name), fig_o, out_dir);
    } else if (summarize->parsed()) {
      cfsim::summarize_dir(in_dir);
    }
  } catch (const std::exception& e) {
    std::cerr << "cfsim: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
