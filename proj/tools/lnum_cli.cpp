// Command-line front end: run single simulations, parameter sweeps, regret
// scaling studies, or just solve the static benchmark for a scenario config.

#include <cstdint>
#include <filesystem>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "lnum/config.hpp"
#include "lnum/harness.hpp"

namespace fs = std::filesystem;
using namespace lnum;

namespace {

std::vector<double> parse_doubles(const std::string& csv) {
  std::vector<double> out;
  std::stringstream ss(csv);
  std::string item;
  while (std::getline(ss, item, ',')) out.push_back(std::stod(item));
  return out;
}

std::vector<long> parse_longs(const std::string& csv) {
  std::vector<long> out;
  std::stringstream ss(csv);
  std::string item;
  while (std::getline(ss, item, ',')) out.push_back(std::stol(item));
  return out;
}

std::string out_path(const std::string& dir, const std::string& name) {
  if (dir.empty()) return name;
  fs::create_directories(dir);
  return (fs::path(dir) / name).string();
}

void print_record(const RunRecord& r) {
  std::cout << "policy=" << r.policy << " T=" << r.T << " seed=" << r.seed
            << "\n  params: alpha=" << r.alpha << " V=" << r.V << " delta=" << r.delta
            << " noise=" << r.noise << "\n  OPT=" << r.opt << "  U=" << r.utility
            << "  regret_bound=" << r.regret_bound << "\n  final_queue=" << r.final_total_queue
            << " max_queue=" << r.max_total_queue << " instances=" << r.instances
            << " delivered=" << r.delivered_jobs
            << "\n  time_avg_inst_utility=" << r.time_avg_inst_utility << " wall_ms=" << r.wall_ms
            << "\n";
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"queueing-network simulator and online scheduling policy runner"};
  app.require_subcommand(1);

  std::string config_path;
  std::uint64_t seed = 1;
  std::string out_dir;
  bool no_delay = false;
  double noise = -1.0;

  auto add_common = [&](CLI::App* cmd, bool need_config = true) {
    auto* opt = cmd->add_option("--config", config_path, "config file (JSON)");
    if (need_config) opt->required();
    cmd->add_option("--seed", seed, "master seed");
    cmd->add_option("--out", out_dir, "output directory for CSV artifacts");
    cmd->add_flag("--no-delay", no_delay, "reveal utilities at injection instead of delivery");
    cmd->add_option("--noise", noise, "override the scenario's observation noise level");
  };

  auto* run_cmd = app.add_subcommand("run", "run one simulation");
  bool trajectory = false;
  add_common(run_cmd);
  run_cmd->add_flag("--trajectory", trajectory, "also write the per-slot trajectory CSV");

  auto* sweep_cmd = app.add_subcommand("sweep", "run a parameter sweep");
  std::string sweep_param = "V";
  std::string sweep_values = "50,100,200,400";
  int sweep_seeds = 5;
  add_common(sweep_cmd);
  sweep_cmd->add_option("--param", sweep_param, "axis: V | alpha | delta | noise");
  sweep_cmd->add_option("--values", sweep_values, "comma-separated values");
  sweep_cmd->add_option("--seeds", sweep_seeds, "seeds per value");

  auto* scaling_cmd = app.add_subcommand("regret-scaling", "regret vs horizon study");
  std::string horizons = "1000,4000,16000";
  int scaling_seeds = 10;
  add_common(scaling_cmd);
  scaling_cmd->add_option("--horizons", horizons, "comma-separated horizons (>= 3)");
  scaling_cmd->add_option("--seeds", scaling_seeds, "seeds per horizon");

  auto* oracle_cmd = app.add_subcommand("oracle", "solve the static benchmark for the scenario");
  double grid_check = 0.0;
  add_common(oracle_cmd);
  oracle_cmd->add_option("--grid-check", grid_check,
                         "also run the grid oracle at this step (K <= 3)");

  CLI11_PARSE(app, argc, argv);

  try {
    RunConfig cfg = load_config(config_path);
    if (!out_dir.empty()) cfg.out_dir = out_dir;
    cfg.no_delay = cfg.no_delay || no_delay;
    if (noise >= 0.0) cfg.noise_override = noise;
    std::uint64_t hash = config_hash(cfg.scenario);

    Prepared prep = prepare_scenario(cfg.scenario, cfg.noise_override);
    std::cout << "scenario: " << prep.bundle.generator_tag << "\n";
    std::cout << "oracle: OPT=" << prep.oracle.opt << " eta=" << prep.oracle.eta
              << " fw_gap=" << prep.oracle.fw_gap << " iterations=" << prep.oracle.iterations
              << "\n  r* = [";
    for (std::size_t k = 0; k < prep.oracle.r_star.size(); ++k)
      std::cout << (k ? ", " : "") << prep.oracle.r_star[k];
    std::cout << "]\n";

    if (oracle_cmd->parsed()) {
      if (grid_check > 0.0) {
        auto [r, v] = prep.problem.brute_force_opt(grid_check);
        std::cout << "grid oracle: value=" << v << " (step " << grid_check << ")\n";
      }
      return 0;
    }

    const int K = prep.bundle.net.num_classes();
    if (run_cmd->parsed()) {
      PolicyParams params =
          schedule_params(cfg.policy, cfg.T, K, prep.oracle.eta, prep.bundle.net.size_bound);
      RunInputs in;
      in.bundle = &prep.bundle;
      in.oracle = &prep.oracle;
      in.policy_name = cfg.policy.name;
      in.params = params;
      in.T = cfg.T;
      in.seed = seed;
      in.no_delay = cfg.no_delay;
      in.config_hash = hash;
      std::vector<TrajectoryRow> rows;
      RunRecord rec = run_once(in, (trajectory || cfg.trajectory) ? &rows : nullptr);
      print_record(rec);
      write_summary_csv(out_path(cfg.out_dir, "summary.csv"), {rec});
      if (!rows.empty())
        write_trajectory_csv(out_path(cfg.out_dir, "trajectory.csv"), rows, K);
      return 0;
    }

    if (sweep_cmd->parsed()) {
      SweepResult res = sweep(prep.bundle, prep.oracle, cfg.policy, cfg.T, sweep_param,
                              parse_doubles(sweep_values), sweep_seeds, seed, cfg.no_delay, hash);
      write_summary_csv(out_path(cfg.out_dir, "sweep_" + sweep_param + ".csv"), res.records);
      std::cout << "param " << res.param << ": value -> mean steady queue, mean inst. utility\n";
      std::size_t idx = 0;
      for (double v : res.values) {
        double q = 0.0, u = 0.0;
        for (int s = 0; s < sweep_seeds; ++s, ++idx) {
          q += res.records[idx].steady_queue;
          u += res.records[idx].time_avg_inst_utility;
        }
        std::cout << "  " << v << " -> " << q / sweep_seeds << ", " << u / sweep_seeds << "\n";
      }
      return 0;
    }

    if (scaling_cmd->parsed()) {
      ScalingResult res = regret_scaling(prep.bundle, prep.oracle, cfg.policy,
                                         parse_longs(horizons), scaling_seeds, seed,
                                         cfg.no_delay, hash);
      write_summary_csv(out_path(cfg.out_dir, "regret_scaling.csv"), res.records);
      std::cout << "mean log-log slope: " << res.mean_slope;
      if (res.excluded_points > 0)
        std::cout << "  (warning: " << res.excluded_points << " nonpositive points excluded)";
      std::cout << "\nper-seed slopes:";
      for (double s : res.per_seed_slopes) std::cout << ' ' << s;
      std::cout << "\n";
      return 0;
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
