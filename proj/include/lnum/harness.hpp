#pragma once

#include <algorithm>
#include <chrono>
#include <cmath>
#include <fstream>
#include <limits>
#include <memory>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "lnum/config.hpp"
#include "lnum/errors.hpp"
#include "lnum/oracle.hpp"
#include "lnum/policy.hpp"
#include "lnum/scenario.hpp"
#include "lnum/sim.hpp"

namespace lnum {

struct OracleRecord {
  double opt = 0.0;
  std::vector<double> r_star;
  double eta = 0.0;
  double fw_gap = 0.0;
  long iterations = 0;
};

inline OracleRecord solve_bundle(const StaticProblem& problem, double tol = 1e-6,
                                 long max_iter = 100000) {
  OracleRecord rec;
  OracleSolution sol = problem.solve_opt(tol, max_iter);
  rec.opt = sol.opt;
  rec.r_star = sol.r_star;
  rec.eta = problem.slater_slack();
  rec.fw_gap = sol.fw_gap;
  rec.iterations = sol.iterations;
  return rec;
}

struct RunRecord {
  std::uint64_t config_hash = 0;
  std::uint64_t seed = 0;
  long T = 0;
  std::string policy;
  double alpha = 0.0, V = 0.0, delta = 0.0, noise = 0.0;
  double opt = 0.0;
  double utility = 0.0;       // U(pi, T): true utility of delivered jobs
  double regret_bound = 0.0;  // T*OPT - U
  double final_total_queue = 0.0;
  double max_total_queue = 0.0;
  double mean_queue = 0.0;    // time average over the whole run
  double steady_queue = 0.0;  // time average over the second half
  long instances = 0;
  long delivered_jobs = 0;
  double time_avg_inst_utility = 0.0;
  double min_positive_injection = 0.0;
  double wall_ms = 0.0;
  std::string generator_tag;
};

struct TrajectoryRow {
  long slot = 0;
  double total_queue = 0.0;
  std::vector<double> src_queues;
  long delivered_count = 0;
  double delivered_utility_cum = 0.0;
};

struct RunInputs {
  const Bundle* bundle = nullptr;
  const OracleRecord* oracle = nullptr;
  std::string policy_name = "pgsmw";
  PolicyParams params;
  long T = 1000;
  std::uint64_t seed = 1;
  bool no_delay = false;  // reveal utilities at injection instead of delivery
  std::uint64_t config_hash = 0;
};

// One full simulation: per slot draw the state, pick the max-weight action,
// inject on epoch heads (two sample jobs per class every second slot), move
// volume, and feed delivered observations back to the policy. Utilities of
// delivered jobs count toward U noiselessly; the policy sees the noisy
// observation stream.
inline RunRecord run_once(const RunInputs& in, std::vector<TrajectoryRow>* trajectory = nullptr,
                          std::vector<std::vector<double>>* rhat_trace = nullptr) {
  const Bundle& bundle = *in.bundle;
  const UtilitySpec& util = bundle.util;
  const int K = bundle.net.num_classes();
  auto t0 = std::chrono::steady_clock::now();

  SimState sim(bundle.net);
  auto policy = make_policy(in.policy_name, in.params);
  Rng state_rng(derive_seed(in.seed, 0x5731ULL));
  Rng noise_rng(derive_seed(in.seed, 0x6e31ULL));

  double utility_sum = 0.0;
  double inst_utility_sum = 0.0;
  double queue_sum = 0.0, queue_sum_half = 0.0;
  long half_slots = 0;
  double max_queue = 0.0;
  double min_pos_inj = std::numeric_limits<double>::infinity();
  long delivered_jobs = 0;
  std::vector<double> current_rhat(static_cast<std::size_t>(K), in.params.delta);

  for (long slot = 1; slot <= in.T; ++slot) {
    StateVec omega = draw_state(bundle.net, state_rng);
    ActionVec x = max_weight_action(bundle.net, omega, sim);

    const bool head = (slot % 2 == 1);
    std::vector<InjectionRequest> inj;
    if (head) inj = policy->plan((slot + 1) / 2, sim.source_queues());

    SlotReport rep = sim.apply_slot(omega, x, inj);

    std::vector<Observation> obs;
    if (head) {
      policy->note_injected(sim.last_injected());
      current_rhat = policy->r_hat();
      if (rhat_trace) rhat_trace->push_back(current_rhat);
      for (const auto& r : inj)
        if (r.size > 0.0) min_pos_inj = std::min(min_pos_inj, r.size);
      if (in.no_delay) {
        for (long id : sim.last_injected()) {
          const Job& j = sim.job(id);
          obs.push_back(Observation{id, util.observe(j.cls, j.size, noise_rng)});
        }
      }
    }
    if (!in.no_delay) {
      for (const auto& ev : rep.delivered)
        obs.push_back(Observation{ev.job, util.observe(ev.cls, ev.size, noise_rng)});
    }
    for (const auto& ev : rep.delivered) {
      utility_sum += util.evaluate(ev.cls, ev.size);
      ++delivered_jobs;
    }
    if (!obs.empty()) policy->collect_feedback(obs);

    for (int k = 0; k < K; ++k)
      inst_utility_sum += util.evaluate(k, current_rhat[static_cast<std::size_t>(k)]);
    double q = sim.total_queue();
    queue_sum += q;
    if (2 * slot > in.T) {
      queue_sum_half += q;
      ++half_slots;
    }
    max_queue = std::max(max_queue, q);

    if (trajectory) {
      TrajectoryRow row;
      row.slot = slot;
      row.total_queue = q;
      row.src_queues = sim.source_queues();
      row.delivered_count = delivered_jobs;
      row.delivered_utility_cum = utility_sum;
      trajectory->push_back(std::move(row));
    }
  }

  RunRecord rec;
  rec.config_hash = in.config_hash;
  rec.seed = in.seed;
  rec.T = in.T;
  rec.policy = in.policy_name;
  rec.alpha = in.params.alpha;
  rec.V = in.params.V;
  rec.delta = in.params.delta;
  rec.noise = util.noise_level();
  rec.opt = in.oracle->opt;
  rec.utility = utility_sum;
  rec.regret_bound = static_cast<double>(in.T) * in.oracle->opt - utility_sum;
  rec.final_total_queue = sim.total_queue();
  rec.max_total_queue = max_queue;
  rec.mean_queue = queue_sum / static_cast<double>(in.T);
  rec.steady_queue = half_slots > 0 ? queue_sum_half / static_cast<double>(half_slots) : 0.0;
  rec.instances = policy->instances_created();
  rec.delivered_jobs = delivered_jobs;
  rec.time_avg_inst_utility = inst_utility_sum / static_cast<double>(in.T);
  rec.min_positive_injection = std::isfinite(min_pos_inj) ? min_pos_inj : 0.0;
  rec.generator_tag = bundle.generator_tag;
  rec.wall_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();

  // benchmark sanity: achieved utility may never beat T*OPT
  if (rec.utility > static_cast<double>(in.T) * rec.opt + 1e-6 * static_cast<double>(in.T)) {
    std::ostringstream msg;
    msg << "utility bound violated: U=" << rec.utility << " T*OPT="
        << static_cast<double>(in.T) * rec.opt << " policy=" << rec.policy
        << " seed=" << rec.seed << " T=" << rec.T;
    throw InternalError(msg.str());
  }
  return rec;
}

inline PolicyParams schedule_params(const PolicyConfig& pc, long T, int K, double eta, double B) {
  if (pc.schedule == "theorem2") return theorem2_params(T, K, eta, B);
  if (pc.schedule == "section6") return section6_params(T, K, B);
  if (pc.schedule == "gsmw_no_delay") return gsmw_no_delay_params(T, K, B);
  if (pc.schedule == "explicit") {
    PolicyParams p;
    p.alpha = pc.alpha;
    p.V = pc.V;
    p.delta = pc.delta;
    p.K = K;
    p.B = B;
    p.eta = eta;
    p.validate();
    return p;
  }
  throw ConfigError("unknown schedule: " + pc.schedule);
}

// Scenario + solved oracle, with bounded topology-seed retries when a
// generated instance comes out without interior.
struct Prepared {
  Bundle bundle;
  StaticProblem problem;
  OracleRecord oracle;
};

inline Prepared prepare_scenario(json scenario, double noise_override = -1.0) {
  const int max_tries = 5;
  for (int attempt = 0;; ++attempt) {
    try {
      Bundle b = build_scenario(scenario, noise_override);
      StaticProblem prob(b.net, b.util);
      OracleRecord rec = solve_bundle(prob);
      return Prepared{std::move(b), std::move(prob), std::move(rec)};
    } catch (const NonInteriorError&) {
      if (attempt + 1 >= max_tries || !scenario.contains("topology_seed")) throw;
      scenario["topology_seed"] = scenario["topology_seed"].get<std::uint64_t>() + 1;
    }
  }
}

// ---- sweeps and scaling ----

struct SweepResult {
  std::string param;
  std::vector<double> values;
  std::vector<RunRecord> records;  // one per (value, seed), value-major
};

inline SweepResult sweep(const Bundle& bundle, const OracleRecord& oracle,
                         const PolicyConfig& pc, long T, const std::string& param,
                         const std::vector<double>& values, int num_seeds,
                         std::uint64_t master_seed, bool no_delay = false,
                         std::uint64_t cfg_hash = 0) {
  SweepResult out;
  out.param = param;
  out.values = values;
  const int K = bundle.net.num_classes();
  for (std::size_t vi = 0; vi < values.size(); ++vi) {
    PolicyParams params = schedule_params(pc, T, K, oracle.eta, bundle.net.size_bound);
    Bundle local = bundle;
    if (param == "V")
      params.V = values[vi];
    else if (param == "alpha")
      params.alpha = values[vi];
    else if (param == "delta")
      params.delta = values[vi];
    else if (param == "noise")
      local.util = bundle.util.with_noise(values[vi]);
    else
      throw ConfigError("unknown sweep parameter: " + param);
    params.validate();
    for (int s = 0; s < num_seeds; ++s) {
      RunInputs in;
      in.bundle = &local;
      in.oracle = &oracle;
      in.policy_name = pc.name;
      in.params = params;
      in.T = T;
      in.seed = derive_seed(master_seed, 1000 * vi + static_cast<std::uint64_t>(s));
      in.no_delay = no_delay;
      in.config_hash = cfg_hash;
      out.records.push_back(run_once(in));
    }
  }
  return out;
}

// Least-squares slope of log(y) against log(x).
inline double log_log_slope(const std::vector<double>& xs, const std::vector<double>& ys) {
  if (xs.size() != ys.size() || xs.size() < 2)
    throw ConfigError("slope needs at least two points");
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    double lx = std::log(xs[i]), ly = std::log(ys[i]);
    sx += lx;
    sy += ly;
    sxx += lx * lx;
    sxy += lx * ly;
  }
  double n = static_cast<double>(xs.size());
  return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

struct ScalingResult {
  std::vector<long> horizons;
  std::vector<RunRecord> records;  // horizon-major, seed-minor
  std::vector<double> per_seed_slopes;
  double mean_slope = 0.0;
  long excluded_points = 0;  // nonpositive regret bounds left out
};

inline ScalingResult regret_scaling(const Bundle& bundle, const OracleRecord& oracle,
                                    const PolicyConfig& pc, const std::vector<long>& horizons,
                                    int num_seeds, std::uint64_t master_seed,
                                    bool no_delay = false, std::uint64_t cfg_hash = 0) {
  if (horizons.size() < 3) throw ConfigError("regret scaling needs at least 3 horizons");
  ScalingResult out;
  out.horizons = horizons;
  const int K = bundle.net.num_classes();
  std::vector<std::vector<double>> regret_by_seed(static_cast<std::size_t>(num_seeds));
  std::vector<std::vector<double>> horizon_by_seed(static_cast<std::size_t>(num_seeds));
  for (long T : horizons) {
    PolicyParams params = schedule_params(pc, T, K, oracle.eta, bundle.net.size_bound);
    for (int s = 0; s < num_seeds; ++s) {
      RunInputs in;
      in.bundle = &bundle;
      in.oracle = &oracle;
      in.policy_name = pc.name;
      in.params = params;
      in.T = T;
      in.seed = derive_seed(master_seed, static_cast<std::uint64_t>(s));
      in.no_delay = no_delay;
      in.config_hash = cfg_hash;
      RunRecord rec = run_once(in);
      if (rec.regret_bound > 0.0) {
        regret_by_seed[static_cast<std::size_t>(s)].push_back(rec.regret_bound);
        horizon_by_seed[static_cast<std::size_t>(s)].push_back(static_cast<double>(T));
      } else {
        ++out.excluded_points;
      }
      out.records.push_back(std::move(rec));
    }
  }
  double total = 0.0;
  int used = 0;
  for (int s = 0; s < num_seeds; ++s) {
    if (horizon_by_seed[static_cast<std::size_t>(s)].size() < 2) continue;
    double slope = log_log_slope(horizon_by_seed[static_cast<std::size_t>(s)],
                                 regret_by_seed[static_cast<std::size_t>(s)]);
    out.per_seed_slopes.push_back(slope);
    total += slope;
    ++used;
  }
  if (used == 0) throw ConfigError("regret scaling: no usable points");
  out.mean_slope = total / used;
  return out;
}

// ---- CSV output ----

inline void write_summary_csv(std::ostream& os, const std::vector<RunRecord>& records) {
  os << "config_hash,seed,T,policy,alpha,V,delta,noise,opt,utility,regret_bound,"
        "final_total_queue,max_total_queue,mean_queue,steady_queue,instances,"
        "delivered_jobs,time_avg_inst_utility,min_positive_injection,wall_ms,generator_tag\n";
  os.precision(12);
  for (const auto& r : records) {
    os << r.config_hash << ',' << r.seed << ',' << r.T << ',' << r.policy << ',' << r.alpha
       << ',' << r.V << ',' << r.delta << ',' << r.noise << ',' << r.opt << ',' << r.utility
       << ',' << r.regret_bound << ',' << r.final_total_queue << ',' << r.max_total_queue
       << ',' << r.mean_queue << ',' << r.steady_queue << ',' << r.instances << ','
       << r.delivered_jobs << ',' << r.time_avg_inst_utility << ',' << r.min_positive_injection
       << ',' << r.wall_ms << ',' << '"' << r.generator_tag << '"' << '\n';
  }
}

inline void write_summary_csv(const std::string& path, const std::vector<RunRecord>& records) {
  std::ofstream os(path);
  if (!os) throw ConfigError("cannot write " + path);
  write_summary_csv(os, records);
}

inline void write_trajectory_csv(std::ostream& os, const std::vector<TrajectoryRow>& rows, int K) {
  os << "slot,total_queue";
  for (int k = 0; k < K; ++k) os << ",src_queue_" << k;
  os << ",delivered_count,delivered_utility_cumulative\n";
  os.precision(12);
  for (const auto& r : rows) {
    os << r.slot << ',' << r.total_queue;
    for (int k = 0; k < K; ++k) os << ',' << r.src_queues[static_cast<std::size_t>(k)];
    os << ',' << r.delivered_count << ',' << r.delivered_utility_cum << '\n';
  }
}

inline void write_trajectory_csv(const std::string& path, const std::vector<TrajectoryRow>& rows,
                                 int K) {
  std::ofstream os(path);
  if (!os) throw ConfigError("cannot write " + path);
  write_trajectory_csv(os, rows, K);
}

}  // namespace lnum
