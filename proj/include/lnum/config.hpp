#pragma once

#include <cstdint>
#include <fstream>
#include <string>
#include <vector>

#include "json.hpp"
#include "lnum/errors.hpp"
#include "lnum/scenario.hpp"

namespace lnum {

using json = nlohmann::json;

// Config file layout (JSON):
//   scenario: { type: database | job_scheduling | video_streaming, ... }
//   policy:   { name: gsmw | pgsmw | episodic | stale_gradient,
//               schedule: theorem2 | section6 | gsmw_no_delay | explicit,
//               alpha, V, delta }
//   horizon:  { T }
//   output:   { dir, trajectory }
struct PolicyConfig {
  std::string name = "pgsmw";
  std::string schedule = "theorem2";
  double alpha = 0.0, V = 0.0, delta = 0.0;  // for schedule == explicit
};

struct RunConfig {
  json scenario;
  PolicyConfig policy;
  long T = 1000;
  std::string out_dir;
  bool trajectory = false;
  double noise_override = -1.0;  // >= 0 replaces the scenario's noise
  bool no_delay = false;
};

inline std::uint64_t config_hash(const json& j) {
  std::string s = j.dump();
  std::uint64_t h = 1469598103934665603ULL;  // FNV-1a
  for (unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  return h;
}

inline RunConfig parse_config(const json& j) {
  RunConfig cfg;
  if (!j.contains("scenario")) throw ConfigError("config missing 'scenario' section");
  cfg.scenario = j.at("scenario");
  if (j.contains("policy")) {
    const auto& p = j.at("policy");
    cfg.policy.name = p.value("name", cfg.policy.name);
    cfg.policy.schedule = p.value("schedule", cfg.policy.schedule);
    cfg.policy.alpha = p.value("alpha", 0.0);
    cfg.policy.V = p.value("V", 0.0);
    cfg.policy.delta = p.value("delta", 0.0);
  }
  if (j.contains("horizon")) cfg.T = j.at("horizon").value("T", cfg.T);
  if (j.contains("output")) {
    cfg.out_dir = j.at("output").value("dir", std::string());
    cfg.trajectory = j.at("output").value("trajectory", false);
  }
  if (cfg.T < 1) throw ConfigError("horizon T must be at least 1");
  return cfg;
}

inline RunConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file: " + path);
  json j;
  try {
    in >> j;
  } catch (const std::exception& e) {
    throw ConfigError(std::string("config parse error: ") + e.what());
  }
  return parse_config(j);
}

inline std::vector<UtilityFn> utilities_from_json(const json& arr) {
  std::vector<UtilityFn> fns;
  for (const auto& u : arr) {
    UtilityFn f;
    f.family = family_from_name(u.at("family").get<std::string>());
    f.a = u.value("a", 1.0);
    f.b = u.value("b", 0.0);
    fns.push_back(f);
  }
  return fns;
}

// Instantiate the scenario section into a concrete network + utility bundle.
inline Bundle build_scenario(const json& s, double noise_override = -1.0) {
  std::string type = s.at("type").get<std::string>();
  double noise = s.value("noise", 0.0);
  if (noise_override >= 0.0) noise = noise_override;

  if (type == "database") {
    int K = s.at("classes").get<int>();
    double c = s.at("capacity").get<double>();
    double B = s.value("size_bound", 1.0);
    if (s.contains("utilities"))
      return build_database(K, c, utilities_from_json(s.at("utilities")), B, noise);
    return build_database(K, c, B, s.value("utility_seed", std::uint64_t{1}), noise);
  }
  if (type == "job_scheduling") {
    int K = s.at("classes").get<int>();
    int M = s.at("servers").get<int>();
    std::vector<UtilityFn> fns;
    if (s.contains("utilities")) fns = utilities_from_json(s.at("utilities"));
    return build_job_scheduling(K, M, s.value("expected_degree", 6.0),
                                s.value("capacity_min", 0.5), s.value("capacity_max", 1.5),
                                s.value("topology_seed", std::uint64_t{1}),
                                s.value("size_bound", 1.0), noise, s.value("levels", 5),
                                std::move(fns));
  }
  if (type == "video_streaming") {
    if (s.contains("preset")) {
      std::string preset = s.at("preset").get<std::string>();
      double B = s.value("size_bound", 1.0);
      if (preset == "tandem") {
        UtilityFn fn;
        if (s.contains("utilities")) fn = utilities_from_json(s.at("utilities")).at(0);
        return video_tandem(s.value("capacity", 1.0), fn, B, noise);
      }
      if (preset == "shared_bottleneck") {
        std::vector<UtilityFn> fns;
        if (s.contains("utilities"))
          fns = utilities_from_json(s.at("utilities"));
        else
          fns = {UtilityFn{}, UtilityFn{}};
        return video_shared_bottleneck(s.value("in_capacity", 2.0), s.value("capacity", 1.0),
                                       std::move(fns), B, noise);
      }
      throw ConfigError("unknown video preset: " + preset);
    }
    VideoSpecConfig cfg;
    cfg.num_nodes = s.at("nodes").get<int>();
    for (const auto& l : s.at("links")) cfg.links.emplace_back(l.at(0).get<int>(), l.at(1).get<int>());
    for (const auto& c : s.at("classes")) cfg.classes.emplace_back(c.at(0).get<int>(), c.at(1).get<int>());
    if (s.contains("state_probs")) cfg.state_probs = s.at("state_probs").get<std::vector<double>>();
    cfg.rate_table = s.at("rates").get<std::vector<std::vector<double>>>();
    if (s.contains("activations"))
      cfg.activations = s.at("activations").get<std::vector<std::vector<int>>>();
    cfg.utilities = utilities_from_json(s.at("utilities"));
    cfg.size_bound = s.value("size_bound", 1.0);
    cfg.noise = noise;
    return build_video_streaming(cfg);
  }
  throw ConfigError("unknown scenario type: " + type);
}

}  // namespace lnum
