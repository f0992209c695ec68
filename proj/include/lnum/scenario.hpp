#pragma once

#include <algorithm>
#include <cmath>
#include <sstream>
#include <string>
#include <vector>

#include "lnum/errors.hpp"
#include "lnum/network.hpp"
#include "lnum/rng.hpp"
#include "lnum/utility.hpp"

namespace lnum {

struct Bundle {
  NetworkSpec net;
  UtilitySpec util;
  // how generator-level choices were filled in (capacity discretization,
  // parameter draws); carried into run records so results are labeled as
  // generator-variant
  std::string generator_tag;
};

// Random per-class utilities: family uniform over the four types,
// a ~ U[0.5, 2], b ~ U[0.5, 1.5]. Quadratic draws clamp a to b/(2B) so the
// function stays nondecreasing on [0, B].
inline std::vector<UtilityFn> draw_utilities(int K, double B, Rng& rng) {
  std::vector<UtilityFn> fns;
  fns.reserve(static_cast<std::size_t>(K));
  for (int k = 0; k < K; ++k) {
    UtilityFn f;
    int fam = static_cast<int>(rng.next_double() * 4.0);
    f.a = rng.uniform(0.5, 2.0);
    f.b = rng.uniform(0.5, 1.5);
    switch (fam) {
      case 0: f.family = UtilityFamily::Linear; break;
      case 1: f.family = UtilityFamily::Sqrt; break;
      case 2:
        f.family = UtilityFamily::Quadratic;
        f.a = std::min(f.a, f.b / (2.0 * B));
        break;
      default: f.family = UtilityFamily::Log; break;
    }
    fns.push_back(f);
  }
  return fns;
}

// One source, one destination, a single shared first-come-first-serve link
// of capacity c; all K classes share it. No network action is needed.
inline Bundle build_database(int K, double capacity, std::vector<UtilityFn> utilities,
                             double B, double noise = 0.0) {
  if (K < 1) throw ConfigError("database: need at least one class");
  if (!(capacity > 0.0)) throw ConfigError("database: capacity must be positive");
  Bundle b;
  b.net.num_nodes = 2;
  b.net.links.push_back(Link{0, 1, LinkMode::SharedFifo});
  for (int k = 0; k < K; ++k) b.net.classes.push_back(TrafficClass{0, 1});
  b.net.states.push_back(StateComponent{{1.0}, {0.0}});
  RateTerm t;
  t.link = 0;
  t.cls = RateTerm::kShared;
  t.base = capacity;
  b.net.background.push_back(t);
  b.net.rate_bound = capacity;
  b.net.size_bound = B;
  b.net.validate();
  b.util = UtilitySpec(std::move(utilities), B, noise);
  std::ostringstream tag;
  tag << "database;K=" << K << ";c=" << capacity << ";B=" << B;
  b.generator_tag = tag.str();
  return b;
}

inline Bundle build_database(int K, double capacity, double B, std::uint64_t utility_seed,
                             double noise = 0.0) {
  Rng rng(derive_seed(utility_seed, 0x757469ULL));
  return build_database(K, capacity, draw_utilities(K, B, rng), B, noise);
}

// Dispatcher/server bipartite system: a source node per class, a node per
// server, one virtual destination. Dispatcher->server links are effectively
// infinite (capped at K*B) and chosen per slot by the action (join shortest
// queue, or hold); server->destination links are shared-FIFO with i.i.d.
// per-slot capacity discretized to `levels` equiprobable values on
// [cap_min, cap_max].
inline Bundle build_job_scheduling(int K, int M, double expected_degree, double cap_min,
                                   double cap_max, std::uint64_t seed, double B,
                                   double noise = 0.0, int levels = 5,
                                   std::vector<UtilityFn> utilities = {}) {
  if (K < 1 || M < 1) throw ConfigError("job scheduling: need K, M >= 1");
  if (!(cap_min <= cap_max) || cap_min < 0.0)
    throw ConfigError("job scheduling: bad capacity range");
  if (levels < 1) throw ConfigError("job scheduling: need at least one capacity level");

  Bundle b;
  const NodeId dest = K + M;
  b.net.num_nodes = K + M + 1;
  for (int k = 0; k < K; ++k) b.net.classes.push_back(TrafficClass{k, dest});

  Rng topo(derive_seed(seed, 0x746f706fULL));
  double p_link = std::min(1.0, expected_degree / M);
  std::vector<std::vector<int>> servers_of(static_cast<std::size_t>(K));
  for (int k = 0; k < K; ++k) {
    for (int m = 0; m < M; ++m)
      if (topo.next_double() < p_link) servers_of[static_cast<std::size_t>(k)].push_back(m);
    if (servers_of[static_cast<std::size_t>(k)].empty()) {
      // lonely dispatcher: connect to one uniformly random server
      servers_of[static_cast<std::size_t>(k)].push_back(
          static_cast<int>(topo.next_double() * M) % M);
    }
  }

  const double big = K * B;  // one slot's maximum total injection
  std::vector<std::vector<LinkId>> dispatch_link(static_cast<std::size_t>(K));
  for (int k = 0; k < K; ++k)
    for (int m : servers_of[static_cast<std::size_t>(k)]) {
      dispatch_link[static_cast<std::size_t>(k)].push_back(b.net.num_links());
      b.net.links.push_back(Link{k, K + m, LinkMode::PerClass});
    }
  std::vector<LinkId> server_link(static_cast<std::size_t>(M));
  for (int m = 0; m < M; ++m) {
    server_link[static_cast<std::size_t>(m)] = b.net.num_links();
    b.net.links.push_back(Link{K + m, dest, LinkMode::SharedFifo});
  }

  // per-server capacity levels, mid-points of equal bins over [cap_min, cap_max]
  std::vector<double> level_values(static_cast<std::size_t>(levels));
  double h = levels > 1 ? (cap_max - cap_min) / levels : 0.0;
  for (int i = 0; i < levels; ++i)
    level_values[static_cast<std::size_t>(i)] =
        levels > 1 ? cap_min + h * (i + 0.5) : 0.5 * (cap_min + cap_max);
  for (int m = 0; m < M; ++m) {
    StateComponent sc;
    sc.probs.assign(static_cast<std::size_t>(levels), 1.0 / levels);
    sc.values = level_values;
    b.net.states.push_back(sc);
    RateTerm t;
    t.link = server_link[static_cast<std::size_t>(m)];
    t.cls = RateTerm::kShared;
    t.state_comp = m;
    t.per_level = level_values;
    b.net.background.push_back(t);
  }

  for (int k = 0; k < K; ++k) {
    ActionComponent comp;
    comp.label = "dispatch_" + std::to_string(k);
    for (std::size_t i = 0; i < servers_of[static_cast<std::size_t>(k)].size(); ++i) {
      ActionChoice ch;
      ch.label = "server_" + std::to_string(servers_of[static_cast<std::size_t>(k)][i]);
      RateTerm t;
      t.link = dispatch_link[static_cast<std::size_t>(k)][i];
      t.cls = k;
      t.base = big;
      ch.terms.push_back(t);
      comp.choices.push_back(std::move(ch));
    }
    ActionChoice hold;  // keep traffic at the dispatcher when servers are backed up
    hold.label = "hold";
    comp.choices.push_back(std::move(hold));
    b.net.actions.push_back(std::move(comp));
  }

  b.net.rate_bound = std::max(big, cap_max);
  b.net.size_bound = B;
  b.net.validate();

  if (utilities.empty()) {
    Rng util_rng(derive_seed(seed, 0x7574696cULL));
    utilities = draw_utilities(K, B, util_rng);
  }
  b.util = UtilitySpec(std::move(utilities), B, noise);
  std::ostringstream tag;
  tag << "job_scheduling;K=" << K << ";M=" << M << ";deg=" << expected_degree << ";cap=["
      << cap_min << "," << cap_max << "]x" << levels << ";B=" << B << ";seed=" << seed
      << ";util=u[0.5,2]xu[0.5,1.5]";
  b.generator_tag = tag.str();
  return b;
}

// Explicit multi-hop description for the video-streaming family of specs:
// shared-FIFO links with per-state rates, actions = declared link-activation
// subsets (an idle activation is always appended).
struct VideoSpecConfig {
  int num_nodes = 0;
  std::vector<std::pair<NodeId, NodeId>> links;
  std::vector<std::pair<NodeId, NodeId>> classes;  // (src, dst)
  std::vector<double> state_probs = {1.0};
  // rate_table[link][state]; a single column means state-independent
  std::vector<std::vector<double>> rate_table;
  // activations: sets of link ids usable together; empty list = all links
  // always on (no action component)
  std::vector<std::vector<LinkId>> activations;
  std::vector<UtilityFn> utilities;
  double size_bound = 1.0;
  double noise = 0.0;
};

inline Bundle build_video_streaming(const VideoSpecConfig& cfg) {
  Bundle b;
  b.net.num_nodes = cfg.num_nodes;
  for (auto [u, v] : cfg.links) b.net.links.push_back(Link{u, v, LinkMode::SharedFifo});
  for (auto [s, d] : cfg.classes) b.net.classes.push_back(TrafficClass{s, d});
  StateComponent sc;
  sc.probs = cfg.state_probs;
  sc.values.assign(cfg.state_probs.size(), 0.0);
  b.net.states.push_back(sc);

  if (cfg.rate_table.size() != cfg.links.size())
    throw ConfigError("video: rate table must cover every link");
  auto term_for = [&](LinkId l) {
    RateTerm t;
    t.link = l;
    t.cls = RateTerm::kShared;
    const auto& rates = cfg.rate_table[static_cast<std::size_t>(l)];
    if (rates.size() == 1) {
      t.base = rates[0];
    } else {
      if (rates.size() != cfg.state_probs.size())
        throw ConfigError("video: per-state rates must match the state count");
      t.state_comp = 0;
      t.per_level = rates;
    }
    return t;
  };

  double max_rate = 0.0;
  for (const auto& rates : cfg.rate_table)
    for (double r : rates) max_rate = std::max(max_rate, r);

  if (cfg.activations.empty()) {
    for (LinkId l = 0; l < b.net.num_links(); ++l) b.net.background.push_back(term_for(l));
  } else {
    ActionComponent comp;
    comp.label = "activation";
    for (const auto& subset : cfg.activations) {
      ActionChoice ch;
      for (LinkId l : subset) {
        if (l < 0 || l >= b.net.num_links()) throw ConfigError("video: activation of unknown link");
        ch.terms.push_back(term_for(l));
      }
      comp.choices.push_back(std::move(ch));
    }
    ActionChoice idle;
    idle.label = "idle";
    comp.choices.push_back(std::move(idle));
    b.net.actions.push_back(std::move(comp));
  }

  b.net.rate_bound = std::max(max_rate, 1e-9);
  b.net.size_bound = cfg.size_bound;
  b.net.validate();  // rejects cyclic routes
  b.util = UtilitySpec(cfg.utilities, cfg.size_bound, cfg.noise);
  b.generator_tag = "video_streaming;nodes=" + std::to_string(cfg.num_nodes);
  return b;
}

// Presets used by tests and sample configs.
inline Bundle video_tandem(double capacity, UtilityFn fn, double B, double noise = 0.0) {
  VideoSpecConfig cfg;
  cfg.num_nodes = 3;
  cfg.links = {{0, 1}, {1, 2}};
  cfg.classes = {{0, 2}};
  cfg.rate_table = {{capacity}, {capacity}};
  cfg.utilities = {fn};
  cfg.size_bound = B;
  cfg.noise = noise;
  return build_video_streaming(cfg);
}

// Two sources funnel through one bottleneck link into the sink, so
// r_1 + r_2 <= bottleneck capacity is the binding cut.
inline Bundle video_shared_bottleneck(double in_capacity, double mid_capacity,
                                      std::vector<UtilityFn> fns, double B,
                                      double noise = 0.0) {
  VideoSpecConfig cfg;
  cfg.num_nodes = 4;  // sources 0 and 1, relay 2, sink 3
  cfg.links = {{0, 2}, {1, 2}, {2, 3}};
  cfg.classes = {{0, 3}, {1, 3}};
  cfg.rate_table = {{in_capacity}, {in_capacity}, {mid_capacity}};
  cfg.utilities = std::move(fns);
  cfg.size_bound = B;
  cfg.noise = noise;
  return build_video_streaming(cfg);
}

}  // namespace lnum
