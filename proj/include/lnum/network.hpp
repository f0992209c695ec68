#pragma once

#include <algorithm>
#include <cmath>
#include <deque>
#include <string>
#include <vector>

#include "lnum/errors.hpp"
#include "lnum/rng.hpp"

namespace lnum {

using NodeId = int;
using LinkId = int;
using ClassId = int;

// How a directed link serves the per-class queues at its tail node.
//   PerClass:   the action/state rate model offers an independent rate per
//               class; service is FIFO within each (node, class) queue.
//   SharedFifo: the rate model offers one total rate; service drains the
//               tail node's classes strictly in arrival order (a shared
//               first-come-first-serve buffer, e.g. a database or a server).
enum class LinkMode { PerClass, SharedFifo };

struct Link {
  NodeId from = 0;
  NodeId to = 0;
  LinkMode mode = LinkMode::PerClass;
};

struct TrafficClass {
  NodeId src = 0;
  NodeId dst = 0;
};

// One independent coordinate of the network state. The engine redraws every
// component i.i.d. each slot; `values` carries the numeric level (e.g. a
// server capacity) that rate terms may reference.
struct StateComponent {
  std::vector<double> probs;
  std::vector<double> values;  // same length as probs; defaults to indices
};

// One additive contribution to the offered rates. `cls == kShared` targets a
// SharedFifo link's total rate. If `state_comp >= 0` the rate is
// per_level[level of that component], else the constant `base`.
struct RateTerm {
  static constexpr int kShared = -1;
  LinkId link = 0;
  int cls = kShared;
  int state_comp = -1;
  double base = 0.0;
  std::vector<double> per_level;
};

struct ActionChoice {
  std::string label;
  std::vector<RateTerm> terms;
};

// Action components choose independently; the joint offered rate is the sum
// of the chosen terms plus the background terms. Additivity is what lets the
// max-weight rule decompose into per-component argmaxes.
struct ActionComponent {
  std::string label;
  std::vector<ActionChoice> choices;
};

using StateVec = std::vector<int>;   // one level index per state component
using ActionVec = std::vector<int>;  // one choice index per action component

struct OfferedRates {
  // shared_total[l] for SharedFifo links, per_class[l][k] for PerClass links.
  std::vector<double> shared_total;
  std::vector<std::vector<double>> per_class;
};

struct NetworkSpec {
  int num_nodes = 0;
  std::vector<Link> links;
  std::vector<TrafficClass> classes;
  std::vector<StateComponent> states;    // at least one component
  std::vector<ActionComponent> actions;  // empty = single trivial action
  std::vector<RateTerm> background;      // action-independent offered rates
  double rate_bound = 0.0;  // A: every offered rate lies in [0, A]
  double size_bound = 1.0;  // B: max job size

  int num_links() const { return static_cast<int>(links.size()); }
  int num_classes() const { return static_cast<int>(classes.size()); }

  std::vector<LinkId> out_links(NodeId n) const {
    std::vector<LinkId> out;
    for (LinkId l = 0; l < num_links(); ++l)
      if (links[static_cast<std::size_t>(l)].from == n) out.push_back(l);
    return out;
  }
  std::vector<LinkId> in_links(NodeId n) const {
    std::vector<LinkId> in;
    for (LinkId l = 0; l < num_links(); ++l)
      if (links[static_cast<std::size_t>(l)].to == n) in.push_back(l);
    return in;
  }

  // Links class k traffic can ever ride: per-class links with a term for k,
  // shared links reachable from s_k. Grown as a fixed point with reachability.
  std::vector<char> usable_links(ClassId k) const {
    std::vector<char> usable(links.size(), 0);
    std::vector<char> reach(static_cast<std::size_t>(num_nodes), 0);
    reach[static_cast<std::size_t>(classes[static_cast<std::size_t>(k)].src)] = 1;
    bool grew = true;
    while (grew) {
      grew = false;
      for (LinkId l = 0; l < num_links(); ++l) {
        const Link& ln = links[static_cast<std::size_t>(l)];
        if (usable[static_cast<std::size_t>(l)] || !reach[static_cast<std::size_t>(ln.from)]) continue;
        bool carries = ln.mode == LinkMode::SharedFifo ? link_has_shared_rate(l)
                                                       : link_has_class_rate(l, k);
        if (!carries) continue;
        usable[static_cast<std::size_t>(l)] = 1;
        if (!reach[static_cast<std::size_t>(ln.to)]) {
          reach[static_cast<std::size_t>(ln.to)] = 1;
          grew = true;
        }
      }
    }
    return usable;
  }

  void validate() const;

 private:
  bool link_has_class_rate(LinkId l, ClassId k) const {
    auto hit = [&](const RateTerm& t) { return t.link == l && t.cls == k && term_max(t) > 0.0; };
    for (const auto& t : background)
      if (hit(t)) return true;
    for (const auto& comp : actions)
      for (const auto& ch : comp.choices)
        for (const auto& t : ch.terms)
          if (hit(t)) return true;
    return false;
  }
  bool link_has_shared_rate(LinkId l) const {
    auto hit = [&](const RateTerm& t) { return t.link == l && t.cls == RateTerm::kShared && term_max(t) > 0.0; };
    for (const auto& t : background)
      if (hit(t)) return true;
    for (const auto& comp : actions)
      for (const auto& ch : comp.choices)
        for (const auto& t : ch.terms)
          if (hit(t)) return true;
    return false;
  }

 public:
  static double term_max(const RateTerm& t) {
    if (t.state_comp < 0) return t.base;
    double m = 0.0;
    for (double v : t.per_level) m = std::max(m, v);
    return m;
  }
  static double term_min(const RateTerm& t) {
    if (t.state_comp < 0) return t.base;
    double m = t.per_level.empty() ? 0.0 : t.per_level[0];
    for (double v : t.per_level) m = std::min(m, v);
    return m;
  }
  // Mean of the term's rate over its state component.
  double term_mean(const RateTerm& t) const {
    if (t.state_comp < 0) return t.base;
    const auto& comp = states[static_cast<std::size_t>(t.state_comp)];
    double m = 0.0;
    for (std::size_t i = 0; i < comp.probs.size(); ++i) m += comp.probs[i] * t.per_level[i];
    return m;
  }
};

inline double term_rate(const NetworkSpec& spec, const RateTerm& t, const StateVec& state) {
  if (t.state_comp < 0) return t.base;
  int level = state.at(static_cast<std::size_t>(t.state_comp));
  (void)spec;
  return t.per_level.at(static_cast<std::size_t>(level));
}

inline void check_state_action(const NetworkSpec& spec, const StateVec& state,
                               const ActionVec& action) {
  if (state.size() != spec.states.size())
    throw ConfigError("state vector does not match the spec's state components");
  for (std::size_t i = 0; i < state.size(); ++i)
    if (state[i] < 0 || state[i] >= static_cast<int>(spec.states[i].probs.size()))
      throw ConfigError("unknown state level");
  if (action.size() != spec.actions.size())
    throw ConfigError("action vector does not match the spec's action components");
  for (std::size_t i = 0; i < action.size(); ++i)
    if (action[i] < 0 || action[i] >= static_cast<int>(spec.actions[i].choices.size()))
      throw ConfigError("unknown action choice");
}

inline OfferedRates offered_rates(const NetworkSpec& spec, const StateVec& state,
                                  const ActionVec& action) {
  check_state_action(spec, state, action);
  OfferedRates out;
  out.shared_total.assign(static_cast<std::size_t>(spec.num_links()), 0.0);
  out.per_class.assign(static_cast<std::size_t>(spec.num_links()),
                       std::vector<double>(static_cast<std::size_t>(spec.num_classes()), 0.0));
  auto apply = [&](const RateTerm& t) {
    double r = term_rate(spec, t, state);
    if (t.cls == RateTerm::kShared)
      out.shared_total[static_cast<std::size_t>(t.link)] += r;
    else
      out.per_class[static_cast<std::size_t>(t.link)][static_cast<std::size_t>(t.cls)] += r;
  };
  for (const auto& t : spec.background) apply(t);
  for (std::size_t c = 0; c < spec.actions.size(); ++c)
    for (const auto& t : spec.actions[c].choices[static_cast<std::size_t>(action[c])].terms)
      apply(t);
  return out;
}

// Sample one level per state component. Always consumes exactly one draw per
// component so parallel runs with shared seeds stay aligned.
inline StateVec draw_state(const NetworkSpec& spec, Rng& rng) {
  StateVec s(spec.states.size());
  for (std::size_t i = 0; i < spec.states.size(); ++i)
    s[i] = rng.categorical(spec.states[i].probs);
  return s;
}

inline void NetworkSpec::validate() const {
  if (num_nodes <= 0) throw ConfigError("network needs at least one node");
  if (classes.empty()) throw ConfigError("network needs at least one class");
  if (states.empty()) throw ConfigError("network needs at least one state component");
  if (rate_bound <= 0.0) throw ConfigError("rate bound A must be positive");
  if (size_bound <= 0.0) throw ConfigError("size bound B must be positive");

  for (const auto& l : links)
    if (l.from < 0 || l.from >= num_nodes || l.to < 0 || l.to >= num_nodes || l.from == l.to)
      throw ConfigError("link endpoints out of range");
  for (const auto& c : classes) {
    if (c.src < 0 || c.src >= num_nodes || c.dst < 0 || c.dst >= num_nodes)
      throw ConfigError("class endpoints out of range");
    if (c.src == c.dst) throw ConfigError("class source equals destination");
  }

  for (const auto& comp : states) {
    if (comp.probs.empty()) throw ConfigError("state component with no levels");
    if (!comp.values.empty() && comp.values.size() != comp.probs.size())
      throw ConfigError("state component values/probs length mismatch");
    double sum = 0.0;
    for (double p : comp.probs) {
      if (p < 0.0) throw ConfigError("negative state probability");
      sum += p;
    }
    if (std::abs(sum - 1.0) > 1e-12) throw ConfigError("state probabilities must sum to 1");
  }

  auto check_term = [&](const RateTerm& t) {
    if (t.link < 0 || t.link >= num_links()) throw ConfigError("rate term targets unknown link");
    const Link& ln = links[static_cast<std::size_t>(t.link)];
    if (t.cls == RateTerm::kShared) {
      if (ln.mode != LinkMode::SharedFifo)
        throw ConfigError("shared-total rate term on a per-class link");
    } else {
      if (ln.mode != LinkMode::PerClass)
        throw ConfigError("per-class rate term on a shared link");
      if (t.cls < 0 || t.cls >= num_classes()) throw ConfigError("rate term targets unknown class");
    }
    if (t.state_comp >= static_cast<int>(states.size()))
      throw ConfigError("rate term references unknown state component");
    if (t.state_comp >= 0 &&
        t.per_level.size() != states[static_cast<std::size_t>(t.state_comp)].probs.size())
      throw ConfigError("rate term per_level length mismatch");
    if (term_min(t) < 0.0) throw ConfigError("negative offered rate");
  };
  for (const auto& t : background) check_term(t);
  for (const auto& comp : actions) {
    if (comp.choices.empty()) throw ConfigError("action component with no choices");
    for (const auto& ch : comp.choices)
      for (const auto& t : ch.terms) check_term(t);
  }

  // Offered rates stay within [0, A]: bound the worst-case stack per target.
  std::vector<double> max_shared(links.size(), 0.0);
  std::vector<std::vector<double>> max_pc(links.size(),
                                          std::vector<double>(classes.size(), 0.0));
  auto stack = [&](const RateTerm& t) {
    if (t.cls == RateTerm::kShared)
      max_shared[static_cast<std::size_t>(t.link)] += term_max(t);
    else
      max_pc[static_cast<std::size_t>(t.link)][static_cast<std::size_t>(t.cls)] += term_max(t);
  };
  for (const auto& t : background) stack(t);
  for (const auto& comp : actions) {
    // choices within a component are exclusive; take the worst choice
    std::vector<double> worst_shared(links.size(), 0.0);
    std::vector<std::vector<double>> worst_pc(links.size(),
                                              std::vector<double>(classes.size(), 0.0));
    for (const auto& ch : comp.choices) {
      std::vector<double> cs(links.size(), 0.0);
      std::vector<std::vector<double>> cp(links.size(), std::vector<double>(classes.size(), 0.0));
      for (const auto& t : ch.terms) {
        if (t.cls == RateTerm::kShared)
          cs[static_cast<std::size_t>(t.link)] += term_max(t);
        else
          cp[static_cast<std::size_t>(t.link)][static_cast<std::size_t>(t.cls)] += term_max(t);
      }
      for (std::size_t l = 0; l < links.size(); ++l) {
        worst_shared[l] = std::max(worst_shared[l], cs[l]);
        for (std::size_t k = 0; k < classes.size(); ++k)
          worst_pc[l][k] = std::max(worst_pc[l][k], cp[l][k]);
      }
    }
    for (std::size_t l = 0; l < links.size(); ++l) {
      max_shared[l] += worst_shared[l];
      for (std::size_t k = 0; k < classes.size(); ++k) max_pc[l][k] += worst_pc[l][k];
    }
  }
  for (std::size_t l = 0; l < links.size(); ++l) {
    if (max_shared[l] > rate_bound + 1e-9) throw ConfigError("offered rate exceeds bound A");
    for (double v : max_pc[l])
      if (v > rate_bound + 1e-9) throw ConfigError("offered rate exceeds bound A");
  }

  // Every class needs a path, and the links its traffic can ride must form a
  // DAG (acyclic routes).
  for (ClassId k = 0; k < num_classes(); ++k) {
    auto usable = usable_links(k);
    // reachability of dst through usable links
    std::vector<char> reach(static_cast<std::size_t>(num_nodes), 0);
    reach[static_cast<std::size_t>(classes[static_cast<std::size_t>(k)].src)] = 1;
    bool grew = true;
    while (grew) {
      grew = false;
      for (LinkId l = 0; l < num_links(); ++l) {
        if (!usable[static_cast<std::size_t>(l)]) continue;
        const Link& ln = links[static_cast<std::size_t>(l)];
        if (reach[static_cast<std::size_t>(ln.from)] && !reach[static_cast<std::size_t>(ln.to)]) {
          reach[static_cast<std::size_t>(ln.to)] = 1;
          grew = true;
        }
      }
    }
    if (!reach[static_cast<std::size_t>(classes[static_cast<std::size_t>(k)].dst)])
      throw ConfigError("class has no route from source to destination");

    // Kahn's algorithm over the usable-link subgraph
    std::vector<int> indeg(static_cast<std::size_t>(num_nodes), 0);
    for (LinkId l = 0; l < num_links(); ++l)
      if (usable[static_cast<std::size_t>(l)])
        ++indeg[static_cast<std::size_t>(links[static_cast<std::size_t>(l)].to)];
    std::deque<NodeId> q;
    for (NodeId n = 0; n < num_nodes; ++n)
      if (indeg[static_cast<std::size_t>(n)] == 0) q.push_back(n);
    int seen = 0;
    while (!q.empty()) {
      NodeId n = q.front();
      q.pop_front();
      ++seen;
      for (LinkId l = 0; l < num_links(); ++l) {
        if (!usable[static_cast<std::size_t>(l)]) continue;
        const Link& ln = links[static_cast<std::size_t>(l)];
        if (ln.from == n && --indeg[static_cast<std::size_t>(ln.to)] == 0) q.push_back(ln.to);
      }
    }
    if (seen != num_nodes) throw ConfigError("class route subgraph contains a cycle");
  }
}

}  // namespace lnum
