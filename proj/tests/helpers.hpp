#pragma once

// Small spec builders shared by the test files.

#include <vector>

#include "lnum/network.hpp"
#include "lnum/rng.hpp"
#include "lnum/utility.hpp"

namespace testutil {

using namespace lnum;

// nodes 0 -> 1, one per-class link with a constant rate per class
inline NetworkSpec single_link(std::vector<double> class_rates, double B = 10.0) {
  NetworkSpec spec;
  spec.num_nodes = 2;
  spec.links.push_back(Link{0, 1, LinkMode::PerClass});
  double maxr = 0.0;
  for (std::size_t k = 0; k < class_rates.size(); ++k) {
    spec.classes.push_back(TrafficClass{0, 1});
    RateTerm t;
    t.link = 0;
    t.cls = static_cast<int>(k);
    t.base = class_rates[k];
    if (t.base > 0.0) spec.background.push_back(t);
    maxr = std::max(maxr, class_rates[k]);
  }
  spec.states.push_back(StateComponent{{1.0}, {0.0}});
  spec.rate_bound = std::max(maxr, 1e-9);
  spec.size_bound = B;
  spec.validate();
  return spec;
}

// nodes 0 -> 1 -> 2, single class, per-class links with constant rates
inline NetworkSpec line3(double r01, double r12, double B = 10.0) {
  NetworkSpec spec;
  spec.num_nodes = 3;
  spec.links.push_back(Link{0, 1, LinkMode::PerClass});
  spec.links.push_back(Link{1, 2, LinkMode::PerClass});
  spec.classes.push_back(TrafficClass{0, 2});
  spec.states.push_back(StateComponent{{1.0}, {0.0}});
  RateTerm a;
  a.link = 0;
  a.cls = 0;
  a.base = r01;
  RateTerm b;
  b.link = 1;
  b.cls = 0;
  b.base = r12;
  spec.background.push_back(a);
  spec.background.push_back(b);
  spec.rate_bound = std::max(r01, r12);
  spec.size_bound = B;
  spec.validate();
  return spec;
}

// Random acyclic multi-hop spec: nodes ordered 0..n-1, forward links only,
// enumerated states and one enumerated action component with random
// per-(state, action) rate tables.
inline NetworkSpec random_dag_spec(Rng& rng, int num_nodes = 6, int num_classes = 2,
                                   int num_states = 2, int num_actions = 3, double B = 2.0) {
  NetworkSpec spec;
  spec.num_nodes = num_nodes;
  // a forward path through all nodes guarantees s->d routes
  for (int i = 0; i + 1 < num_nodes; ++i) spec.links.push_back(Link{i, i + 1, LinkMode::PerClass});
  // plus a few random forward shortcuts
  for (int i = 0; i < num_nodes; ++i)
    for (int j = i + 2; j < num_nodes; ++j)
      if (rng.next_double() < 0.3) spec.links.push_back(Link{i, j, LinkMode::PerClass});

  for (int k = 0; k < num_classes; ++k) {
    int s = static_cast<int>(rng.next_double() * (num_nodes - 1));
    int d = s + 1 + static_cast<int>(rng.next_double() * (num_nodes - s - 1));
    spec.classes.push_back(TrafficClass{s, d});
  }

  StateComponent sc;
  sc.probs.assign(static_cast<std::size_t>(num_states), 1.0 / num_states);
  sc.values.assign(static_cast<std::size_t>(num_states), 0.0);
  spec.states.push_back(sc);

  ActionComponent comp;
  for (int a = 0; a < num_actions; ++a) {
    ActionChoice ch;
    for (int l = 0; l < spec.num_links(); ++l)
      for (int k = 0; k < num_classes; ++k)
        if (rng.next_double() < 0.7) {
          RateTerm t;
          t.link = l;
          t.cls = k;
          t.state_comp = 0;
          t.per_level.resize(static_cast<std::size_t>(num_states));
          for (int w = 0; w < num_states; ++w)
            t.per_level[static_cast<std::size_t>(w)] = rng.uniform(0.0, 1.5);
          ch.terms.push_back(std::move(t));
        }
    comp.choices.push_back(std::move(ch));
  }
  spec.actions.push_back(std::move(comp));
  spec.rate_bound = 16.0;
  spec.size_bound = B;
  spec.validate();
  return spec;
}

}  // namespace testutil
