#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <utility>
#include <vector>

#include "lnum/errors.hpp"
#include "lnum/lp.hpp"
#include "lnum/network.hpp"
#include "lnum/utility.hpp"

namespace lnum {

struct OracleSolution {
  std::vector<double> r_star;
  double opt = 0.0;
  double fw_gap = 0.0;
  long iterations = 0;
};

// The static problem behind the regret benchmark: maximize sum_k f_k(r_k)
// over the mean capacity region of the network intersected with [0,B]^K.
//
// The region is compiled into a small LP over mean per-(link,class) flows
// and mixture weights of the action components:
//   - shared links contribute  sum_k phi_{l,k} <= mean total capacity,
//   - per-class links contribute phi_{l,k} <= mixed offered rate,
//   - plus per-class source-rate and flow-conservation inequalities.
// State-dependent rates enter through their means, which is exact here
// because every constraint is linear in the mixed expectations.
class StaticProblem {
 public:
  StaticProblem(NetworkSpec net, UtilitySpec util)
      : net_(std::move(net)), util_(std::move(util)) {
    net_.validate();
    if (util_.num_classes() != net_.num_classes())
      throw ConfigError("utility spec and network disagree on class count");
    compile();
    eta_ = bisect_slater();
    if (eta_ <= 1e-6)
      throw NonInteriorError("capacity region has empty interior (eta <= 1e-6)");
  }

  const NetworkSpec& network() const { return net_; }
  const UtilitySpec& utility() const { return util_; }
  int num_classes() const { return net_.num_classes(); }
  double size_bound() const { return net_.size_bound; }
  double slater_slack() const { return eta_; }

  // Is r in Cap(G)? Optionally returns the mixture weights as certificate.
  bool capacity_member(const std::vector<double>& r,
                       std::vector<double>* certificate = nullptr) const {
    if (static_cast<int>(r.size()) != num_classes())
      throw ConfigError("rate vector has wrong dimension");
    LinProg lp = base_lp(nullptr);
    for (int k = 0; k < num_classes(); ++k) {
      if (r[static_cast<std::size_t>(k)] < -1e-12) return false;
      std::vector<std::pair<int, double>> row;
      for (int p : source_phis_[static_cast<std::size_t>(k)])
        row.emplace_back(n_weight_vars_ + p, 1.0);
      if (row.empty()) {
        if (r[static_cast<std::size_t>(k)] > 1e-12) return false;
        continue;
      }
      lp.add_row(std::move(row), '>', r[static_cast<std::size_t>(k)]);
    }
    std::vector<double> point;
    if (!lp_feasible(lp, certificate ? &point : nullptr)) return false;
    if (certificate) {
      certificate->assign(point.begin(),
                          point.begin() + static_cast<long>(n_weight_vars_));
    }
    return true;
  }

  // Best vertex of Cap(G) ∩ [0,B]^K for a linear objective g >= 0.
  // Used as the conditional-gradient subproblem.
  std::pair<std::vector<double>, double> linear_max(const std::vector<double>& g) const {
    const int K = num_classes();
    if (single_shared_link_) {
      // closed-form greedy: pour the link's mean capacity into classes by
      // descending weight, each capped at B
      std::vector<int> order(static_cast<std::size_t>(K));
      std::iota(order.begin(), order.end(), 0);
      std::sort(order.begin(), order.end(), [&](int x, int y) {
        double gx = g[static_cast<std::size_t>(x)], gy = g[static_cast<std::size_t>(y)];
        if (gx != gy) return gx > gy;
        return x < y;
      });
      std::vector<double> r(static_cast<std::size_t>(K), 0.0);
      double left = shared_capacity_;
      double val = 0.0;
      for (int k : order) {
        if (left <= 0.0) break;
        if (g[static_cast<std::size_t>(k)] <= 0.0) break;
        double take = std::min(net_.size_bound, left);
        r[static_cast<std::size_t>(k)] = take;
        left -= take;
        val += g[static_cast<std::size_t>(k)] * take;
      }
      return {r, val};
    }
    std::vector<int> rvars;
    LinProg lp = base_lp(&rvars);
    for (int k = 0; k < K; ++k)
      lp.objective[static_cast<std::size_t>(rvars[static_cast<std::size_t>(k)])] =
          g[static_cast<std::size_t>(k)];
    LpResult res = lp_solve(lp);
    if (res.status != LpResult::Status::Optimal)
      throw InternalError("capacity subproblem LP failed");
    std::vector<double> r(static_cast<std::size_t>(K));
    for (int k = 0; k < K; ++k)
      r[static_cast<std::size_t>(k)] = std::clamp(
          res.x[static_cast<std::size_t>(rvars[static_cast<std::size_t>(k)])], 0.0,
          net_.size_bound);
    return {r, res.objective};
  }

  double objective(const std::vector<double>& r) const {
    double v = 0.0;
    for (int k = 0; k < num_classes(); ++k)
      v += util_.evaluate(k, std::clamp(r[static_cast<std::size_t>(k)], 0.0, net_.size_bound));
    return v;
  }

  std::vector<double> gradient(const std::vector<double>& r) const {
    std::vector<double> g(r.size());
    for (int k = 0; k < num_classes(); ++k) {
      double rk = std::clamp(r[static_cast<std::size_t>(k)], 1e-12, net_.size_bound);
      double d = util_.analytic_gradient(k, rk);
      g[static_cast<std::size_t>(k)] = std::isfinite(d) ? d : 1e12;
    }
    return g;
  }

  // Conditional gradient with away steps and exact line search; stops when
  // the Frank-Wolfe gap drops below tol.
  OracleSolution solve_opt(double tol = 1e-6, long max_iter = 100000,
                           std::vector<double>* objective_history = nullptr) const {
    const int K = num_classes();
    auto [x0, v0] = linear_max(std::vector<double>(static_cast<std::size_t>(K), 1.0));
    std::vector<std::vector<double>> atoms{x0};
    std::vector<double> weights{1.0};
    std::vector<double> x = x0;

    OracleSolution sol;
    for (long iter = 1; iter <= max_iter; ++iter) {
      sol.iterations = iter;
      if (objective_history) objective_history->push_back(objective(x));
      std::vector<double> g = gradient(x);
      auto [s, smax] = linear_max(g);
      double gx = dot(g, x);
      double gap = smax - gx;
      sol.fw_gap = gap;
      if (gap <= tol) {
        sol.r_star = x;
        for (double& v : sol.r_star) v = std::clamp(v, 0.0, net_.size_bound);
        sol.opt = objective(sol.r_star);
        return sol;
      }
      // away atom: the active atom the gradient likes least
      std::size_t away = 0;
      double worst = std::numeric_limits<double>::infinity();
      for (std::size_t i = 0; i < atoms.size(); ++i) {
        double v = dot(g, atoms[i]);
        if (v < worst) {
          worst = v;
          away = i;
        }
      }
      bool fw_step = gap >= gx - worst || atoms.size() == 1 || weights[away] >= 1.0 - 1e-12;
      std::vector<double> dir(static_cast<std::size_t>(K));
      double gamma_max;
      if (fw_step) {
        for (int k = 0; k < K; ++k)
          dir[static_cast<std::size_t>(k)] = s[static_cast<std::size_t>(k)] - x[static_cast<std::size_t>(k)];
        gamma_max = 1.0;
      } else {
        for (int k = 0; k < K; ++k)
          dir[static_cast<std::size_t>(k)] =
              x[static_cast<std::size_t>(k)] - atoms[away][static_cast<std::size_t>(k)];
        gamma_max = weights[away] / (1.0 - weights[away]);
      }
      double gamma = line_search(x, dir, gamma_max);
      if (gamma <= 0.0 && !fw_step) {
        // away direction exhausted; drop the atom and retry
        drop_atom(atoms, weights, away, x);
        continue;
      }
      for (int k = 0; k < K; ++k) x[static_cast<std::size_t>(k)] += gamma * dir[static_cast<std::size_t>(k)];
      if (fw_step) {
        for (double& w : weights) w *= (1.0 - gamma);
        merge_atom(atoms, weights, s, gamma);
      } else {
        for (double& w : weights) w *= (1.0 + gamma);
        weights[away] -= gamma;
      }
      prune_atoms(atoms, weights);
      if (iter % 64 == 0) refresh(atoms, weights, x);
    }
    throw ConvergenceError("frank-wolfe did not reach tolerance", sol.fw_gap);
  }

  // Independent grid oracle for validating solve_opt. Downward closure plus
  // nondecreasing utilities make the best last coordinate for any prefix the
  // largest feasible one, found by bisection over grid values.
  std::pair<std::vector<double>, double> brute_force_opt(double grid_step) const {
    const int K = num_classes();
    if (K > 3) throw ResourceError("brute force supports at most 3 classes");
    if (grid_step <= 0.0) throw ConfigError("grid step must be positive");
    const double B = net_.size_bound;
    long npts = static_cast<long>(std::floor(B / grid_step + 1e-9)) + 1;
    long prefixes = 1;
    for (int k = 0; k + 1 < K; ++k) prefixes *= npts;
    if (prefixes > 200000) throw ResourceError("brute-force grid too large");

    std::vector<double> best(static_cast<std::size_t>(K), 0.0);
    double best_val = objective(best);
    std::vector<double> r(static_cast<std::size_t>(K), 0.0);

    auto scan = [&](auto&& self, int depth) -> void {
      if (depth == K - 1) {
        r[static_cast<std::size_t>(depth)] = 0.0;
        if (!capacity_member(r)) return;
        long lo = 0, hi = npts - 1;
        r[static_cast<std::size_t>(depth)] = std::min(B, hi * grid_step);
        if (!capacity_member(r)) {
          while (hi - lo > 1) {
            long mid = (lo + hi) / 2;
            r[static_cast<std::size_t>(depth)] = std::min(B, mid * grid_step);
            if (capacity_member(r))
              lo = mid;
            else
              hi = mid;
          }
          r[static_cast<std::size_t>(depth)] = std::min(B, lo * grid_step);
        }
        double v = objective(r);
        if (v > best_val) {
          best_val = v;
          best = r;
        }
        return;
      }
      for (long i = 0; i < npts; ++i) {
        r[static_cast<std::size_t>(depth)] = std::min(B, i * grid_step);
        // prune: if this prefix (rest zero) left the region, larger values will too
        for (int k = depth + 1; k < K; ++k) r[static_cast<std::size_t>(k)] = 0.0;
        if (!capacity_member(r)) break;
        self(self, depth + 1);
      }
    };
    scan(scan, 0);
    return {best, best_val};
  }

 private:
  static double dot(const std::vector<double>& a, const std::vector<double>& b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
  }

  double line_search(const std::vector<double>& x, const std::vector<double>& d,
                     double gamma_max) const {
    auto deriv = [&](double gamma) {
      double s = 0.0;
      for (int k = 0; k < num_classes(); ++k) {
        double dk = d[static_cast<std::size_t>(k)];
        if (dk == 0.0) continue;
        double rk = std::clamp(x[static_cast<std::size_t>(k)] + gamma * dk, 1e-12, net_.size_bound);
        double fp = util_.analytic_gradient(k, rk);
        s += (std::isfinite(fp) ? fp : 1e12) * dk;
      }
      return s;
    };
    if (deriv(0.0) <= 0.0) return 0.0;
    if (deriv(gamma_max) >= 0.0) return gamma_max;
    double lo = 0.0, hi = gamma_max;
    for (int it = 0; it < 100 && hi - lo > 1e-15 * std::max(1.0, gamma_max); ++it) {
      double mid = 0.5 * (lo + hi);
      if (deriv(mid) > 0.0)
        lo = mid;
      else
        hi = mid;
    }
    return 0.5 * (lo + hi);
  }

  static void merge_atom(std::vector<std::vector<double>>& atoms, std::vector<double>& weights,
                         const std::vector<double>& s, double w) {
    for (std::size_t i = 0; i < atoms.size(); ++i) {
      double diff = 0.0;
      for (std::size_t k = 0; k < s.size(); ++k) diff = std::max(diff, std::abs(atoms[i][k] - s[k]));
      if (diff < 1e-12) {
        weights[i] += w;
        return;
      }
    }
    atoms.push_back(s);
    weights.push_back(w);
  }

  static void prune_atoms(std::vector<std::vector<double>>& atoms, std::vector<double>& weights) {
    for (std::size_t i = atoms.size(); i-- > 0;) {
      if (weights[i] < 1e-14) {
        atoms.erase(atoms.begin() + static_cast<long>(i));
        weights.erase(weights.begin() + static_cast<long>(i));
      }
    }
  }

  static void drop_atom(std::vector<std::vector<double>>& atoms, std::vector<double>& weights,
                        std::size_t i, std::vector<double>& x) {
    atoms.erase(atoms.begin() + static_cast<long>(i));
    weights.erase(weights.begin() + static_cast<long>(i));
    double total = 0.0;
    for (double w : weights) total += w;
    if (total <= 0.0) return;
    for (double& w : weights) w /= total;
    refresh(atoms, weights, x);
  }

  static void refresh(const std::vector<std::vector<double>>& atoms,
                      const std::vector<double>& weights, std::vector<double>& x) {
    std::fill(x.begin(), x.end(), 0.0);
    for (std::size_t i = 0; i < atoms.size(); ++i)
      for (std::size_t k = 0; k < x.size(); ++k) x[k] += weights[i] * atoms[i][k];
  }

  double bisect_slater() const {
    const int K = num_classes();
    auto member_uniform = [&](double t) {
      return capacity_member(std::vector<double>(static_cast<std::size_t>(K), t));
    };
    if (!member_uniform(1e-6)) return 0.0;
    double lo = 1e-6, hi = 1.0;
    while (member_uniform(hi)) {
      lo = hi;
      hi *= 2.0;
      if (hi > 1e9) throw InternalError("capacity region looks unbounded");
    }
    while (hi - lo > 1e-6) {
      double mid = 0.5 * (lo + hi);
      if (member_uniform(mid))
        lo = mid;
      else
        hi = mid;
    }
    return lo;
  }

  // ---- compiled LP skeleton ----

  struct CapCoef {
    int avar;
    double coef;
  };
  struct PhiCap {  // phi_{l,k} <= const + sum coef*a  (per-class links)
    int phi;
    double cnst;
    std::vector<CapCoef> coefs;
  };
  struct SharedCap {  // sum_k phi_{l,k} <= const + sum coef*a
    std::vector<int> phis;
    double cnst;
    std::vector<CapCoef> coefs;
  };
  struct RatioCap {  // sum_c phi_c / rate_c <= 1 (collapsed single-term component)
    std::vector<std::pair<int, double>> entries;  // (phi, 1/rate)
  };
  struct WeightGroup {
    int first;
    int count;
    double rhs;
  };

  void compile() {
    const int K = net_.num_classes();
    const int L = net_.num_links();

    std::vector<std::vector<char>> usable(static_cast<std::size_t>(K));
    for (int k = 0; k < K; ++k) usable[static_cast<std::size_t>(k)] = net_.usable_links(k);

    phi_index_.assign(static_cast<std::size_t>(L),
                      std::vector<int>(static_cast<std::size_t>(K), -1));
    int n_phi = 0;
    for (int l = 0; l < L; ++l)
      for (int k = 0; k < K; ++k)
        if (usable[static_cast<std::size_t>(k)][static_cast<std::size_t>(l)])
          phi_index_[static_cast<std::size_t>(l)][static_cast<std::size_t>(k)] = n_phi++;
    n_phi_vars_ = n_phi;

    // background means
    std::vector<double> bg_shared(static_cast<std::size_t>(L), 0.0);
    std::vector<std::vector<double>> bg_pc(static_cast<std::size_t>(L),
                                           std::vector<double>(static_cast<std::size_t>(K), 0.0));
    for (const auto& t : net_.background) {
      if (t.cls == RateTerm::kShared)
        bg_shared[static_cast<std::size_t>(t.link)] += net_.term_mean(t);
      else
        bg_pc[static_cast<std::size_t>(t.link)][static_cast<std::size_t>(t.cls)] += net_.term_mean(t);
    }

    // action components: collapse simple ones, otherwise allocate weights
    n_weight_vars_ = 0;
    std::vector<PhiCap> pc_caps;
    std::vector<std::vector<CapCoef>> pc_extra(static_cast<std::size_t>(n_phi));
    std::vector<std::vector<CapCoef>> shared_extra(static_cast<std::size_t>(L));
    for (const auto& comp : net_.actions) {
      int sc = -1;
      bool mixed_state = false;
      for (const auto& ch : comp.choices)
        for (const auto& t : ch.terms) {
          if (t.state_comp < 0) continue;
          if (sc < 0)
            sc = t.state_comp;
          else if (sc != t.state_comp)
            mixed_state = true;
        }
      if (mixed_state)
        throw ConfigError("action component mixes several state components; not supported");

      // collapse: state-independent, each choice has at most one term, all
      // per-class, distinct targets
      bool collapsible = sc < 0;
      std::vector<std::pair<int, double>> entries;
      if (collapsible) {
        std::vector<char> seen(static_cast<std::size_t>(n_phi), 0);
        for (const auto& ch : comp.choices) {
          if (ch.terms.empty()) continue;  // idle choice
          if (ch.terms.size() > 1 || ch.terms[0].cls == RateTerm::kShared ||
              ch.terms[0].base <= 0.0) {
            collapsible = false;
            break;
          }
          int p = phi_index_[static_cast<std::size_t>(ch.terms[0].link)]
                            [static_cast<std::size_t>(ch.terms[0].cls)];
          if (p < 0 || seen[static_cast<std::size_t>(p)]) {
            collapsible = false;
            break;
          }
          seen[static_cast<std::size_t>(p)] = 1;
          entries.emplace_back(p, 1.0 / ch.terms[0].base);
        }
      }
      if (collapsible) {
        if (!entries.empty()) ratio_caps_.push_back(RatioCap{std::move(entries)});
        continue;
      }

      int levels = sc < 0 ? 1 : static_cast<int>(net_.states[static_cast<std::size_t>(sc)].probs.size());
      for (int lev = 0; lev < levels; ++lev) {
        double p = sc < 0 ? 1.0 : net_.states[static_cast<std::size_t>(sc)].probs[static_cast<std::size_t>(lev)];
        WeightGroup grp{n_weight_vars_, static_cast<int>(comp.choices.size()), p};
        for (std::size_t c = 0; c < comp.choices.size(); ++c) {
          int avar = n_weight_vars_ + static_cast<int>(c);
          for (const auto& t : comp.choices[c].terms) {
            double rate = t.state_comp < 0
                              ? t.base
                              : t.per_level[static_cast<std::size_t>(lev)];
            if (rate == 0.0) continue;
            if (t.cls == RateTerm::kShared) {
              shared_extra[static_cast<std::size_t>(t.link)].push_back(CapCoef{avar, rate});
            } else {
              int idx = phi_index_[static_cast<std::size_t>(t.link)][static_cast<std::size_t>(t.cls)];
              if (idx >= 0) pc_extra[static_cast<std::size_t>(idx)].push_back(CapCoef{avar, rate});
            }
          }
        }
        weight_groups_.push_back(grp);
        n_weight_vars_ += grp.count;
      }
    }

    // per-class caps
    for (int l = 0; l < L; ++l) {
      if (net_.links[static_cast<std::size_t>(l)].mode != LinkMode::PerClass) continue;
      for (int k = 0; k < K; ++k) {
        int p = phi_index_[static_cast<std::size_t>(l)][static_cast<std::size_t>(k)];
        if (p < 0) continue;
        PhiCap cap;
        cap.phi = p;
        cap.cnst = bg_pc[static_cast<std::size_t>(l)][static_cast<std::size_t>(k)];
        cap.coefs = pc_extra[static_cast<std::size_t>(p)];
        bool in_ratio = false;
        for (const auto& rc : ratio_caps_)
          for (const auto& e : rc.entries)
            if (e.first == p) in_ratio = true;
        if (in_ratio && cap.cnst == 0.0 && cap.coefs.empty()) continue;  // bounded by the ratio row
        phi_caps_.push_back(std::move(cap));
      }
    }
    // shared caps
    for (int l = 0; l < L; ++l) {
      if (net_.links[static_cast<std::size_t>(l)].mode != LinkMode::SharedFifo) continue;
      SharedCap cap;
      cap.cnst = bg_shared[static_cast<std::size_t>(l)];
      cap.coefs = shared_extra[static_cast<std::size_t>(l)];
      for (int k = 0; k < K; ++k) {
        int p = phi_index_[static_cast<std::size_t>(l)][static_cast<std::size_t>(k)];
        if (p >= 0) cap.phis.push_back(p);
      }
      if (!cap.phis.empty()) shared_caps_.push_back(std::move(cap));
    }

    // source outflow and conservation index lists
    source_phis_.assign(static_cast<std::size_t>(K), {});
    for (int k = 0; k < K; ++k) {
      NodeId s = net_.classes[static_cast<std::size_t>(k)].src;
      for (int l = 0; l < L; ++l)
        if (net_.links[static_cast<std::size_t>(l)].from == s) {
          int p = phi_index_[static_cast<std::size_t>(l)][static_cast<std::size_t>(k)];
          if (p >= 0) source_phis_[static_cast<std::size_t>(k)].push_back(p);
        }
      for (NodeId i = 0; i < net_.num_nodes; ++i) {
        if (i == s || i == net_.classes[static_cast<std::size_t>(k)].dst) continue;
        std::vector<int> in, out;
        for (int l = 0; l < L; ++l) {
          int p = phi_index_[static_cast<std::size_t>(l)][static_cast<std::size_t>(k)];
          if (p < 0) continue;
          if (net_.links[static_cast<std::size_t>(l)].to == i) in.push_back(p);
          if (net_.links[static_cast<std::size_t>(l)].from == i) out.push_back(p);
        }
        if (!in.empty()) conservation_.push_back({in, out});
      }
    }

    // closed-form shortcut detection: one shared link carrying every class
    single_shared_link_ = false;
    if (net_.num_links() == 1 && net_.actions.empty() &&
        net_.links[0].mode == LinkMode::SharedFifo) {
      bool all = true;
      for (const auto& c : net_.classes)
        if (c.src != net_.links[0].from || c.dst != net_.links[0].to) all = false;
      if (all) {
        single_shared_link_ = true;
        shared_capacity_ = bg_shared[0];
      }
    }
  }

  // Shared constraint skeleton. With rvars: adds r variables (r_k <= B and
  // r_k <= source outflow); without: caller appends fixed-rate source rows.
  LinProg base_lp(std::vector<int>* rvars) const {
    LinProg lp;
    for (int i = 0; i < n_weight_vars_; ++i) lp.add_var();
    int phi0 = n_weight_vars_;
    for (int i = 0; i < n_phi_vars_; ++i) lp.add_var();

    for (const auto& g : weight_groups_) {
      std::vector<std::pair<int, double>> row;
      for (int c = 0; c < g.count; ++c) row.emplace_back(g.first + c, 1.0);
      lp.add_row(std::move(row), '=', g.rhs);
    }
    for (const auto& cap : phi_caps_) {
      std::vector<std::pair<int, double>> row{{phi0 + cap.phi, 1.0}};
      for (const auto& c : cap.coefs) row.emplace_back(c.avar, -c.coef);
      lp.add_row(std::move(row), '<', cap.cnst);
    }
    for (const auto& cap : shared_caps_) {
      std::vector<std::pair<int, double>> row;
      for (int p : cap.phis) row.emplace_back(phi0 + p, 1.0);
      for (const auto& c : cap.coefs) row.emplace_back(c.avar, -c.coef);
      lp.add_row(std::move(row), '<', cap.cnst);
    }
    for (const auto& rc : ratio_caps_) {
      std::vector<std::pair<int, double>> row;
      for (const auto& e : rc.entries) row.emplace_back(phi0 + e.first, e.second);
      lp.add_row(std::move(row), '<', 1.0);
    }
    for (const auto& cons : conservation_) {
      std::vector<std::pair<int, double>> row;
      for (int p : cons.first) row.emplace_back(phi0 + p, 1.0);
      for (int p : cons.second) row.emplace_back(phi0 + p, -1.0);
      lp.add_row(std::move(row), '<', 0.0);
    }
    if (rvars) {
      rvars->clear();
      for (int k = 0; k < num_classes(); ++k) {
        int rv = lp.add_var();
        rvars->push_back(rv);
        std::vector<std::pair<int, double>> row{{rv, 1.0}};
        for (int p : source_phis_[static_cast<std::size_t>(k)]) row.emplace_back(phi0 + p, -1.0);
        lp.add_row(std::move(row), '<', 0.0);
        lp.add_row({{rv, 1.0}}, '<', net_.size_bound);
      }
    }
    return lp;
  }

  NetworkSpec net_;
  UtilitySpec util_;
  double eta_ = 0.0;

  int n_weight_vars_ = 0;
  int n_phi_vars_ = 0;
  std::vector<WeightGroup> weight_groups_;
  std::vector<std::vector<int>> phi_index_;
  std::vector<PhiCap> phi_caps_;
  std::vector<SharedCap> shared_caps_;
  std::vector<RatioCap> ratio_caps_;
  std::vector<std::vector<int>> source_phis_;
  std::vector<std::pair<std::vector<int>, std::vector<int>>> conservation_;
  bool single_shared_link_ = false;
  double shared_capacity_ = 0.0;
};

// Water-filling heuristic for bipartite (dispatcher -> server -> sink)
// subproblems: classes by descending weight grab capacity from their servers.
// Exact on complete bipartite connectivity; a lower bound in general, so it
// serves as a cross-check, not as the solver.
inline double greedy_bipartite_linear_max(const std::vector<double>& g,
                                          const std::vector<std::vector<int>>& class_servers,
                                          std::vector<double> server_caps, double size_bound) {
  std::vector<int> order(g.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](int x, int y) {
    if (g[static_cast<std::size_t>(x)] != g[static_cast<std::size_t>(y)])
      return g[static_cast<std::size_t>(x)] > g[static_cast<std::size_t>(y)];
    return x < y;
  });
  double val = 0.0;
  for (int k : order) {
    if (g[static_cast<std::size_t>(k)] <= 0.0) break;
    double want = size_bound;
    for (int m : class_servers[static_cast<std::size_t>(k)]) {
      if (want <= 0.0) break;
      double take = std::min(want, server_caps[static_cast<std::size_t>(m)]);
      server_caps[static_cast<std::size_t>(m)] -= take;
      want -= take;
    }
    val += g[static_cast<std::size_t>(k)] * (size_bound - want);
  }
  return val;
}

}  // namespace lnum
