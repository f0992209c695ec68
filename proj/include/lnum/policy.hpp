#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <memory>
#include <string>
#include <vector>

#include "lnum/errors.hpp"
#include "lnum/network.hpp"
#include "lnum/sim.hpp"

namespace lnum {

// Knobs of the gradient-sampling max-weight update:
//   r̂ <- Proj_[δ, B-δ][ r̂ + (V·∇̂f - Q)/α ]
struct PolicyParams {
  double V = 1.0;      // utility weight
  double alpha = 1.0;  // inverse step size
  double delta = 0.1;  // two-point sampling radius
  double B = 1.0;      // job size bound
  int K = 1;
  double eta = 0.0;  // Slater slack, only used to derive alpha

  void validate() const {
    if (!(delta > 0.0)) throw ConfigError("delta must be positive");
    if (!(2.0 * delta <= B)) throw ConfigError("need 2*delta <= B");
    if (!(alpha > 0.0)) throw ConfigError("alpha must be positive");
    if (!(V > 0.0)) throw ConfigError("V must be positive");
    if (K < 1) throw ConfigError("need at least one class");
  }
};

// alpha = 2K*sqrt(T)/eta, V = T^{1/4}, delta = T^{-1/2}
inline PolicyParams theorem2_params(long T, int K, double eta, double B) {
  if (T < 1) throw ConfigError("horizon must be at least 1");
  if (!(eta > 0.0)) throw DomainError("eta must be positive");
  PolicyParams p;
  p.K = K;
  p.B = B;
  p.eta = eta;
  double sqrtT = std::sqrt(static_cast<double>(T));
  p.alpha = 2.0 * K * sqrtT / eta;
  p.V = std::pow(static_cast<double>(T), 0.25);
  p.delta = 1.0 / sqrtT;
  p.validate();
  return p;
}

// Experimental schedule: alpha = 50*sqrt(T), V = T^{1/4}, delta = 1/sqrt(T)
inline PolicyParams section6_params(long T, int K, double B) {
  if (T < 1) throw ConfigError("horizon must be at least 1");
  PolicyParams p;
  p.K = K;
  p.B = B;
  double sqrtT = std::sqrt(static_cast<double>(T));
  p.alpha = 50.0 * sqrtT;
  p.V = std::pow(static_cast<double>(T), 0.25);
  p.delta = 1.0 / sqrtT;
  p.validate();
  return p;
}

// No-delay schedule with unit constants: alpha = T, V = sqrt(T),
// delta = 1/sqrt(T). The constants are not calibrated.
inline PolicyParams gsmw_no_delay_params(long T, int K, double B) {
  if (T < 1) throw ConfigError("horizon must be at least 1");
  PolicyParams p;
  p.K = K;
  p.B = B;
  p.alpha = static_cast<double>(T);
  p.V = std::sqrt(static_cast<double>(T));
  p.delta = 1.0 / std::sqrt(static_cast<double>(T));
  p.validate();
  return p;
}

// Two-point central difference.
inline double gradient_estimate(double obs_plus, double obs_minus, double delta) {
  return (obs_plus - obs_minus) / (2.0 * delta);
}

// One projected step of the virtual job-size variable.
inline double gsmw_update(double r_hat, double grad, double q_src, const PolicyParams& p) {
  double next = r_hat + (p.V * grad - q_src) / p.alpha;
  return std::clamp(next, p.delta, p.B - p.delta);
}

// argmax_x sum over links/classes of rate * (Q_from - Q_to). The action
// components are additive over disjoint choice sets, so the argmax is taken
// per component; ties break to the lowest choice index. Shared links weigh
// in with their best nonnegative class differential.
inline ActionVec max_weight_action(const NetworkSpec& spec, const StateVec& state,
                                   const SimState& sim) {
  if (state.size() != spec.states.size()) throw ConfigError("state/spec mismatch");
  ActionVec action(spec.actions.size(), 0);
  auto term_weight = [&](const RateTerm& t) {
    double rate = term_rate(spec, t, state);
    if (rate <= 0.0) return 0.0;
    const Link& ln = spec.links[static_cast<std::size_t>(t.link)];
    if (t.cls != RateTerm::kShared) {
      double qf = sim.queue(ln.from, t.cls);
      double qt = ln.to == spec.classes[static_cast<std::size_t>(t.cls)].dst
                      ? 0.0
                      : sim.queue(ln.to, t.cls);
      return rate * (qf - qt);
    }
    double best = 0.0;
    for (ClassId k = 0; k < spec.num_classes(); ++k) {
      double qt = ln.to == spec.classes[static_cast<std::size_t>(k)].dst ? 0.0 : sim.queue(ln.to, k);
      best = std::max(best, sim.queue(ln.from, k) - qt);
    }
    return rate * best;
  };
  for (std::size_t c = 0; c < spec.actions.size(); ++c) {
    const auto& comp = spec.actions[c];
    if (comp.choices.empty()) throw ConfigError("empty action component");
    int best_idx = 0;
    double best_w = -std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < comp.choices.size(); ++i) {
      double w = 0.0;
      for (const auto& t : comp.choices[i].terms) w += term_weight(t);
      if (w > best_w + 1e-12) {
        best_w = w;
        best_idx = static_cast<int>(i);
      }
    }
    action[c] = best_idx;
  }
  return action;
}

struct Observation {
  long job = -1;
  double value = 0.0;
};

// One GSMW instance in the reservoir. FRESH means every observation from its
// last injection group has arrived (gradients cached); STALE means it is
// still waiting.
struct InstanceRecord {
  enum class Status { Fresh, Stale };
  long id = 0;
  Status status = Status::Stale;
  std::vector<double> r_hat;            // in [delta, B-delta]
  std::vector<double> grads;            // cached central differences
  std::vector<long> job_plus;           // outstanding ids per class
  std::vector<long> job_minus;
  std::vector<double> obs_plus;
  std::vector<double> obs_minus;
  std::vector<char> got_plus;
  std::vector<char> got_minus;
  int missing = 0;
  long created_at = 0;

  bool fresh() const { return status == Status::Fresh; }
};

// Decision layer interface. The harness calls plan() once per policy step
// (every second engine slot), binds the injected job ids via note_injected(),
// and routes delivered observations back through collect_feedback().
class Policy {
 public:
  virtual ~Policy() = default;
  virtual std::vector<InjectionRequest> plan(long step, const std::vector<double>& q_src) = 0;
  virtual void note_injected(const std::vector<long>& ids) = 0;
  virtual void collect_feedback(const std::vector<Observation>& obs) = 0;
  // virtual sizes behind the most recent injections
  virtual const std::vector<double>& r_hat() const = 0;
  virtual long instances_created() const = 0;
  virtual const std::vector<InstanceRecord>* reservoir() const { return nullptr; }
};

// Gradient-sampling max-weight. Injects r̂±δ each step and performs the
// projected update once the feedback from its last update point is in; with
// immediate feedback that is the no-delay algorithm, with queueing delay it
// is the episodic baseline (r̂ frozen until the gated pair returns).
class GsmwPolicy : public Policy {
 public:
  GsmwPolicy(PolicyParams params) : p_(params) {
    p_.validate();
    r_hat_.assign(static_cast<std::size_t>(p_.K), p_.delta);
    grads_.assign(static_cast<std::size_t>(p_.K), 0.0);
  }

  std::vector<InjectionRequest> plan(long step, const std::vector<double>& q_src) override {
    (void)step;
    if (have_grads_) {
      for (int k = 0; k < p_.K; ++k)
        r_hat_[static_cast<std::size_t>(k)] = gsmw_update(
            r_hat_[static_cast<std::size_t>(k)], grads_[static_cast<std::size_t>(k)],
            q_src[static_cast<std::size_t>(k)], p_);
      have_grads_ = false;
      gate_open_ = true;  // next injection group becomes the gated pair
    }
    std::vector<InjectionRequest> req;
    req.reserve(static_cast<std::size_t>(2 * p_.K));
    for (int k = 0; k < p_.K; ++k) {
      double r = r_hat_[static_cast<std::size_t>(k)];
      req.push_back(InjectionRequest{k, r + p_.delta, +1, 0});
      req.push_back(InjectionRequest{k, r - p_.delta, -1, 0});
    }
    return req;
  }

  void note_injected(const std::vector<long>& ids) override {
    if (static_cast<int>(ids.size()) != 2 * p_.K)
      throw InternalError("gsmw: unexpected injection count");
    long group = next_group_++;
    for (int k = 0; k < p_.K; ++k) {
      owner_[ids[static_cast<std::size_t>(2 * k)]] = Slot{group, k, +1};
      owner_[ids[static_cast<std::size_t>(2 * k + 1)]] = Slot{group, k, -1};
    }
    if (gate_open_ || group == 0) {
      gated_group_ = group;
      gate_open_ = false;
      got_.assign(static_cast<std::size_t>(2 * p_.K), 0);
      obs_plus_.assign(static_cast<std::size_t>(p_.K), 0.0);
      obs_minus_.assign(static_cast<std::size_t>(p_.K), 0.0);
      missing_ = 2 * p_.K;
    }
  }

  void collect_feedback(const std::vector<Observation>& obs) override {
    for (const auto& o : obs) {
      auto it = owner_.find(o.job);
      if (it == owner_.end()) throw InternalError("gsmw: feedback for unknown job");
      const Slot& s = it->second;
      if (s.group != gated_group_ || missing_ == 0) continue;
      std::size_t idx = static_cast<std::size_t>(2 * s.cls + (s.sign > 0 ? 0 : 1));
      if (got_[idx]) continue;
      got_[idx] = 1;
      (s.sign > 0 ? obs_plus_ : obs_minus_)[static_cast<std::size_t>(s.cls)] = o.value;
      if (--missing_ == 0) {
        for (int k = 0; k < p_.K; ++k)
          grads_[static_cast<std::size_t>(k)] =
              gradient_estimate(obs_plus_[static_cast<std::size_t>(k)],
                                obs_minus_[static_cast<std::size_t>(k)], p_.delta);
        have_grads_ = true;
      }
    }
  }

  const std::vector<double>& r_hat() const override { return r_hat_; }
  long instances_created() const override { return 1; }
  const std::vector<double>& cached_gradients() const { return grads_; }

 private:
  struct Slot {
    long group;
    int cls;
    int sign;
  };
  PolicyParams p_;
  std::vector<double> r_hat_, grads_, obs_plus_, obs_minus_;
  std::vector<char> got_;
  std::map<long, Slot> owner_;
  long next_group_ = 0;
  long gated_group_ = -1;
  int missing_ = 0;
  bool have_grads_ = false;
  bool gate_open_ = false;
};

// Parallel-instance GSMW: a reservoir of GSMW instances, one invoked per
// step. A FRESH instance is updated and re-injected (then goes STALE); if
// none is FRESH a new instance starts at r̂ = δ.
class PgsmwPolicy : public Policy {
 public:
  PgsmwPolicy(PolicyParams params) : p_(params) { p_.validate(); }

  std::vector<InjectionRequest> plan(long step, const std::vector<double>& q_src) override {
    int invoke = -1;
    for (std::size_t i = 0; i < reservoir_.size(); ++i)
      if (reservoir_[i].fresh()) {  // lowest id first
        invoke = static_cast<int>(i);
        break;
      }
    if (invoke >= 0) {
      InstanceRecord& inst = reservoir_[static_cast<std::size_t>(invoke)];
      for (int k = 0; k < p_.K; ++k)
        inst.r_hat[static_cast<std::size_t>(k)] = gsmw_update(
            inst.r_hat[static_cast<std::size_t>(k)], inst.grads[static_cast<std::size_t>(k)],
            q_src[static_cast<std::size_t>(k)], p_);
      inst.status = InstanceRecord::Status::Stale;
      invoked_ = invoke;
    } else {
      InstanceRecord inst;
      inst.id = static_cast<long>(reservoir_.size()) + 1;
      inst.created_at = step;
      inst.r_hat.assign(static_cast<std::size_t>(p_.K), p_.delta);
      inst.grads.assign(static_cast<std::size_t>(p_.K), 0.0);
      reservoir_.push_back(std::move(inst));
      invoked_ = static_cast<int>(reservoir_.size()) - 1;
    }
    const auto& r = reservoir_[static_cast<std::size_t>(invoked_)].r_hat;
    std::vector<InjectionRequest> req;
    req.reserve(static_cast<std::size_t>(2 * p_.K));
    for (int k = 0; k < p_.K; ++k) {
      long inst_id = reservoir_[static_cast<std::size_t>(invoked_)].id;
      req.push_back(InjectionRequest{k, r[static_cast<std::size_t>(k)] + p_.delta, +1, inst_id});
      req.push_back(InjectionRequest{k, r[static_cast<std::size_t>(k)] - p_.delta, -1, inst_id});
    }
    return req;
  }

  void note_injected(const std::vector<long>& ids) override {
    if (static_cast<int>(ids.size()) != 2 * p_.K)
      throw InternalError("pgsmw: unexpected injection count");
    InstanceRecord& inst = reservoir_[static_cast<std::size_t>(invoked_)];
    inst.job_plus.assign(static_cast<std::size_t>(p_.K), -1);
    inst.job_minus.assign(static_cast<std::size_t>(p_.K), -1);
    inst.obs_plus.assign(static_cast<std::size_t>(p_.K), 0.0);
    inst.obs_minus.assign(static_cast<std::size_t>(p_.K), 0.0);
    inst.got_plus.assign(static_cast<std::size_t>(p_.K), 0);
    inst.got_minus.assign(static_cast<std::size_t>(p_.K), 0);
    inst.missing = 2 * p_.K;
    for (int k = 0; k < p_.K; ++k) {
      inst.job_plus[static_cast<std::size_t>(k)] = ids[static_cast<std::size_t>(2 * k)];
      inst.job_minus[static_cast<std::size_t>(k)] = ids[static_cast<std::size_t>(2 * k + 1)];
      owner_[ids[static_cast<std::size_t>(2 * k)]] = Slot{invoked_, k, +1};
      owner_[ids[static_cast<std::size_t>(2 * k + 1)]] = Slot{invoked_, k, -1};
    }
  }

  void collect_feedback(const std::vector<Observation>& obs) override {
    for (const auto& o : obs) {
      auto it = owner_.find(o.job);
      if (it == owner_.end()) throw InternalError("pgsmw: feedback for unknown job");
      const Slot& s = it->second;
      InstanceRecord& inst = reservoir_[static_cast<std::size_t>(s.instance)];
      auto& got = s.sign > 0 ? inst.got_plus : inst.got_minus;
      if (got[static_cast<std::size_t>(s.cls)]) continue;
      got[static_cast<std::size_t>(s.cls)] = 1;
      (s.sign > 0 ? inst.obs_plus : inst.obs_minus)[static_cast<std::size_t>(s.cls)] = o.value;
      if (--inst.missing == 0) {
        for (int k = 0; k < p_.K; ++k)
          inst.grads[static_cast<std::size_t>(k)] =
              gradient_estimate(inst.obs_plus[static_cast<std::size_t>(k)],
                                inst.obs_minus[static_cast<std::size_t>(k)], p_.delta);
        inst.status = InstanceRecord::Status::Fresh;
      }
    }
  }

  const std::vector<double>& r_hat() const override {
    if (invoked_ < 0) throw InternalError("pgsmw: no step planned yet");
    return reservoir_[static_cast<std::size_t>(invoked_)].r_hat;
  }
  long instances_created() const override { return static_cast<long>(reservoir_.size()); }
  const std::vector<InstanceRecord>* reservoir() const override { return &reservoir_; }

 private:
  struct Slot {
    int instance;
    int cls;
    int sign;
  };
  PolicyParams p_;
  std::vector<InstanceRecord> reservoir_;
  std::map<long, Slot> owner_;
  int invoked_ = -1;
};

// Baseline: update every step with the most recently completed gradient
// estimate per class (zero before any feedback arrives).
class StaleGradientPolicy : public Policy {
 public:
  StaleGradientPolicy(PolicyParams params) : p_(params) {
    p_.validate();
    r_hat_.assign(static_cast<std::size_t>(p_.K), p_.delta);
    last_grad_.assign(static_cast<std::size_t>(p_.K), 0.0);
    applied_group_.assign(static_cast<std::size_t>(p_.K), 0);
  }

  std::vector<InjectionRequest> plan(long step, const std::vector<double>& q_src) override {
    (void)step;
    for (int k = 0; k < p_.K; ++k)
      r_hat_[static_cast<std::size_t>(k)] =
          gsmw_update(r_hat_[static_cast<std::size_t>(k)], last_grad_[static_cast<std::size_t>(k)],
                      q_src[static_cast<std::size_t>(k)], p_);
    std::vector<InjectionRequest> req;
    for (int k = 0; k < p_.K; ++k) {
      double r = r_hat_[static_cast<std::size_t>(k)];
      req.push_back(InjectionRequest{k, r + p_.delta, +1, 0});
      req.push_back(InjectionRequest{k, r - p_.delta, -1, 0});
    }
    return req;
  }

  void note_injected(const std::vector<long>& ids) override {
    if (static_cast<int>(ids.size()) != 2 * p_.K)
      throw InternalError("stale-gradient: unexpected injection count");
    long group = next_group_++;
    pairs_.emplace_back();
    auto& grp = pairs_.back();
    grp.assign(static_cast<std::size_t>(p_.K), Pair{});
    for (int k = 0; k < p_.K; ++k) {
      owner_[ids[static_cast<std::size_t>(2 * k)]] = Slot{group, k, +1};
      owner_[ids[static_cast<std::size_t>(2 * k + 1)]] = Slot{group, k, -1};
    }
  }

  void collect_feedback(const std::vector<Observation>& obs) override {
    for (const auto& o : obs) {
      auto it = owner_.find(o.job);
      if (it == owner_.end()) throw InternalError("stale-gradient: feedback for unknown job");
      const Slot& s = it->second;
      Pair& pr = pairs_[static_cast<std::size_t>(s.group)][static_cast<std::size_t>(s.cls)];
      if (s.sign > 0) {
        pr.plus = o.value;
        pr.got_plus = true;
      } else {
        pr.minus = o.value;
        pr.got_minus = true;
      }
      if (pr.got_plus && pr.got_minus &&
          s.group >= applied_group_[static_cast<std::size_t>(s.cls)]) {
        last_grad_[static_cast<std::size_t>(s.cls)] =
            gradient_estimate(pr.plus, pr.minus, p_.delta);
        applied_group_[static_cast<std::size_t>(s.cls)] = s.group;
      }
    }
  }

  const std::vector<double>& r_hat() const override { return r_hat_; }
  long instances_created() const override { return 1; }

 private:
  struct Pair {
    double plus = 0.0, minus = 0.0;
    bool got_plus = false, got_minus = false;
  };
  struct Slot {
    long group;
    int cls;
    int sign;
  };
  PolicyParams p_;
  std::vector<double> r_hat_, last_grad_;
  std::vector<std::vector<Pair>> pairs_;
  std::vector<long> applied_group_;
  std::map<long, Slot> owner_;
  long next_group_ = 0;
};

inline std::unique_ptr<Policy> make_policy(const std::string& name, const PolicyParams& params) {
  if (name == "gsmw" || name == "episodic") return std::make_unique<GsmwPolicy>(params);
  if (name == "pgsmw") return std::make_unique<PgsmwPolicy>(params);
  if (name == "stale_gradient") return std::make_unique<StaleGradientPolicy>(params);
  throw ConfigError("unknown policy: " + name);
}

}  // namespace lnum
