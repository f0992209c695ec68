#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <deque>
#include <limits>
#include <vector>

#include "lnum/errors.hpp"
#include "lnum/network.hpp"

namespace lnum {

// The unit of admitted traffic. `sign` marks which of the two-point samples
// it carries (+1 for r̂+δ, -1 for r̂-δ); `instance` is the owning policy
// instance (-1 for raw traffic).
struct Job {
  long id = -1;
  ClassId cls = 0;
  double size = 0.0;
  int sign = 0;
  long instance = -1;
  long injected_at = 0;
  double delivered_volume = 0.0;
  long delivered_slot = -1;  // -1 while in flight / lost at horizon
  NodeId tail_node = -1;     // rearmost node still holding its volume

  // volume not yet landed at the destination
  double remaining() const { return std::max(0.0, size - delivered_volume); }
};

struct InjectionRequest {
  ClassId cls = 0;
  double size = 0.0;
  int sign = 0;
  long instance = -1;
};

struct DeliveredEvent {
  long job = -1;
  ClassId cls = 0;
  double size = 0.0;
  long slot = 0;
};

struct SlotReport {
  std::vector<DeliveredEvent> delivered;
  // Realized transmissions for this slot, same shape as OfferedRates.
  std::vector<double> realized_shared;
  std::vector<std::vector<double>> realized_per_class;
};

// Fluid FIFO state: each (node, class) queue is a deque of job chunks ordered
// by arrival sequence at that node. A link may split the front chunk, so a
// job's volume can straddle two adjacent queues mid-route; the job counts as
// delivered when its last unit reaches the destination.
class SimState {
 public:
  explicit SimState(const NetworkSpec& spec) : spec_(&spec) {
    queues_.assign(static_cast<std::size_t>(spec.num_nodes * spec.num_classes()), {});
    scalars_.assign(queues_.size(), 0.0);
    comp_.assign(queues_.size(), 0.0);
    arrival_seq_.assign(static_cast<std::size_t>(spec.num_nodes), 0);
  }

  const NetworkSpec& spec() const { return *spec_; }
  long slot() const { return slot_; }

  double queue(NodeId n, ClassId k) const {
    std::size_t i = qidx(n, k);
    return scalars_[i] + comp_[i];
  }

  double total_queue() const {
    double s = 0.0;
    for (std::size_t i = 0; i < scalars_.size(); ++i) s += scalars_[i] + comp_[i];
    return s;
  }

  // Q_{s_k}^k for every class, in class order.
  std::vector<double> source_queues() const {
    std::vector<double> q(static_cast<std::size_t>(spec_->num_classes()));
    for (ClassId k = 0; k < spec_->num_classes(); ++k)
      q[static_cast<std::size_t>(k)] = queue(spec_->classes[static_cast<std::size_t>(k)].src, k);
    return q;
  }

  const std::vector<Job>& jobs() const { return jobs_; }
  const Job& job(long id) const { return jobs_.at(static_cast<std::size_t>(id)); }
  const std::vector<DeliveredEvent>& delivered_ledger() const { return ledger_; }
  double injected_volume() const { return injected_volume_; }
  double delivered_volume() const { return delivered_volume_; }

  // Recompute a queue scalar from its chunks (test hook for the
  // scalar-vs-chunk consistency invariant). Compensated so the reference
  // itself does not drown in rounding on long queues.
  double queue_from_chunks(NodeId n, ClassId k) const {
    double s = 0.0, comp = 0.0;
    for (const auto& c : queues_[qidx(n, k)]) {
      double t = s + c.vol;
      if (std::abs(s) >= std::abs(c.vol))
        comp += (s - t) + c.vol;
      else
        comp += (c.vol - t) + s;
      s = t;
    }
    return s + comp;
  }

  // One engine slot: enqueue injections at the sources, then move volume on
  // every link against slot-start contents (injections included at sources,
  // same-slot link arrivals excluded), then land arrivals and deliveries.
  SlotReport apply_slot(const StateVec& state, const ActionVec& action,
                        const std::vector<InjectionRequest>& injections) {
    check_state_action(*spec_, state, action);
    for (const auto& r : injections) {
      if (r.cls < 0 || r.cls >= spec_->num_classes())
        throw ConfigError("injection targets unknown class");
      if (!(r.size >= 0.0 && r.size <= spec_->size_bound + 1e-12))
        throw DomainError("injection size outside [0, B]");
    }
    ++slot_;
    last_injected_.clear();

    for (const auto& r : injections) {
      NodeId src = spec_->classes[static_cast<std::size_t>(r.cls)].src;
      Job j;
      j.id = static_cast<long>(jobs_.size());
      j.cls = r.cls;
      j.size = r.size;
      j.sign = r.sign;
      j.instance = r.instance;
      j.injected_at = slot_;
      j.tail_node = src;
      jobs_.push_back(j);
      last_injected_.push_back(j.id);
      injected_volume_ += r.size;
      push_chunk(src, r.cls, Chunk{j.id, r.size, arrival_seq_[static_cast<std::size_t>(src)]++});
    }

    OfferedRates offered = offered_rates(*spec_, state, action);
    SlotReport report;
    report.realized_shared.assign(static_cast<std::size_t>(spec_->num_links()), 0.0);
    report.realized_per_class.assign(
        static_cast<std::size_t>(spec_->num_links()),
        std::vector<double>(static_cast<std::size_t>(spec_->num_classes()), 0.0));

    struct Arrival {
      NodeId node;
      ClassId cls;
      Chunk chunk;
    };
    std::vector<Arrival> arrivals;

    auto ship = [&](LinkId l, ClassId k, Chunk c) {
      const Link& ln = spec_->links[static_cast<std::size_t>(l)];
      add_scalar(qidx(ln.from, k), -c.vol);
      Job& j = jobs_[static_cast<std::size_t>(c.job)];
      if (ln.to == spec_->classes[static_cast<std::size_t>(k)].dst) {
        j.delivered_volume += c.vol;
        delivered_volume_ += c.vol;
        if (j.delivered_slot < 0 && j.delivered_volume >= j.size - 1e-9) {
          j.delivered_slot = slot_;
          j.tail_node = -1;
          DeliveredEvent ev{j.id, k, j.size, slot_};
          ledger_.push_back(ev);
          report.delivered.push_back(ev);
        }
      } else {
        arrivals.push_back(Arrival{ln.to, k, c});
      }
    };

    for (LinkId l = 0; l < spec_->num_links(); ++l) {
      const Link& ln = spec_->links[static_cast<std::size_t>(l)];
      if (ln.mode == LinkMode::PerClass) {
        for (ClassId k = 0; k < spec_->num_classes(); ++k) {
          double rate = offered.per_class[static_cast<std::size_t>(l)][static_cast<std::size_t>(k)];
          double moved = drain_queue(ln.from, k, rate, [&](Chunk c) { ship(l, k, c); });
          report.realized_per_class[static_cast<std::size_t>(l)][static_cast<std::size_t>(k)] = moved;
        }
      } else {
        double rate = offered.shared_total[static_cast<std::size_t>(l)];
        report.realized_shared[static_cast<std::size_t>(l)] =
            drain_shared(ln.from, rate, [&](ClassId k, Chunk c) { ship(l, k, c); });
      }
    }

    for (const auto& a : arrivals) {
      Chunk c = a.chunk;
      c.seq = arrival_seq_[static_cast<std::size_t>(a.node)]++;
      push_chunk(a.node, a.cls, c);
      Job& j = jobs_[static_cast<std::size_t>(c.job)];
      // tail advances once nothing of the job remains behind this node
      if (queue_holds_job(j.tail_node, a.cls, c.job) == false) j.tail_node = a.node;
    }
    snap_empty_queues();
    return report;
  }

  // Test hook: preload volume without going through an injection slot.
  void seed_queue(NodeId n, ClassId k, double vol) {
    Job j;
    j.id = static_cast<long>(jobs_.size());
    j.cls = k;
    j.size = vol;
    j.injected_at = slot_;
    j.tail_node = n;
    jobs_.push_back(j);
    injected_volume_ += vol;
    push_chunk(n, k, Chunk{j.id, vol, arrival_seq_[static_cast<std::size_t>(n)]++});
  }

  // Ids assigned to the most recent apply_slot's injections, in request order.
  const std::vector<long>& last_injected() const { return last_injected_; }

 private:
  struct Chunk {
    long job;
    double vol;
    long seq;
  };

  static constexpr double kVolEps = 1e-12;

  std::size_t qidx(NodeId n, ClassId k) const {
    return static_cast<std::size_t>(n) * static_cast<std::size_t>(spec_->num_classes()) +
           static_cast<std::size_t>(k);
  }

  // Neumaier-compensated accumulation keeps the scalar within rounding of
  // the chunk sum over long runs.
  void add_scalar(std::size_t i, double v) {
    double t = scalars_[i] + v;
    if (std::abs(scalars_[i]) >= std::abs(v))
      comp_[i] += (scalars_[i] - t) + v;
    else
      comp_[i] += (v - t) + scalars_[i];
    scalars_[i] = t;
  }

  void snap_empty_queues() {
    for (std::size_t i = 0; i < queues_.size(); ++i)
      if (queues_[i].empty()) {
        scalars_[i] = 0.0;
        comp_[i] = 0.0;
      }
  }

  bool queue_holds_job(NodeId n, ClassId k, long job) const {
    if (n < 0) return false;
    for (const auto& c : queues_[qidx(n, k)])
      if (c.job == job) return true;
    return false;
  }

  void push_chunk(NodeId n, ClassId k, Chunk c) {
    auto& q = queues_[qidx(n, k)];
    if (!q.empty() && q.back().job == c.job) {
      q.back().vol += c.vol;  // rejoin a split job, keep its earlier seq
    } else {
      q.push_back(c);
    }
    add_scalar(qidx(n, k), c.vol);
  }

  // Move up to `budget` volume out of (n, k) front-first; zero-volume chunks
  // ride along whenever the link offers positive rate. Returns volume moved.
  template <typename Ship>
  double drain_queue(NodeId n, ClassId k, double budget, Ship&& ship_fn) {
    auto& q = queues_[qidx(n, k)];
    double moved = 0.0;
    double left = budget;
    while (!q.empty()) {
      Chunk& front = q.front();
      if (front.vol <= kVolEps) {
        if (budget <= 0.0) break;
        Chunk c = front;
        c.vol = std::max(c.vol, 0.0);
        q.pop_front();
        ship_fn(c);
        continue;
      }
      if (front.vol <= left + kVolEps) {
        Chunk c = front;
        q.pop_front();
        left -= c.vol;
        moved += c.vol;
        ship_fn(c);
        continue;
      }
      if (left > kVolEps) {
        Chunk c{front.job, left, front.seq};
        front.vol -= left;
        moved += left;
        left = 0.0;
        ship_fn(c);
      }
      break;
    }
    return std::min(moved, budget);
  }

  // Shared link: drain the tail node's classes strictly in arrival order.
  template <typename Ship>
  double drain_shared(NodeId n, double budget, Ship&& ship_fn) {
    double moved = 0.0;
    double left = budget;
    const int K = spec_->num_classes();
    while (true) {
      ClassId pick = -1;
      long best_seq = std::numeric_limits<long>::max();
      for (ClassId k = 0; k < K; ++k) {
        const auto& q = queues_[qidx(n, k)];
        if (!q.empty() && q.front().seq < best_seq) {
          best_seq = q.front().seq;
          pick = k;
        }
      }
      if (pick < 0) break;
      auto& q = queues_[qidx(n, pick)];
      Chunk& front = q.front();
      if (front.vol <= kVolEps) {
        if (budget <= 0.0) break;
        Chunk c = front;
        c.vol = std::max(c.vol, 0.0);
        q.pop_front();
        ship_fn(pick, c);
        continue;
      }
      if (front.vol <= left + kVolEps) {
        Chunk c = front;
        q.pop_front();
        left -= c.vol;
        moved += c.vol;
        ship_fn(pick, c);
        continue;
      }
      if (left > kVolEps) {
        Chunk c{front.job, left, front.seq};
        front.vol -= left;
        moved += left;
        left = 0.0;
        ship_fn(pick, c);
      }
      break;
    }
    return std::min(moved, budget);
  }

  const NetworkSpec* spec_;
  long slot_ = 0;
  std::vector<std::deque<Chunk>> queues_;
  std::vector<double> scalars_;
  std::vector<double> comp_;
  std::vector<long> arrival_seq_;
  std::vector<Job> jobs_;
  std::vector<DeliveredEvent> ledger_;
  std::vector<long> last_injected_;
  double injected_volume_ = 0.0;
  double delivered_volume_ = 0.0;
};

}  // namespace lnum
