#include "bodt/simulator.hpp"

#include <algorithm>
#include <cmath>
#include <queue>
#include <sstream>

#include "format.hpp"

namespace bodt {

namespace {

bool is_active(const VmRuntime& vm) {
  return vm.status == VmStatus::kBooting || vm.status == VmStatus::kRunning;
}

enum class PendingKind { kBootDone, kTaskDone, kReassign, kTimeout };

// Same-time ordering: completions, then reassignment, then timeouts.
int priority(PendingKind k) {
  switch (k) {
    case PendingKind::kBootDone:
    case PendingKind::kTaskDone:
      return 0;
    case PendingKind::kReassign:
      return 1;
    case PendingKind::kTimeout:
      return 2;
  }
  return 3;
}

struct Pending {
  double time;
  int prio;
  std::size_t vm;  // index in VM id order
  std::uint64_t seq;
  PendingKind kind;
  std::uint64_t generation;

  bool operator>(const Pending& o) const {
    if (time != o.time) return time > o.time;
    if (prio != o.prio) return prio > o.prio;
    if (vm != o.vm) return vm > o.vm;
    return seq > o.seq;
  }
};

struct VmState {
  VmRuntime rt;
  std::size_t loc = 0;
  double boot_end = 0.0;
  double task_started = 0.0;
  std::uint64_t task_gen = 0;
  std::uint64_t timeout_gen = 0;
  VmTimeline timeline;
};

class Engine {
 public:
  Engine(const Plan& plan, const Scenario& scenario, const SimConfig& config)
      : scenario_(scenario), config_(config), multipliers_(scenario, config) {
    const double startup = scenario.cost_model().startup;
    for (const auto& e : plan.entries()) {
      VmState s;
      s.rt.vm = e.vm;
      s.rt.queue.assign(e.tasks.begin(), e.tasks.end());
      s.loc = scenario.location_index(e.vm.location);
      s.boot_end = startup;
      s.timeline.vm = e.vm;
      vms_.push_back(std::move(s));
    }
    for (std::size_t i = 0; i < vms_.size(); ++i) {
      log(0.0, i, SimEventType::kBoot, {}, {});
      push(startup, i, PendingKind::kBootDone, 0);
    }
  }

  SimResult run() {
    while (!pending_.empty()) {
      const Pending p = pending_.top();
      pending_.pop();
      switch (p.kind) {
        case PendingKind::kBootDone:
          vms_[p.vm].rt.status = VmStatus::kRunning;
          start_next(p.vm, p.time);
          break;
        case PendingKind::kTaskDone:
          if (p.generation == vms_[p.vm].task_gen) finish_task(p.vm, p.time);
          break;
        case PendingKind::kReassign:
          on_reassign(p.vm, p.time);
          break;
        case PendingKind::kTimeout:
          if (p.generation == vms_[p.vm].timeout_gen && vms_[p.vm].rt.deadline) {
            on_timeout(p.vm, p.time);
          }
          break;
      }
    }
    SimResult r;
    for (auto& s : vms_) {
      s.timeline.blocks = time_blocks(s.timeline.finish - s.rt.started_at, scenario_.cost_model());
      r.makespan = std::max(r.makespan, s.timeline.finish);
      r.total_blocks += s.timeline.blocks;
      r.per_vm.push_back(std::move(s.timeline));
    }
    r.events = std::move(events_);
    return r;
  }

 private:
  double static_exec(std::string_view task, std::size_t loc) const {
    return scenario_.exec_seconds(scenario_.task_index(task), loc);
  }

  double actual_exec(std::string_view task, const VmState& s) const {
    const std::size_t t = scenario_.task_index(task);
    const Task& spec = scenario_.tasks()[t];
    const double rate = scenario_.transfer_rate(t, s.loc) * multipliers_.factor(t, s.loc, s.rt.vm.id);
    return (rate + scenario_.cost_model().comp) * spec.size;
  }

  void push(double time, std::size_t vm, PendingKind kind, std::uint64_t gen) {
    pending_.push({time, priority(kind), vm, next_pending_++, kind, gen});
  }

  void log(double time, std::size_t vm, SimEventType type, std::string task, std::string detail) {
    events_.push_back({time, events_.size(), vms_[vm].rt.vm.id, type, std::move(task),
                       std::move(detail)});
  }

  // Refreshes rt and the static estimate of remaining work for every VM.
  void refresh(double now) {
    for (auto& s : vms_) {
      VmRuntime& rt = s.rt;
      rt.rt = now - rt.started_at;
      if (!is_active(rt)) {
        rt.e = 0.0;
        continue;
      }
      double e = 0.0;
      if (rt.status == VmStatus::kBooting) e += std::max(0.0, s.boot_end - now);
      if (rt.in_flight) {
        e += std::max(0.0, static_exec(*rt.in_flight, s.loc) - (now - s.task_started));
      }
      for (const auto& t : rt.queue) e += static_exec(t, s.loc);
      rt.e = e;
    }
  }

  std::vector<VmRuntime> fleet() const {
    std::vector<VmRuntime> f;
    f.reserve(vms_.size());
    for (const auto& s : vms_) f.push_back(s.rt);
    return f;
  }

  void start_next(std::size_t i, double now) {
    VmState& s = vms_[i];
    if (!s.rt.queue.empty()) {
      s.rt.in_flight = s.rt.queue.front();
      s.rt.queue.pop_front();
      s.task_started = now;
      log(now, i, SimEventType::kTaskStart, *s.rt.in_flight, {});
      push(now + actual_exec(*s.rt.in_flight, s), i, PendingKind::kTaskDone, ++s.task_gen);
      return;
    }
    log(now, i, SimEventType::kVmFinish, {}, {});
    s.rt.deadline.reset();
    ++s.timeout_gen;
    s.rt.status = VmStatus::kFinished;
    if (config_.reassignment_enabled) {
      push(now, i, PendingKind::kReassign, 0);
    } else {
      stop(i, now);
    }
  }

  void stop(std::size_t i, double now) {
    vms_[i].timeline.finish = now;
    log(now, i, SimEventType::kVmStop, {}, {});
  }

  void finish_task(std::size_t i, double now) {
    VmState& s = vms_[i];
    s.timeline.executed.push_back(*s.rt.in_flight);
    s.timeline.spans.push_back({*s.rt.in_flight, s.task_started, now});
    log(now, i, SimEventType::kTaskEnd, *s.rt.in_flight, {});
    s.rt.in_flight.reset();
    start_next(i, now);
  }

  void on_reassign(std::size_t i, double now) {
    refresh(now);
    const auto f = fleet();
    const ReassignDecision d = reassign(vms_[i].rt, f, config_, scenario_, now);
    if (!d.moved) {
      log(now, i, SimEventType::kReassignNoop, {}, d.reason);
      stop(i, now);
      return;
    }
    VmState& s = vms_[i];
    VmState* donor = nullptr;
    for (auto& v : vms_) {
      if (v.rt.vm.id == d.donor) donor = &v;
    }
    for (const auto& t : d.tasks) {
      std::erase(donor->rt.queue, t);
      s.rt.queue.push_back(t);
    }
    std::ostringstream detail;
    detail << "donor=" << d.donor << " tasks=" << d.tasks.size()
           << " el=" << detail::format_double(d.el);
    log(now, i, SimEventType::kReassign, {}, detail.str());
    s.timeline.received_work = true;
    if (!s.timeline.first_reassign_at) s.timeline.first_reassign_at = now;
    s.rt.status = VmStatus::kRunning;
    s.rt.deadline = d.deadline;
    push(d.deadline, i, PendingKind::kTimeout, ++s.timeout_gen);
    start_next(i, now);
  }

  void on_timeout(std::size_t i, double now) {
    refresh(now);
    const auto f = fleet();
    const TimeoutDecision d = enforce_timeout(vms_[i].rt, f);
    VmState& s = vms_[i];
    if (!d.terminated) {
      if (s.rt.in_flight || !s.rt.queue.empty()) {
        log(now, i, SimEventType::kTimeoutDeferred, {}, "no active receiver");
      }
      s.rt.deadline.reset();
      return;
    }
    log(now, i, SimEventType::kTimeout, {}, "receiver=" + d.receiver);
    if (s.rt.in_flight) {
      log(now, i, SimEventType::kTaskAbort, *s.rt.in_flight, "restarts on " + d.receiver);
      s.rt.in_flight.reset();
      ++s.task_gen;
    }
    s.rt.queue.clear();
    for (auto& v : vms_) {
      if (v.rt.vm.id != d.receiver) continue;
      for (const auto& t : d.tasks) v.rt.queue.push_back(t);
    }
    s.rt.status = VmStatus::kTerminated;
    s.rt.deadline.reset();
    s.timeline.timed_out = true;
    stop(i, now);
  }

  const Scenario& scenario_;
  const SimConfig& config_;
  TransferMultipliers multipliers_;
  std::vector<VmState> vms_;
  std::vector<SimEvent> events_;
  std::priority_queue<Pending, std::vector<Pending>, std::greater<>> pending_;
  std::uint64_t next_pending_ = 0;
};

}  // namespace

void Perturbation::validate() const {
  switch (kind) {
    case PerturbationKind::kNone:
      break;
    case PerturbationKind::kLognormal:
      if (!std::isfinite(sigma) || sigma < 0.0) throw ModelError("lognormal sigma must be >= 0");
      break;
    case PerturbationKind::kUniform:
      if (!std::isfinite(low) || !std::isfinite(high) || low <= 0.0 || high < low) {
        throw ModelError("uniform perturbation needs 0 < low <= high");
      }
      break;
    case PerturbationKind::kVmSlowdown:
      for (const auto& [vm, f] : vm_factors) {
        if (!std::isfinite(f) || f <= 0.0) {
          throw ModelError("slowdown factor for VM '" + vm + "' must be > 0");
        }
      }
      break;
  }
}

void SimConfig::validate() const {
  perturbation.validate();
  if (!std::isfinite(thr1) || thr1 < 0.0) throw ModelError("thr1 must be >= 0");
  if (!std::isfinite(terminate_time) || terminate_time < 0.0) {
    throw ModelError("terminate_time must be >= 0");
  }
}

double sample_perturbation(const Perturbation& p, std::mt19937_64& rng) {
  switch (p.kind) {
    case PerturbationKind::kLognormal:
      return std::lognormal_distribution<double>(0.0, p.sigma)(rng);
    case PerturbationKind::kUniform:
      return std::uniform_real_distribution<double>(p.low, p.high)(rng);
    case PerturbationKind::kNone:
    case PerturbationKind::kVmSlowdown:
      break;
  }
  return 1.0;
}

TransferMultipliers::TransferMultipliers(const Scenario& scenario, const SimConfig& config)
    : scenario_(&scenario), perturbation_(&config.perturbation) {
  config.perturbation.validate();
  const auto& sources = scenario.sources();
  const std::size_t m = scenario.location_count();
  pair_.assign(sources.size() * m, 1.0);
  std::mt19937_64 rng(config.seed);
  for (std::size_t s = 0; s < sources.size(); ++s) {
    for (std::size_t l = 0; l < m; ++l) pair_[s * m + l] = sample_perturbation(config.perturbation, rng);
  }
  for (const auto& t : scenario.tasks()) {
    task_source_.push_back(static_cast<std::size_t>(
        std::lower_bound(sources.begin(), sources.end(), t.source) - sources.begin()));
  }
}

double TransferMultipliers::factor(std::size_t task, std::size_t location,
                                   std::string_view vm_id) const {
  double f = pair_[task_source_[task] * scenario_->location_count() + location];
  if (perturbation_->kind == PerturbationKind::kVmSlowdown) {
    auto it = perturbation_->vm_factors.find(vm_id);
    if (it != perturbation_->vm_factors.end()) f *= it->second;
  }
  return f;
}

ReassignDecision reassign(const VmRuntime& finished, std::span<const VmRuntime> fleet,
                          const SimConfig& config, const Scenario& scenario, double now) {
  ReassignDecision d;
  const CostModel& cm = scenario.cost_model();
  if (cm.block_seconds - finished.rt < config.terminate_time) {
    d.reason = "insufficient_time";
    return d;
  }

  const VmRuntime* donor = nullptr;
  for (const auto& vm : fleet) {
    if (vm.vm.id == finished.vm.id || !is_active(vm)) continue;
    if (vm.e < config.thr1 || vm.queue.size() < config.thr2) continue;
    if (!donor || vm.e > donor->e || (vm.e == donor->e && vm_id_less(vm.vm.id, donor->vm.id))) {
      donor = &vm;
    }
  }
  if (!donor) {
    d.reason = "no_donor";
    return d;
  }

  const std::size_t loc = scenario.location_index(finished.vm.location);
  std::vector<std::size_t> queued;
  for (const auto& id : donor->queue) queued.push_back(scenario.task_index(id));
  std::stable_sort(queued.begin(), queued.end(), [&](std::size_t a, std::size_t b) {
    const double ra = scenario.transfer_rate(a, loc), rb = scenario.transfer_rate(b, loc);
    if (ra != rb) return ra < rb;
    return scenario.tasks()[a].id < scenario.tasks()[b].id;
  });

  d.el = cm.block_seconds - finished.rt - config.terminate_time;
  const double half_surplus = (donor->e - config.thr1) / 2.0;
  double moved_work = 0.0;
  for (std::size_t t : queued) {
    const double next = moved_work + scenario.exec_seconds(t, loc);
    if (next >= half_surplus || next > d.el) break;
    moved_work = next;
    d.tasks.push_back(scenario.tasks()[t].id);
  }
  if (d.tasks.empty()) {
    d.reason = "nothing_movable";
    return d;
  }
  d.moved = true;
  d.donor = donor->vm.id;
  d.deadline = now + d.el;
  return d;
}

TimeoutDecision enforce_timeout(const VmRuntime& vm, std::span<const VmRuntime> fleet) {
  TimeoutDecision d;
  if (!vm.in_flight && vm.queue.empty()) return d;
  const VmRuntime* receiver = nullptr;
  for (const auto& other : fleet) {
    if (other.vm.id == vm.vm.id || !is_active(other)) continue;
    if (!receiver || other.e < receiver->e ||
        (other.e == receiver->e && vm_id_less(other.vm.id, receiver->vm.id))) {
      receiver = &other;
    }
  }
  if (!receiver) return d;
  d.terminated = true;
  d.receiver = receiver->vm.id;
  if (vm.in_flight) d.tasks.push_back(*vm.in_flight);
  d.tasks.insert(d.tasks.end(), vm.queue.begin(), vm.queue.end());
  return d;
}

std::string_view to_string(SimEventType type) {
  switch (type) {
    case SimEventType::kBoot:
      return "boot";
    case SimEventType::kTaskStart:
      return "task_start";
    case SimEventType::kTaskEnd:
      return "task_end";
    case SimEventType::kVmFinish:
      return "vm_finish";
    case SimEventType::kReassign:
      return "reassign";
    case SimEventType::kReassignNoop:
      return "reassign_noop";
    case SimEventType::kTimeout:
      return "timeout";
    case SimEventType::kTimeoutDeferred:
      return "timeout_deferred";
    case SimEventType::kTaskAbort:
      return "task_abort";
    case SimEventType::kVmStop:
      return "vm_stop";
  }
  return "unknown";
}

SimResult simulate(const Plan& plan, const Scenario& scenario, const SimConfig& config) {
  config.validate();
  if (auto v = validate_plan(plan, scenario); !v.ok()) throw PlanValidationError(std::move(v));
  return Engine(plan, scenario, config).run();
}

}  // namespace bodt
