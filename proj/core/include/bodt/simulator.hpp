#pragma once

#include <cstdint>
#include <deque>
#include <map>
#include <optional>
#include <random>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "bodt/model.hpp"

namespace bodt {

enum class PerturbationKind { kNone, kLognormal, kUniform, kVmSlowdown };

// Multiplier on transfer rates. Distribution kinds draw one factor per
// (source, location) pair, frozen for the whole run. kVmSlowdown scales the
// transfer rates of every task executed on the listed VMs.
struct Perturbation {
  PerturbationKind kind = PerturbationKind::kNone;
  double sigma = 0.0;  // lognormal, median 1
  double low = 1.0;    // uniform
  double high = 1.0;
  std::map<std::string, double, VmIdLess> vm_factors;

  void validate() const;  // throws ModelError
};

struct SimConfig {
  std::uint64_t seed = 0;
  Perturbation perturbation;
  double thr1 = 60.0;         // seconds of remaining work a donor must have
  std::size_t thr2 = 2;       // queued tasks a donor must have
  double terminate_time = 30.0;
  bool reassignment_enabled = true;

  void validate() const;  // throws ModelError
};

// One factor per call; deterministic for a given engine state.
double sample_perturbation(const Perturbation& p, std::mt19937_64& rng);

// Pair multipliers drawn in (source, location) id order from `seed`.
class TransferMultipliers {
 public:
  TransferMultipliers(const Scenario& scenario, const SimConfig& config);
  double factor(std::size_t task, std::size_t location, std::string_view vm_id) const;

 private:
  const Scenario* scenario_;
  const Perturbation* perturbation_;
  std::vector<double> pair_;  // [source * locations + location]
  std::vector<std::size_t> task_source_;
};

enum class VmStatus { kBooting, kRunning, kFinished, kTerminated };

struct VmRuntime {
  VmInstance vm;
  double started_at = 0.0;
  double rt = 0.0;                    // elapsed running time
  std::deque<std::string> queue;      // remaining tasks, excluding in-flight
  std::optional<std::string> in_flight;
  double e = 0.0;                     // estimated remaining seconds (static model)
  VmStatus status = VmStatus::kBooting;
  std::optional<double> deadline;
};

struct ReassignDecision {
  bool moved = false;
  std::string donor;
  std::vector<std::string> tasks;  // in execution order
  double el = 0.0;                 // usable seconds left in the paid block
  double deadline = 0.0;
  std::string reason;              // set on a no-op
};

// Decides which queued tasks the finished VM takes over. `fleet` holds every
// VM including `finished`; only kBooting/kRunning VMs can donate.
ReassignDecision reassign(const VmRuntime& finished, std::span<const VmRuntime> fleet,
                          const SimConfig& config, const Scenario& scenario, double now);

struct TimeoutDecision {
  bool terminated = false;
  std::string receiver;
  std::vector<std::string> tasks;  // in-flight first, then the queue
};

// What happens when `vm` reaches its deadline. No event when it has no work
// left; no termination when no other VM is still active.
TimeoutDecision enforce_timeout(const VmRuntime& vm, std::span<const VmRuntime> fleet);

enum class SimEventType {
  kBoot,
  kTaskStart,
  kTaskEnd,
  kVmFinish,
  kReassign,
  kReassignNoop,
  kTimeout,
  kTimeoutDeferred,
  kTaskAbort,
  kVmStop,
};

std::string_view to_string(SimEventType type);

struct SimEvent {
  double time;
  std::uint64_t seq;
  std::string vm_id;
  SimEventType type;
  std::string task_id;
  std::string detail;
};

struct TaskSpan {
  std::string task;
  double start;
  double end;
};

struct VmTimeline {
  VmInstance vm;
  double finish = 0.0;
  std::int64_t blocks = 0;
  std::vector<std::string> executed;  // completed tasks, in order
  std::vector<TaskSpan> spans;
  bool timed_out = false;
  bool received_work = false;
  std::optional<double> first_reassign_at;
};

struct SimResult {
  std::vector<VmTimeline> per_vm;
  double makespan = 0.0;
  std::int64_t total_blocks = 0;
  std::vector<SimEvent> events;
};

SimResult simulate(const Plan& plan, const Scenario& scenario, const SimConfig& config);

SimConfig parse_sim_config(std::string_view json_text);
std::string sim_config_to_json(const SimConfig& config);
std::string sim_result_to_json(const SimResult& result);
// Columns: time_s,vm_id,event,task_id,detail
std::string events_to_csv(const SimResult& result);

}  // namespace bodt
