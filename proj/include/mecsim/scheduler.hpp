#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "mecsim/channel.hpp"
#include "mecsim/queue.hpp"
#include "mecsim/rng.hpp"

namespace mecsim {

struct Environment {
    Plane plane;
    ChannelParams channel;
    CostParams cost;
};

enum class DecisionKind { Local, Insert, Reject };

struct Decision {
    DecisionKind kind = DecisionKind::Local;
    int position = 0;  // 1..L+1 for Insert, 0 otherwise
    double expected_cost = 0.0;

    static Decision local(double cost = 0.0) { return {DecisionKind::Local, 0, cost}; }
    static Decision insert(int position, double cost = 0.0) {
        return {DecisionKind::Insert, position, cost};
    }
    static Decision reject(double cost = 0.0) { return {DecisionKind::Reject, 0, cost}; }

    bool offloaded() const { return kind == DecisionKind::Insert; }
};

// Per-task quantities that do not depend on the queue position.
struct TaskEstimate {
    double waited = 0.0;  // time already spent between generation and decision
    double t_tra = 0.0;
    double t_com = 0.0;
    double t_loc = 0.0;
    double e_loc = 0.0;
};

TaskEstimate estimate_task(const Task& task, const RobotState& robot, const Environment& env,
                           double now);

// Queue entry for a task whose upload starts at `now`.
QueueEntry make_entry(const Task& task, const RobotState& robot, const TaskEstimate& est,
                      double now);

// Cost breakdown of one option. position 0 is local execution.
struct OptionCost {
    int position = 0;
    double T = 0.0;
    double E = 0.0;
    double own = 0.0;          // alpha * E + beta * (T - d) / d
    double loss_delay = 0.0;   // sum of T_add / d over disturbed tasks
    double loss_energy = 0.0;  // sum of extra idle energy of disturbed tasks
    double total = 0.0;        // own + beta * loss_delay + alpha * loss_energy
};

// Local option followed by every feasible insertion position 1..L+1. Only
// the local option is returned when the queue is full.
std::vector<OptionCost> evaluate_options(const ServerQueue& q, const Task& task,
                                         const RobotState& robot, const Environment& env,
                                         double now);

// Sum of T_add / d over the waiting entries displaced by inserting e.
double insertion_loss(const ServerQueue& q, const QueueEntry& e, int position, double now);

// One-dimensional insertion search. Ties prefer Local, then the smallest
// position. A full queue rejects the request.
Decision greedy_decide(const ServerQueue& q, const Task& task, const RobotState& robot,
                       const Environment& env, double now);

struct BatchSchedule {
    std::vector<int> order;  // per task: 0 = local, k = k-th served at the edge
    double cost = 0.0;
};

inline constexpr std::size_t kBruteForceMaxTasks = 6;

// Exhaustive optimum over offload subsets and service orders for tasks that
// all arrive at `now` to an empty server. Throws InvalidArgument above
// kBruteForceMaxTasks tasks.
BatchSchedule brute_force_schedule(const std::vector<Task>& tasks,
                                   const std::vector<RobotState>& robots, const ServerQueue& q0,
                                   const Environment& env, double now);

// Realized objective of deciding the batch one task at a time with
// greedy_decide, in the given order.
BatchSchedule sequential_greedy_schedule(const std::vector<Task>& tasks,
                                         const std::vector<RobotState>& robots,
                                         const ServerQueue& q0, const Environment& env,
                                         double now);

double local_only_cost(const std::vector<Task>& tasks, const Environment& env, double now);

// Everything a policy can see when a task requests service.
struct DecisionContext {
    const ServerQueue& queue;
    const Task& task;
    const RobotState& robot;  // state at `now`
    const Environment& env;
    double now = 0.0;
    bool period_release = false;  // true when a deferred task is released at a boundary
};

class Policy {
public:
    virtual ~Policy() = default;
    virtual std::string name() const = 0;

    // nullopt defers the task until the next period boundary.
    virtual std::optional<Decision> decide(const DecisionContext& ctx) = 0;

    virtual std::optional<double> period() const { return std::nullopt; }

    // Tasks deferred since the last boundary, in arrival order.
    virtual std::vector<Task> release_deferred() { return {}; }
};

class GreedyPolicy : public Policy {
public:
    std::string name() const override { return "greedy"; }
    std::optional<Decision> decide(const DecisionContext& ctx) override;
};

class LocalOnlyPolicy : public Policy {
public:
    std::string name() const override { return "local"; }
    std::optional<Decision> decide(const DecisionContext& ctx) override;
};

class FifoOffloadPolicy : public Policy {
public:
    std::string name() const override { return "fifo"; }
    std::optional<Decision> decide(const DecisionContext& ctx) override;
};

// Buffers every request and admits the buffer FIFO at multiples of the
// period, mimicking batch-periodic offloading schemes.
class PeriodicBatchPolicy : public Policy {
public:
    explicit PeriodicBatchPolicy(double period = 1.0);
    std::string name() const override { return "periodic"; }
    std::optional<Decision> decide(const DecisionContext& ctx) override;
    std::optional<double> period() const override { return period_; }
    std::vector<Task> release_deferred() override;

private:
    double period_;
    std::vector<Task> pending_;
};

class RandomPolicy : public Policy {
public:
    explicit RandomPolicy(std::uint64_t seed) : rng_(seed) {}
    std::string name() const override { return "random"; }
    std::optional<Decision> decide(const DecisionContext& ctx) override;

private:
    Rng rng_;
};

}  // namespace mecsim
