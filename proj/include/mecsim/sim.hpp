#pragma once

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <string>
#include <vector>

#include "mecsim/scheduler.hpp"

namespace mecsim {

struct SimConfig {
    int n_rb = 10;
    double plane_edge = 30.0;  // m
    double speed = 2.0;        // m/s
    double lambda = 10.0;      // tasks per second per robot
    int M = 10;
    CostParams cost;
    ChannelParams channel;
    double n_min = 120e3;  // bits
    double n_max = 300e3;
    double d_min = 0.5;  // s
    double d_max = 2.0;
    double duration = 60.0;  // s of task generation
    std::uint64_t seed = 1;
    bool drain = true;  // keep running until every generated task finishes

    void validate() const;
    Environment environment() const { return {Plane{plane_edge}, channel, cost}; }
};

// Per-robot homogeneous Poisson arrival times on [0, duration), each list
// sorted ascending.
std::vector<std::vector<double>> generate_arrivals(double lambda, double duration, int n_rb,
                                                   Rng& rng);

// All tasks of one run, ordered by generation time, ids 0..N-1.
std::vector<Task> generate_tasks(const SimConfig& cfg);

enum class EventKind { TaskGenerated, UploadComplete, ComputeComplete, PeriodBoundary };

struct Event {
    double time = 0.0;
    EventKind kind = EventKind::TaskGenerated;
    std::int64_t ref = 0;  // task id, or boundary index
    std::uint64_t sequence = 0;
};

struct TraceRecord {
    std::uint64_t sequence = 0;
    double time = 0.0;
    std::string event;
    TaskId task_id = -1;
    RobotId robot_id = -1;
    std::string decision;
    int position = 0;
    int queue_length = 0;
    double service_start = -1.0;
    double service_end = -1.0;
};

struct SimStats {
    std::uint64_t generated = 0;
    std::uint64_t offloaded = 0;
    std::uint64_t local = 0;
    std::uint64_t rejected = 0;
    std::uint64_t events = 0;
};

struct SimResult {
    std::vector<TaskOutcome> outcomes;
    std::vector<TraceRecord> trace;
    SimStats stats;
};

struct RunOptions {
    bool record_trace = false;
    // Called after every processed event with the resulting server state.
    std::function<void(const Event&, const ServerQueue&)> observer;
    std::uint64_t max_events = 0;  // 0 means unlimited
};

SimResult run(const SimConfig& cfg, Policy& policy, const RunOptions& opts = {});

struct MetricsReport {
    std::size_t count = 0;
    double avg_objective = 0.0;
    double avg_energy = 0.0;
    double avg_delay = 0.0;
    double deadline_miss_ratio = 0.0;
    double rejection_rate = 0.0;
};

MetricsReport evaluate(const std::vector<TaskOutcome>& outcomes, const CostParams& p);

// One JSON object per line, keys sorted.
void write_trace(std::ostream& os, const std::vector<TraceRecord>& trace);

}  // namespace mecsim
