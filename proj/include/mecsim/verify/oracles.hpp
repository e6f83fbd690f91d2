#pragma once

// Independent reference computations used by the test suites and by
// `mecsim verify`. None of these call the code paths they check.

#include <cstdint>
#include <optional>
#include <vector>

#include "mecsim/dqn.hpp"
#include "mecsim/scheduler.hpp"

namespace mecsim::oracle {

// Explicit small-step motion with per-step wall mirroring.
Vec2 stepped_position(const RobotState& s, double t, const Plane& plane, double dt);

// Cumulative trapezoid of the Shannon rate on a fixed grid, interpolated
// linearly inside the step where the delivered bits reach n.
double fine_grid_delay(double n, const RobotState& robot, const Plane& plane, double p_tra,
                       const ChannelParams& cp, double dt);

struct ReplayJob {
    TaskId id = 0;
    double arrival = 0.0;  // upload completion
    double t_com = 0.0;
};

struct ReplayResult {
    std::vector<double> start;
    std::vector<double> end;
};

// Event-by-event single-server replay: the server stays busy until
// `busy_until`, then serves jobs strictly in list order, idling when the
// next job's upload has not arrived.
ReplayResult replay_queue(double now, double busy_until, const std::vector<ReplayJob>& jobs);

// Server readiness and waiting jobs of a live queue, in replay form.
double busy_until(const ServerQueue& q, double now);
std::vector<ReplayJob> jobs_of(const ServerQueue& q);

// Cost of every option obtained by recomputing the whole objective of the
// server's waiting tasks with and without the new task. Index 0 is local;
// index k is insertion at position k.
std::vector<double> enumerate_option_costs(const ServerQueue& q, const Task& task,
                                           const RobotState& robot, const Environment& env,
                                           double now);

// Argmin of enumerate_option_costs with Local preferred on ties; Reject
// when the queue is full.
Decision enumerate_decision(const ServerQueue& q, const Task& task, const RobotState& robot,
                            const Environment& env, double now);

// Forward pass one scalar multiply-add at a time.
std::vector<double> scalar_forward(const Network& net, const std::vector<double>& s);

// Largest |analytic - central difference| / max(|analytic| + |numeric|, floor)
// over every parameter of every layer.
struct GradientCheck {
    double max_rel_error = 0.0;
    std::vector<double> per_layer;
};
GradientCheck check_gradient(Network net, const Eigen::MatrixXd& states,
                             const std::vector<int>& actions, const std::vector<double>& targets,
                             double step = 1e-5, double floor = 1e-6);

}  // namespace mecsim::oracle
