#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <stdexcept>
#include <utility>

namespace mecsim {

using TaskId = std::int64_t;
using RobotId = std::int32_t;

// Thrown when a value violates a documented precondition.
class InvalidArgument : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

struct Task {
    TaskId id = 0;
    RobotId robot_id = 0;
    double n = 0.0;      // bits
    double d = 0.0;      // deadline budget, seconds after generation
    double t_gen = 0.0;  // seconds
};

// Robot-side and server-side constants of the cost model.
struct CostParams {
    double f_loc = 2e8;    // cycles/s
    double f_edg = 2e9;    // cycles/s
    double c = 1000.0;     // cycles/bit
    double gamma = 1e-27;  // effective capacitance coefficient
    double p_tra = 0.05;   // W
    double p_idl = 0.005;  // W
    double alpha = 0.5;
    double beta = 0.5;

    void validate() const;
};

enum class ExecutionSite { Local, Edge };

struct TaskOutcome {
    TaskId task_id = 0;
    ExecutionSite site = ExecutionSite::Local;
    int position = 0;  // queue position at admission, 0 for local
    bool rejected = false;
    double T = 0.0;  // generation to result, seconds
    double E = 0.0;  // robot-side energy, joules
    double d = 0.0;
    bool missed_deadline = false;
};

double local_time(double n, const CostParams& p);
double local_energy(double n, const CostParams& p);
double edge_compute_time(double n, const CostParams& p);

// alpha * E + beta * (T - d) / d. Negative when the task finishes early.
double task_cost(double T, double E, double d, const CostParams& p);

struct DelayEnergy {
    double T = 0.0;
    double E = 0.0;
};

// Completion delay and robot energy for one task. offloaded == false selects
// the local branch; otherwise the robot transmits for t_tra and idles until
// the server is ready.
DelayEnergy task_delay_energy(bool offloaded, double t_tra, double t_rea, double t_com,
                              double t_loc, double e_loc, const CostParams& p);

// Weighted energy plus normalized delay summed over outcomes.
double objective(std::span<const TaskOutcome> outcomes, const CostParams& p);

}  // namespace mecsim
