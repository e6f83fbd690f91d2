#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "mecsim/scheduler.hpp"

namespace mecsim::verify {

struct SuiteResult {
    std::string name;
    bool passed = false;
    double measured = 0.0;   // worst observed error, or mismatch count
    double tolerance = 0.0;  // threshold the measurement is held to
    double seconds = 0.0;
    std::string detail;
};

using Decider = std::function<Decision(const ServerQueue&, const Task&, const RobotState&,
                                       const Environment&, double)>;

// Random queue state with 0..M waiting entries and a requesting task.
struct DecisionInstance {
    ServerQueue queue;
    Task task;
    RobotState robot;
    Environment env;
    double now = 0.0;
};
DecisionInstance random_decision_instance(Rng& rng, int M);

SuiteResult scheduler_enumeration(int instances, std::uint64_t seed, const Decider& decider);
SuiteResult joint_optimum(int batches, int max_tasks, std::uint64_t seed);
SuiteResult delay_integral(int instances, std::uint64_t seed);
SuiteResult mobility_reflection(int instances, std::uint64_t seed);
SuiteResult gradient_fidelity(int networks, std::uint64_t seed);
SuiteResult adam_quadratic();
SuiteResult poisson_moments(int windows, std::uint64_t seed);
SuiteResult queue_replay(int instances, std::uint64_t seed);
SuiteResult queue_soak(std::uint64_t min_events, std::uint64_t seed);

enum class Scale { Quick, Full };

std::vector<SuiteResult> run_all(Scale scale, std::uint64_t seed);

std::string format_result(const SuiteResult& r);

}  // namespace mecsim::verify
