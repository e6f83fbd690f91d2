#pragma once

#include <cstdint>
#include <iosfwd>
#include <memory>
#include <string>
#include <vector>

#include "mecsim/dqn.hpp"
#include "mecsim/sim.hpp"

namespace mecsim {

enum class PolicyKind { Drl, Greedy, Local, Fifo, Periodic, Random };

struct PolicySpec {
    PolicyKind kind = PolicyKind::Greedy;
    double period = 1.0;                    // Periodic only
    std::shared_ptr<const DqnModel> model;  // Drl only

    std::string label() const;
};

PolicyKind parse_policy_kind(const std::string& name);
std::string policy_kind_name(PolicyKind kind);

// Fresh policy instance for one run. Random policies are seeded from the run
// seed so rows stay reproducible.
std::unique_ptr<Policy> make_policy(const PolicySpec& spec, std::uint64_t run_seed);

enum class SweepParameter { TaskSize, Lambda, QueueM };

SweepParameter parse_sweep_parameter(const std::string& name);
std::string sweep_parameter_name(SweepParameter p);

struct SweepSpec {
    SweepParameter parameter = SweepParameter::TaskSize;
    std::vector<double> values;  // TaskSize values are mean sizes in kilobits
    std::vector<PolicySpec> policies;
    std::vector<std::uint64_t> seeds;
    SimConfig base;

    void validate() const;
};

// The base config with the swept parameter set. Task-size values move the
// midpoint of the uniform size range and keep its width.
SimConfig apply_sweep_value(const SimConfig& base, SweepParameter p, double value);

struct SweepRow {
    double parameter = 0.0;
    std::string policy;
    std::uint64_t seed = 0;
    MetricsReport metrics;
};

// One row per (value, policy, seed) in that nesting order. Rows run on up
// to `jobs` threads; the table order does not depend on `jobs`.
std::vector<SweepRow> run_sweep(const SweepSpec& spec, int jobs = 1);

struct SummaryRow {
    double parameter = 0.0;
    std::string policy;
    std::size_t n = 0;
    MetricsReport mean;
    MetricsReport stddev;  // sample standard deviation, 0 for a single seed
};

std::vector<SummaryRow> summarize(const std::vector<SweepRow>& rows);

void write_sweep_csv(std::ostream& os, const std::vector<SweepRow>& rows);
void write_summary_csv(std::ostream& os, const std::vector<SummaryRow>& rows);

}  // namespace mecsim
