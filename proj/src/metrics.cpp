#include "mecsim/metrics.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <exception>
#include <map>
#include <mutex>
#include <ostream>
#include <thread>

namespace mecsim {

std::string policy_kind_name(PolicyKind kind) {
    switch (kind) {
        case PolicyKind::Drl: return "drl";
        case PolicyKind::Greedy: return "greedy";
        case PolicyKind::Local: return "local";
        case PolicyKind::Fifo: return "fifo";
        case PolicyKind::Periodic: return "periodic";
        case PolicyKind::Random: return "random";
    }
    return "?";
}

PolicyKind parse_policy_kind(const std::string& name) {
    for (auto k : {PolicyKind::Drl, PolicyKind::Greedy, PolicyKind::Local, PolicyKind::Fifo,
                   PolicyKind::Periodic, PolicyKind::Random}) {
        if (policy_kind_name(k) == name) return k;
    }
    throw InvalidArgument("unknown policy '" + name +
                          "' (expected drl, greedy, local, fifo, periodic or random)");
}

std::string PolicySpec::label() const { return policy_kind_name(kind); }

std::unique_ptr<Policy> make_policy(const PolicySpec& spec, std::uint64_t run_seed) {
    switch (spec.kind) {
        case PolicyKind::Drl:
            if (!spec.model) throw InvalidArgument("the drl policy needs a checkpoint");
            return std::make_unique<DqnPolicy>(spec.model);
        case PolicyKind::Greedy: return std::make_unique<GreedyPolicy>();
        case PolicyKind::Local: return std::make_unique<LocalOnlyPolicy>();
        case PolicyKind::Fifo: return std::make_unique<FifoOffloadPolicy>();
        case PolicyKind::Periodic: return std::make_unique<PeriodicBatchPolicy>(spec.period);
        case PolicyKind::Random: return std::make_unique<RandomPolicy>(derive_seed(run_seed, 30));
    }
    throw InvalidArgument("unknown policy kind");
}

std::string sweep_parameter_name(SweepParameter p) {
    switch (p) {
        case SweepParameter::TaskSize: return "task_size";
        case SweepParameter::Lambda: return "lambda";
        case SweepParameter::QueueM: return "queue_m";
    }
    return "?";
}

SweepParameter parse_sweep_parameter(const std::string& name) {
    for (auto p : {SweepParameter::TaskSize, SweepParameter::Lambda, SweepParameter::QueueM}) {
        if (sweep_parameter_name(p) == name) return p;
    }
    throw InvalidArgument("unknown sweep parameter '" + name +
                          "' (expected task_size, lambda or queue_m)");
}

void SweepSpec::validate() const {
    if (values.empty() || policies.empty() || seeds.empty()) {
        throw InvalidArgument("sweep needs at least one value, policy and seed");
    }
    for (double v : values) {
        apply_sweep_value(base, parameter, v).validate();
    }
}

SimConfig apply_sweep_value(const SimConfig& base, SweepParameter p, double value) {
    SimConfig cfg = base;
    switch (p) {
        case SweepParameter::TaskSize: {
            const double half = 0.5 * (base.n_max - base.n_min);
            const double mid = value * 1e3;
            cfg.n_min = mid - half;
            cfg.n_max = mid + half;
            break;
        }
        case SweepParameter::Lambda:
            cfg.lambda = value;
            break;
        case SweepParameter::QueueM:
            if (value < 1.0 || value != std::floor(value)) {
                throw InvalidArgument("queue_m sweep values must be positive integers");
            }
            cfg.M = static_cast<int>(value);
            break;
    }
    cfg.validate();
    return cfg;
}

std::vector<SweepRow> run_sweep(const SweepSpec& spec, int jobs) {
    spec.validate();
    struct Job {
        std::size_t value;
        std::size_t policy;
        std::size_t seed;
    };
    std::vector<Job> work;
    for (std::size_t v = 0; v < spec.values.size(); ++v) {
        for (std::size_t p = 0; p < spec.policies.size(); ++p) {
            for (std::size_t s = 0; s < spec.seeds.size(); ++s) {
                work.push_back({v, p, s});
            }
        }
    }
    std::vector<SweepRow> rows(work.size());
    auto run_one = [&](std::size_t i) {
        const Job& job = work[i];
        SimConfig cfg = apply_sweep_value(spec.base, spec.parameter, spec.values[job.value]);
        cfg.seed = spec.seeds[job.seed];
        const PolicySpec& ps = spec.policies[job.policy];
        auto policy = make_policy(ps, cfg.seed);
        const SimResult res = run(cfg, *policy);
        rows[i] = SweepRow{spec.values[job.value], ps.label(), cfg.seed,
                           evaluate(res.outcomes, cfg.cost)};
    };

    const auto threads = static_cast<std::size_t>(std::max(jobs, 1));
    if (threads == 1) {
        for (std::size_t i = 0; i < work.size(); ++i) run_one(i);
        return rows;
    }
    std::atomic<std::size_t> next{0};
    std::exception_ptr failure;
    std::mutex failure_mutex;
    std::vector<std::thread> pool;
    for (std::size_t t = 0; t < std::min(threads, work.size()); ++t) {
        pool.emplace_back([&] {
            for (std::size_t i = next++; i < work.size(); i = next++) {
                try {
                    run_one(i);
                } catch (...) {
                    std::lock_guard lock(failure_mutex);
                    if (!failure) failure = std::current_exception();
                }
            }
        });
    }
    for (auto& th : pool) th.join();
    if (failure) std::rethrow_exception(failure);
    return rows;
}

namespace {


std::vector<double MetricsReport::*> metric_fields() {
    return {&MetricsReport::avg_objective, &MetricsReport::avg_energy, &MetricsReport::avg_delay,
            &MetricsReport::deadline_miss_ratio, &MetricsReport::rejection_rate};
}

}  // namespace

std::vector<SummaryRow> summarize(const std::vector<SweepRow>& rows) {
    std::vector<SummaryRow> out;
    std::map<std::pair<double, std::string>, std::size_t> index;
    std::vector<std::vector<const SweepRow*>> groups;
    for (const auto& r : rows) {
        auto key = std::make_pair(r.parameter, r.policy);
        auto it = index.find(key);
        if (it == index.end()) {
            it = index.emplace(key, groups.size()).first;
            groups.emplace_back();
            SummaryRow s;
            s.parameter = r.parameter;
            s.policy = r.policy;
            out.push_back(s);
        }
        groups[it->second].push_back(&r);
    }
    for (std::size_t g = 0; g < groups.size(); ++g) {
        SummaryRow& s = out[g];
        const auto& members = groups[g];
        s.n = members.size();
        const double n = static_cast<double>(s.n);
        for (auto field : metric_fields()) {
            double mean = 0.0;
            for (const auto* r : members) mean += r->metrics.*field;
            mean /= n;
            double ss = 0.0;
            for (const auto* r : members) {
                const double dv = r->metrics.*field - mean;
                ss += dv * dv;
            }
            s.mean.*field = mean;
            s.stddev.*field = s.n > 1 ? std::sqrt(ss / (n - 1.0)) : 0.0;
        }
        std::size_t count = 0;
        for (const auto* r : members) count += r->metrics.count;
        s.mean.count = count / s.n;
    }
    return out;
}

namespace {

std::string g9(double x) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.9g", x);
    return buf;
}

}  // namespace

void write_sweep_csv(std::ostream& os, const std::vector<SweepRow>& rows) {
    os << "parameter,policy,seed,avg_objective,avg_energy_J,avg_delay_s,miss_ratio,rejection_rate\n";
    for (const auto& r : rows) {
        os << g9(r.parameter) << ',' << r.policy << ',' << r.seed << ',' << g9(r.metrics.avg_objective)
           << ',' << g9(r.metrics.avg_energy) << ',' << g9(r.metrics.avg_delay) << ','
           << g9(r.metrics.deadline_miss_ratio) << ',' << g9(r.metrics.rejection_rate) << '\n';
    }
}

void write_summary_csv(std::ostream& os, const std::vector<SummaryRow>& rows) {
    os << "parameter,policy,n,avg_objective_mean,avg_objective_std,avg_energy_J_mean,"
          "avg_energy_J_std,avg_delay_s_mean,avg_delay_s_std,miss_ratio_mean,miss_ratio_std,"
          "rejection_rate_mean,rejection_rate_std\n";
    for (const auto& r : rows) {
        os << g9(r.parameter) << ',' << r.policy << ',' << r.n;
        for (auto field : metric_fields()) {
            os << ',' << g9(r.mean.*field) << ',' << g9(r.stddev.*field);
        }
        os << '\n';
    }
}

}  // namespace mecsim
