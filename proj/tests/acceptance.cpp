// One PASS/FAIL line per acceptance criterion. Exit status 0 iff all pass.
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "mecsim/metrics.hpp"
#include "mecsim/verify/suites.hpp"

using namespace mecsim;

namespace {

using Clock = std::chrono::steady_clock;

double since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

int failures = 0;

void report(int id, const std::string& title, bool pass, const std::string& detail) {
    std::printf("AC%-2d %s  %s: %s\n", id, pass ? "PASS" : "FAIL", title.c_str(), detail.c_str());
    std::fflush(stdout);
    failures += pass ? 0 : 1;
}

void report_suite(int id, const std::string& title, const verify::SuiteResult& r, double time_limit = 0.0) {
    const bool fast = time_limit <= 0.0 || r.seconds < time_limit;
    char head[96];
    std::snprintf(head, sizeof head, "measured %.3g (tol %.3g); ", r.measured, r.tolerance);
    std::string detail = head + r.detail;
    if (time_limit > 0.0) {
        char buf[64];
        std::snprintf(buf, sizeof buf, "; %.2f s (limit %.0f s)", r.seconds, time_limit);
        detail += buf;
    }
    report(id, title, r.passed && fast, detail);
}

std::vector<std::uint64_t> seeds(std::uint64_t first, int count) {
    std::vector<std::uint64_t> out;
    for (int i = 0; i < count; ++i) out.push_back(first + static_cast<std::uint64_t>(i));
    return out;
}

// Mean metrics per (value, policy).
std::map<std::pair<double, std::string>, MetricsReport> means(const std::vector<SweepRow>& rows) {
    std::map<std::pair<double, std::string>, MetricsReport> out;
    for (const auto& s : summarize(rows)) out[{s.parameter, s.policy}] = s.mean;
    return out;
}

std::string fmt(const char* f, double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, f, v);
    return buf;
}

std::string csv_of(const std::vector<SweepRow>& rows) {
    std::ostringstream os;
    write_sweep_csv(os, rows);
    return os.str();
}

std::string file_bytes(const std::filesystem::path& p) {
    std::ifstream is(p, std::ios::binary);
    return {std::istreambuf_iterator<char>(is), {}};
}

}  // namespace

int main() {
    const auto t_start = Clock::now();
    const std::uint64_t seed = 20240601;

    report_suite(1, "scheduler matches enumeration",
                 verify::scheduler_enumeration(1000, derive_seed(seed, 1),
                                               [](const ServerQueue& q, const Task& t, const RobotState& r,
                                                  const Environment& e, double now) {
                                                   return greedy_decide(q, t, r, e, now);
                                               }),
                 5.0);
    report_suite(2, "brute force <= greedy <= local", verify::joint_optimum(200, 5, derive_seed(seed, 2)));
    report_suite(3, "transmission delay integral", verify::delay_integral(100, derive_seed(seed, 3)), 30.0);
    report_suite(4, "gradient fidelity", verify::gradient_fidelity(20, derive_seed(seed, 4)));
    report_suite(5, "Adam on a quadratic", verify::adam_quadratic());
    report_suite(6, "Poisson moments", verify::poisson_moments(100000, derive_seed(seed, 5)));
    {
        const auto soak = verify::queue_soak(1000000, derive_seed(seed, 6));
        const auto replay = verify::queue_replay(1000, derive_seed(seed, 7));
        verify::SuiteResult both = soak;
        both.passed = soak.passed && replay.passed;
        both.detail += "; replay check " + std::string(replay.passed ? "clean" : "FAILED");
        report_suite(7, "queue invariants", both);
    }

    // Desk-scale agent shared by the trend and learning criteria.
    SimConfig base;
    const TrainerConfig trainer;
    const auto t_train = Clock::now();
    const TrainResult trained = train(base, trainer, 1000, seed);
    const double train_seconds = since(t_train);
    auto model = std::make_shared<const DqnModel>(trained.model);
    PolicySpec drl{PolicyKind::Drl, 1.0, model};
    const PolicySpec greedy{PolicyKind::Greedy};
    const PolicySpec local{PolicyKind::Local};
    const PolicySpec random{PolicyKind::Random};
    const PolicySpec periodic{PolicyKind::Periodic, 1.0};

    {
        const auto t0 = Clock::now();
        SweepSpec spec;
        spec.parameter = SweepParameter::TaskSize;
        spec.values = {120, 180, 240, 300};
        spec.policies = {greedy, drl, local};
        spec.seeds = seeds(1, 10);
        spec.base = base;
        const auto m = means(run_sweep(spec));
        bool pass = true;
        std::string detail;
        for (const std::string p : {"greedy", "drl"}) {
            detail += p + " [";
            for (std::size_t i = 0; i < spec.values.size(); ++i) {
                const double v = spec.values[i];
                const double obj = m.at({v, p}).avg_objective;
                detail += (i ? " " : "") + fmt("%.5f", obj);
                if (i > 0 && obj < m.at({spec.values[i - 1], p}).avg_objective) pass = false;
                if (!(obj < m.at({v, "local"}).avg_objective)) pass = false;
            }
            detail += "] ";
        }
        detail += "local [";
        for (std::size_t i = 0; i < spec.values.size(); ++i) {
            detail += (i ? " " : "") + fmt("%.5f", m.at({spec.values[i], "local"}).avg_objective);
        }
        const double secs = since(t0);
        detail += "]; " + fmt("%.1f s", secs);
        report(8, "objective rises with task size, learned and greedy below local", pass && secs < 300.0,
               detail);
    }
    {
        SweepSpec spec;
        spec.parameter = SweepParameter::Lambda;
        spec.values = {15, 20};
        spec.policies = {greedy, periodic};
        spec.seeds = seeds(1, 10);
        spec.base = base;
        const auto m = means(run_sweep(spec));
        bool pass = true;
        std::string detail;
        for (double v : spec.values) {
            const auto& g = m.at({v, "greedy"});
            const auto& p = m.at({v, "periodic"});
            pass = pass && g.deadline_miss_ratio < p.deadline_miss_ratio && g.avg_objective < p.avg_objective;
            detail += "lambda " + fmt("%g", v) + ": miss " + fmt("%.4f", g.deadline_miss_ratio) + " vs " +
                      fmt("%.4f", p.deadline_miss_ratio) + ", objective " + fmt("%.5f", g.avg_objective) + " vs " +
                      fmt("%.5f", p.avg_objective) + "; ";
        }
        report(9, "greedy beats periodic batching under load", pass, detail);
    }
    {
        SweepSpec spec;
        spec.parameter = SweepParameter::QueueM;
        spec.values = {2, 4, 6, 8, 10};
        spec.policies = {greedy};
        spec.seeds = seeds(1, 10);
        spec.base = base;
        const auto m = means(run_sweep(spec));
        bool pass = true;
        std::string detail = "greedy energy [";
        for (std::size_t i = 0; i < spec.values.size(); ++i) {
            const double e = m.at({spec.values[i], "greedy"}).avg_energy;
            detail += (i ? " " : "") + fmt("%.6f", e);
            if (i > 0 && e > m.at({spec.values[i - 1], "greedy"}).avg_energy) pass = false;
        }
        detail += "] J for M = 2..10";
        report(10, "energy non-increasing in queue length", pass, detail);
    }
    {
        SweepSpec spec;
        spec.parameter = SweepParameter::QueueM;
        spec.values = {static_cast<double>(base.M)};
        spec.policies = {drl, greedy, random};
        spec.seeds = seeds(101, 10);
        spec.base = base;
        const auto m = means(run_sweep(spec));
        const double d = m.at({spec.values[0], "drl"}).avg_objective;
        const double g = m.at({spec.values[0], "greedy"}).avg_objective;
        const double r = m.at({spec.values[0], "random"}).avg_objective;
        const bool within = d - g <= 0.10 * std::abs(g);
        const bool pass = trained.transitions <= 100000 && train_seconds < 900.0 && d < r && within;
        report(11, "learned policy beats random, within 10% of greedy", pass,
               "drl " + fmt("%.5f", d) + ", greedy " + fmt("%.5f", g) + ", random " + fmt("%.5f", r) +
                   ", gap to greedy " + fmt("%.1f%%", 100.0 * (d - g) / std::abs(g)) + "; " +
                   std::to_string(trained.transitions) + " transitions in " + fmt("%.0f s", train_seconds));
    }
    {
        SweepSpec spec;
        spec.parameter = SweepParameter::TaskSize;
        spec.values = {150, 250};
        spec.policies = {greedy, random, periodic, drl};
        spec.seeds = seeds(1, 3);
        spec.base = base;
        spec.base.duration = 20.0;
        const bool sweep_same = csv_of(run_sweep(spec, 1)) == csv_of(run_sweep(spec, 2)) &&
                                csv_of(run_sweep(spec, 1)) == csv_of(run_sweep(spec, 1));

        SimConfig small = base;
        TrainerConfig quick = trainer;
        quick.max_transitions = 3000;
        quick.episode_duration = 5.0;
        quick.calibration_duration = 5.0;
        const auto dir = std::filesystem::temp_directory_path() / "mecsim_acceptance";
        std::filesystem::create_directories(dir);
        save_checkpoint(dir / "a.ckpt", train(small, quick, 100, 77).model, {{"seed", "77"}});
        save_checkpoint(dir / "b.ckpt", train(small, quick, 100, 77).model, {{"seed", "77"}});
        const bool ckpt_same = file_bytes(dir / "a.ckpt") == file_bytes(dir / "b.ckpt") &&
                               file_bytes(dir / "a.ckpt.meta") == file_bytes(dir / "b.ckpt.meta") &&
                               !file_bytes(dir / "a.ckpt").empty();
        std::filesystem::remove_all(dir);
        report(12, "byte-identical reruns", sweep_same && ckpt_same,
               std::string("sweep CSV (1 and 2 threads) ") + (sweep_same ? "identical" : "DIFFERS") +
                   ", checkpoint " + (ckpt_same ? "identical" : "DIFFERS"));
    }

    std::printf("%d of 12 criteria failed; %.0f s total\n", failures, since(t_start));
    return failures == 0 ? 0 : 1;
}
