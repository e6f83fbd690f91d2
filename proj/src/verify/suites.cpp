#include "mecsim/verify/suites.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <numbers>
#include <set>
#include <sstream>

#include "mecsim/metrics.hpp"
#include "mecsim/verify/oracles.hpp"

namespace mecsim::verify {

namespace {

class Stopwatch {
public:
    double seconds() const {
        return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
    }

private:
    std::chrono::steady_clock::time_point start_ = std::chrono::steady_clock::now();
};

RobotState random_robot(Rng& rng, const Plane& plane, double speed, RobotId id) {
    RobotState r;
    r.robot_id = id;
    r.l = {rng.uniform(0.0, plane.edge), rng.uniform(0.0, plane.edge)};
    const double th = rng.uniform(0.0, 2.0 * std::numbers::pi);
    r.v = {std::cos(th), std::sin(th)};
    r.speed = speed;
    return r;
}

Task random_task(Rng& rng, TaskId id, double t_gen) {
    Task t;
    t.id = id;
    t.robot_id = static_cast<RobotId>(id);
    t.n = rng.uniform(120e3, 300e3);
    t.d = rng.uniform(0.5, 2.0);
    t.t_gen = t_gen;
    return t;
}

}  // namespace

DecisionInstance random_decision_instance(Rng& rng, int M) {
    Environment env;
    env.cost.alpha = rng.uniform(0.1, 0.9);
    env.cost.beta = 1.0 - env.cost.alpha;
    const double now = 10.0;
    ServerQueue q(M);
    TaskId next_id = 1;
    const int L = static_cast<int>(rng.below(static_cast<std::uint64_t>(M) + 1));
    const double load = std::pow(10.0, rng.uniform(0.0, 1.2));
    auto random_entry = [&](double t_gen) {
        QueueEntry e;
        e.task = random_task(rng, next_id++, t_gen);
        e.task.n *= load;
        e.robot = random_robot(rng, env.plane, 2.0, e.task.robot_id);
        e.enqueued_at = t_gen;
        e.arrival_complete_at = t_gen + rng.uniform(0.005, 0.6);
        e.t_com = edge_compute_time(e.task.n, env.cost);
        return e;
    };
    if (rng.uniform01() < 0.85) {
        QueueEntry e = random_entry(now - rng.uniform(0.0, 0.3));
        const double start = now - rng.uniform(-0.05, e.t_com * 0.99);
        e.arrival_complete_at = std::min(e.arrival_complete_at, start);
        e.enqueued_at = std::min(e.enqueued_at, e.arrival_complete_at);
        e.task.t_gen = e.enqueued_at;
        q.insert(e, 1);
        q.start_next(start);
    }
    for (int i = 0; i < L; ++i) {
        q.insert(random_entry(now - rng.uniform(0.0, 1.0)), q.length() + 1);
    }
    Task task = random_task(rng, next_id++, now);
    RobotState robot = random_robot(rng, env.plane, 2.0, task.robot_id);
    return {q, task, robot, env, now};
}

SuiteResult scheduler_enumeration(int instances, std::uint64_t seed, const Decider& decider) {
    Stopwatch sw;
    Rng rng(seed);
    int mismatches = 0;
    int inserts = 0;
    int locals = 0;
    for (int i = 0; i < instances; ++i) {
        const int M = 1 + static_cast<int>(rng.below(10));
        const DecisionInstance inst = random_decision_instance(rng, M);
        const Decision got = decider(inst.queue, inst.task, inst.robot, inst.env, inst.now);
        const Decision want =
            oracle::enumerate_decision(inst.queue, inst.task, inst.robot, inst.env, inst.now);
        if (got.kind != want.kind || got.position != want.position) {
            ++mismatches;
        }
        inserts += want.kind == DecisionKind::Insert ? 1 : 0;
        locals += want.kind == DecisionKind::Local ? 1 : 0;
    }
    SuiteResult r;
    r.name = "scheduler-enumeration";
    r.measured = mismatches;
    r.tolerance = 0;
    r.seconds = sw.seconds();
    r.passed = mismatches == 0;
    std::ostringstream os;
    os << instances << " instances, " << mismatches << " mismatches (oracle chose " << inserts
       << " inserts, " << locals << " local)";
    r.detail = os.str();
    return r;
}

SuiteResult joint_optimum(int batches, int max_tasks, std::uint64_t seed) {
    Stopwatch sw;
    Rng rng(seed);
    Environment env;
    int violations = 0;
    double gap_sum = 0.0;
    double worst_excess = 0.0;
    for (int b = 0; b < batches; ++b) {
        const int k = 1 + static_cast<int>(rng.below(static_cast<std::uint64_t>(max_tasks)));
        std::vector<Task> tasks;
        std::vector<RobotState> robots;
        for (int i = 0; i < k; ++i) {
            tasks.push_back(random_task(rng, i, 0.0));
            robots.push_back(random_robot(rng, env.plane, 2.0, tasks.back().robot_id));
        }
        const ServerQueue q0(10);
        const double opt = brute_force_schedule(tasks, robots, q0, env, 0.0).cost;
        const double greedy = sequential_greedy_schedule(tasks, robots, q0, env, 0.0).cost;
        const double local = local_only_cost(tasks, env, 0.0);
        const double slack = 1e-12 * (1.0 + std::abs(local));
        worst_excess = std::max({worst_excess, opt - greedy, greedy - local});
        if (opt > greedy + slack || greedy > local + slack) {
            ++violations;
        }
        gap_sum += greedy - opt;
    }
    SuiteResult r;
    r.name = "joint-optimum";
    r.measured = violations;
    r.tolerance = 0;
    r.seconds = sw.seconds();
    r.passed = violations == 0;
    std::ostringstream os;
    os << batches << " batches of <= " << max_tasks << " tasks, " << violations
       << " ordering violations, mean greedy-optimal gap " << gap_sum / batches;
    r.detail = os.str();
    return r;
}

SuiteResult delay_integral(int instances, std::uint64_t seed) {
    Stopwatch sw;
    Rng rng(seed);
    const Plane plane;
    const ChannelParams cp;
    const double p_tra = 0.05;
    double worst_static = 0.0;
    double worst_moving = 0.0;
    double worst_balance = 0.0;
    for (int i = 0; i < instances; ++i) {
        const double n = std::exp(rng.uniform(std::log(1e5), std::log(1e7)));
        RobotState still = random_robot(rng, plane, 0.0, 0);
        const double r = std::max(distance(still.l, plane.server_pos()), cp.min_distance);
        const double closed = n / (cp.bandwidth * std::log2(1.0 + p_tra * cp.gain_ref / (cp.noise_power * r * r)));
        const double got_static = transmission_delay(n, still, plane, p_tra, cp);
        worst_static = std::max(worst_static, std::abs(got_static - closed) / closed);

        RobotState moving = random_robot(rng, plane, rng.uniform(0.5, 20.0), 0);
        const double got = transmission_delay(n, moving, plane, p_tra, cp);
        const double want = oracle::fine_grid_delay(n, moving, plane, p_tra, cp, 1e-5);
        worst_moving = std::max(worst_moving, std::abs(got - want) / want);
        const double bits = transmitted_bits(moving, 0.0, got, plane, p_tra, cp);
        worst_balance = std::max(worst_balance, std::abs(bits - n) / n);
    }
    SuiteResult r;
    r.name = "delay-integral";
    r.measured = worst_moving;
    r.tolerance = 1e-6;
    r.seconds = sw.seconds();
    r.passed = worst_static <= 1e-12 && worst_moving <= 1e-6 && worst_balance <= 1e-9;
    std::ostringstream os;
    os << instances << " instances; stationary rel err " << worst_static
       << " (tol 1e-12); moving vs dt=1e-5 grid rel err " << worst_moving
       << " (tol 1e-6); bit balance rel err " << worst_balance << " (tol 1e-9)";
    r.detail = os.str();
    return r;
}

SuiteResult mobility_reflection(int instances, std::uint64_t seed) {
    Stopwatch sw;
    Rng rng(seed);
    const Plane plane;
    double worst = 0.0;
    bool inside = true;
    for (int i = 0; i < instances; ++i) {
        const RobotState s = random_robot(rng, plane, rng.uniform(0.1, 5.0), 0);
        const double t = rng.uniform(0.0, 200.0);
        const Vec2 got = position_at(s, t, plane);
        const Vec2 want = oracle::stepped_position(s, t, plane, 1e-2);
        worst = std::max(worst, distance(got, want));
        inside = inside && plane.contains(got);
    }
    SuiteResult r;
    r.name = "mobility-reflection";
    r.measured = worst;
    r.tolerance = 1e-6;
    r.seconds = sw.seconds();
    r.passed = inside && worst <= 1e-6;
    std::ostringstream os;
    os << instances << " trajectories vs small-step integrator, max position error " << worst
       << " m" << (inside ? "" : ", position left the plane");
    r.detail = os.str();
    return r;
}

SuiteResult gradient_fidelity(int networks, std::uint64_t seed) {
    Stopwatch sw;
    Rng rng(seed);
    double worst = 0.0;
    for (int i = 0; i < networks; ++i) {
        std::vector<int> dims{3 + static_cast<int>(rng.below(10)), 4 + static_cast<int>(rng.below(13)),
                              4 + static_cast<int>(rng.below(13)), 2 + static_cast<int>(rng.below(5))};
        Network net = Network::kaiming(dims, rng.next());
        for (auto& l : net.layers()) {
            for (Eigen::Index k = 0; k < l.b.size(); ++k) l.b[k] = rng.uniform(-0.1, 0.1);
        }
        const int batch = 1 + static_cast<int>(rng.below(4));
        Eigen::MatrixXd states(dims.front(), batch);
        std::vector<int> actions;
        std::vector<double> targets;
        for (int b = 0; b < batch; ++b) {
            for (int k = 0; k < dims.front(); ++k) states(k, b) = rng.uniform(-1.0, 1.0);
            actions.push_back(static_cast<int>(rng.below(static_cast<std::uint64_t>(dims.back()))));
            targets.push_back(rng.uniform(-1.0, 1.0));
        }
        worst = std::max(worst, oracle::check_gradient(net, states, actions, targets).max_rel_error);
    }
    SuiteResult r;
    r.name = "gradient-fidelity";
    r.measured = worst;
    r.tolerance = 1e-4;
    r.seconds = sw.seconds();
    r.passed = worst < 1e-4;
    r.detail = std::to_string(networks) + " random networks vs central differences (h = 1e-5)";
    return r;
}

SuiteResult adam_quadratic() {
    Stopwatch sw;
    double x = 0.0;
    double m = 0.0;
    double v = 0.0;
    AdamConfig cfg;
    cfg.lr = 0.05;
    int first_hit = -1;
    for (int step = 1; step <= 5000; ++step) {
        const double g = 2.0 * (x - 3.0);
        adam_update({&x, 1}, {&g, 1}, {&m, 1}, {&v, 1}, step, cfg);
        if (first_hit < 0 && std::abs(x - 3.0) < 1e-3) first_hit = step;
    }
    SuiteResult r;
    r.name = "adam-quadratic";
    r.measured = std::abs(x - 3.0);
    r.tolerance = 1e-3;
    r.seconds = sw.seconds();
    r.passed = r.measured < 1e-3;
    r.detail = "f(x) = (x - 3)^2, lr 0.05, |x - 3| after 5000 steps; first within tolerance at step " +
               std::to_string(first_hit);
    return r;
}

SuiteResult poisson_moments(int windows, std::uint64_t seed) {
    Stopwatch sw;
    const double lambda = 10.0;
    const double width = 0.1;
    Rng rng(seed);
    const auto arrivals = generate_arrivals(lambda, width * windows, 1, rng);
    std::vector<int> counts(static_cast<std::size_t>(windows), 0);
    for (double t : arrivals[0]) {
        const auto w = static_cast<std::size_t>(t / width);
        if (w < counts.size()) ++counts[w];
    }
    const double N = windows;
    const double mu = lambda * width;
    double mean = 0.0;
    for (int c : counts) mean += c;
    mean /= N;
    double var = 0.0;
    int zeros = 0;
    for (int c : counts) {
        var += (c - mean) * (c - mean);
        zeros += c == 0 ? 1 : 0;
    }
    var /= N - 1.0;
    const double se_mean = std::sqrt(mu / N);
    const double se_var = std::sqrt((mu + 2.0 * mu * mu) / N);
    const double p0 = std::exp(-mu);
    const double se_p0 = std::sqrt(p0 * (1.0 - p0) / N);
    const double z_mean = std::abs(mean - mu) / se_mean;
    const double z_var = std::abs(var - mu) / se_var;
    const double z_p0 = std::abs(zeros / N - p0) / se_p0;
    SuiteResult r;
    r.name = "poisson-moments";
    r.measured = std::max({z_mean, z_var, z_p0});
    r.tolerance = 3.0;
    r.seconds = sw.seconds();
    r.passed = r.measured <= 3.0;
    std::ostringstream os;
    os << windows << " windows of " << width << " s at lambda " << lambda << ": mean " << mean
       << " (z " << z_mean << "), variance " << var << " (z " << z_var << "), P(0) " << zeros / N
       << " vs " << p0 << " (z " << z_p0 << ")";
    r.detail = os.str();
    return r;
}

SuiteResult queue_replay(int instances, std::uint64_t seed) {
    Stopwatch sw;
    Rng rng(seed);
    double worst = 0.0;
    for (int i = 0; i < instances; ++i) {
        const int M = 1 + static_cast<int>(rng.below(10));
        const DecisionInstance inst = random_decision_instance(rng, M);
        const ServerQueue& q = inst.queue;
        const double now = inst.now;
        const double busy = oracle::busy_until(q, now);
        const auto base_jobs = oracle::jobs_of(q);
        const auto base = oracle::replay_queue(now, busy, base_jobs);
        for (int pos = 1; pos <= q.length() + 1; ++pos) {
            const double want = pos == 1 ? std::max(busy, now) - now
                                         : base.end[static_cast<std::size_t>(pos - 2)] - now;
            worst = std::max(worst, std::abs(q.ready_time(pos, now) - want));
        }
        if (q.full()) continue;
        const TaskEstimate est = estimate_task(inst.task, inst.robot, inst.env, now);
        const QueueEntry e = make_entry(inst.task, inst.robot, est, now);
        for (int pos = 1; pos <= q.length() + 1; ++pos) {
            auto jobs = base_jobs;
            jobs.insert(jobs.begin() + pos - 1, {e.task.id, e.arrival_complete_at, e.t_com});
            const auto after = oracle::replay_queue(now, busy, jobs);
            const auto deltas = q.delta_delays(e, pos, now);
            for (std::size_t k = 0; k < deltas.size(); ++k) {
                const std::size_t shifted = static_cast<int>(k) >= pos - 1 ? k + 1 : k;
                worst = std::max(worst, std::abs(deltas[k].t_add - (after.end[shifted] - base.end[k])));
            }
        }
    }
    SuiteResult r;
    r.name = "queue-replay";
    r.measured = worst;
    r.tolerance = 1e-12;
    r.seconds = sw.seconds();
    r.passed = worst <= 1e-12;
    r.detail = std::to_string(instances) +
               " random queues; ready times and insertion delays vs event-by-event replay";
    return r;
}

SuiteResult queue_soak(std::uint64_t min_events, std::uint64_t seed) {
    Stopwatch sw;
    std::uint64_t events = 0;
    std::uint64_t violations = 0;
    std::uint64_t runs = 0;
    std::string first_violation;
    auto flag = [&](const std::string& what) {
        if (violations++ == 0) first_violation = what;
    };
    const PolicyKind kinds[] = {PolicyKind::Random, PolicyKind::Greedy, PolicyKind::Fifo,
                                PolicyKind::Periodic};
    const int Ms[] = {2, 5, 10};
    while (events < min_events) {
        SimConfig cfg;
        cfg.seed = derive_seed(seed, runs);
        cfg.lambda = 20.0;
        cfg.duration = 60.0;
        cfg.M = Ms[runs % 3];
        PolicySpec spec;
        spec.kind = kinds[runs % 4];
        auto policy = make_policy(spec, cfg.seed);

        TaskId prev_service = -1;
        TaskId prev_head = -1;
        double last_end = -1.0;
        std::set<TaskId> served;
        RunOptions opts;
        opts.observer = [&](const Event&, const ServerQueue& q) {
            if (q.length() > q.capacity()) flag("waiting line exceeded M");
            const TaskId cur = q.in_service() ? q.in_service()->entry.task.id : -1;
            if (cur != -1 && cur != prev_service) {
                if (prev_head != -1 && cur != prev_head) flag("service started out of queue order");
                if (!served.insert(cur).second) flag("task served twice");
                if (q.in_service()->started_at < last_end - 1e-12) flag("overlapping service intervals");
                last_end = q.in_service()->finishes_at();
            }
            prev_service = cur;
            prev_head = q.waiting().empty() ? -1 : q.waiting().front().task.id;
        };
        const SimResult res = run(cfg, *policy, opts);
        events += res.stats.events;
        ++runs;
        const auto& st = res.stats;
        if (res.outcomes.size() != st.generated) flag("outcome count differs from generated tasks");
        if (st.local + st.rejected + st.offloaded != st.generated) flag("decision partition broken");
        std::set<TaskId> seen;
        std::uint64_t edge = 0;
        for (const auto& o : res.outcomes) {
            if (!seen.insert(o.task_id).second) flag("task finished twice");
            edge += o.site == ExecutionSite::Edge ? 1 : 0;
            if (o.T < 0.0) flag("negative completion delay");
        }
        if (edge != st.offloaded || served.size() != st.offloaded) flag("edge completions differ from admissions");
    }
    SuiteResult r;
    r.name = "queue-soak";
    r.measured = static_cast<double>(violations);
    r.tolerance = 0;
    r.seconds = sw.seconds();
    r.passed = violations == 0;
    r.detail = std::to_string(events) + " events over " + std::to_string(runs) + " runs, " +
               std::to_string(violations) + " violations" +
               (first_violation.empty() ? "" : " (first: " + first_violation + ")");
    return r;
}

std::vector<SuiteResult> run_all(Scale scale, std::uint64_t seed) {
    const bool full = scale == Scale::Full;
    std::vector<SuiteResult> out;
    out.push_back(scheduler_enumeration(full ? 1000 : 200, derive_seed(seed, 1),
                                        [](const ServerQueue& q, const Task& t, const RobotState& r,
                                           const Environment& e, double now) {
                                            return greedy_decide(q, t, r, e, now);
                                        }));
    out.push_back(joint_optimum(full ? 200 : 40, 5, derive_seed(seed, 2)));
    out.push_back(delay_integral(full ? 100 : 10, derive_seed(seed, 3)));
    out.push_back(mobility_reflection(full ? 1000 : 100, derive_seed(seed, 4)));
    out.push_back(gradient_fidelity(full ? 20 : 5, derive_seed(seed, 5)));
    out.push_back(adam_quadratic());
    out.push_back(poisson_moments(full ? 100000 : 20000, derive_seed(seed, 6)));
    out.push_back(queue_replay(full ? 1000 : 200, derive_seed(seed, 7)));
    out.push_back(queue_soak(full ? 1000000 : 100000, derive_seed(seed, 8)));
    return out;
}

std::string format_result(const SuiteResult& r) {
    char buf[512];
    std::snprintf(buf, sizeof buf, "[%s] %-22s measured=%-12.4g tol=%-10.3g %7.2fs  %s",
                  r.passed ? "PASS" : "FAIL", r.name.c_str(), r.measured, r.tolerance, r.seconds,
                  r.detail.c_str());
    return buf;
}

}  // namespace mecsim::verify
