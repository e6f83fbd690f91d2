#include "mecsim/scheduler.hpp"

#include <algorithm>
#include <string>

namespace mecsim {

TaskEstimate estimate_task(const Task& task, const RobotState& robot, const Environment& env,
                           double now) {
    TaskEstimate est;
    est.waited = std::max(now - task.t_gen, 0.0);
    est.t_tra = transmission_delay(task.n, robot, env.plane, env.cost.p_tra, env.channel);
    est.t_com = edge_compute_time(task.n, env.cost);
    est.t_loc = local_time(task.n, env.cost);
    est.e_loc = local_energy(task.n, env.cost);
    return est;
}

QueueEntry make_entry(const Task& task, const RobotState& robot, const TaskEstimate& est,
                      double now) {
    return QueueEntry{task, now + est.t_tra, est.t_com, now, robot};
}

std::vector<OptionCost> evaluate_options(const ServerQueue& q, const Task& task,
                                         const RobotState& robot, const Environment& env,
                                         double now) {
    const CostParams& p = env.cost;
    const TaskEstimate est = estimate_task(task, robot, env, now);

    std::vector<OptionCost> out;
    OptionCost local;
    local.T = est.waited + est.t_loc;
    local.E = est.e_loc;
    local.own = task_cost(local.T, local.E, task.d, p);
    local.total = local.own;
    out.push_back(local);
    if (q.full()) {
        return out;
    }

    const QueueEntry entry = make_entry(task, robot, est, now);
    for (int pos = 1; pos <= q.length() + 1; ++pos) {
        OptionCost opt;
        opt.position = pos;
        const double t_rea = q.ready_time(pos, now);
        const DelayEnergy de =
            task_delay_energy(true, est.t_tra, t_rea, est.t_com, est.t_loc, est.e_loc, p);
        opt.T = est.waited + de.T;
        opt.E = de.E;
        opt.own = task_cost(opt.T, opt.E, task.d, p);
        const auto deltas = q.delta_delays(entry, pos, now);
        for (const auto& delta : deltas) {
            opt.loss_delay += delta.t_add / delta.d;
            opt.loss_energy += delta.t_add * p.p_idl;
        }
        opt.total = opt.own + p.beta * opt.loss_delay + p.alpha * opt.loss_energy;
        out.push_back(opt);
    }
    return out;
}

double insertion_loss(const ServerQueue& q, const QueueEntry& e, int position, double now) {
    const auto deltas = q.delta_delays(e, position, now);
    double loss = 0.0;
    for (const auto& delta : deltas) {
        loss += delta.t_add / delta.d;
    }
    return loss;
}

Decision greedy_decide(const ServerQueue& q, const Task& task, const RobotState& robot,
                       const Environment& env, double now) {
    const auto options = evaluate_options(q, task, robot, env, now);
    if (q.full()) {
        return Decision::reject(options.front().total);
    }
    std::size_t best = 0;
    for (std::size_t i = 1; i < options.size(); ++i) {
        if (options[i].total < options[best].total) {
            best = i;
        }
    }
    if (best == 0) {
        return Decision::local(options[0].total);
    }
    return Decision::insert(options[best].position, options[best].total);
}

namespace {

const RobotState& robot_of(const Task& t, const std::vector<RobotState>& robots) {
    for (const auto& r : robots) {
        if (r.robot_id == t.robot_id) {
            return r;
        }
    }
    throw InvalidArgument("no robot state for robot " + std::to_string(t.robot_id));
}

// Objective of every task currently held by the server plus the supplied
// local costs. The server replays in-service then waiting entries in order.
double realized_server_cost(const ServerQueue& q, const CostParams& p, double now) {
    double cost = 0.0;
    auto add = [&](const QueueEntry& e, double start) {
        const double end = start + e.t_com;
        const double t_tra = e.arrival_complete_at - e.enqueued_at;
        const double energy = t_tra * p.p_tra + (start - e.arrival_complete_at) * p.p_idl;
        cost += task_cost(end - e.task.t_gen, energy, e.task.d, p);
    };
    double t = now;
    if (q.in_service()) {
        add(q.in_service()->entry, q.in_service()->started_at);
        t = std::max(t, q.in_service()->finishes_at());
    }
    for (const auto& e : q.waiting()) {
        const double start = std::max(t, e.arrival_complete_at);
        add(e, start);
        t = start + e.t_com;
    }
    return cost;
}

}  // namespace

BatchSchedule brute_force_schedule(const std::vector<Task>& tasks,
                                   const std::vector<RobotState>& robots, const ServerQueue& q0,
                                   const Environment& env, double now) {
    if (tasks.size() > kBruteForceMaxTasks) {
        throw InvalidArgument("brute_force_schedule: at most " +
                              std::to_string(kBruteForceMaxTasks) + " tasks, got " +
                              std::to_string(tasks.size()));
    }
    if (!q0.idle() || q0.length() != 0) {
        throw InvalidArgument("brute_force_schedule: server must start empty");
    }
    const CostParams& p = env.cost;
    const std::size_t n = tasks.size();
    BatchSchedule best;
    best.order.assign(n, 0);
    if (n == 0) {
        return best;
    }

    std::vector<TaskEstimate> est;
    std::vector<double> local_cost;
    for (const auto& t : tasks) {
        est.push_back(estimate_task(t, robot_of(t, robots), env, now));
        local_cost.push_back(task_cost(est.back().waited + est.back().t_loc, est.back().e_loc, t.d, p));
    }

    // One task in service plus a full waiting line.
    const std::size_t max_offloaded = static_cast<std::size_t>(q0.capacity()) + 1;
    bool have_best = false;
    for (std::uint32_t mask = 0; mask < (1u << n); ++mask) {
        std::vector<std::size_t> offloaded;
        double base = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            if (mask & (1u << i)) {
                offloaded.push_back(i);
            } else {
                base += local_cost[i];
            }
        }
        if (offloaded.size() > max_offloaded) {
            continue;
        }
        do {
            double cost = base;
            double server_free = now;
            for (std::size_t idx : offloaded) {
                const TaskEstimate& e = est[idx];
                const double arrival = now + e.t_tra;
                const double start = std::max(server_free, arrival);
                server_free = start + e.t_com;
                const double T = e.waited + (server_free - now);
                const double E = e.t_tra * p.p_tra + (start - arrival) * p.p_idl;
                cost += task_cost(T, E, tasks[idx].d, p);
            }
            if (!have_best || cost < best.cost) {
                have_best = true;
                best.cost = cost;
                std::fill(best.order.begin(), best.order.end(), 0);
                for (std::size_t k = 0; k < offloaded.size(); ++k) {
                    best.order[offloaded[k]] = static_cast<int>(k + 1);
                }
            }
        } while (std::next_permutation(offloaded.begin(), offloaded.end()));
    }
    return best;
}

BatchSchedule sequential_greedy_schedule(const std::vector<Task>& tasks,
                                         const std::vector<RobotState>& robots,
                                         const ServerQueue& q0, const Environment& env,
                                         double now) {
    ServerQueue q = q0;
    double local_cost = 0.0;
    for (const auto& t : tasks) {
        const RobotState& r = robot_of(t, robots);
        const Decision dec = greedy_decide(q, t, r, env, now);
        if (dec.offloaded()) {
            q.insert(make_entry(t, r, estimate_task(t, r, env, now), now), dec.position);
            q.start_next(now);
        } else {
            local_cost += task_cost(std::max(now - t.t_gen, 0.0) + local_time(t.n, env.cost),
                                    local_energy(t.n, env.cost), t.d, env.cost);
        }
    }

    BatchSchedule out;
    out.order.assign(tasks.size(), 0);
    int k = 0;
    auto mark = [&](TaskId id) {
        ++k;
        for (std::size_t i = 0; i < tasks.size(); ++i) {
            if (tasks[i].id == id) {
                out.order[i] = k;
            }
        }
    };
    if (q.in_service()) {
        mark(q.in_service()->entry.task.id);
    }
    for (const auto& e : q.waiting()) {
        mark(e.task.id);
    }
    out.cost = local_cost + realized_server_cost(q, env.cost, now);
    return out;
}

double local_only_cost(const std::vector<Task>& tasks, const Environment& env, double now) {
    double cost = 0.0;
    for (const auto& t : tasks) {
        cost += task_cost(std::max(now - t.t_gen, 0.0) + local_time(t.n, env.cost),
                          local_energy(t.n, env.cost), t.d, env.cost);
    }
    return cost;
}

std::optional<Decision> GreedyPolicy::decide(const DecisionContext& ctx) {
    return greedy_decide(ctx.queue, ctx.task, ctx.robot, ctx.env, ctx.now);
}

std::optional<Decision> LocalOnlyPolicy::decide(const DecisionContext&) {
    return Decision::local();
}

std::optional<Decision> FifoOffloadPolicy::decide(const DecisionContext& ctx) {
    if (ctx.queue.full()) {
        return Decision::reject();
    }
    return Decision::insert(ctx.queue.length() + 1);
}

PeriodicBatchPolicy::PeriodicBatchPolicy(double period) : period_(period) {
    if (!(period > 0.0)) {
        throw InvalidArgument("periodic batch period must be positive");
    }
}

std::optional<Decision> PeriodicBatchPolicy::decide(const DecisionContext& ctx) {
    if (!ctx.period_release) {
        pending_.push_back(ctx.task);
        return std::nullopt;
    }
    if (ctx.queue.full()) {
        return Decision::reject();
    }
    return Decision::insert(ctx.queue.length() + 1);
}

std::vector<Task> PeriodicBatchPolicy::release_deferred() {
    std::vector<Task> out;
    out.swap(pending_);
    return out;
}

std::optional<Decision> RandomPolicy::decide(const DecisionContext& ctx) {
    if (ctx.queue.full()) {
        return Decision::reject();
    }
    const auto choice = static_cast<int>(rng_.below(static_cast<std::uint64_t>(ctx.queue.length()) + 2));
    if (choice == 0) {
        return Decision::local();
    }
    return Decision::insert(choice);
}

}  // namespace mecsim
