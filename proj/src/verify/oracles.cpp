#include "mecsim/verify/oracles.hpp"

#include <algorithm>
#include <cmath>

namespace mecsim::oracle {

Vec2 stepped_position(const RobotState& s, double t, const Plane& plane, double dt) {
    double x = s.l.x;
    double y = s.l.y;
    double vx = s.v.x * s.speed;
    double vy = s.v.y * s.speed;
    const double L = plane.edge;
    auto reflect = [L](double& p, double& v) {
        // A single step never crosses the plane, so one mirror suffices.
        if (p > L) {
            p = 2.0 * L - p;
            v = -v;
        } else if (p < 0.0) {
            p = -p;
            v = -v;
        }
    };
    double elapsed = 0.0;
    while (elapsed < t) {
        const double h = std::min(dt, t - elapsed);
        x += vx * h;
        y += vy * h;
        reflect(x, vx);
        reflect(y, vy);
        elapsed += h;
    }
    return {x, y};
}

double fine_grid_delay(double n, const RobotState& robot, const Plane& plane, double p_tra,
                       const ChannelParams& cp, double dt) {
    const Vec2 server = plane.server_pos();
    const double L = plane.edge;
    double x = robot.l.x;
    double y = robot.l.y;
    double vx = robot.v.x * robot.speed;
    double vy = robot.v.y * robot.speed;
    auto rate = [&] {
        const double r = std::max(std::hypot(x - server.x, y - server.y), cp.min_distance);
        const double snr = p_tra * cp.gain_ref / (r * r) / cp.noise_power;
        return cp.bandwidth * std::log(1.0 + snr) / std::log(2.0);
    };
    auto reflect = [L](double& p, double& v) {
        if (p > L) {
            p = 2.0 * L - p;
            v = -v;
        } else if (p < 0.0) {
            p = -p;
            v = -v;
        }
    };
    double bits = 0.0;
    double r_prev = rate();
    for (std::int64_t k = 1;; ++k) {
        x += vx * dt;
        y += vy * dt;
        reflect(x, vx);
        reflect(y, vy);
        const double r_next = rate();
        const double chunk = 0.5 * (r_prev + r_next) * dt;
        if (bits + chunk >= n) {
            // Crossing inside this step under a linear rate model.
            const double need = n - bits;
            const double slope = (r_next - r_prev) / dt;
            double tau;
            if (std::abs(slope) * dt < 1e-12 * r_prev) {
                tau = need / r_prev;
            } else {
                tau = (-r_prev + std::sqrt(r_prev * r_prev + 2.0 * slope * need)) / slope;
            }
            return static_cast<double>(k - 1) * dt + tau;
        }
        bits += chunk;
        r_prev = r_next;
    }
}

ReplayResult replay_queue(double now, double busy_until, const std::vector<ReplayJob>& jobs) {
    ReplayResult out;
    double clock = now;
    bool busy = busy_until > now;
    double busy_end = busy_until;
    std::size_t next = 0;
    // Walk discrete events: the current service finishing, or the next
    // job's upload landing while the server is idle.
    while (next < jobs.size()) {
        if (busy) {
            clock = busy_end;
            busy = false;
            continue;
        }
        const ReplayJob& j = jobs[next];
        if (j.arrival > clock) {
            clock = j.arrival;  // idle until the upload lands
        }
        out.start.push_back(clock);
        busy = true;
        busy_end = clock + j.t_com;
        out.end.push_back(busy_end);
        ++next;
    }
    return out;
}

double busy_until(const ServerQueue& q, double now) {
    return q.in_service() ? q.in_service()->started_at + q.in_service()->entry.t_com : now;
}

std::vector<ReplayJob> jobs_of(const ServerQueue& q) {
    std::vector<ReplayJob> jobs;
    for (const auto& e : q.waiting()) {
        jobs.push_back({e.task.id, e.arrival_complete_at, e.t_com});
    }
    return jobs;
}

namespace {

struct WaitingCost {
    double t_tra;
    double t_gen;
    double d;
};

double waiting_objective(const std::vector<WaitingCost>& info, const ReplayResult& r,
                         const std::vector<ReplayJob>& jobs, const CostParams& p) {
    double total = 0.0;
    for (std::size_t i = 0; i < jobs.size(); ++i) {
        const double energy = info[i].t_tra * p.p_tra + (r.start[i] - jobs[i].arrival) * p.p_idl;
        const double delay = r.end[i] - info[i].t_gen;
        total += p.alpha * energy + p.beta * (delay - info[i].d) / info[i].d;
    }
    return total;
}

}  // namespace

std::vector<double> enumerate_option_costs(const ServerQueue& q, const Task& task,
                                           const RobotState& robot, const Environment& env,
                                           double now) {
    const CostParams& p = env.cost;
    const double waited = now - task.t_gen;
    const double t_loc = task.n * p.c / p.f_loc;
    const double e_loc = p.gamma * task.n * p.c * p.f_loc * p.f_loc;
    std::vector<double> costs{p.alpha * e_loc + p.beta * (waited + t_loc - task.d) / task.d};
    if (q.length() >= q.capacity()) {
        return costs;
    }
    const double t_tra = transmission_delay(task.n, robot, env.plane, p.p_tra, env.channel);
    const double t_com = task.n * p.c / p.f_edg;

    std::vector<ReplayJob> base = jobs_of(q);
    std::vector<WaitingCost> info;
    for (const auto& e : q.waiting()) {
        info.push_back({e.arrival_complete_at - e.enqueued_at, e.task.t_gen, e.task.d});
    }
    const double busy = busy_until(q, now);
    const double before = waiting_objective(info, replay_queue(now, busy, base), base, p);

    for (std::size_t k = 0; k <= base.size(); ++k) {
        std::vector<ReplayJob> jobs = base;
        std::vector<WaitingCost> inf = info;
        jobs.insert(jobs.begin() + static_cast<std::ptrdiff_t>(k), ReplayJob{task.id, now + t_tra, t_com});
        inf.insert(inf.begin() + static_cast<std::ptrdiff_t>(k), WaitingCost{t_tra, task.t_gen, task.d});
        const double after = waiting_objective(inf, replay_queue(now, busy, jobs), jobs, p);
        costs.push_back(after - before);
    }
    return costs;
}

Decision enumerate_decision(const ServerQueue& q, const Task& task, const RobotState& robot,
                            const Environment& env, double now) {
    const auto costs = enumerate_option_costs(q, task, robot, env, now);
    if (q.length() >= q.capacity()) {
        return Decision::reject(costs[0]);
    }
    std::size_t best = 0;
    for (std::size_t i = 1; i < costs.size(); ++i) {
        if (costs[i] < costs[best]) best = i;
    }
    return best == 0 ? Decision::local(costs[0])
                     : Decision::insert(static_cast<int>(best), costs[best]);
}

std::vector<double> scalar_forward(const Network& net, const std::vector<double>& s) {
    std::vector<double> a = s;
    const auto& layers = net.layers();
    for (std::size_t li = 0; li < layers.size(); ++li) {
        const auto& L = layers[li];
        std::vector<double> z(static_cast<std::size_t>(L.W.rows()));
        for (Eigen::Index i = 0; i < L.W.rows(); ++i) {
            double acc = L.b[i];
            for (Eigen::Index j = 0; j < L.W.cols(); ++j) {
                acc += L.W(i, j) * a[static_cast<std::size_t>(j)];
            }
            const bool last = li + 1 == layers.size();
            z[static_cast<std::size_t>(i)] = last ? std::tanh(acc) : (acc > 0.0 ? acc : 0.01 * acc);
        }
        a = std::move(z);
    }
    return a;
}

GradientCheck check_gradient(Network net, const Eigen::MatrixXd& states,
                             const std::vector<int>& actions, const std::vector<double>& targets,
                             double step, double floor) {
    Gradients g = Gradients::zeros_like(net);
    td_gradient(net, states, actions, targets, g);
    auto loss = [&] {
        // Mean squared error computed per sample through the scalar path.
        double total = 0.0;
        for (Eigen::Index b = 0; b < states.cols(); ++b) {
            std::vector<double> s(states.col(b).data(), states.col(b).data() + states.rows());
            const auto q = scalar_forward(net, s);
            const double e = q[static_cast<std::size_t>(actions[static_cast<std::size_t>(b)])] -
                             targets[static_cast<std::size_t>(b)];
            total += e * e;
        }
        return total / static_cast<double>(states.cols());
    };
    GradientCheck out;
    auto probe = [&](double& param, double analytic, double& worst) {
        const double saved = param;
        param = saved + step;
        const double up = loss();
        param = saved - step;
        const double down = loss();
        param = saved;
        const double numeric = (up - down) / (2.0 * step);
        const double rel = std::abs(analytic - numeric) /
                           std::max(std::abs(analytic) + std::abs(numeric), floor);
        worst = std::max(worst, rel);
    };
    for (std::size_t li = 0; li < net.layers().size(); ++li) {
        double worst = 0.0;
        auto& L = net.layers()[li];
        for (Eigen::Index i = 0; i < L.W.rows(); ++i) {
            for (Eigen::Index j = 0; j < L.W.cols(); ++j) {
                probe(L.W(i, j), g.layers[li].W(i, j), worst);
            }
            probe(L.b[i], g.layers[li].b[i], worst);
        }
        out.per_layer.push_back(worst);
        out.max_rel_error = std::max(out.max_rel_error, worst);
    }
    return out;
}

}  // namespace mecsim::oracle
