#include "mecsim/sim.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>
#include <queue>
#include <unordered_map>

#include "json.hpp"

namespace mecsim {

void SimConfig::validate() const {
    if (n_rb < 1) throw InvalidArgument("n_rb must be at least 1");
    if (!(plane_edge > 0.0)) throw InvalidArgument("plane_edge must be positive");
    if (speed < 0.0) throw InvalidArgument("speed must be non-negative");
    if (!(lambda > 0.0)) throw InvalidArgument("lambda must be positive");
    if (M < 1) throw InvalidArgument("M must be at least 1");
    if (!(n_min > 0.0 && n_max > n_min)) throw InvalidArgument("task size range must satisfy 0 < n_min < n_max");
    if (!(d_min > 0.0 && d_max > d_min)) throw InvalidArgument("deadline range must satisfy 0 < d_min < d_max");
    if (duration < 0.0) throw InvalidArgument("duration must be non-negative");
    cost.validate();
    channel.validate();
}

std::vector<std::vector<double>> generate_arrivals(double lambda, double duration, int n_rb,
                                                   Rng& rng) {
    if (!(lambda > 0.0)) {
        throw InvalidArgument("generate_arrivals: lambda must be positive");
    }
    std::vector<std::vector<double>> out(static_cast<std::size_t>(n_rb));
    for (auto& times : out) {
        double t = rng.exponential(lambda);
        while (t < duration) {
            times.push_back(t);
            t += rng.exponential(lambda);
        }
    }
    return out;
}

std::vector<Task> generate_tasks(const SimConfig& cfg) {
    Rng arrival_rng(derive_seed(cfg.seed, 1));
    Rng attr_rng(derive_seed(cfg.seed, 2));
    const auto arrivals = generate_arrivals(cfg.lambda, cfg.duration, cfg.n_rb, arrival_rng);
    std::vector<Task> tasks;
    for (std::size_t r = 0; r < arrivals.size(); ++r) {
        for (double t : arrivals[r]) {
            Task task;
            task.robot_id = static_cast<RobotId>(r);
            task.t_gen = t;
            task.n = attr_rng.uniform(cfg.n_min, cfg.n_max);
            task.d = attr_rng.uniform(cfg.d_min, cfg.d_max);
            tasks.push_back(task);
        }
    }
    std::stable_sort(tasks.begin(), tasks.end(), [](const Task& a, const Task& b) {
        return a.t_gen < b.t_gen;
    });
    for (std::size_t i = 0; i < tasks.size(); ++i) {
        tasks[i].id = static_cast<TaskId>(i);
    }
    return tasks;
}

namespace {

struct EventLater {
    bool operator()(const Event& a, const Event& b) const {
        if (a.time != b.time) return a.time > b.time;
        return a.sequence > b.sequence;
    }
};

const char* decision_name(DecisionKind k) {
    switch (k) {
        case DecisionKind::Local: return "local";
        case DecisionKind::Insert: return "insert";
        case DecisionKind::Reject: return "reject";
    }
    return "?";
}

class Engine {
public:
    Engine(const SimConfig& cfg, Policy& policy, const RunOptions& opts)
        : cfg_(cfg),
          env_(cfg.environment()),
          policy_(policy),
          opts_(opts),
          queue_(cfg.M),
          robots_(random_initial_states(cfg.n_rb, env_.plane, cfg.speed, derive_seed(cfg.seed, 0))),
          tasks_(generate_tasks(cfg)) {}

    SimResult run() {
        for (const auto& t : tasks_) {
            schedule(t.t_gen, EventKind::TaskGenerated, t.id);
        }
        result_.stats.generated = tasks_.size();
        if (auto period = policy_.period()) {
            period_ = *period;
            if (!tasks_.empty()) {
                schedule(period_, EventKind::PeriodBoundary, 1);
            }
        }

        while (!events_.empty()) {
            const Event ev = events_.top();
            if (!cfg_.drain && ev.time > cfg_.duration) {
                break;
            }
            if (opts_.max_events != 0 && result_.stats.events >= opts_.max_events) {
                break;
            }
            events_.pop();
            now_ = ev.time;
            dispatch(ev);
            ++result_.stats.events;
            if (opts_.observer) {
                opts_.observer(ev, queue_);
            }
        }

        if (!cfg_.drain) {
            std::erase_if(result_.outcomes, [&](const TaskOutcome& o) {
                return completed_at_.at(o.task_id) > cfg_.duration;
            });
        }
        return std::move(result_);
    }

private:
    struct EdgeRecord {
        double t_tra = 0.0;
        int position = 0;
    };

    void schedule(double time, EventKind kind, std::int64_t ref) {
        events_.push(Event{time, kind, ref, next_sequence_++});
    }

    void trace(const char* event, const Task* task, const char* decision = "", int position = 0,
               double start = -1.0, double end = -1.0) {
        if (!opts_.record_trace) {
            return;
        }
        TraceRecord r;
        r.sequence = result_.trace.size();
        r.time = now_;
        r.event = event;
        if (task) {
            r.task_id = task->id;
            r.robot_id = task->robot_id;
        }
        r.decision = decision;
        r.position = position;
        r.queue_length = queue_.length();
        r.service_start = start;
        r.service_end = end;
        result_.trace.push_back(std::move(r));
    }

    RobotState robot_now(RobotId id) const {
        return advance(robots_[static_cast<std::size_t>(id)], now_, env_.plane);
    }

    void dispatch(const Event& ev) {
        switch (ev.kind) {
            case EventKind::TaskGenerated: {
                const Task& task = tasks_[static_cast<std::size_t>(ev.ref)];
                trace("generated", &task);
                const RobotState robot = robot_now(task.robot_id);
                DecisionContext ctx{queue_, task, robot, env_, now_, false};
                if (auto dec = policy_.decide(ctx)) {
                    apply(task, robot, *dec);
                }
                break;
            }
            case EventKind::UploadComplete:
                trace("upload_complete", &tasks_[static_cast<std::size_t>(ev.ref)]);
                break;
            case EventKind::ComputeComplete:
                finish_compute(ev);
                break;
            case EventKind::PeriodBoundary:
                release(ev);
                break;
        }
    }

    void release(const Event& ev) {
        trace("period", nullptr);
        for (const Task& deferred : policy_.release_deferred()) {
            const Task& task = tasks_[static_cast<std::size_t>(deferred.id)];
            const RobotState robot = robot_now(task.robot_id);
            DecisionContext ctx{queue_, task, robot, env_, now_, true};
            auto dec = policy_.decide(ctx);
            if (!dec) {
                throw std::logic_error("policy deferred a task at a period boundary");
            }
            apply(task, robot, *dec);
        }
        const double next = static_cast<double>(ev.ref + 1) * period_;
        if (static_cast<double>(ev.ref) * period_ < cfg_.duration) {
            schedule(next, EventKind::PeriodBoundary, ev.ref + 1);
        }
    }

    void apply(const Task& task, const RobotState& robot, const Decision& dec) {
        const double waited = now_ - task.t_gen;
        if (!dec.offloaded()) {
            TaskOutcome o;
            o.task_id = task.id;
            o.site = ExecutionSite::Local;
            o.rejected = dec.kind == DecisionKind::Reject;
            const double t_loc = local_time(task.n, env_.cost);
            o.T = waited + t_loc;
            o.E = local_energy(task.n, env_.cost);
            o.d = task.d;
            o.missed_deadline = o.T > task.d;
            result_.outcomes.push_back(o);
            completed_at_[task.id] = now_ + t_loc;
            if (o.rejected) {
                ++result_.stats.rejected;
            } else {
                ++result_.stats.local;
            }
            trace("decision", &task, decision_name(dec.kind));
            return;
        }

        if (queue_.full() || dec.position < 1 || dec.position > queue_.length() + 1) {
            throw std::logic_error("policy '" + policy_.name() + "' chose an infeasible position");
        }
        const TaskEstimate est = estimate_task(task, robot, env_, now_);
        const QueueEntry entry = make_entry(task, robot, est, now_);
        queue_.insert(entry, dec.position);
        edge_[task.id] = EdgeRecord{est.t_tra, dec.position};
        ++result_.stats.offloaded;
        trace("decision", &task, "insert", dec.position);
        schedule(entry.arrival_complete_at, EventKind::UploadComplete, task.id);
        promote();
    }

    void promote() {
        if (queue_.start_next(now_)) {
            const InService& s = *queue_.in_service();
            trace("compute_start", &s.entry.task, "", 0, s.started_at, s.finishes_at());
            schedule(s.finishes_at(), EventKind::ComputeComplete, s.entry.task.id);
        }
    }

    void finish_compute(const Event& ev) {
        const InService current = *queue_.in_service();
        if (current.entry.task.id != ev.ref) {
            throw std::logic_error("compute completion out of service order");
        }
        queue_.complete_head(now_);
        const Task& task = current.entry.task;
        const EdgeRecord& rec = edge_.at(task.id);
        TaskOutcome o;
        o.task_id = task.id;
        o.site = ExecutionSite::Edge;
        o.position = rec.position;
        o.T = now_ - task.t_gen;
        o.E = rec.t_tra * env_.cost.p_tra +
              (current.started_at - current.entry.arrival_complete_at) * env_.cost.p_idl;
        o.d = task.d;
        o.missed_deadline = o.T > task.d;
        result_.outcomes.push_back(o);
        completed_at_[task.id] = now_;
        trace("compute_complete", &task, "", 0, current.started_at, now_);
        if (queue_.in_service()) {
            const InService& s = *queue_.in_service();
            trace("compute_start", &s.entry.task, "", 0, s.started_at, s.finishes_at());
            schedule(s.finishes_at(), EventKind::ComputeComplete, s.entry.task.id);
        }
    }

    const SimConfig& cfg_;
    Environment env_;
    Policy& policy_;
    const RunOptions& opts_;
    ServerQueue queue_;
    std::vector<RobotState> robots_;
    std::vector<Task> tasks_;
    std::priority_queue<Event, std::vector<Event>, EventLater> events_;
    std::uint64_t next_sequence_ = 0;
    double now_ = 0.0;
    double period_ = 0.0;
    std::unordered_map<TaskId, EdgeRecord> edge_;
    std::unordered_map<TaskId, double> completed_at_;
    SimResult result_;
};

}  // namespace

SimResult run(const SimConfig& cfg, Policy& policy, const RunOptions& opts) {
    cfg.validate();
    Engine engine(cfg, policy, opts);
    return engine.run();
}

MetricsReport evaluate(const std::vector<TaskOutcome>& outcomes, const CostParams& p) {
    MetricsReport r;
    r.count = outcomes.size();
    if (outcomes.empty()) {
        return r;
    }
    std::size_t missed = 0;
    std::size_t rejected = 0;
    double energy = 0.0;
    double delay = 0.0;
    for (const auto& o : outcomes) {
        energy += o.E;
        delay += o.T;
        missed += o.missed_deadline ? 1 : 0;
        rejected += o.rejected ? 1 : 0;
    }
    const double n = static_cast<double>(outcomes.size());
    r.avg_objective = objective(outcomes, p) / n;
    r.avg_energy = energy / n;
    r.avg_delay = delay / n;
    r.deadline_miss_ratio = static_cast<double>(missed) / n;
    r.rejection_rate = static_cast<double>(rejected) / n;
    return r;
}

void write_trace(std::ostream& os, const std::vector<TraceRecord>& trace) {
    for (const auto& r : trace) {
        nlohmann::json j;
        j["seq"] = r.sequence;
        j["time"] = r.time;
        j["event"] = r.event;
        j["task_id"] = r.task_id;
        j["robot_id"] = r.robot_id;
        j["queue_length"] = r.queue_length;
        if (!r.decision.empty()) j["decision"] = r.decision;
        if (r.position != 0) j["position"] = r.position;
        if (r.service_start >= 0.0) j["service_start"] = r.service_start;
        if (r.service_end >= 0.0) j["service_end"] = r.service_end;
        os << j.dump() << '\n';
    }
}

}  // namespace mecsim
