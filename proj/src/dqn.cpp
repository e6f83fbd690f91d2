#include "mecsim/dqn.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <optional>
#include <ostream>
#include <sstream>

namespace mecsim {

// ---------------------------------------------------------------- replay

ReplayBuffer::ReplayBuffer(std::size_t capacity) : capacity_(capacity) {
    if (capacity == 0) {
        throw InvalidArgument("replay capacity must be positive");
    }
    items_.reserve(std::min<std::size_t>(capacity, 1u << 16));
}

void ReplayBuffer::push(Transition t) {
    if (items_.size() < capacity_) {
        items_.push_back(std::move(t));
        return;
    }
    items_[head_] = std::move(t);
    head_ = (head_ + 1) % capacity_;
}

const Transition& ReplayBuffer::at(std::size_t i) const {
    if (i >= items_.size()) {
        throw std::out_of_range("replay index out of range");
    }
    return items_[(head_ + i) % items_.size()];
}

std::vector<const Transition*> ReplayBuffer::sample(std::size_t batch, Rng& rng) const {
    if (items_.empty()) {
        throw std::logic_error("cannot sample from an empty replay buffer");
    }
    std::vector<const Transition*> out;
    out.reserve(batch);
    for (std::size_t i = 0; i < batch; ++i) {
        out.push_back(&items_[rng.below(items_.size())]);
    }
    return out;
}

// ---------------------------------------------------------------- encoding

Normalization Normalization::from(const SimConfig& cfg) {
    Normalization n;
    n.d_max = cfg.d_max;
    n.n_max = cfg.n_max;
    n.plane_edge = cfg.plane_edge;
    n.t_com_max = edge_compute_time(cfg.n_max, cfg.cost);
    return n;
}

StateEncoder::StateEncoder(int M, Normalization norm) : M_(M), norm_(norm) {
    if (M < 1) {
        throw InvalidArgument("state encoder needs M >= 1");
    }
}

namespace {

double unit_clip(double x) { return std::clamp(x, -1.0, 1.0); }

}  // namespace

void StateEncoder::write_block(Eigen::VectorXd& out, Eigen::Index at, const Task& task,
                               const RobotState& robot) const {
    out[at + 0] = unit_clip(task.d / norm_.d_max);
    out[at + 1] = unit_clip(robot.v.x);
    out[at + 2] = unit_clip(robot.v.y);
    out[at + 3] = unit_clip(robot.l.x / norm_.plane_edge);
    out[at + 4] = unit_clip(robot.l.y / norm_.plane_edge);
    out[at + 5] = unit_clip(task.n / norm_.n_max);
    out[at + 6] = 1.0;
}

Eigen::VectorXd StateEncoder::encode(const DecisionContext& ctx) const {
    if (ctx.queue.capacity() != M_) {
        throw InvalidArgument("queue capacity does not match the encoder's M");
    }
    Eigen::VectorXd s = Eigen::VectorXd::Zero(dim());
    const auto& waiting = ctx.queue.waiting();
    for (std::size_t k = 0; k < waiting.size(); ++k) {
        write_block(s, static_cast<Eigen::Index>(7 * k), waiting[k].task, waiting[k].robot);
    }
    const Eigen::Index service_at = 7 * M_;
    if (const auto& svc = ctx.queue.in_service()) {
        write_block(s, service_at, svc->entry.task, svc->entry.robot);
        s[service_at + 7] = unit_clip((svc->finishes_at() - ctx.now) / norm_.t_com_max);
    }
    write_block(s, service_at + 8, ctx.task, ctx.robot);
    return s;
}

ActionMask StateEncoder::mask(const ServerQueue& q) const {
    ActionMask m(static_cast<std::size_t>(actions()), 0);
    m[0] = 1;
    if (!q.full()) {
        for (int k = 1; k <= q.length() + 1; ++k) {
            m[static_cast<std::size_t>(k)] = 1;
        }
    }
    return m;
}

int masked_argmax(const Eigen::VectorXd& q, const ActionMask& mask) {
    int best = -1;
    for (int i = 0; i < static_cast<int>(mask.size()); ++i) {
        if (mask[static_cast<std::size_t>(i)] && (best < 0 || q[i] > q[best])) {
            best = i;
        }
    }
    if (best < 0) {
        throw InvalidArgument("action mask has no valid entry");
    }
    return best;
}

int select_action(const Network& net, const Eigen::VectorXd& s, const ActionMask& mask,
                  double epsilon, Rng& rng) {
    if (static_cast<int>(mask.size()) != net.output_dim()) {
        throw InvalidArgument("action mask length does not match the network output");
    }
    const auto valid = static_cast<std::uint64_t>(std::count(mask.begin(), mask.end(), 1));
    if (valid == 0) {
        throw InvalidArgument("action mask has no valid entry");
    }
    if (epsilon > 0.0 && rng.uniform01() < epsilon) {
        std::uint64_t pick = rng.below(valid);
        for (int i = 0; i < static_cast<int>(mask.size()); ++i) {
            if (mask[static_cast<std::size_t>(i)] && pick-- == 0) {
                return i;
            }
        }
    }
    return masked_argmax(net.forward(s), mask);
}

double immediate_reward(const TaskOutcome& outcome, std::span<const TaskDelay> losses,
                        const CostParams& p, double scale) {
    double cost = task_cost(outcome.T, outcome.E, outcome.d, p);
    for (const auto& l : losses) {
        cost += p.alpha * p.p_idl * l.t_add + p.beta * l.t_add / l.d;
    }
    return -scale * cost;
}

double action_reward(const DecisionContext& ctx, int action, double scale) {
    const CostParams& p = ctx.env.cost;
    const TaskEstimate est = estimate_task(ctx.task, ctx.robot, ctx.env, ctx.now);
    TaskOutcome o;
    o.task_id = ctx.task.id;
    o.d = ctx.task.d;
    if (action == 0) {
        o.T = est.waited + est.t_loc;
        o.E = est.e_loc;
        return immediate_reward(o, {}, p, scale);
    }
    const QueueEntry entry = make_entry(ctx.task, ctx.robot, est, ctx.now);
    const double t_rea = ctx.queue.ready_time(action, ctx.now);
    const DelayEnergy de =
        task_delay_energy(true, est.t_tra, t_rea, est.t_com, est.t_loc, est.e_loc, p);
    o.site = ExecutionSite::Edge;
    o.position = action;
    o.T = est.waited + de.T;
    o.E = de.E;
    const auto losses = ctx.queue.delta_delays(entry, action, ctx.now);
    return immediate_reward(o, losses, p, scale);
}

Decision action_to_decision(int action, const ServerQueue& q) {
    if (action == 0) {
        return q.full() ? Decision::reject() : Decision::local();
    }
    return Decision::insert(action);
}

DqnPolicy::DqnPolicy(std::shared_ptr<const DqnModel> model)
    : model_(std::move(model)), encoder_(model_->M, model_->norm) {
    if (model_->net.input_dim() != encoder_.dim() || model_->net.output_dim() != encoder_.actions()) {
        throw InvalidArgument("network dimensions do not match the queue length");
    }
}

std::optional<Decision> DqnPolicy::decide(const DecisionContext& ctx) {
    const Eigen::VectorXd s = encoder_.encode(ctx);
    const int a = masked_argmax(model_->net.forward(s), encoder_.mask(ctx.queue));
    return action_to_decision(a, ctx.queue);
}

// ---------------------------------------------------------------- training

void TrainerConfig::validate() const {
    if (!(learning_rate > 0.0)) throw InvalidArgument("learning_rate must be positive");
    if (!(discount >= 0.0 && discount < 1.0)) throw InvalidArgument("discount must lie in [0, 1)");
    if (replay_capacity == 0 || batch_size == 0) throw InvalidArgument("replay_capacity and batch_size must be positive");
    if (!(epsilon_start >= 0.0 && epsilon_start <= 1.0 && epsilon_end >= 0.0 && epsilon_end <= 1.0)) {
        throw InvalidArgument("epsilon schedule must lie in [0, 1]");
    }
    if (epsilon_decay_steps < 0) throw InvalidArgument("epsilon_decay_steps must be non-negative");
    if (target_sync_interval < 1) throw InvalidArgument("target_sync_interval must be positive");
    if (reward_scale < 0.0) throw InvalidArgument("reward_scale must be non-negative");
    if (!(reward_percentile > 0.0 && reward_percentile <= 1.0)) throw InvalidArgument("reward_percentile must lie in (0, 1]");
    if (max_transitions < 0 || warmup_transitions < 0) throw InvalidArgument("transition counts must be non-negative");
    if (train_every < 1) throw InvalidArgument("train_every must be positive");
    if (hidden_width < 1 || hidden_layers < 1) throw InvalidArgument("hidden layers must be non-empty");
    if (!(episode_duration > 0.0 && calibration_duration > 0.0)) throw InvalidArgument("episode and calibration durations must be positive");
}

std::vector<int> network_dims(int M, const TrainerConfig& cfg) {
    std::vector<int> dims{StateEncoder::dimension(M)};
    for (int i = 0; i < cfg.hidden_layers; ++i) {
        dims.push_back(cfg.hidden_width);
    }
    dims.push_back(M + 1);
    return dims;
}

Network initial_network(int M, const TrainerConfig& cfg, std::uint64_t seed) {
    return Network::kaiming(network_dims(M, cfg), derive_seed(seed, 10));
}

namespace {

class CalibrationPolicy : public Policy {
public:
    explicit CalibrationPolicy(std::uint64_t seed) : rng_(seed) {}
    std::string name() const override { return "calibration"; }
    std::optional<Decision> decide(const DecisionContext& ctx) override {
        const int options = ctx.queue.full() ? 1 : ctx.queue.length() + 2;
        const int a = static_cast<int>(rng_.below(static_cast<std::uint64_t>(options)));
        magnitudes.push_back(std::abs(action_reward(ctx, a, 1.0)));
        return action_to_decision(a, ctx.queue);
    }
    std::vector<double> magnitudes;

private:
    Rng rng_;
};

class TrainingAgent : public Policy {
public:
    TrainingAgent(const TrainerConfig& cfg, int M, Normalization norm, Network init,
                  double scale, std::uint64_t seed)
        : cfg_(cfg),
          encoder_(M, norm),
          net_(std::move(init)),
          target_(net_),
          adam_(net_, AdamConfig{cfg.learning_rate}),
          grads_(Gradients::zeros_like(net_)),
          replay_(cfg.replay_capacity),
          scale_(scale),
          rng_(seed) {}

    std::string name() const override { return "drl-train"; }

    std::optional<Decision> decide(const DecisionContext& ctx) override {
        Eigen::VectorXd s = encoder_.encode(ctx);
        ActionMask mask = encoder_.mask(ctx.queue);
        if (pending_ && collecting()) {
            store(Transition{std::move(pending_->s), pending_->action, pending_->reward, s, mask,
                             false});
        }
        pending_.reset();
        const int a = select_action(net_, s, mask, epsilon(), rng_);
        if (!mask[static_cast<std::size_t>(a)]) {
            throw std::logic_error("masked action selected");
        }
        if (collecting()) {
            const double r = std::clamp(action_reward(ctx, a, scale_), -1.0, 1.0);
            pending_ = Pending{std::move(s), a, r};
        }
        return action_to_decision(a, ctx.queue);
    }

    void end_episode() {
        if (pending_ && collecting()) {
            store(Transition{std::move(pending_->s), pending_->action, pending_->reward,
                             Eigen::VectorXd::Zero(encoder_.dim()),
                             ActionMask(static_cast<std::size_t>(encoder_.actions()), 1), true});
        }
        pending_.reset();
    }

    bool collecting() const { return transitions_ < cfg_.max_transitions; }

    double epsilon() const {
        if (cfg_.epsilon_decay_steps == 0 || transitions_ >= cfg_.epsilon_decay_steps) {
            return cfg_.epsilon_end;
        }
        const double frac = static_cast<double>(transitions_) /
                            static_cast<double>(cfg_.epsilon_decay_steps);
        return cfg_.epsilon_start + frac * (cfg_.epsilon_end - cfg_.epsilon_start);
    }

    // Loss sum and count since the last call.
    std::pair<double, std::int64_t> take_losses() {
        auto out = std::make_pair(loss_sum_, loss_count_);
        loss_sum_ = 0.0;
        loss_count_ = 0;
        return out;
    }

    Network& network() { return net_; }
    std::int64_t transitions() const { return transitions_; }
    std::int64_t gradient_steps() const { return adam_.steps(); }
    double max_abs_reward() const { return max_abs_reward_; }
    bool losses_finite() const { return losses_finite_; }

private:
    struct Pending {
        Eigen::VectorXd s;
        int action;
        double reward;
    };

    void store(Transition t) {
        max_abs_reward_ = std::max(max_abs_reward_, std::abs(t.reward));
        replay_.push(std::move(t));
        ++transitions_;
        const auto ready = std::max<std::size_t>(static_cast<std::size_t>(cfg_.warmup_transitions),
                                                 cfg_.batch_size);
        if (replay_.size() >= ready && transitions_ % cfg_.train_every == 0) {
            gradient_step();
        }
    }

    void gradient_step() {
        const auto batch = replay_.sample(cfg_.batch_size, rng_);
        const auto B = static_cast<Eigen::Index>(batch.size());
        Eigen::MatrixXd states(encoder_.dim(), B);
        Eigen::MatrixXd next_states(encoder_.dim(), B);
        std::vector<int> actions(batch.size());
        for (Eigen::Index b = 0; b < B; ++b) {
            const Transition& t = *batch[static_cast<std::size_t>(b)];
            states.col(b) = t.s;
            next_states.col(b) = t.s_next;
            actions[static_cast<std::size_t>(b)] = t.action;
        }
        const Eigen::MatrixXd q_next = target_.forward_batch(next_states);
        std::vector<double> targets(batch.size());
        for (Eigen::Index b = 0; b < B; ++b) {
            const Transition& t = *batch[static_cast<std::size_t>(b)];
            double y = t.reward;
            if (!t.terminal) {
                const Eigen::VectorXd col = q_next.col(b);
                y += cfg_.discount * col[masked_argmax(col, t.next_mask)];
            }
            targets[static_cast<std::size_t>(b)] = y;
        }
        const double loss = td_gradient(net_, states, actions, targets, grads_);
        adam_.step(net_, grads_);
        if (!std::isfinite(loss) || !net_.finite()) {
            losses_finite_ = false;
            throw std::runtime_error("training diverged: non-finite loss or parameters");
        }
        loss_sum_ += loss;
        ++loss_count_;
        if (adam_.steps() % cfg_.target_sync_interval == 0) {
            target_ = net_;
        }
    }

    const TrainerConfig& cfg_;
    StateEncoder encoder_;
    Network net_;
    Network target_;
    Adam adam_;
    Gradients grads_;
    ReplayBuffer replay_;
    double scale_;
    Rng rng_;
    std::optional<Pending> pending_;
    std::int64_t transitions_ = 0;
    double loss_sum_ = 0.0;
    std::int64_t loss_count_ = 0;
    double max_abs_reward_ = 0.0;
    bool losses_finite_ = true;
};

}  // namespace

double calibrate_reward_scale(const SimConfig& sim, const TrainerConfig& cfg,
                              std::uint64_t seed) {
    SimConfig warm = sim;
    warm.seed = derive_seed(seed, 20);
    warm.duration = cfg.calibration_duration;
    CalibrationPolicy policy(derive_seed(seed, 21));
    run(warm, policy);
    auto& mags = policy.magnitudes;
    if (mags.empty()) {
        return 1.0;
    }
    const auto k = static_cast<std::size_t>(
        std::ceil(cfg.reward_percentile * static_cast<double>(mags.size()))) - 1;
    std::nth_element(mags.begin(), mags.begin() + static_cast<std::ptrdiff_t>(k), mags.end());
    const double p = mags[k];
    return p > 0.0 ? 1.0 / p : 1.0;
}

TrainResult train(const SimConfig& sim, const TrainerConfig& cfg, int episodes,
                  std::uint64_t seed) {
    sim.validate();
    cfg.validate();
    TrainResult result;
    result.model.M = sim.M;
    result.model.norm = Normalization::from(sim);
    Network init = initial_network(sim.M, cfg, seed);
    if (episodes <= 0) {
        result.model.net = std::move(init);
        result.reward_scale = cfg.reward_scale > 0.0 ? cfg.reward_scale : 1.0;
        return result;
    }
    result.reward_scale =
        cfg.reward_scale > 0.0 ? cfg.reward_scale : calibrate_reward_scale(sim, cfg, seed);

    TrainingAgent agent(cfg, sim.M, result.model.norm, std::move(init), result.reward_scale,
                        derive_seed(seed, 11));
    for (int ep = 0; ep < episodes && agent.collecting(); ++ep) {
        SimConfig episode_cfg = sim;
        episode_cfg.seed = derive_seed(seed, 1000 + static_cast<std::uint64_t>(ep));
        episode_cfg.duration = cfg.episode_duration;
        const SimResult res = run(episode_cfg, agent);
        agent.end_episode();
        const auto [loss_sum, loss_count] = agent.take_losses();
        TrainingLogRow row;
        row.episode = ep;
        row.transitions = agent.transitions();
        row.avg_cost = evaluate(res.outcomes, sim.cost).avg_objective;
        row.mean_loss = loss_count > 0 ? loss_sum / static_cast<double>(loss_count) : 0.0;
        row.epsilon = agent.epsilon();
        result.log.push_back(row);
    }
    result.transitions = agent.transitions();
    result.gradient_steps = agent.gradient_steps();
    result.max_abs_reward = agent.max_abs_reward();
    result.all_losses_finite = agent.losses_finite();
    result.model.net = std::move(agent.network());
    return result;
}

void write_training_log(std::ostream& os, const std::vector<TrainingLogRow>& log) {
    os << "episode,transitions,avg_cost,mean_loss,epsilon\n";
    char buf[256];
    for (const auto& r : log) {
        std::snprintf(buf, sizeof buf, "%d,%lld,%.9g,%.9g,%.9g\n", r.episode,
                      static_cast<long long>(r.transitions), r.avg_cost, r.mean_loss, r.epsilon);
        os << buf;
    }
}

// ---------------------------------------------------------------- checkpoint

namespace {

constexpr char kMagic[8] = {'M', 'E', 'C', 'S', 'D', 'Q', 'N', '\0'};
constexpr std::uint32_t kFormatVersion = 1;

void put_u32(std::ostream& os, std::uint32_t v) {
    unsigned char b[4];
    for (int i = 0; i < 4; ++i) b[i] = static_cast<unsigned char>(v >> (8 * i));
    os.write(reinterpret_cast<const char*>(b), 4);
}

void put_f64(std::ostream& os, double x) {
    const auto v = std::bit_cast<std::uint64_t>(x);
    unsigned char b[8];
    for (int i = 0; i < 8; ++i) b[i] = static_cast<unsigned char>(v >> (8 * i));
    os.write(reinterpret_cast<const char*>(b), 8);
}

std::uint32_t get_u32(std::istream& is) {
    unsigned char b[4];
    if (!is.read(reinterpret_cast<char*>(b), 4)) throw CheckpointError("checkpoint truncated");
    std::uint32_t v = 0;
    for (int i = 0; i < 4; ++i) v |= static_cast<std::uint32_t>(b[i]) << (8 * i);
    return v;
}

double get_f64(std::istream& is) {
    unsigned char b[8];
    if (!is.read(reinterpret_cast<char*>(b), 8)) throw CheckpointError("checkpoint truncated");
    std::uint64_t v = 0;
    for (int i = 0; i < 8; ++i) v |= static_cast<std::uint64_t>(b[i]) << (8 * i);
    return std::bit_cast<double>(v);
}

std::string fmt_double(double x) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

std::filesystem::path meta_path(const std::filesystem::path& p) {
    return std::filesystem::path(p.string() + ".meta");
}

double meta_double(const std::map<std::string, std::string>& meta, const std::string& key) {
    auto it = meta.find(key);
    if (it == meta.end()) {
        throw CheckpointError("checkpoint metadata lacks '" + key + "'");
    }
    try {
        return std::stod(it->second);
    } catch (const std::exception&) {
        throw CheckpointError("checkpoint metadata '" + key + "' is not a number");
    }
}

}  // namespace

void save_checkpoint(const std::filesystem::path& path, const DqnModel& model,
                     const std::map<std::string, std::string>& meta) {
    std::ofstream os(path, std::ios::binary | std::ios::trunc);
    if (!os) {
        throw CheckpointError("cannot write checkpoint " + path.string());
    }
    os.write(kMagic, sizeof kMagic);
    put_u32(os, kFormatVersion);
    put_u32(os, static_cast<std::uint32_t>(model.M));
    const auto& dims = model.net.dims();
    put_u32(os, static_cast<std::uint32_t>(dims.size()));
    for (int d : dims) put_u32(os, static_cast<std::uint32_t>(d));
    for (const auto& layer : model.net.layers()) {
        for (Eigen::Index i = 0; i < layer.W.rows(); ++i) {
            for (Eigen::Index j = 0; j < layer.W.cols(); ++j) put_f64(os, layer.W(i, j));
        }
        for (Eigen::Index i = 0; i < layer.b.size(); ++i) put_f64(os, layer.b[i]);
    }
    if (!os) {
        throw CheckpointError("failed writing checkpoint " + path.string());
    }

    std::map<std::string, std::string> all = meta;
    all["format_version"] = std::to_string(kFormatVersion);
    all["M"] = std::to_string(model.M);
    all["norm.d_max"] = fmt_double(model.norm.d_max);
    all["norm.n_max"] = fmt_double(model.norm.n_max);
    all["norm.plane_edge"] = fmt_double(model.norm.plane_edge);
    all["norm.t_com_max"] = fmt_double(model.norm.t_com_max);
    std::ofstream ms(meta_path(path), std::ios::trunc);
    if (!ms) {
        throw CheckpointError("cannot write checkpoint metadata " + meta_path(path).string());
    }
    for (const auto& [k, v] : all) {
        ms << k << " = " << v << '\n';
    }
}

LoadedCheckpoint load_checkpoint(const std::filesystem::path& path, int expected_M) {
    std::ifstream is(path, std::ios::binary);
    if (!is) {
        throw CheckpointError("cannot open checkpoint " + path.string());
    }
    char magic[8];
    if (!is.read(magic, sizeof magic) || std::memcmp(magic, kMagic, sizeof kMagic) != 0) {
        throw CheckpointError(path.string() + " is not a checkpoint file");
    }
    const std::uint32_t version = get_u32(is);
    if (version != kFormatVersion) {
        throw CheckpointError("unsupported checkpoint version " + std::to_string(version));
    }
    const auto M = static_cast<int>(get_u32(is));
    if (M != expected_M) {
        throw CheckpointError("checkpoint was trained for M = " + std::to_string(M) +
                              " but the configuration has M = " + std::to_string(expected_M));
    }
    const std::uint32_t n_dims = get_u32(is);
    if (n_dims < 2 || n_dims > 64) {
        throw CheckpointError("checkpoint has an invalid layer count");
    }
    std::vector<int> dims;
    for (std::uint32_t i = 0; i < n_dims; ++i) {
        const std::uint32_t d = get_u32(is);
        if (d == 0 || d > (1u << 20)) throw CheckpointError("checkpoint has an invalid layer width");
        dims.push_back(static_cast<int>(d));
    }
    if (dims.front() != StateEncoder::dimension(M) || dims.back() != M + 1) {
        throw CheckpointError("checkpoint layer dimensions do not match M = " + std::to_string(M));
    }
    auto model = std::make_shared<DqnModel>();
    model->M = M;
    model->net = Network(dims);
    for (auto& layer : model->net.layers()) {
        for (Eigen::Index i = 0; i < layer.W.rows(); ++i) {
            for (Eigen::Index j = 0; j < layer.W.cols(); ++j) layer.W(i, j) = get_f64(is);
        }
        for (Eigen::Index i = 0; i < layer.b.size(); ++i) layer.b[i] = get_f64(is);
    }
    if (is.peek() != std::char_traits<char>::eof()) {
        throw CheckpointError("checkpoint has trailing bytes");
    }

    LoadedCheckpoint out;
    std::ifstream ms(meta_path(path));
    if (!ms) {
        throw CheckpointError("missing checkpoint metadata " + meta_path(path).string());
    }
    std::string line;
    while (std::getline(ms, line)) {
        const auto eq = line.find(" = ");
        if (eq == std::string::npos) continue;
        out.meta[line.substr(0, eq)] = line.substr(eq + 3);
    }
    model->norm.d_max = meta_double(out.meta, "norm.d_max");
    model->norm.n_max = meta_double(out.meta, "norm.n_max");
    model->norm.plane_edge = meta_double(out.meta, "norm.plane_edge");
    model->norm.t_com_max = meta_double(out.meta, "norm.t_com_max");
    out.model = std::move(model);
    return out;
}

}  // namespace mecsim
