#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "mecsim/nn.hpp"
#include "mecsim/sim.hpp"

namespace mecsim {

using ActionMask = std::vector<std::uint8_t>;

struct Transition {
    Eigen::VectorXd s;
    int action = 0;
    double reward = 0.0;
    Eigen::VectorXd s_next;
    ActionMask next_mask;
    bool terminal = false;
};

// Fixed-capacity ring buffer; the oldest transition is evicted first.
class ReplayBuffer {
public:
    explicit ReplayBuffer(std::size_t capacity);

    void push(Transition t);
    std::size_t size() const { return items_.size(); }
    std::size_t capacity() const { return capacity_; }
    // i = 0 is the oldest stored transition.
    const Transition& at(std::size_t i) const;
    // Uniform draw with replacement.
    std::vector<const Transition*> sample(std::size_t batch, Rng& rng) const;

private:
    std::size_t capacity_;
    std::size_t head_ = 0;  // next slot to overwrite once full
    std::vector<Transition> items_;
};

// Feature scales mapping raw task and queue quantities into [-1, 1].
struct Normalization {
    double d_max = 2.0;
    double n_max = 300e3;
    double plane_edge = 30.0;
    double t_com_max = 0.15;

    static Normalization from(const SimConfig& cfg);
};

// State vector: one 7-feature block per waiting slot, the in-service task
// with its remaining compute time, and the requesting task. Each block is
// [d, v_x, v_y, l_x, l_y, n, occupied]. Dimension 7 * M + 15.
class StateEncoder {
public:
    StateEncoder(int M, Normalization norm);

    static int dimension(int M) { return 7 * M + 15; }
    int dim() const { return dimension(M_); }
    int actions() const { return M_ + 1; }
    int M() const { return M_; }
    const Normalization& normalization() const { return norm_; }

    Eigen::VectorXd encode(const DecisionContext& ctx) const;
    // Action 0 is always valid; k >= 1 is valid iff the queue is not full
    // and k <= L + 1.
    ActionMask mask(const ServerQueue& q) const;

private:
    void write_block(Eigen::VectorXd& out, Eigen::Index at, const Task& task,
                     const RobotState& robot) const;

    int M_;
    Normalization norm_;
};

// Masked epsilon-greedy: uniform over valid actions with probability
// epsilon, otherwise the valid action with the largest Q (lowest index wins
// ties). Throws InvalidArgument when no action is valid.
int select_action(const Network& net, const Eigen::VectorXd& s, const ActionMask& mask,
                  double epsilon, Rng& rng);
int masked_argmax(const Eigen::VectorXd& q, const ActionMask& mask);

// -scale * [own weighted cost + sum over delayed tasks of
// (alpha * p_idl * T_add + beta * T_add / d)].
double immediate_reward(const TaskOutcome& outcome, std::span<const TaskDelay> losses,
                        const CostParams& p, double scale);

// Raw (unscaled) reward of taking `action` in the given context.
double action_reward(const DecisionContext& ctx, int action, double scale);

Decision action_to_decision(int action, const ServerQueue& q);

struct DqnModel {
    Network net;
    Normalization norm;
    int M = 0;
};

// Greedy (epsilon = 0) inference over a trained network.
class DqnPolicy : public Policy {
public:
    explicit DqnPolicy(std::shared_ptr<const DqnModel> model);
    std::string name() const override { return "drl"; }
    std::optional<Decision> decide(const DecisionContext& ctx) override;

private:
    std::shared_ptr<const DqnModel> model_;
    StateEncoder encoder_;
};

struct TrainerConfig {
    double learning_rate = 5e-4;
    double discount = 0.2;
    std::size_t replay_capacity = 100000;
    std::size_t batch_size = 64;
    double epsilon_start = 1.0;
    double epsilon_end = 0.05;
    std::int64_t epsilon_decay_steps = 20000;
    std::int64_t target_sync_interval = 500;
    double reward_scale = 0.0;  // 0 calibrates from a random-policy warm-up run
    double reward_percentile = 0.99;
    std::int64_t max_transitions = 100000;
    std::int64_t warmup_transitions = 1000;
    int train_every = 1;
    int hidden_width = 128;
    int hidden_layers = 2;
    double episode_duration = 20.0;
    double calibration_duration = 20.0;

    void validate() const;
};

struct TrainingLogRow {
    int episode = 0;
    std::int64_t transitions = 0;
    double avg_cost = 0.0;
    double mean_loss = 0.0;
    double epsilon = 0.0;
};

struct TrainResult {
    DqnModel model;
    double reward_scale = 1.0;
    std::int64_t transitions = 0;
    std::int64_t gradient_steps = 0;
    double max_abs_reward = 0.0;
    bool all_losses_finite = true;
    std::vector<TrainingLogRow> log;
};

std::vector<int> network_dims(int M, const TrainerConfig& cfg);

// The network train() starts from for this seed.
Network initial_network(int M, const TrainerConfig& cfg, std::uint64_t seed);

// 99th-percentile-style calibration: the scale that maps the chosen
// percentile of |raw reward| under a random policy to 1.
double calibrate_reward_scale(const SimConfig& sim, const TrainerConfig& cfg, std::uint64_t seed);

TrainResult train(const SimConfig& sim, const TrainerConfig& cfg, int episodes,
                  std::uint64_t seed);

void write_training_log(std::ostream& os, const std::vector<TrainingLogRow>& log);

// Binary checkpoint plus a "<path>.meta" key = value sidecar.
void save_checkpoint(const std::filesystem::path& path, const DqnModel& model,
                     const std::map<std::string, std::string>& meta);

struct LoadedCheckpoint {
    std::shared_ptr<const DqnModel> model;
    std::map<std::string, std::string> meta;
};

// Rejects files whose queue length or input width disagree with expected_M.
LoadedCheckpoint load_checkpoint(const std::filesystem::path& path, int expected_M);

class CheckpointError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

}  // namespace mecsim
