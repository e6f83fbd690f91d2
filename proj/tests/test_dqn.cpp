#include "doctest.h"
#include "mecsim/dqn.hpp"
#include "mecsim/verify/oracles.hpp"
#include "mecsim/verify/suites.hpp"

#include <filesystem>
#include <fstream>

using namespace mecsim;

namespace {

std::filesystem::path temp_dir(const std::string& name) {
    auto p = std::filesystem::temp_directory_path() / ("mecsim_test_" + name);
    std::filesystem::remove_all(p);
    std::filesystem::create_directories(p);
    return p;
}

std::string slurp(const std::filesystem::path& p) {
    std::ifstream is(p, std::ios::binary);
    return {std::istreambuf_iterator<char>(is), {}};
}

Network fixed_q(std::vector<double> q) {
    const int n = static_cast<int>(q.size());
    Network net({1, 1, n});
    for (int k = 0; k < n; ++k) net.layers()[1].b[k] = std::atanh(q[static_cast<std::size_t>(k)]);
    return net;
}

SimConfig small_sim() {
    SimConfig cfg;
    cfg.n_rb = 4;
    cfg.lambda = 5.0;
    cfg.M = 4;
    cfg.duration = 5.0;
    return cfg;
}

}  // namespace

TEST_CASE("replay buffer evicts the oldest") {
    ReplayBuffer rb(3);
    for (int i = 0; i < 5; ++i) rb.push(Transition{Eigen::VectorXd::Zero(1), i, 0.0, {}, {}, false});
    CHECK(rb.size() == 3);
    CHECK(rb.at(0).action == 2);
    CHECK(rb.at(2).action == 4);
    Rng rng(1);
    for (const auto* t : rb.sample(100, rng)) CHECK(t->action >= 2);
    CHECK_THROWS_AS(ReplayBuffer(0), InvalidArgument);
    CHECK_THROWS_AS(ReplayBuffer(2).sample(1, rng), std::logic_error);
}

TEST_CASE("action selection") {
    const Network net = fixed_q({0.5, -0.1, 0.9, 0.2});
    const Eigen::VectorXd s = Eigen::VectorXd::Zero(1);
    Rng rng(2);
    CHECK(select_action(net, s, {1, 1, 1, 1}, 0.0, rng) == 2);
    CHECK(select_action(net, s, {1, 1, 0, 1}, 0.0, rng) == 0);
    CHECK(masked_argmax(Eigen::Vector3d(0.3, 0.3, 0.1), {1, 1, 1}) == 0);
    CHECK_THROWS_AS(select_action(net, s, {0, 0, 0, 0}, 0.0, rng), InvalidArgument);
    CHECK_THROWS_AS(select_action(net, s, {1, 1}, 0.0, rng), InvalidArgument);

    const int draws = 100000;
    std::vector<int> counts(4, 0);
    for (int i = 0; i < draws; ++i) ++counts[static_cast<std::size_t>(select_action(net, s, {1, 0, 1, 1}, 1.0, rng))];
    CHECK(counts[1] == 0);
    const double p = 1.0 / 3.0;
    const double sigma = std::sqrt(draws * p * (1 - p));
    for (int k : {0, 2, 3}) CHECK(std::abs(counts[static_cast<std::size_t>(k)] - draws * p) < 3 * sigma);
}

TEST_CASE("state encoding") {
    Rng rng(3);
    const auto inst = verify::random_decision_instance(rng, 5);
    const StateEncoder enc(5, Normalization{});
    CHECK(enc.dim() == 50);
    CHECK(enc.actions() == 6);
    const DecisionContext ctx{inst.queue, inst.task, inst.robot, inst.env, inst.now};
    const Eigen::VectorXd s = enc.encode(ctx);
    CHECK(s.size() == 50);
    CHECK(s.cwiseAbs().maxCoeff() <= 1.0);
    for (int k = 0; k < 5; ++k) CHECK(s[7 * k + 6] == (k < inst.queue.length() ? 1.0 : 0.0));
    CHECK(s[49] == 1.0);
    CHECK(s[43] == doctest::Approx(inst.task.d / 2.0));
    const ActionMask m = enc.mask(inst.queue);
    for (int k = 0; k <= 5; ++k) {
        const bool valid = k == 0 || (!inst.queue.full() && k <= inst.queue.length() + 1);
        CHECK(static_cast<bool>(m[static_cast<std::size_t>(k)]) == valid);
    }
    const StateEncoder wrong(4, Normalization{});
    CHECK_THROWS_AS(wrong.encode(ctx), InvalidArgument);
}

TEST_CASE("immediate reward") {
    const CostParams p;
    TaskOutcome local;
    local.T = 1.2;
    local.E = 0.008;
    local.d = 1.0;
    CHECK(immediate_reward(local, {}, p, 2.0) == doctest::Approx(-2.0 * (p.alpha * 0.008 + p.beta * 0.2)));
    const std::vector<TaskDelay> zero{{1, 0.0, 1.0}, {2, 0.0, 0.5}};
    CHECK(immediate_reward(local, zero, p, 2.0) == immediate_reward(local, {}, p, 2.0));

    Rng rng(5);
    for (int i = 0; i < 200; ++i) {
        const auto inst = verify::random_decision_instance(rng, 6);
        if (inst.queue.full()) continue;
        const DecisionContext ctx{inst.queue, inst.task, inst.robot, inst.env, inst.now};
        const auto costs = oracle::enumerate_option_costs(inst.queue, inst.task, inst.robot, inst.env, inst.now);
        for (int a = 0; a <= inst.queue.length() + 1; ++a) {
            CHECK(action_reward(ctx, a, 1.0) == doctest::Approx(-costs[static_cast<std::size_t>(a)]).epsilon(1e-9));
        }
    }
}

TEST_CASE("action to decision") {
    ServerQueue q(1);
    CHECK(action_to_decision(0, q).kind == DecisionKind::Local);
    CHECK(action_to_decision(1, q).position == 1);
    q.insert(QueueEntry{}, 1);
    CHECK(action_to_decision(0, q).kind == DecisionKind::Reject);
}

TEST_CASE("zero episodes return the initial network") {
    const SimConfig sim = small_sim();
    TrainerConfig cfg;
    cfg.hidden_width = 16;
    const TrainResult r = train(sim, cfg, 0, 9);
    const Network init = initial_network(sim.M, cfg, 9);
    REQUIRE(r.model.net.layers().size() == init.layers().size());
    for (std::size_t i = 0; i < init.layers().size(); ++i) CHECK(r.model.net.layers()[i].W == init.layers()[i].W);
    CHECK(r.transitions == 0);
    CHECK(r.model.net.dims() == std::vector<int>{43, 16, 16, 5});
}

TEST_CASE("short training run is bounded, finite and reproducible") {
    const SimConfig sim = small_sim();
    TrainerConfig cfg;
    cfg.hidden_width = 16;
    cfg.max_transitions = 300;
    cfg.warmup_transitions = 64;
    cfg.episode_duration = 5.0;
    cfg.calibration_duration = 5.0;
    const TrainResult a = train(sim, cfg, 20, 4);
    CHECK(a.transitions == 300);
    CHECK(a.gradient_steps > 0);
    CHECK(a.max_abs_reward <= 1.0);
    CHECK(a.all_losses_finite);
    CHECK(a.model.net.finite());
    CHECK(a.reward_scale > 0.0);
    const TrainResult b = train(sim, cfg, 20, 4);
    for (std::size_t i = 0; i < a.model.net.layers().size(); ++i) CHECK(a.model.net.layers()[i].W == b.model.net.layers()[i].W);
    CHECK_THROWS_AS(train(sim, TrainerConfig{.discount = 1.0}, 1, 4), InvalidArgument);
}

TEST_CASE("checkpoint round trip and rejection") {
    const auto dir = temp_dir("ckpt");
    TrainerConfig cfg;
    cfg.hidden_width = 8;
    DqnModel model{initial_network(3, cfg, 1), Normalization{1.5, 2e5, 25.0, 0.1}, 3};
    const auto path = dir / "m.ckpt";
    save_checkpoint(path, model, {{"seed", "1"}});
    const auto loaded = load_checkpoint(path, 3);
    CHECK(loaded.meta.at("seed") == "1");
    CHECK(loaded.meta.at("format_version") == "1");
    CHECK(loaded.model->norm.d_max == 1.5);
    CHECK(loaded.model->norm.t_com_max == 0.1);
    for (std::size_t i = 0; i < model.net.layers().size(); ++i) {
        CHECK(loaded.model->net.layers()[i].W == model.net.layers()[i].W);
        CHECK(loaded.model->net.layers()[i].b == model.net.layers()[i].b);
    }
    save_checkpoint(dir / "again.ckpt", *loaded.model, {{"seed", "1"}});
    CHECK(slurp(path) == slurp(dir / "again.ckpt"));

    CHECK_THROWS_AS(load_checkpoint(path, 4), CheckpointError);
    CHECK_THROWS_AS(load_checkpoint(dir / "absent.ckpt", 3), CheckpointError);
    const std::string bytes = slurp(path);
    {
        std::ofstream os(dir / "short.ckpt", std::ios::binary);
        os << bytes.substr(0, bytes.size() - 3);
    }
    std::filesystem::copy_file(path.string() + ".meta", (dir / "short.ckpt").string() + ".meta");
    CHECK_THROWS_AS(load_checkpoint(dir / "short.ckpt", 3), CheckpointError);
    {
        std::ofstream os(dir / "long.ckpt", std::ios::binary);
        os << bytes << 'x';
    }
    std::filesystem::copy_file(path.string() + ".meta", (dir / "long.ckpt").string() + ".meta");
    CHECK_THROWS_AS(load_checkpoint(dir / "long.ckpt", 3), CheckpointError);
    {
        std::ofstream os(dir / "junk.ckpt", std::ios::binary);
        os << "not a model";
    }
    CHECK_THROWS_AS(load_checkpoint(dir / "junk.ckpt", 3), CheckpointError);
}

TEST_CASE("policy refuses a network of the wrong shape") {
    TrainerConfig cfg;
    cfg.hidden_width = 8;
    auto model = std::make_shared<DqnModel>(DqnModel{initial_network(3, cfg, 1), Normalization{}, 4});
    CHECK_THROWS_AS(DqnPolicy{model}, InvalidArgument);
}
