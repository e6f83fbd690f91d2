#include "doctest.h"
#include "mecsim/rng.hpp"
#include "mecsim/scheduler.hpp"
#include "mecsim/verify/oracles.hpp"
#include "mecsim/verify/suites.hpp"

#include <algorithm>
#include <numeric>

using namespace mecsim;

namespace {

Task task(TaskId id, double n, double d, double t_gen = 0.0) {
    Task t;
    t.id = id;
    t.robot_id = static_cast<RobotId>(id);
    t.n = n;
    t.d = d;
    t.t_gen = t_gen;
    return t;
}

RobotState near_server(RobotId id) { return {id, {16.0, 15.0}, {1, 0}, 0.0}; }

QueueEntry uploaded(TaskId id, double t_com, double d) {
    QueueEntry e;
    e.task = task(id, 1e5, d);
    e.t_com = t_com;
    return e;
}

}  // namespace

TEST_CASE("insertion loss examples") {
    const Environment env;
    ServerQueue q(10);
    q.insert(uploaded(1, 0.2, 1.0), 1);
    q.insert(uploaded(2, 0.2, 1.0), 2);
    const QueueEntry e = uploaded(3, 0.1, 1.0);
    CHECK(insertion_loss(q, e, 3, 0.0) == 0.0);
    CHECK(insertion_loss(q, e, 1, 0.0) == doctest::Approx(0.2));
}

TEST_CASE("full queue rejects") {
    const Environment env;
    ServerQueue q(10);
    for (int i = 0; i < 10; ++i) q.insert(uploaded(i, 0.1, 1.0), i + 1);
    const Decision d = greedy_decide(q, task(50, 2e5, 1.0), near_server(50), env, 0.0);
    CHECK(d.kind == DecisionKind::Reject);
    CHECK_FALSE(d.offloaded());
    FifoOffloadPolicy fifo;
    const Task t = task(50, 2e5, 1.0);
    const RobotState r = near_server(50);
    CHECK(fifo.decide({q, t, r, env, 0.0})->kind == DecisionKind::Reject);
}

TEST_CASE("edge wins on an empty queue when only delay counts") {
    Environment env;
    env.cost.alpha = 0.0;
    env.cost.beta = 1.0;
    const ServerQueue q(10);
    const Decision d = greedy_decide(q, task(1, 2e5, 1.0), near_server(1), env, 0.0);
    CHECK(d.kind == DecisionKind::Insert);
    CHECK(d.position == 1);
}

TEST_CASE("greedy matches explicit enumeration") {
    Rng rng(47);
    for (int i = 0; i < 1000; ++i) {
        const int M = 1 + static_cast<int>(rng.below(10));
        const auto inst = verify::random_decision_instance(rng, M);
        const Decision got = greedy_decide(inst.queue, inst.task, inst.robot, inst.env, inst.now);
        const Decision want = oracle::enumerate_decision(inst.queue, inst.task, inst.robot, inst.env, inst.now);
        REQUIRE(got.kind == want.kind);
        REQUIRE(got.position == want.position);
        const auto costs = oracle::enumerate_option_costs(inst.queue, inst.task, inst.robot, inst.env, inst.now);
        const auto opts = evaluate_options(inst.queue, inst.task, inst.robot, inst.env, inst.now);
        REQUIRE(costs.size() == opts.size());
        for (std::size_t k = 0; k < opts.size(); ++k) {
            CHECK(opts[k].total == doctest::Approx(costs[k]).epsilon(1e-9).scale(1.0));
        }
        if (got.kind == DecisionKind::Insert) {
            CHECK(opts[static_cast<std::size_t>(got.position)].total <= opts[0].total);
            const QueueEntry e = make_entry(inst.task, inst.robot,
                                            estimate_task(inst.task, inst.robot, inst.env, inst.now), inst.now);
            CHECK(insertion_loss(inst.queue, e, inst.queue.length() + 1, inst.now) == 0.0);
        }
    }
}

TEST_CASE("insertion loss against the replay oracle") {
    Rng rng(53);
    for (int i = 0; i < 300; ++i) {
        const auto inst = verify::random_decision_instance(rng, 8);
        if (inst.queue.full()) continue;
        const QueueEntry e = make_entry(inst.task, inst.robot,
                                        estimate_task(inst.task, inst.robot, inst.env, inst.now), inst.now);
        const auto busy = oracle::busy_until(inst.queue, inst.now);
        const auto base = oracle::replay_queue(inst.now, busy, oracle::jobs_of(inst.queue));
        for (int pos = 1; pos <= inst.queue.length() + 1; ++pos) {
            ServerQueue after = inst.queue;
            after.insert(e, pos);
            const auto changed = oracle::replay_queue(inst.now, busy, oracle::jobs_of(after));
            double want = 0.0;
            for (std::size_t k = 0; k < base.end.size(); ++k) {
                const std::size_t shifted = static_cast<int>(k) >= pos - 1 ? k + 1 : k;
                want += (changed.end[shifted] - base.end[k]) / inst.queue.waiting()[k].task.d;
            }
            CHECK(insertion_loss(inst.queue, e, pos, inst.now) == doctest::Approx(want).epsilon(1e-12));
        }
    }
}

TEST_CASE("brute force small cases") {
    const Environment env;
    const ServerQueue q0(10);
    CHECK(brute_force_schedule({}, {}, q0, env, 0.0).cost == 0.0);
    const std::vector<Task> one{task(0, 2e5, 1.0)};
    const std::vector<RobotState> rob{near_server(0)};
    const auto opts = evaluate_options(q0, one[0], rob[0], env, 0.0);
    const BatchSchedule b = brute_force_schedule(one, rob, q0, env, 0.0);
    CHECK(b.cost == doctest::Approx(std::min(opts[0].total, opts[1].total)).epsilon(1e-12));
    CHECK(b.cost == doctest::Approx(greedy_decide(q0, one[0], rob[0], env, 0.0).expected_cost).epsilon(1e-12));

    std::vector<Task> seven;
    std::vector<RobotState> robots;
    for (int i = 0; i < 7; ++i) {
        seven.push_back(task(i, 2e5, 1.0));
        robots.push_back(near_server(i));
    }
    CHECK_THROWS_AS(brute_force_schedule(seven, robots, q0, env, 0.0), InvalidArgument);
}

TEST_CASE("brute force beats greedy in every arrival order") {
    const Environment env;
    const ServerQueue q0(10);
    Rng rng(59);
    for (int inst = 0; inst < 20; ++inst) {
        std::vector<Task> tasks;
        std::vector<RobotState> robots;
        for (int i = 0; i < 4; ++i) {
            tasks.push_back(task(i, rng.uniform(120e3, 300e3), rng.uniform(0.5, 2.0)));
            robots.push_back({static_cast<RobotId>(i), {rng.uniform(0.0, 30.0), rng.uniform(0.0, 30.0)}, {1, 0}, 2.0});
        }
        const double opt = brute_force_schedule(tasks, robots, q0, env, 0.0).cost;
        const double local = local_only_cost(tasks, env, 0.0);
        std::vector<int> perm(4);
        std::iota(perm.begin(), perm.end(), 0);
        do {
            std::vector<Task> ordered;
            for (int k : perm) ordered.push_back(tasks[static_cast<std::size_t>(k)]);
            const double g = sequential_greedy_schedule(ordered, robots, q0, env, 0.0).cost;
            CHECK(opt <= g + 1e-12);
            CHECK(g <= local + 1e-12);
        } while (std::next_permutation(perm.begin(), perm.end()));
    }
}

TEST_CASE("baseline policies") {
    const Environment env;
    ServerQueue q(10);
    const Task t = task(1, 2e5, 1.0, 0.3);
    const RobotState r = near_server(1);
    LocalOnlyPolicy local;
    CHECK(local.decide({q, t, r, env, 0.3})->kind == DecisionKind::Local);
    FifoOffloadPolicy fifo;
    q.insert(uploaded(7, 0.1, 1.0), 1);
    const auto f = fifo.decide({q, t, r, env, 0.3});
    CHECK(f->kind == DecisionKind::Insert);
    CHECK(f->position == 2);

    PeriodicBatchPolicy periodic(1.0);
    CHECK(periodic.period() == 1.0);
    CHECK_FALSE(periodic.decide({q, t, r, env, 0.3}).has_value());
    const auto released = periodic.release_deferred();
    REQUIRE(released.size() == 1);
    CHECK(released[0].id == 1);
    CHECK(periodic.release_deferred().empty());
    CHECK(periodic.decide({q, t, r, env, 1.0, true}).has_value());
    CHECK_THROWS_AS(PeriodicBatchPolicy(0.0), InvalidArgument);

    RandomPolicy a(3);
    RandomPolicy b(3);
    for (int i = 0; i < 50; ++i) {
        const auto da = a.decide({q, t, r, env, 0.3});
        const auto db = b.decide({q, t, r, env, 0.3});
        CHECK(da->kind == db->kind);
        CHECK(da->position == db->position);
        if (da->offloaded()) CHECK(da->position <= q.length() + 1);
    }
}
