#include "doctest.h"
#include "mecsim/metrics.hpp"

#include <sstream>

using namespace mecsim;

namespace {

SweepSpec small_spec() {
    SweepSpec spec;
    spec.parameter = SweepParameter::Lambda;
    spec.values = {5.0, 10.0};
    spec.policies = {PolicySpec{PolicyKind::Greedy}, PolicySpec{PolicyKind::Random}};
    spec.seeds = {1, 2, 3};
    spec.base.duration = 5.0;
    return spec;
}

std::string csv(const std::vector<SweepRow>& rows) {
    std::ostringstream os;
    write_sweep_csv(os, rows);
    return os.str();
}

}  // namespace

TEST_CASE("names round trip") {
    for (auto k : {PolicyKind::Drl, PolicyKind::Greedy, PolicyKind::Local, PolicyKind::Fifo, PolicyKind::Periodic,
                   PolicyKind::Random}) {
        CHECK(parse_policy_kind(policy_kind_name(k)) == k);
    }
    CHECK_THROWS_AS(parse_policy_kind("oracle"), InvalidArgument);
    CHECK(parse_sweep_parameter("queue_m") == SweepParameter::QueueM);
    CHECK_THROWS_AS(parse_sweep_parameter("speed"), InvalidArgument);
    CHECK_THROWS_AS(make_policy(PolicySpec{PolicyKind::Drl}, 1), InvalidArgument);
}

TEST_CASE("sweep values map onto the config") {
    const SimConfig base;
    const SimConfig s = apply_sweep_value(base, SweepParameter::TaskSize, 240.0);
    CHECK((s.n_min + s.n_max) / 2 == doctest::Approx(240e3));
    CHECK(s.n_max - s.n_min == doctest::Approx(base.n_max - base.n_min));
    CHECK(apply_sweep_value(base, SweepParameter::Lambda, 15.0).lambda == 15.0);
    CHECK(apply_sweep_value(base, SweepParameter::QueueM, 4.0).M == 4);
    CHECK_THROWS_AS(apply_sweep_value(base, SweepParameter::TaskSize, 50.0), InvalidArgument);
    CHECK_THROWS_AS(apply_sweep_value(base, SweepParameter::QueueM, 2.5), InvalidArgument);
}

TEST_CASE("one row equals a direct run") {
    SweepSpec spec = small_spec();
    spec.values = {10.0};
    spec.policies = {PolicySpec{PolicyKind::Greedy}};
    spec.seeds = {9};
    const auto rows = run_sweep(spec);
    REQUIRE(rows.size() == 1);
    SimConfig cfg = spec.base;
    cfg.lambda = 10.0;
    cfg.seed = 9;
    GreedyPolicy g;
    const auto direct = evaluate(run(cfg, g).outcomes, cfg.cost);
    CHECK(rows[0].metrics.avg_objective == direct.avg_objective);
    CHECK(rows[0].metrics.count == direct.count);
    CHECK(rows[0].policy == "greedy");
}

TEST_CASE("row count, order and thread independence") {
    const SweepSpec spec = small_spec();
    const auto rows = run_sweep(spec, 1);
    CHECK(rows.size() == 2 * 2 * 3);
    CHECK(rows[0].parameter == 5.0);
    CHECK(rows[0].policy == "greedy");
    CHECK(rows[3].policy == "random");
    CHECK(rows[6].parameter == 10.0);
    const std::string one = csv(rows);
    CHECK(one == csv(run_sweep(spec, 3)));
    CHECK(one == csv(run_sweep(spec, 1)));
    CHECK(one.rfind("parameter,policy,seed,avg_objective,avg_energy_J,avg_delay_s,miss_ratio,rejection_rate\n", 0) == 0);
    CHECK(one.find('\r') == std::string::npos);
    SweepSpec bad = spec;
    bad.seeds.clear();
    CHECK_THROWS_AS(run_sweep(bad), InvalidArgument);
}

TEST_CASE("summary statistics") {
    SweepRow a{1.0, "greedy", 1, {}};
    a.metrics.avg_objective = 1.0;
    a.metrics.avg_energy = 2.0;
    SweepRow b = a;
    b.seed = 2;
    b.metrics.avg_objective = 3.0;
    const auto two = summarize({a, b});
    REQUIRE(two.size() == 1);
    CHECK(two[0].n == 2);
    CHECK(two[0].mean.avg_objective == 2.0);
    CHECK(two[0].stddev.avg_objective == doctest::Approx(std::sqrt(2.0)));
    CHECK(two[0].stddev.avg_energy == 0.0);
    const auto single = summarize({a});
    CHECK(single[0].stddev.avg_objective == 0.0);
    const auto dup = summarize({a, b, a, b});
    CHECK(dup[0].mean.avg_objective == 2.0);
    SweepRow c = a;
    c.policy = "local";
    CHECK(summarize({a, c, b}).size() == 2);
}
