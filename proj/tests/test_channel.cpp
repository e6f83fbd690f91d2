#include "doctest.h"
#include "mecsim/channel.hpp"
#include "mecsim/rng.hpp"
#include "mecsim/verify/oracles.hpp"

#include <cmath>
#include <numbers>

using namespace mecsim;

TEST_CASE("inverse-square gain with a clamp") {
    const ChannelParams cp;
    CHECK(channel_gain(1.0, cp) == cp.gain_ref);
    CHECK(channel_gain(2.0, cp) == doctest::Approx(cp.gain_ref / 4));
    CHECK(channel_gain(0.0, cp) == doctest::Approx(cp.gain_ref / 0.25));
    CHECK(std::isfinite(channel_gain(0.0, cp)));
}

TEST_CASE("Shannon rate limits") {
    ChannelParams cp;
    CHECK(instantaneous_rate(5.0, 1e-30, cp) > 0.0);
    CHECK(instantaneous_rate(5.0, 1e-30, cp) < 1e-6);
    cp.noise_power = 1.0;
    cp.gain_ref = 1.0;
    CHECK(instantaneous_rate(1.0, 1.0, cp) == doctest::Approx(cp.bandwidth).epsilon(1e-15));
}

TEST_CASE("stationary robot matches the closed form and scales linearly") {
    const Plane plane;
    const ChannelParams cp;
    const RobotState s{0, {3.0, 4.0}, {1, 0}, 0.0};
    const double r = distance(s.l, plane.server_pos());
    const double rate = cp.bandwidth * std::log2(1.0 + 0.05 * cp.gain_ref / (cp.noise_power * r * r));
    const double t = transmission_delay(2e5, s, plane, 0.05, cp);
    CHECK(t == doctest::Approx(2e5 / rate).epsilon(1e-12));
    CHECK(transmission_delay(4e5, s, plane, 0.05, cp) == doctest::Approx(2.0 * t).epsilon(1e-12));
}

TEST_CASE("moving robot against the fine-grid oracle") {
    const Plane plane;
    const ChannelParams cp;
    Rng rng(31);
    for (int i = 0; i < 10; ++i) {
        const double th = rng.uniform(0.0, 2.0 * std::numbers::pi);
        const RobotState s{0, {rng.uniform(0.0, 30.0), rng.uniform(0.0, 30.0)}, {std::cos(th), std::sin(th)},
                           rng.uniform(1.0, 20.0)};
        const double n = rng.uniform(1e5, 3e6);
        const double got = transmission_delay(n, s, plane, 0.05, cp);
        CHECK(got == doctest::Approx(oracle::fine_grid_delay(n, s, plane, 0.05, cp, 1e-5)).epsilon(1e-6));
    }
}

TEST_CASE("property: bit balance, monotonicity, rate bracket") {
    const Plane plane;
    const ChannelParams cp;
    Rng rng(37);
    const double r_max = instantaneous_rate(cp.min_distance, 0.05, cp);
    const double r_min = instantaneous_rate(plane.edge / std::sqrt(2.0), 0.05, cp);
    for (int i = 0; i < 300; ++i) {
        const double th = rng.uniform(0.0, 2.0 * std::numbers::pi);
        const RobotState s{0, {rng.uniform(0.0, 30.0), rng.uniform(0.0, 30.0)}, {std::cos(th), std::sin(th)},
                           rng.uniform(0.0, 10.0)};
        const double n = rng.uniform(1e4, 1e7);
        const double t = transmission_delay(n, s, plane, 0.05, cp);
        CHECK(transmitted_bits(s, 0.0, t, plane, 0.05, cp) == doctest::Approx(n).epsilon(1e-9));
        CHECK(transmission_delay(n * 1.01, s, plane, 0.05, cp) > t);
        CHECK(t >= n / r_max);
        CHECK(t <= n / r_min);
    }
}

TEST_CASE("channel argument checks") {
    const Plane plane;
    ChannelParams cp;
    const RobotState s{0, {3.0, 4.0}, {1, 0}, 1.0};
    CHECK_THROWS_AS(transmission_delay(0.0, s, plane, 0.05, cp), InvalidArgument);
    CHECK_THROWS_AS(transmission_delay(1e5, s, plane, 0.0, cp), InvalidArgument);
    cp.bandwidth = 0.0;
    CHECK_THROWS_AS(cp.validate(), InvalidArgument);
}
