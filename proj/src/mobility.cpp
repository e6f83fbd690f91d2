#include "mecsim/mobility.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "mecsim/rng.hpp"

namespace mecsim {

double norm(Vec2 v) { return std::hypot(v.x, v.y); }

double distance(Vec2 a, Vec2 b) { return norm(a - b); }

void validate_state(const RobotState& s, const Plane& plane) {
    if (!plane.contains(s.l)) {
        throw InvalidArgument("robot " + std::to_string(s.robot_id) + " lies outside the plane");
    }
    if (std::abs(norm(s.v) - 1.0) > 1e-9) {
        throw InvalidArgument("robot " + std::to_string(s.robot_id) + " heading is not unit length");
    }
    if (s.speed < 0.0) {
        throw InvalidArgument("robot " + std::to_string(s.robot_id) + " has negative speed");
    }
}

namespace {

struct Axis {
    double pos;
    double dir;
};

// One coordinate of the billiard flow. The unfolded coordinate is folded back
// into [0, edge]; odd numbers of wall hits flip the direction.
Axis fold_axis(double pos, double dir, double travel, double edge) {
    if (dir == 0.0 || travel == 0.0) {
        return {pos, dir};
    }
    // Mirror so that motion is always towards +inf.
    const bool mirrored = dir < 0.0;
    const double start = mirrored ? edge - pos : pos;
    const double period = 2.0 * edge;
    double u = std::fmod(start + std::abs(dir) * travel, period);
    if (u < 0.0) {
        u += period;
    }
    double folded;
    bool flipped;
    if (u >= edge) {
        folded = period - u;
        flipped = true;
    } else {
        folded = u;
        flipped = false;
    }
    folded = std::clamp(folded, 0.0, edge);
    double out_pos = mirrored ? edge - folded : folded;
    double out_dir = flipped ? -dir : dir;
    return {out_pos, out_dir};
}

}  // namespace

RobotState advance(const RobotState& s, double dt, const Plane& plane) {
    if (dt < 0.0) {
        throw InvalidArgument("advance: negative time step");
    }
    const double travel = s.speed * dt;
    const Axis ax = fold_axis(s.l.x, s.v.x, travel, plane.edge);
    const Axis ay = fold_axis(s.l.y, s.v.y, travel, plane.edge);
    RobotState out = s;
    out.l = {ax.pos, ay.pos};
    out.v = {ax.dir, ay.dir};
    return out;
}

Vec2 position_at(const RobotState& s, double t_offset, const Plane& plane) {
    return advance(s, t_offset, plane).l;
}

std::vector<RobotState> random_initial_states(int n_rb, const Plane& plane, double speed,
                                              std::uint64_t seed) {
    if (n_rb < 1) {
        throw InvalidArgument("random_initial_states: need at least one robot");
    }
    Rng rng(seed);
    std::vector<RobotState> out;
    out.reserve(static_cast<std::size_t>(n_rb));
    for (int i = 0; i < n_rb; ++i) {
        RobotState s;
        s.robot_id = i;
        s.l = {rng.uniform(0.0, plane.edge), rng.uniform(0.0, plane.edge)};
        const double theta = rng.uniform(0.0, 2.0 * std::numbers::pi);
        s.v = {std::cos(theta), std::sin(theta)};
        s.speed = speed;
        out.push_back(s);
    }
    return out;
}

}  // namespace mecsim
