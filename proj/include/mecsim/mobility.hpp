#pragma once

#include <cstdint>
#include <vector>

#include "mecsim/model.hpp"

namespace mecsim {

struct Vec2 {
    double x = 0.0;
    double y = 0.0;

    friend Vec2 operator+(Vec2 a, Vec2 b) { return {a.x + b.x, a.y + b.y}; }
    friend Vec2 operator-(Vec2 a, Vec2 b) { return {a.x - b.x, a.y - b.y}; }
    friend Vec2 operator*(double s, Vec2 a) { return {s * a.x, s * a.y}; }
    friend bool operator==(Vec2, Vec2) = default;
};

double norm(Vec2 v);
double distance(Vec2 a, Vec2 b);

// Square plane with the edge server fixed at its center.
struct Plane {
    double edge = 30.0;

    Vec2 server_pos() const { return {edge / 2.0, edge / 2.0}; }
    bool contains(Vec2 p) const {
        return p.x >= 0.0 && p.x <= edge && p.y >= 0.0 && p.y <= edge;
    }
};

struct RobotState {
    RobotId robot_id = 0;
    Vec2 l;        // position, meters
    Vec2 v{1, 0};  // unit heading
    double speed = 0.0;

    friend bool operator==(const RobotState&, const RobotState&) = default;
};

// Throws InvalidArgument if the state is off-plane, has a non-unit heading or
// a negative speed.
void validate_state(const RobotState& s, const Plane& plane);

// Straight-line motion with specular reflection at the walls, evaluated in
// closed form by unfolding each axis onto a period of 2 * edge.
RobotState advance(const RobotState& s, double dt, const Plane& plane);

Vec2 position_at(const RobotState& s, double t_offset, const Plane& plane);

std::vector<RobotState> random_initial_states(int n_rb, const Plane& plane, double speed,
                                              std::uint64_t seed);

}  // namespace mecsim
