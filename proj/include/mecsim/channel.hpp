#pragma once

#include "mecsim/mobility.hpp"

namespace mecsim {

// Free-space path loss uplink between a robot and the edge server.
struct ChannelParams {
    double bandwidth = 1e6;        // Hz
    double noise_power = 1e-13;    // W
    double gain_ref = 1e-4;        // gain at 1 m
    double min_distance = 0.5;     // m, clamps the inverse-square singularity

    void validate() const;
};

double channel_gain(double dist, const ChannelParams& cp);

// Shannon rate in bits/s at the given distance.
double instantaneous_rate(double dist, double p_tra, const ChannelParams& cp);

// Bits delivered over [t0, t1] while the robot moves along its trajectory.
double transmitted_bits(const RobotState& robot, double t0, double t1, const Plane& plane,
                        double p_tra, const ChannelParams& cp);

// Upload duration: the T at which the integrated rate along the robot's
// billiard trajectory reaches task_n bits. Relative bit-balance error is
// below 1e-9.
double transmission_delay(double task_n, const RobotState& robot, const Plane& plane,
                          double p_tra, const ChannelParams& cp);

}  // namespace mecsim
