#include "mecsim/channel.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

namespace mecsim {

void ChannelParams::validate() const {
    if (!(bandwidth > 0.0 && noise_power > 0.0 && gain_ref > 0.0 && min_distance > 0.0)) {
        throw InvalidArgument("channel parameters must all be positive");
    }
}

double channel_gain(double dist, const ChannelParams& cp) {
    const double r = std::max(dist, cp.min_distance);
    return cp.gain_ref / (r * r);
}

double instantaneous_rate(double dist, double p_tra, const ChannelParams& cp) {
    const double snr = p_tra * channel_gain(dist, cp) / cp.noise_power;
    return cp.bandwidth * std::log1p(snr) / std::numbers::ln2;
}

namespace {

struct RateAlong {
    const RobotState& robot;
    const Plane& plane;
    double p_tra;
    const ChannelParams& cp;

    double operator()(double t) const {
        const Vec2 pos = position_at(robot, t, plane);
        return instantaneous_rate(distance(pos, plane.server_pos()), p_tra, cp);
    }
};

double simpson(double fa, double fm, double fb, double a, double b) {
    return (b - a) / 6.0 * (fa + 4.0 * fm + fb);
}

double adaptive_simpson(const RateAlong& f, double a, double b, double fa, double fm, double fb,
                        double whole, double tol, int depth) {
    const double m = 0.5 * (a + b);
    const double lm = 0.5 * (a + m);
    const double rm = 0.5 * (m + b);
    const double flm = f(lm);
    const double frm = f(rm);
    const double left = simpson(fa, flm, fm, a, m);
    const double right = simpson(fm, frm, fb, m, b);
    const double diff = left + right - whole;
    if (depth <= 0 || std::abs(diff) <= 15.0 * tol) {
        return left + right + diff / 15.0;
    }
    return adaptive_simpson(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1) +
           adaptive_simpson(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1);
}

double integrate(const RateAlong& f, double a, double b, double tol) {
    if (b <= a) {
        return 0.0;
    }
    const double fa = f(a);
    const double fb = f(b);
    const double fm = f(0.5 * (a + b));
    return adaptive_simpson(f, a, b, fa, fm, fb, simpson(fa, fm, fb, a, b), tol, 48);
}

}  // namespace

double transmitted_bits(const RobotState& robot, double t0, double t1, const Plane& plane,
                        double p_tra, const ChannelParams& cp) {
    const RateAlong rate{robot, plane, p_tra, cp};
    const double scale = rate(t0) * std::max(t1 - t0, 0.0);
    return integrate(rate, t0, t1, 1e-13 * std::max(scale, 1.0));
}

double transmission_delay(double task_n, const RobotState& robot, const Plane& plane,
                          double p_tra, const ChannelParams& cp) {
    if (!(task_n > 0.0)) {
        throw InvalidArgument("transmission_delay: task size must be positive, got " +
                              std::to_string(task_n));
    }
    if (!(p_tra > 0.0)) {
        throw InvalidArgument("transmission_delay: transmit power must be positive");
    }
    const RateAlong rate{robot, plane, p_tra, cp};
    const double r0 = rate(0.0);
    if (robot.speed == 0.0) {
        return task_n / r0;
    }

    const double tol = 1e-13 * task_n;
    // Grow the bracket [lo, hi] until it holds the bit balance. lo tracks the
    // bits already delivered so each integral covers a short interval.
    double lo = 0.0;
    double bits_lo = 0.0;
    double hi = task_n / r0;
    double bits_hi = integrate(rate, lo, hi, tol);
    while (bits_hi < task_n) {
        lo = hi;
        bits_lo = bits_hi;
        hi = 2.0 * hi;
        bits_hi = bits_lo + integrate(rate, lo, hi, tol);
    }

    // Safeguarded Newton: the derivative of delivered bits is the rate.
    double t = lo + (task_n - bits_lo) / rate(lo);
    for (int iter = 0; iter < 200; ++iter) {
        if (!(t > lo && t < hi)) {
            t = 0.5 * (lo + hi);
        }
        const double bits_t = bits_lo + integrate(rate, lo, t, tol);
        const double residual = bits_t - task_n;
        if (std::abs(residual) <= 1e-12 * task_n) {
            return t;
        }
        if (residual < 0.0) {
            lo = t;
            bits_lo = bits_t;
        } else {
            hi = t;
            bits_hi = bits_t;
        }
        t = t - residual / rate(t);
        if (hi - lo <= 1e-15 * hi) {
            break;
        }
    }
    return 0.5 * (lo + hi);
}

}  // namespace mecsim
