#include "mecsim/model.hpp"

#include <algorithm>
#include <string>

namespace mecsim {

namespace {

void require_positive_size(double n, const char* what) {
    if (!(n > 0.0)) {
        throw InvalidArgument(std::string(what) + ": task size must be positive, got " +
                              std::to_string(n));
    }
}

}  // namespace

void CostParams::validate() const {
    auto positive = [](double v, const char* name) {
        if (!(v > 0.0)) {
            throw InvalidArgument(std::string("cost parameter '") + name + "' must be positive");
        }
    };
    positive(f_loc, "f_loc");
    positive(f_edg, "f_edg");
    positive(c, "c");
    positive(p_tra, "p_tra");
    positive(p_idl, "p_idl");
    if (gamma < 0.0) {
        throw InvalidArgument("cost parameter 'gamma' must be non-negative");
    }
    if (alpha < 0.0 || beta < 0.0) {
        throw InvalidArgument("cost weights alpha and beta must be non-negative");
    }
}

double local_time(double n, const CostParams& p) {
    require_positive_size(n, "local_time");
    return n * p.c / p.f_loc;
}

double local_energy(double n, const CostParams& p) {
    require_positive_size(n, "local_energy");
    return p.gamma * n * p.c * p.f_loc * p.f_loc;
}

double edge_compute_time(double n, const CostParams& p) {
    require_positive_size(n, "edge_compute_time");
    return n * p.c / p.f_edg;
}

double task_cost(double T, double E, double d, const CostParams& p) {
    if (!(d > 0.0)) {
        throw InvalidArgument("task_cost: deadline must be positive, got " + std::to_string(d));
    }
    return p.alpha * E + p.beta * (T - d) / d;
}

DelayEnergy task_delay_energy(bool offloaded, double t_tra, double t_rea, double t_com,
                              double t_loc, double e_loc, const CostParams& p) {
    if (!offloaded) {
        return {t_loc, e_loc};
    }
    const double start = std::max(t_rea, t_tra);
    return {start + t_com, t_tra * p.p_tra + (start - t_tra) * p.p_idl};
}

double objective(std::span<const TaskOutcome> outcomes, const CostParams& p) {
    double energy = 0.0;
    double delay = 0.0;
    for (const auto& o : outcomes) {
        energy += o.E;
        delay += (o.T - o.d) / o.d;
    }
    return p.alpha * energy + p.beta * delay;
}

}  // namespace mecsim
