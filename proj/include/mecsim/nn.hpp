#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include <Eigen/Dense>

namespace mecsim {

// Dense layer y = W x + b with W of shape (out, in).
struct DenseLayer {
    Eigen::MatrixXd W;
    Eigen::VectorXd b;
};

inline constexpr double kLeakySlope = 0.01;

// Fully connected Q-network: LeakyReLU on hidden layers, Tanh on the output.
// dims = {input, hidden..., output}.
class Network {
public:
    Network() = default;
    // All parameters zero.
    explicit Network(std::vector<int> dims);

    // Kaiming-uniform weights scaled for LeakyReLU fan-in, zero biases.
    static Network kaiming(std::vector<int> dims, std::uint64_t seed);

    const std::vector<int>& dims() const { return dims_; }
    int input_dim() const { return dims_.front(); }
    int output_dim() const { return dims_.back(); }
    std::size_t parameter_count() const;

    std::vector<DenseLayer>& layers() { return layers_; }
    const std::vector<DenseLayer>& layers() const { return layers_; }

    Eigen::VectorXd forward(const Eigen::VectorXd& s) const;
    // Columns of `states` are samples.
    Eigen::MatrixXd forward_batch(const Eigen::MatrixXd& states) const;

    bool finite() const;

private:
    std::vector<int> dims_;
    std::vector<DenseLayer> layers_;
};

// Same shapes as the network's layers.
struct Gradients {
    std::vector<DenseLayer> layers;

    static Gradients zeros_like(const Network& net);
};

// Mean over the batch of (Q(s_b, a_b) - target_b)^2.
double td_loss(const Network& net, const Eigen::MatrixXd& states, std::span<const int> actions,
               std::span<const double> targets);

// Loss as in td_loss plus its gradient with respect to every parameter.
double td_gradient(const Network& net, const Eigen::MatrixXd& states,
                   std::span<const int> actions, std::span<const double> targets,
                   Gradients& grads);

struct AdamConfig {
    double lr = 1e-3;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double eps = 1e-8;
};

// One bias-corrected Adam update of a flat parameter block; `step` is the
// 1-based step count.
void adam_update(std::span<double> params, std::span<const double> grad, std::span<double> m,
                 std::span<double> v, std::int64_t step, const AdamConfig& cfg);

class Adam {
public:
    Adam(const Network& net, AdamConfig cfg);

    void step(Network& net, const Gradients& grads);
    std::int64_t steps() const { return t_; }
    const AdamConfig& config() const { return cfg_; }

private:
    AdamConfig cfg_;
    Gradients m_;
    Gradients v_;
    std::int64_t t_ = 0;
};

}  // namespace mecsim
