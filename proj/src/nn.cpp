#include "mecsim/nn.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

#include "mecsim/model.hpp"
#include "mecsim/rng.hpp"

namespace mecsim {

namespace {

Eigen::MatrixXd leaky(const Eigen::MatrixXd& z) {
    return z.unaryExpr([](double x) { return x > 0.0 ? x : kLeakySlope * x; });
}

Eigen::MatrixXd leaky_grad(const Eigen::MatrixXd& z) {
    return z.unaryExpr([](double x) { return x > 0.0 ? 1.0 : kLeakySlope; });
}

std::span<double> flat(Eigen::MatrixXd& m) { return {m.data(), static_cast<std::size_t>(m.size())}; }
std::span<double> flat(Eigen::VectorXd& v) { return {v.data(), static_cast<std::size_t>(v.size())}; }
std::span<const double> flat(const Eigen::MatrixXd& m) {
    return {m.data(), static_cast<std::size_t>(m.size())};
}
std::span<const double> flat(const Eigen::VectorXd& v) {
    return {v.data(), static_cast<std::size_t>(v.size())};
}

}  // namespace

Network::Network(std::vector<int> dims) : dims_(std::move(dims)) {
    if (dims_.size() < 2) {
        throw InvalidArgument("network needs at least an input and an output layer");
    }
    for (std::size_t i = 0; i + 1 < dims_.size(); ++i) {
        if (dims_[i] < 1 || dims_[i + 1] < 1) {
            throw InvalidArgument("network layer widths must be positive");
        }
        layers_.push_back({Eigen::MatrixXd::Zero(dims_[i + 1], dims_[i]),
                           Eigen::VectorXd::Zero(dims_[i + 1])});
    }
}

Network Network::kaiming(std::vector<int> dims, std::uint64_t seed) {
    Network net(std::move(dims));
    Rng rng(seed);
    for (auto& layer : net.layers_) {
        const double fan_in = static_cast<double>(layer.W.cols());
        const double bound = std::sqrt(6.0 / ((1.0 + kLeakySlope * kLeakySlope) * fan_in));
        // Column-major fill order is part of the seeded contract.
        for (Eigen::Index j = 0; j < layer.W.cols(); ++j) {
            for (Eigen::Index i = 0; i < layer.W.rows(); ++i) {
                layer.W(i, j) = rng.uniform(-bound, bound);
            }
        }
    }
    return net;
}

std::size_t Network::parameter_count() const {
    std::size_t n = 0;
    for (const auto& l : layers_) {
        n += static_cast<std::size_t>(l.W.size() + l.b.size());
    }
    return n;
}

Eigen::VectorXd Network::forward(const Eigen::VectorXd& s) const {
    if (s.size() != input_dim()) {
        throw InvalidArgument("network input has dimension " + std::to_string(s.size()) +
                              ", expected " + std::to_string(input_dim()));
    }
    Eigen::VectorXd a = s;
    for (std::size_t i = 0; i < layers_.size(); ++i) {
        Eigen::VectorXd z = layers_[i].W * a + layers_[i].b;
        if (i + 1 == layers_.size()) {
            a = z.array().tanh().matrix();
        } else {
            a = leaky(z);
        }
    }
    return a;
}

Eigen::MatrixXd Network::forward_batch(const Eigen::MatrixXd& states) const {
    if (states.rows() != input_dim()) {
        throw InvalidArgument("network input has dimension " + std::to_string(states.rows()) +
                              ", expected " + std::to_string(input_dim()));
    }
    Eigen::MatrixXd a = states;
    for (std::size_t i = 0; i < layers_.size(); ++i) {
        Eigen::MatrixXd z = layers_[i].W * a;
        z.colwise() += layers_[i].b;
        if (i + 1 == layers_.size()) {
            a = z.array().tanh().matrix();
        } else {
            a = leaky(z);
        }
    }
    return a;
}

bool Network::finite() const {
    for (const auto& l : layers_) {
        if (!l.W.allFinite() || !l.b.allFinite()) {
            return false;
        }
    }
    return true;
}

Gradients Gradients::zeros_like(const Network& net) {
    Gradients g;
    for (const auto& l : net.layers()) {
        g.layers.push_back({Eigen::MatrixXd::Zero(l.W.rows(), l.W.cols()),
                            Eigen::VectorXd::Zero(l.b.size())});
    }
    return g;
}

namespace {

void check_batch(const Network& net, const Eigen::MatrixXd& states, std::span<const int> actions,
                 std::span<const double> targets) {
    const auto batch = static_cast<std::size_t>(states.cols());
    if (batch == 0 || actions.size() != batch || targets.size() != batch) {
        throw InvalidArgument("TD batch must be non-empty with one action and target per state");
    }
    for (int a : actions) {
        if (a < 0 || a >= net.output_dim()) {
            throw InvalidArgument("TD batch action " + std::to_string(a) + " out of range");
        }
    }
}

}  // namespace

double td_loss(const Network& net, const Eigen::MatrixXd& states, std::span<const int> actions,
               std::span<const double> targets) {
    check_batch(net, states, actions, targets);
    const Eigen::MatrixXd q = net.forward_batch(states);
    double loss = 0.0;
    for (Eigen::Index b = 0; b < q.cols(); ++b) {
        const double err = q(actions[static_cast<std::size_t>(b)], b) - targets[static_cast<std::size_t>(b)];
        loss += err * err;
    }
    return loss / static_cast<double>(q.cols());
}

double td_gradient(const Network& net, const Eigen::MatrixXd& states,
                   std::span<const int> actions, std::span<const double> targets,
                   Gradients& grads) {
    check_batch(net, states, actions, targets);
    const auto& layers = net.layers();
    const std::size_t depth = layers.size();

    // activations[0] is the input; pre[i] feeds activations[i + 1].
    std::vector<Eigen::MatrixXd> activations{states};
    std::vector<Eigen::MatrixXd> pre;
    for (std::size_t i = 0; i < depth; ++i) {
        Eigen::MatrixXd z = layers[i].W * activations.back();
        z.colwise() += layers[i].b;
        pre.push_back(z);
        activations.push_back(i + 1 == depth ? Eigen::MatrixXd(z.array().tanh()) : leaky(z));
    }

    const Eigen::MatrixXd& q = activations.back();
    const double inv_batch = 1.0 / static_cast<double>(q.cols());
    Eigen::MatrixXd delta = Eigen::MatrixXd::Zero(q.rows(), q.cols());
    double loss = 0.0;
    for (Eigen::Index b = 0; b < q.cols(); ++b) {
        const int a = actions[static_cast<std::size_t>(b)];
        const double err = q(a, b) - targets[static_cast<std::size_t>(b)];
        loss += err * err;
        delta(a, b) = 2.0 * err * inv_batch * (1.0 - q(a, b) * q(a, b));
    }

    if (grads.layers.size() != depth) {
        grads = Gradients::zeros_like(net);
    }
    for (std::size_t i = depth; i-- > 0;) {
        grads.layers[i].W.noalias() = delta * activations[i].transpose();
        grads.layers[i].b = delta.rowwise().sum();
        if (i > 0) {
            delta = (layers[i].W.transpose() * delta).cwiseProduct(leaky_grad(pre[i - 1]));
        }
    }
    return loss * inv_batch;
}

void adam_update(std::span<double> params, std::span<const double> grad, std::span<double> m,
                 std::span<double> v, std::int64_t step, const AdamConfig& cfg) {
    if (params.size() != grad.size() || params.size() != m.size() || params.size() != v.size()) {
        throw InvalidArgument("adam_update: parameter, gradient and moment sizes differ");
    }
    const double t = static_cast<double>(step);
    const double c1 = 1.0 - std::pow(cfg.beta1, t);
    const double c2 = 1.0 - std::pow(cfg.beta2, t);
    for (std::size_t i = 0; i < params.size(); ++i) {
        m[i] = cfg.beta1 * m[i] + (1.0 - cfg.beta1) * grad[i];
        v[i] = cfg.beta2 * v[i] + (1.0 - cfg.beta2) * grad[i] * grad[i];
        const double m_hat = m[i] / c1;
        const double v_hat = v[i] / c2;
        params[i] -= cfg.lr * m_hat / (std::sqrt(v_hat) + cfg.eps);
    }
}

Adam::Adam(const Network& net, AdamConfig cfg)
    : cfg_(cfg), m_(Gradients::zeros_like(net)), v_(Gradients::zeros_like(net)) {}

void Adam::step(Network& net, const Gradients& grads) {
    ++t_;
    auto& layers = net.layers();
    for (std::size_t i = 0; i < layers.size(); ++i) {
        adam_update(flat(layers[i].W), flat(grads.layers[i].W), flat(m_.layers[i].W),
                    flat(v_.layers[i].W), t_, cfg_);
        adam_update(flat(layers[i].b), flat(grads.layers[i].b), flat(m_.layers[i].b),
                    flat(v_.layers[i].b), t_, cfg_);
    }
}

}  // namespace mecsim
