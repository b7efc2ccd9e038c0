#include "fbsde/adam.hpp"

#include <cmath>
#include <stdexcept>

namespace fbsde {

void adam_step(AdamState& opt, Eigen::VectorXd& params, const Eigen::VectorXd& grads) {
    if (params.size() != grads.size())
        throw std::invalid_argument("adam_step: params/grads size mismatch");
    if (opt.m.size() == 0 && params.size() > 0) {
        opt.m = Eigen::VectorXd::Zero(params.size());
        opt.v = Eigen::VectorXd::Zero(params.size());
    }
    if (opt.m.size() != params.size())
        throw std::invalid_argument("adam_step: optimizer state size mismatch");
    if (params.size() == 0) {
        ++opt.step_count;
        return;
    }

    const AdamConfig& c = opt.config;
    Eigen::ArrayXd g = grads.array();
    if (c.weight_decay != 0.0) g += c.weight_decay * params.array();

    ++opt.step_count;
    opt.m = (c.beta1 * opt.m.array() + (1.0 - c.beta1) * g).matrix();
    opt.v = (c.beta2 * opt.v.array() + (1.0 - c.beta2) * g.square()).matrix();
    const double bias1 = 1.0 - std::pow(c.beta1, static_cast<double>(opt.step_count));
    const double bias2 = 1.0 - std::pow(c.beta2, static_cast<double>(opt.step_count));
    params.array() -=
        c.lr * (opt.m.array() / bias1) / ((opt.v.array() / bias2).sqrt() + c.eps);
}

} // namespace fbsde
