#pragma once

#include <Eigen/Core>

namespace fbsde {

struct AdamConfig {
    double lr = 1e-3;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double eps = 1e-8;
    double weight_decay = 0.0; // coupled L2: added to the gradient before the moments
};

struct AdamState {
    AdamConfig config;
    Eigen::VectorXd m;
    Eigen::VectorXd v;
    long step_count = 0;

    explicit AdamState(AdamConfig cfg = {}) : config(cfg) {}
};

// One bias-corrected Adam update in place. Lazily sizes the moment vectors on the
// first call; afterwards shapes must stay fixed.
void adam_step(AdamState& opt, Eigen::VectorXd& params, const Eigen::VectorXd& grads);

} // namespace fbsde
