#pragma once

#include <functional>
#include <optional>
#include <span>

#include "fbsde/param_fn.hpp"
#include "fbsde/trajectory.hpp"

namespace fbsde {

// Backward-integrated auxiliary value at time 0 for one trajectory,
//   y0 = phi(X_H) + sum_j g_j dt - sum_j <z(t_j, X_j), dW_j>,
// kept together with its three summands.
struct Y0Sample {
    double y0 = 0.0;
    double terminal = 0.0;
    double cost_sum = 0.0;
    double stoch_sum = 0.0;
};

struct LossReport {
    double loss = 0.0;
    Eigen::VectorXd grad;               // w.r.t. the trained function's parameters
    std::optional<double> grad_y0_db;   // deep-BSDE loss only
    int batch_size = 0;
};

// Minibatch view into a buffer; avoids copying trajectories when training.
using TrajectoryRefs = std::span<const Trajectory* const>;

Y0Sample y0_estimate(const Trajectory& traj, ParamFn& z, Mode mode = Mode::eval);

// All y0 values of a batch through one batched forward pass (batch-norm couples
// the whole batch in train mode).
Eigen::VectorXd y0_batch(std::span<const Trajectory> batch, ParamFn& z, Mode mode);

// Population variance of y0 over the batch, with the analytic gradient chained
// through the variance. Requires batch size >= 2.
LossReport measurability_loss(std::span<const Trajectory> batch, ParamFn& z, Mode mode);
LossReport measurability_loss(TrajectoryRefs batch, ParamFn& z, Mode mode);

// (1/B) sum_i |y_T^i - phi(X_H^i)|^2 for the forward-integrated trial process
// started at y0_db; gradients w.r.t. both the z parameters and y0_db.
LossReport deep_bsde_loss(std::span<const Trajectory> batch, ParamFn& z, double y0_db,
                          Mode mode);
LossReport deep_bsde_loss(TrajectoryRefs batch, ParamFn& z, double y0_db, Mode mode);

// Monte-Carlo cost-to-go regression: (1/B) sum_i sum_k |y(t_k,X_k^i) - G_k^i|^2 dt
// with G_k the realized cost-to-go. Requires y.output_dim() == 1.
LossReport martingale_loss(std::span<const Trajectory> batch, ParamFn& y, Mode mode);
LossReport martingale_loss(TrajectoryRefs batch, ParamFn& y, Mode mode);

using TrueZ = std::function<Eigen::VectorXd(double, const Eigen::VectorXd&)>;
using TrueY = std::function<double(double, const Eigen::VectorXd&)>;

// Monte-Carlo estimates of the squared-error criteria against a known truth,
// (1/B) sum_i sum_k ||fn - truth||^2 dt. The *_samples variants return the
// per-trajectory contributions (their mean is the estimate).
double zerr_mc(std::span<const Trajectory> batch, ParamFn& z, const TrueZ& truth);
Eigen::VectorXd zerr_mc_samples(std::span<const Trajectory> batch, ParamFn& z, const TrueZ& truth);
double yerr_mc(std::span<const Trajectory> batch, ParamFn& y, const TrueY& truth);
Eigen::VectorXd yerr_mc_samples(std::span<const Trajectory> batch, ParamFn& y, const TrueY& truth);

} // namespace fbsde
