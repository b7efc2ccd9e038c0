#include "fbsde/losses.hpp"

#include <stdexcept>
#include <vector>

namespace fbsde {

namespace {

// All pre-terminal points of a batch as one forward batch; trajectory i, step j
// lands in column i*H + j.
struct FlatBatch {
    Eigen::VectorXd ts;
    Eigen::MatrixXd xs;
    int B = 0;
    int H = 0;
    double dt = 0.0;
};

FlatBatch flatten(TrajectoryRefs batch) {
    if (batch.empty()) throw std::invalid_argument("loss: empty trajectory batch");
    const int B = static_cast<int>(batch.size());
    const int H = batch.front()->steps();
    const int dim_x = batch.front()->dim_x();
    FlatBatch flat;
    flat.B = B;
    flat.H = H;
    flat.dt = batch.front()->grid.dt;
    flat.ts.resize(static_cast<Eigen::Index>(B) * H);
    flat.xs.resize(dim_x, static_cast<Eigen::Index>(B) * H);
    for (int i = 0; i < B; ++i) {
        const Trajectory& traj = *batch[i];
        if (traj.steps() != H || traj.dim_x() != dim_x)
            throw std::invalid_argument("loss: batch trajectories must share grid and dims");
        for (int j = 0; j < H; ++j) {
            const Eigen::Index col = static_cast<Eigen::Index>(i) * H + j;
            flat.ts[col] = traj.grid.node(j);
            flat.xs.col(col) = traj.states.col(j);
        }
    }
    return flat;
}

// y0 per trajectory from z values evaluated on the flattened batch.
Eigen::VectorXd y0_from_zvals(TrajectoryRefs batch, const Eigen::MatrixXd& zvals, int H) {
    const int B = static_cast<int>(batch.size());
    Eigen::VectorXd y0(B);
    for (int i = 0; i < B; ++i) {
        const Trajectory& traj = *batch[i];
        double stoch = 0.0;
        for (int j = 0; j < H; ++j)
            stoch += zvals.col(static_cast<Eigen::Index>(i) * H + j).dot(traj.dw.col(j));
        y0[i] = traj.terminal_cost + traj.cost_integral() - stoch;
    }
    return y0;
}

void check_z_dim(TrajectoryRefs batch, const ParamFn& z) {
    if (z.output_dim() != batch.front()->dim_w())
        throw std::invalid_argument("loss: z output dimension must equal dim_w");
    if (z.state_dim() != batch.front()->dim_x())
        throw std::invalid_argument("loss: z state dimension mismatch");
}

std::vector<const Trajectory*> as_refs(std::span<const Trajectory> batch) {
    std::vector<const Trajectory*> refs;
    refs.reserve(batch.size());
    for (const Trajectory& traj : batch) refs.push_back(&traj);
    return refs;
}

} // namespace

Y0Sample y0_estimate(const Trajectory& traj, ParamFn& z, Mode mode) {
    const Trajectory* ptr = &traj;
    TrajectoryRefs batch(&ptr, 1);
    check_z_dim(batch, z);
    FlatBatch flat = flatten(batch);
    const Eigen::MatrixXd zvals = z.forward(flat.ts, flat.xs, mode);
    Y0Sample sample;
    sample.terminal = traj.terminal_cost;
    sample.cost_sum = traj.cost_integral();
    double stoch = 0.0;
    for (int j = 0; j < flat.H; ++j) stoch += zvals.col(j).dot(traj.dw.col(j));
    sample.stoch_sum = stoch;
    sample.y0 = sample.terminal + sample.cost_sum - sample.stoch_sum;
    return sample;
}

Eigen::VectorXd y0_batch(std::span<const Trajectory> batch, ParamFn& z, Mode mode) {
    const auto refs = as_refs(batch);
    check_z_dim(refs, z);
    FlatBatch flat = flatten(refs);
    const Eigen::MatrixXd zvals = z.forward(flat.ts, flat.xs, mode);
    return y0_from_zvals(refs, zvals, flat.H);
}

LossReport measurability_loss(TrajectoryRefs batch, ParamFn& z, Mode mode) {
    if (batch.size() < 2)
        throw std::invalid_argument("measurability_loss: batch size must be >= 2");
    check_z_dim(batch, z);
    FlatBatch flat = flatten(batch);
    const Eigen::MatrixXd zvals = z.forward(flat.ts, flat.xs, mode);
    const Eigen::VectorXd y0 = y0_from_zvals(batch, zvals, flat.H);

    const double mean = y0.mean();
    const Eigen::VectorXd centered = y0.array() - mean;
    const double B = static_cast<double>(flat.B);

    LossReport report;
    report.batch_size = flat.B;
    report.loss = centered.squaredNorm() / B;

    // d loss / d y0_i = (2/B)(y0_i - mean); d y0_i / d z(t_j, X_j^i) = -dW_j^i.
    Eigen::MatrixXd upstream(zvals.rows(), zvals.cols());
    for (int i = 0; i < flat.B; ++i) {
        const double coeff = -2.0 / B * centered[i];
        for (int j = 0; j < flat.H; ++j)
            upstream.col(static_cast<Eigen::Index>(i) * flat.H + j) =
                coeff * batch[i]->dw.col(j);
    }
    z.zero_grad();
    z.backward(upstream);
    report.grad = z.grad();
    return report;
}

LossReport measurability_loss(std::span<const Trajectory> batch, ParamFn& z, Mode mode) {
    const auto refs = as_refs(batch);
    return measurability_loss(TrajectoryRefs(refs), z, mode);
}

LossReport deep_bsde_loss(TrajectoryRefs batch, ParamFn& z, double y0_db, Mode mode) {
    check_z_dim(batch, z);
    FlatBatch flat = flatten(batch);
    const Eigen::MatrixXd zvals = z.forward(flat.ts, flat.xs, mode);
    const Eigen::VectorXd y0 = y0_from_zvals(batch, zvals, flat.H);

    // y_T^{DB,i} - phi(X_H^i) collapses to y0_db - y0_i.
    const Eigen::VectorXd residual = Eigen::VectorXd::Constant(flat.B, y0_db) - y0;
    const double B = static_cast<double>(flat.B);

    LossReport report;
    report.batch_size = flat.B;
    report.loss = residual.squaredNorm() / B;
    report.grad_y0_db = 2.0 / B * residual.sum();

    Eigen::MatrixXd upstream(zvals.rows(), zvals.cols());
    for (int i = 0; i < flat.B; ++i) {
        const double coeff = 2.0 / B * residual[i];
        for (int j = 0; j < flat.H; ++j)
            upstream.col(static_cast<Eigen::Index>(i) * flat.H + j) =
                coeff * batch[i]->dw.col(j);
    }
    z.zero_grad();
    z.backward(upstream);
    report.grad = z.grad();
    return report;
}

LossReport deep_bsde_loss(std::span<const Trajectory> batch, ParamFn& z, double y0_db,
                          Mode mode) {
    const auto refs = as_refs(batch);
    return deep_bsde_loss(TrajectoryRefs(refs), z, y0_db, mode);
}

LossReport martingale_loss(TrajectoryRefs batch, ParamFn& y, Mode mode) {
    if (y.output_dim() != 1)
        throw std::invalid_argument("martingale_loss: y must be scalar-valued");
    if (y.state_dim() != batch.front()->dim_x())
        throw std::invalid_argument("martingale_loss: y state dimension mismatch");
    FlatBatch flat = flatten(batch);
    const Eigen::MatrixXd yvals = y.forward(flat.ts, flat.xs, mode);

    Eigen::MatrixXd upstream(1, yvals.cols());
    const double B = static_cast<double>(flat.B);
    double loss = 0.0;
    for (int i = 0; i < flat.B; ++i) {
        const Eigen::VectorXd ctg = batch[i]->cost_to_go();
        for (int j = 0; j < flat.H; ++j) {
            const Eigen::Index col = static_cast<Eigen::Index>(i) * flat.H + j;
            const double res = yvals(0, col) - ctg[j];
            loss += res * res * flat.dt;
            upstream(0, col) = 2.0 / B * flat.dt * res;
        }
    }

    LossReport report;
    report.batch_size = flat.B;
    report.loss = loss / B;
    y.zero_grad();
    y.backward(upstream);
    report.grad = y.grad();
    return report;
}

LossReport martingale_loss(std::span<const Trajectory> batch, ParamFn& y, Mode mode) {
    const auto refs = as_refs(batch);
    return martingale_loss(TrajectoryRefs(refs), y, mode);
}

Eigen::VectorXd zerr_mc_samples(std::span<const Trajectory> batch, ParamFn& z,
                                const TrueZ& truth) {
    const auto refs = as_refs(batch);
    check_z_dim(refs, z);
    FlatBatch flat = flatten(refs);
    const Eigen::MatrixXd zvals = z.forward(flat.ts, flat.xs, Mode::eval);
    Eigen::VectorXd samples(flat.B);
    for (int i = 0; i < flat.B; ++i) {
        double acc = 0.0;
        for (int j = 0; j < flat.H; ++j) {
            const Eigen::Index col = static_cast<Eigen::Index>(i) * flat.H + j;
            acc += (zvals.col(col) - truth(flat.ts[col], flat.xs.col(col))).squaredNorm() *
                   flat.dt;
        }
        samples[i] = acc;
    }
    return samples;
}

double zerr_mc(std::span<const Trajectory> batch, ParamFn& z, const TrueZ& truth) {
    return zerr_mc_samples(batch, z, truth).mean();
}

Eigen::VectorXd yerr_mc_samples(std::span<const Trajectory> batch, ParamFn& y,
                                const TrueY& truth) {
    if (y.output_dim() != 1)
        throw std::invalid_argument("yerr_mc: y must be scalar-valued");
    const auto refs = as_refs(batch);
    FlatBatch flat = flatten(refs);
    const Eigen::MatrixXd yvals = y.forward(flat.ts, flat.xs, Mode::eval);
    Eigen::VectorXd samples(flat.B);
    for (int i = 0; i < flat.B; ++i) {
        double acc = 0.0;
        for (int j = 0; j < flat.H; ++j) {
            const Eigen::Index col = static_cast<Eigen::Index>(i) * flat.H + j;
            const double res = yvals(0, col) - truth(flat.ts[col], flat.xs.col(col));
            acc += res * res * flat.dt;
        }
        samples[i] = acc;
    }
    return samples;
}

double yerr_mc(std::span<const Trajectory> batch, ParamFn& y, const TrueY& truth) {
    return yerr_mc_samples(batch, y, truth).mean();
}

} // namespace fbsde
