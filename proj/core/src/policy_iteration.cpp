#include "fbsde/policy_iteration.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include <Eigen/Cholesky>

namespace fbsde {

namespace {

// Windowed-mean convergence test: true once the trailing window stopped improving
// on the one before it. Loss estimates are noisy, so single-step deltas are not used.
bool window_converged(const std::vector<double>& losses, int patience, double tol) {
    const int n = static_cast<int>(losses.size());
    if (n < 2 * patience) return false;
    double prev = 0.0, curr = 0.0;
    for (int i = n - 2 * patience; i < n - patience; ++i) prev += losses[i];
    for (int i = n - patience; i < n; ++i) curr += losses[i];
    prev /= patience;
    curr /= patience;
    return (prev - curr) < tol * std::max(std::abs(prev), 1e-12);
}

void check_finite_loss(double loss) {
    if (!std::isfinite(loss)) throw TrainingDivergedError("training diverged: non-finite loss");
}

void apply_adam(ParamFn& fn, AdamState& opt, const Eigen::VectorXd& grad) {
    Eigen::VectorXd params = fn.params();
    adam_step(opt, params, grad);
    fn.set_params(params);
}

// Epoch-shuffled minibatch driver shared by both training phases.
template <typename StepFn>
TrainHistory train_over_buffer(const Buffer& buffer, const TrainPhaseConfig& cfg,
                               const RngStream& stream, StepFn&& do_step) {
    if (buffer.empty()) throw std::invalid_argument("training: buffer is empty");
    if (cfg.batch_size < 2) throw std::invalid_argument("training: batch size must be >= 2");
    if (cfg.max_steps < 0) throw std::invalid_argument("training: negative step budget");

    const auto& items = buffer.items();
    const std::size_t batch =
        std::min<std::size_t>(static_cast<std::size_t>(cfg.batch_size), items.size());
    if (batch < 2) throw std::invalid_argument("training: buffer too small for a batch");

    std::vector<std::size_t> order(items.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    auto rng = stream.engine();

    TrainHistory history;
    history.losses.reserve(cfg.max_steps);
    std::vector<const Trajectory*> refs(batch);

    int step = 0;
    while (step < cfg.max_steps) {
        std::shuffle(order.begin(), order.end(), rng);
        for (std::size_t start = 0; start + batch <= order.size() && step < cfg.max_steps;
             start += batch) {
            for (std::size_t b = 0; b < batch; ++b) refs[b] = &items[order[start + b]];
            const double loss = do_step(TrajectoryRefs(refs));
            check_finite_loss(loss);
            history.losses.push_back(loss);
            ++step;
            if (window_converged(history.losses, cfg.patience, cfg.tolerance)) {
                history.converged = true;
                return history;
            }
        }
    }
    return history;
}

} // namespace

Buffer::Buffer(std::size_t capacity) : capacity_(capacity) {
    if (capacity == 0) throw std::invalid_argument("Buffer: capacity must be positive");
}

void Buffer::refill(int generation, std::vector<Trajectory> trajectories) {
    if (trajectories.size() > capacity_)
        throw std::invalid_argument("Buffer::refill: more trajectories than capacity");
    for (auto& traj : trajectories) {
        if (traj.grid.steps_H != trajectories.front().grid.steps_H ||
            traj.grid.horizon_T != trajectories.front().grid.horizon_T)
            throw std::invalid_argument("Buffer::refill: trajectories must share one grid");
        traj.generation = generation;
    }
    generation_ = generation;
    items_ = std::move(trajectories);
}

double hamiltonian(double t, const Eigen::VectorXd& x, const Eigen::VectorXd& u,
                   const Eigen::VectorXd& p, const ControlAffineModel& model,
                   const CostSpec& cost) {
    if (p.size() != model.dim_x) throw std::invalid_argument("hamiltonian: costate dim mismatch");
    return running_cost(cost, t, x, u) + p.dot(model.drift(t, x) + model.gain(t, x) * u);
}

Eigen::VectorXd improvement_target(double t, const Eigen::VectorXd& x, const ParamFn& z,
                                   const NoiseScheme& scheme, const ControlAffineModel* model,
                                   const Eigen::MatrixXd& R) {
    const Eigen::VectorXd zval = z.value(t, x);
    Eigen::VectorXd pre; // Upsilon' z, control-dimensional
    if (scheme.mode == NoiseMode::model_based) {
        if (model == nullptr)
            throw std::invalid_argument("improvement_target: model-based mode requires a model");
        pre = model->gain(t, x).transpose() * zval / scheme.sigma0;
    } else {
        pre = zval / scheme.sigma0;
    }
    if (pre.size() != R.rows())
        throw std::invalid_argument("improvement_target: control dimension mismatch");
    if (R.rows() == 0) return pre;
    return -Eigen::LLT<Eigen::MatrixXd>(R).solve(pre);
}

LossReport regression_mse_loss(const Eigen::VectorXd& ts, const Eigen::MatrixXd& xs,
                               const Eigen::MatrixXd& targets, ParamFn& fn, Mode mode) {
    const Eigen::Index n = ts.size();
    if (targets.cols() != n || xs.cols() != n)
        throw std::invalid_argument("regression_mse_loss: batch shape mismatch");
    const Eigen::MatrixXd out = fn.forward(ts, xs, mode);
    if (out.rows() != targets.rows())
        throw std::invalid_argument("regression_mse_loss: target dimension mismatch");
    const Eigen::MatrixXd residual = out - targets;

    LossReport report;
    report.batch_size = static_cast<int>(n);
    report.loss = residual.squaredNorm() / static_cast<double>(n);
    fn.zero_grad();
    fn.backward(2.0 / static_cast<double>(n) * residual);
    report.grad = fn.grad();
    return report;
}

TrainHistory evaluate_policy(const Buffer& buffer, ParamFn& z, AdamState& opt,
                             const TrainPhaseConfig& cfg, const RngStream& stream) {
    return train_over_buffer(buffer, cfg, stream, [&](TrajectoryRefs batch) {
        const LossReport report = measurability_loss(batch, z, Mode::train);
        apply_adam(z, opt, report.grad);
        return report.loss;
    });
}

TrainHistory improve_policy(const Buffer& buffer, const ParamFn& z, ParamFn& u,
                            AdamState& opt, const NoiseScheme& scheme,
                            const ControlAffineModel* model, const Eigen::MatrixXd& R,
                            const TrainPhaseConfig& cfg, const RngStream& stream) {
    if (scheme.mode == NoiseMode::model_based && model == nullptr)
        throw std::invalid_argument("improve_policy: model-based mode requires a model");
    if (buffer.empty()) throw std::invalid_argument("improve_policy: buffer is empty");

    // z is frozen during improvement, so the regression targets along the whole
    // buffer are fixed: evaluate them once, batched, with z in eval mode.
    const auto& items = buffer.items();
    const int H = items.front().steps();
    const int dim_x = items.front().dim_x();
    const Eigen::Index n_total = static_cast<Eigen::Index>(items.size()) * H;
    Eigen::VectorXd ts(n_total);
    Eigen::MatrixXd xs(dim_x, n_total);
    for (std::size_t i = 0; i < items.size(); ++i)
        for (int j = 0; j < H; ++j) {
            const Eigen::Index col = static_cast<Eigen::Index>(i) * H + j;
            ts[col] = items[i].grid.node(j);
            xs.col(col) = items[i].states.col(j);
        }

    const std::unique_ptr<ParamFn> z_eval = z.clone();
    const Eigen::MatrixXd zvals = z_eval->forward(ts, xs, Mode::eval);
    Eigen::MatrixXd pre(R.rows(), n_total); // Upsilon' z per column
    if (scheme.mode == NoiseMode::model_based) {
        for (Eigen::Index col = 0; col < n_total; ++col)
            pre.col(col) =
                model->gain(ts[col], xs.col(col)).transpose() * zvals.col(col) / scheme.sigma0;
    } else {
        if (zvals.rows() != R.rows())
            throw std::invalid_argument("improve_policy: z output dim must equal control dim");
        pre = zvals / scheme.sigma0;
    }
    Eigen::MatrixXd targets(R.rows(), n_total);
    if (R.rows() > 0)
        targets = -Eigen::LLT<Eigen::MatrixXd>(R).solve(pre);

    return train_over_buffer(buffer, cfg, stream, [&](TrajectoryRefs batch) {
        const int B = static_cast<int>(batch.size());
        const Eigen::Index n = static_cast<Eigen::Index>(B) * H;
        Eigen::VectorXd bts(n);
        Eigen::MatrixXd bxs(dim_x, n);
        Eigen::MatrixXd btargets(targets.rows(), n);
        for (int i = 0; i < B; ++i) {
            // Buffer items are stable; recover the flattened column range.
            const Eigen::Index base =
                static_cast<Eigen::Index>(batch[i] - items.data()) * H;
            bts.segment(static_cast<Eigen::Index>(i) * H, H) = ts.segment(base, H);
            bxs.middleCols(static_cast<Eigen::Index>(i) * H, H) = xs.middleCols(base, H);
            btargets.middleCols(static_cast<Eigen::Index>(i) * H, H) =
                targets.middleCols(base, H);
        }
        const LossReport report = regression_mse_loss(bts, bxs, btargets, u, Mode::train);
        apply_adam(u, opt, report.grad);
        return report.loss;
    });
}

IterationReport evaluate_deterministic(const ParamFn& u, const ControlAffineModel& model,
                                       const CostSpec& cost, const TimeGrid& grid,
                                       const Eigen::VectorXd& x0) {
    BrownianIncrements none;
    none.dw = Eigen::MatrixXd::Zero(model.dim_x, grid.steps_H);
    // ParamFn::value is const; the simulator contract takes a const policy.
    IterationReport report;
    report.det_rollout = simulate_model_based(model, x0, NoiseScheme{NoiseMode::model_based, 0.0},
                                              u, cost, grid, none);
    report.cost_to_go = report.det_rollout.cost_to_go();
    report.terminal_state = report.det_rollout.states.col(grid.steps_H);
    return report;
}

std::vector<IterationReport> run_policy_iteration(const PIConfig& cfg,
                                                  const ControlProblem& problem, ParamFn& z,
                                                  ParamFn& u, BlackBoxEnv* env) {
    const ControlAffineModel& model = problem.model;
    if (cfg.outer_iterations < 0)
        throw std::invalid_argument("run_policy_iteration: negative iteration count");
    if (z.output_dim() != cfg.scheme.noise_dim(model))
        throw std::invalid_argument("run_policy_iteration: z output dim must match noise dim");
    if (u.output_dim() != model.dim_u)
        throw std::invalid_argument("run_policy_iteration: u output dim must match control dim");
    if (cfg.rollouts_per_iteration < 2)
        throw std::invalid_argument("run_policy_iteration: need at least 2 rollouts");

    std::unique_ptr<BlackBoxEnv> owned_env;
    if (cfg.scheme.mode == NoiseMode::model_free && env == nullptr) {
        owned_env = euler_env_from_model(model, problem.x0);
        env = owned_env.get();
    }

    const RngStream root(cfg.seed);
    std::vector<IterationReport> reports;
    reports.reserve(cfg.outer_iterations + 1);

    IterationReport baseline =
        evaluate_deterministic(u, model, problem.cost, cfg.grid, problem.x0);
    baseline.iteration = 0;
    reports.push_back(std::move(baseline));

    Buffer buffer(cfg.buffer_capacity);
    for (int iter = 0; iter < cfg.outer_iterations; ++iter) {
        const RngStream iter_stream = root.substream(static_cast<std::uint64_t>(iter));

        std::vector<Trajectory> rollouts;
        rollouts.reserve(cfg.rollouts_per_iteration);
        const int count = static_cast<int>(
            std::min<std::size_t>(cfg.buffer_capacity, cfg.rollouts_per_iteration));
        for (int j = 0; j < count; ++j) {
            const RngStream traj_stream = iter_stream.substream(static_cast<std::uint64_t>(j));
            if (cfg.scheme.mode == NoiseMode::model_based) {
                rollouts.push_back(simulate_model_based(model, problem.x0, cfg.scheme, u,
                                                        problem.cost, cfg.grid, traj_stream));
            } else {
                rollouts.push_back(simulate_model_free(*env, cfg.scheme.sigma0, u, problem.cost,
                                                       cfg.grid, traj_stream));
            }
        }
        buffer.refill(iter, std::move(rollouts));

        AdamState eval_opt(cfg.eval_adam);
        const TrainHistory eval_hist = evaluate_policy(
            buffer, z, eval_opt, cfg.eval_phase, iter_stream.substream(0xE0A1));

        AdamState improve_opt(cfg.improve_adam);
        const TrainHistory improve_hist =
            improve_policy(buffer, z, u, improve_opt, cfg.scheme, &model,
                           problem.cost.control_weight, cfg.improve_phase,
                           iter_stream.substream(0xE0A2));

        IterationReport report =
            evaluate_deterministic(u, model, problem.cost, cfg.grid, problem.x0);
        report.iteration = iter + 1;
        report.final_eval_loss = eval_hist.final_loss();
        report.final_improve_loss = improve_hist.final_loss();
        report.eval_steps = static_cast<int>(eval_hist.losses.size());
        report.improve_steps = static_cast<int>(improve_hist.losses.size());
        reports.push_back(std::move(report));
    }
    return reports;
}

} // namespace fbsde
