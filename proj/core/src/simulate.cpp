#include "fbsde/simulate.hpp"

#include <cmath>
#include <string>

namespace fbsde {

namespace {

constexpr double kStateBound = 1e6;

void check_state(const Eigen::VectorXd& x, int step) {
    if (!x.allFinite() || x.norm() > kStateBound)
        throw SimulationDivergedError(
            "simulation diverged at step " + std::to_string(step), step);
}

Trajectory empty_trajectory(const TimeGrid& grid, int dim_x, int dim_u, int dim_w) {
    Trajectory traj;
    traj.grid = grid;
    traj.states.resize(dim_x, grid.steps_H + 1);
    traj.dw.resize(dim_w, grid.steps_H);
    traj.controls.resize(dim_u, grid.steps_H);
    traj.running_costs.resize(grid.steps_H);
    return traj;
}

} // namespace

Trajectory simulate_model_based(const ControlAffineModel& model, const Eigen::VectorXd& x0,
                                const NoiseScheme& scheme, const ParamFn& policy,
                                const CostSpec& cost, const TimeGrid& grid,
                                const BrownianIncrements& increments) {
    if (x0.size() != model.dim_x)
        throw std::invalid_argument("simulate_model_based: x0 dimension mismatch");
    if (policy.output_dim() != model.dim_u || cost.dim_u() != model.dim_u)
        throw std::invalid_argument("simulate_model_based: control dimension mismatch");
    const int dim_w = scheme.noise_dim(model);
    if (increments.dim_w() != dim_w || increments.steps() != grid.steps_H)
        throw std::invalid_argument("simulate_model_based: increment shape mismatch");

    Trajectory traj = empty_trajectory(grid, model.dim_x, model.dim_u, dim_w);
    traj.dw = increments.dw;
    traj.states.col(0) = x0;

    for (int k = 0; k < grid.steps_H; ++k) {
        const double t = grid.node(k);
        const Eigen::VectorXd x = traj.states.col(k);
        const Eigen::VectorXd u = policy.value(t, x);
        traj.controls.col(k) = u;
        traj.running_costs[k] = running_cost(cost, t, x, u);

        Eigen::VectorXd next = x + (model.drift(t, x) + model.gain(t, x) * u) * grid.dt;
        if (scheme.sigma0 != 0.0) {
            if (scheme.mode == NoiseMode::model_based)
                next += scheme.sigma0 * traj.dw.col(k);
            else
                next += scheme.sigma0 * (model.gain(t, x) * traj.dw.col(k));
        }
        check_state(next, k);
        traj.states.col(k + 1) = next;
    }
    traj.terminal_cost = cost.terminal(traj.states.col(grid.steps_H));
    return traj;
}

Trajectory simulate_model_based(const ControlAffineModel& model, const Eigen::VectorXd& x0,
                                const NoiseScheme& scheme, const ParamFn& policy,
                                const CostSpec& cost, const TimeGrid& grid,
                                const RngStream& stream) {
    return simulate_model_based(model, x0, scheme, policy, cost, grid,
                                sample_brownian(grid, scheme.noise_dim(model), stream));
}

Trajectory simulate_model_free(BlackBoxEnv& env, double sigma0, const ParamFn& policy,
                               const CostSpec& cost, const TimeGrid& grid,
                               const BrownianIncrements& increments) {
    const int dim_u = env.control_dim();
    if (policy.output_dim() != dim_u || cost.dim_u() != dim_u)
        throw std::invalid_argument("simulate_model_free: control dimension mismatch");
    if (increments.dim_w() != dim_u || increments.steps() != grid.steps_H)
        throw std::invalid_argument("simulate_model_free: increment shape mismatch");

    Trajectory traj = empty_trajectory(grid, env.state_dim(), dim_u, dim_u);
    traj.dw = increments.dw;
    traj.states.col(0) = env.reset();
    check_state(traj.states.col(0), 0);

    for (int k = 0; k < grid.steps_H; ++k) {
        const double t = grid.node(k);
        const Eigen::VectorXd x = traj.states.col(k);
        const Eigen::VectorXd u = policy.value(t, x);
        traj.controls.col(k) = u;
        traj.running_costs[k] = running_cost(cost, t, x, u);

        Eigen::VectorXd applied = u;
        if (sigma0 != 0.0) applied += (sigma0 / grid.dt) * traj.dw.col(k);
        Eigen::VectorXd next = env.step(x, applied, grid.dt);
        check_state(next, k);
        traj.states.col(k + 1) = next;
    }
    traj.terminal_cost = cost.terminal(traj.states.col(grid.steps_H));
    return traj;
}

Trajectory simulate_model_free(BlackBoxEnv& env, double sigma0, const ParamFn& policy,
                               const CostSpec& cost, const TimeGrid& grid,
                               const RngStream& stream) {
    return simulate_model_free(env, sigma0, policy, cost, grid,
                               sample_brownian(grid, env.control_dim(), stream));
}

} // namespace fbsde
