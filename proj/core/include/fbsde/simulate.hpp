#pragma once

#include <stdexcept>

#include "fbsde/cost.hpp"
#include "fbsde/model.hpp"
#include "fbsde/param_fn.hpp"
#include "fbsde/trajectory.hpp"

namespace fbsde {

// Rollout hit a non-finite state or left the sanity bound ||x|| <= 1e6.
class SimulationDivergedError : public std::runtime_error {
public:
    SimulationDivergedError(std::string what, int step) noexcept
        : std::runtime_error(std::move(what)), step_index(step) {}
    int step_index;
};

// Euler-Maruyama with state-space noise injection:
//   X_{k+1} = X_k + (F + G u(t_k, X_k)) dt + sigma(t_k, X_k) dW_k,
// sigma chosen by the scheme (sigma0*I model-based, sigma0*G model-free).
// The policy runs in eval mode. sigma0 == 0 degenerates to the deterministic rollout.
Trajectory simulate_model_based(const ControlAffineModel& model, const Eigen::VectorXd& x0,
                                const NoiseScheme& scheme, const ParamFn& policy,
                                const CostSpec& cost, const TimeGrid& grid,
                                const RngStream& stream);
Trajectory simulate_model_based(const ControlAffineModel& model, const Eigen::VectorXd& x0,
                                const NoiseScheme& scheme, const ParamFn& policy,
                                const CostSpec& cost, const TimeGrid& grid,
                                const BrownianIncrements& increments);

// Control-space noise injection against an opaque stepper: applies u + xi_k with
// xi_k = sigma0 dW_k / dt, records the learner's own dW_k and the UNPERTURBED
// policy output; running costs are evaluated at the unperturbed control.
Trajectory simulate_model_free(BlackBoxEnv& env, double sigma0, const ParamFn& policy,
                               const CostSpec& cost, const TimeGrid& grid,
                               const RngStream& stream);
Trajectory simulate_model_free(BlackBoxEnv& env, double sigma0, const ParamFn& policy,
                               const CostSpec& cost, const TimeGrid& grid,
                               const BrownianIncrements& increments);

} // namespace fbsde
