#pragma once

#include <cstdint>
#include <limits>
#include <stdexcept>
#include <vector>

#include "fbsde/adam.hpp"
#include "fbsde/losses.hpp"
#include "fbsde/problems.hpp"
#include "fbsde/rng.hpp"
#include "fbsde/simulate.hpp"

namespace fbsde {

class TrainingDivergedError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// On-policy trajectory store. All stored trajectories share one grid and one
// policy generation; the buffer is discarded and refilled each outer iteration.
class Buffer {
public:
    explicit Buffer(std::size_t capacity);

    void refill(int generation, std::vector<Trajectory> trajectories);

    [[nodiscard]] std::size_t capacity() const { return capacity_; }
    [[nodiscard]] int generation() const { return generation_; }
    [[nodiscard]] const std::vector<Trajectory>& items() const { return items_; }
    [[nodiscard]] bool empty() const { return items_.empty(); }

private:
    std::size_t capacity_;
    int generation_ = -1;
    std::vector<Trajectory> items_;
};

struct TrainPhaseConfig {
    int max_steps = 2000;
    double tolerance = 1e-4; // relative improvement threshold over the patience window
    int patience = 50;
    int batch_size = 128;
};

struct PIConfig {
    int outer_iterations = 4;
    int rollouts_per_iteration = 128;
    std::size_t buffer_capacity = 128;
    TrainPhaseConfig eval_phase;
    TrainPhaseConfig improve_phase;
    AdamConfig eval_adam;
    AdamConfig improve_adam;
    NoiseScheme scheme;
    TimeGrid grid;
    std::uint64_t seed = 0;
};

struct TrainHistory {
    std::vector<double> losses;
    bool converged = false;

    [[nodiscard]] double final_loss() const {
        return losses.empty() ? std::numeric_limits<double>::quiet_NaN() : losses.back();
    }
};

struct IterationReport {
    int iteration = 0;                // 0 is the zero-policy baseline
    double final_eval_loss = std::numeric_limits<double>::quiet_NaN();
    double final_improve_loss = std::numeric_limits<double>::quiet_NaN();
    int eval_steps = 0;
    int improve_steps = 0;
    Trajectory det_rollout;           // deterministic evaluation on the original system
    Eigen::VectorXd cost_to_go;       // H+1 entries
    Eigen::VectorXd terminal_state;

    [[nodiscard]] double det_cost() const { return cost_to_go[0]; }
};

// Q(t,x) + 0.5 u'Ru + <p, F(t,x) + G(t,x)u>
double hamiltonian(double t, const Eigen::VectorXd& x, const Eigen::VectorXd& u,
                   const Eigen::VectorXd& p, const ControlAffineModel& model,
                   const CostSpec& cost);

// Hamiltonian-minimizing control from the fitted diffusion term:
//   -R^{-1} Upsilon(t,x)' z(t,x)
// Model-based mode needs the model for Upsilon = G/sigma0; model-free needs none.
Eigen::VectorXd improvement_target(double t, const Eigen::VectorXd& x, const ParamFn& z,
                                   const NoiseScheme& scheme, const ControlAffineModel* model,
                                   const Eigen::MatrixXd& R);

// Mean-squared regression onto fixed targets over a point batch,
// (1/N) sum ||fn(t_i, x_i) - target_i||^2; used by the policy-improvement step.
LossReport regression_mse_loss(const Eigen::VectorXd& ts, const Eigen::MatrixXd& xs,
                               const Eigen::MatrixXd& targets, ParamFn& fn, Mode mode);

// Minimize the measurability loss over minibatches drawn uniformly without
// replacement per epoch. Stops on the max-step budget or when the mean loss over
// the trailing patience window stops improving relative to the window before it.
TrainHistory evaluate_policy(const Buffer& buffer, ParamFn& z, AdamState& opt,
                             const TrainPhaseConfig& cfg, const RngStream& stream);

// Regress u onto the improvement targets built from the trained z (eval mode)
// along the buffered trajectories.
TrainHistory improve_policy(const Buffer& buffer, const ParamFn& z, ParamFn& u,
                            AdamState& opt, const NoiseScheme& scheme,
                            const ControlAffineModel* model, const Eigen::MatrixXd& R,
                            const TrainPhaseConfig& cfg, const RngStream& stream);

// sigma0 = 0 Euler rollout of the policy (eval mode) on the original deterministic
// system, with the realized cost-to-go sequence.
IterationReport evaluate_deterministic(const ParamFn& u, const ControlAffineModel& model,
                                       const CostSpec& cost, const TimeGrid& grid,
                                       const Eigen::VectorXd& x0);

// Full loop: rollouts of the current policy fill the buffer, policy evaluation
// fits z, policy improvement refits u, then a deterministic evaluation rollout is
// recorded. Networks warm-start across iterations; Adam state is fresh each
// iteration. Reports: one zero-policy baseline plus one per iteration.
// env is used for model-free rollouts; if null, the model is wrapped internally.
std::vector<IterationReport> run_policy_iteration(const PIConfig& cfg,
                                                  const ControlProblem& problem, ParamFn& z,
                                                  ParamFn& u, BlackBoxEnv* env = nullptr);

} // namespace fbsde
