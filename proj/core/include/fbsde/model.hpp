#pragma once

#include <functional>
#include <memory>

#include <Eigen/Core>

namespace fbsde {

// Control-affine dynamics dx = (F(t,x) + G(t,x) u) dt, white-box form.
struct ControlAffineModel {
    int dim_x = 0;
    int dim_u = 0;
    std::function<Eigen::VectorXd(double, const Eigen::VectorXd&)> drift; // F, dim_x
    std::function<Eigen::MatrixXd(double, const Eigen::VectorXd&)> gain;  // G, dim_x x dim_u
};

enum class NoiseMode { model_based, model_free };

// The (sigma, Upsilon) factorization G = sigma * Upsilon.
//   model_based: sigma = sigma0 * I (dim_w = dim_x),   Upsilon = G / sigma0
//   model_free:  sigma = sigma0 * G (dim_w = dim_u),   Upsilon = I / sigma0
struct NoiseScheme {
    NoiseMode mode = NoiseMode::model_based;
    double sigma0 = 1.0;

    [[nodiscard]] int noise_dim(const ControlAffineModel& model) const {
        return mode == NoiseMode::model_based ? model.dim_x : model.dim_u;
    }
    [[nodiscard]] Eigen::MatrixXd sigma(const ControlAffineModel& model, double t,
                                        const Eigen::VectorXd& x) const;
    [[nodiscard]] Eigen::MatrixXd upsilon(const ControlAffineModel& model, double t,
                                          const Eigen::VectorXd& x) const;
};

NoiseScheme model_based_scheme(double sigma0);
NoiseScheme model_free_scheme(double sigma0);

// Opaque stepper interface: exposes no F or G, only state transitions.
class BlackBoxEnv {
public:
    virtual ~BlackBoxEnv() = default;
    virtual int state_dim() const = 0;
    virtual int control_dim() const = 0;
    // Returns x0 and rewinds the internal clock.
    virtual Eigen::VectorXd reset() = 0;
    // Deterministic next state given (state, control); advances the clock by dt.
    virtual Eigen::VectorXd step(const Eigen::VectorXd& x, const Eigen::VectorXd& u,
                                 double dt) = 0;
};

// Wraps a white-box model as an opaque Euler stepper: x + (F + G u) dt.
std::unique_ptr<BlackBoxEnv> euler_env_from_model(ControlAffineModel model, Eigen::VectorXd x0);

} // namespace fbsde
