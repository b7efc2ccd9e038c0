#include "fbsde/model.hpp"

#include <stdexcept>
#include <utility>

namespace fbsde {

Eigen::MatrixXd NoiseScheme::sigma(const ControlAffineModel& model, double t,
                                   const Eigen::VectorXd& x) const {
    if (mode == NoiseMode::model_based)
        return sigma0 * Eigen::MatrixXd::Identity(model.dim_x, model.dim_x);
    return sigma0 * model.gain(t, x);
}

Eigen::MatrixXd NoiseScheme::upsilon(const ControlAffineModel& model, double t,
                                     const Eigen::VectorXd& x) const {
    if (mode == NoiseMode::model_based) return model.gain(t, x) / sigma0;
    return Eigen::MatrixXd::Identity(model.dim_u, model.dim_u) / sigma0;
}

NoiseScheme model_based_scheme(double sigma0) {
    if (!(sigma0 > 0.0)) throw std::invalid_argument("noise scheme: sigma0 must be positive");
    return NoiseScheme{NoiseMode::model_based, sigma0};
}

NoiseScheme model_free_scheme(double sigma0) {
    if (!(sigma0 > 0.0)) throw std::invalid_argument("noise scheme: sigma0 must be positive");
    return NoiseScheme{NoiseMode::model_free, sigma0};
}

namespace {

class EulerModelEnv final : public BlackBoxEnv {
public:
    EulerModelEnv(ControlAffineModel model, Eigen::VectorXd x0)
        : model_(std::move(model)), x0_(std::move(x0)) {
        if (x0_.size() != model_.dim_x)
            throw std::invalid_argument("euler_env_from_model: x0 dimension mismatch");
    }

    int state_dim() const override { return model_.dim_x; }
    int control_dim() const override { return model_.dim_u; }

    Eigen::VectorXd reset() override {
        clock_ = 0.0;
        return x0_;
    }

    Eigen::VectorXd step(const Eigen::VectorXd& x, const Eigen::VectorXd& u,
                         double dt) override {
        Eigen::VectorXd next = x + (model_.drift(clock_, x) + model_.gain(clock_, x) * u) * dt;
        clock_ += dt;
        return next;
    }

private:
    ControlAffineModel model_;
    Eigen::VectorXd x0_;
    double clock_ = 0.0;
};

} // namespace

std::unique_ptr<BlackBoxEnv> euler_env_from_model(ControlAffineModel model, Eigen::VectorXd x0) {
    return std::make_unique<EulerModelEnv>(std::move(model), std::move(x0));
}

} // namespace fbsde
