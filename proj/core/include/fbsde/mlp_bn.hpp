#pragma once

#include <cstdint>

#include "fbsde/param_fn.hpp"

namespace fbsde {

// Feedforward net on the concatenated input (t, x): batch-norm layer on the raw
// input, one dense layer to 16 tanh units, dense layer to the output.
//
// Train mode normalizes with the statistics of the current batch and updates the
// running statistics (momentum 0.1); eval mode normalizes with the running
// statistics only and is a pure function of (params, running stats, input).
class MlpBN final : public ParamFn {
public:
    static constexpr int kHidden = 16;
    static constexpr double kBnEps = 1e-5;
    static constexpr double kBnMomentum = 0.1;

    // Dense weights and biases are initialized uniformly in +-1/sqrt(fan_in) from
    // the seed; gamma = 1, beta = 0, running mean 0, running var 1. With
    // zero_output_init the output layer starts at zero, so the whole network is
    // exactly the zero function until trained.
    MlpBN(int state_dim, int output_dim, std::uint64_t seed, bool zero_output_init = false);

    int state_dim() const override { return state_dim_; }
    int output_dim() const override { return output_dim_; }
    std::string architecture() const override;

    const Eigen::VectorXd& params() const override { return params_; }
    void set_params(const Eigen::VectorXd& p) override;

    Eigen::MatrixXd forward(const Eigen::VectorXd& t, const Eigen::MatrixXd& x,
                            Mode mode) override;
    void backward(const Eigen::MatrixXd& upstream) override;
    Eigen::VectorXd value(double t, const Eigen::VectorXd& x) const override;
    std::unique_ptr<ParamFn> clone() const override;

    Eigen::VectorXd aux_state() const override;
    void set_aux_state(const Eigen::VectorXd& s) override;

    [[nodiscard]] const Eigen::VectorXd& running_mean() const { return running_mean_; }
    [[nodiscard]] const Eigen::VectorXd& running_var() const { return running_var_; }

private:
    [[nodiscard]] int input_dim() const { return 1 + state_dim_; }

    // Parameter segments in the flat vector.
    [[nodiscard]] auto gamma() const { return params_.segment(0, input_dim()); }
    [[nodiscard]] auto beta() const { return params_.segment(input_dim(), input_dim()); }
    [[nodiscard]] Eigen::Map<const Eigen::MatrixXd> w1() const;
    [[nodiscard]] auto b1() const;
    [[nodiscard]] Eigen::Map<const Eigen::MatrixXd> w2() const;
    [[nodiscard]] auto b2() const;

    int state_dim_;
    int output_dim_;
    Eigen::VectorXd params_;
    Eigen::VectorXd running_mean_;
    Eigen::VectorXd running_var_;

    // Forward cache for backward().
    Eigen::MatrixXd cache_xhat_;
    Eigen::MatrixXd cache_bn_out_;
    Eigen::MatrixXd cache_h1_;
    bool has_cache_ = false;
};

} // namespace fbsde
