#pragma once

#include <functional>
#include <vector>

#include "fbsde/param_fn.hpp"
#include "fbsde/problems.hpp"

namespace fbsde {

// Linear-in-theta family: f(t,x) = sum_k theta_k * B_k(t,x). The gradient w.r.t.
// theta_k is the basis value contracted with the upstream gradient. Mode is
// irrelevant. Zero bases give the zero function with an empty parameter vector.
class LinearBasisFn final : public ParamFn {
public:
    // Maps a batch (t: N, x: state_dim x N) to output_dim x N.
    using Basis = std::function<Eigen::MatrixXd(const Eigen::VectorXd&, const Eigen::MatrixXd&)>;

    LinearBasisFn(int state_dim, int output_dim, std::vector<Basis> bases,
                  Eigen::VectorXd theta0);

    int state_dim() const override { return state_dim_; }
    int output_dim() const override { return output_dim_; }
    std::string architecture() const override;

    const Eigen::VectorXd& params() const override { return theta_; }
    void set_params(const Eigen::VectorXd& p) override;

    Eigen::MatrixXd forward(const Eigen::VectorXd& t, const Eigen::MatrixXd& x,
                            Mode mode) override;
    void backward(const Eigen::MatrixXd& upstream) override;
    Eigen::VectorXd value(double t, const Eigen::VectorXd& x) const override;
    std::unique_ptr<ParamFn> clone() const override;

private:
    int state_dim_;
    int output_dim_;
    std::vector<Basis> bases_;
    Eigen::VectorXd theta_;
    std::vector<Eigen::MatrixXd> cached_basis_;
    bool has_cache_ = false;
};

// The always-zero function with no parameters.
LinearBasisFn zero_fn(int state_dim, int output_dim);

// Example-1 parameterizations.
//   well-specified: z = 2 theta x        (fits the true gradient exactly at theta = 1)
//   misspecified:   z = 4 theta x |x|^2
LinearBasisFn example1_z_family(int n, Example1Param param, double theta0);
//   well-specified: y = theta |x|^2
//   misspecified:   y = theta |x|^4
LinearBasisFn example1_y_family(int n, Example1Param param, double theta0);

} // namespace fbsde
