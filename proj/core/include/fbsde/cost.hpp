#pragma once

#include <functional>

#include <Eigen/Core>

namespace fbsde {

// Cost functional pieces: terminal phi(x), state cost Q(t,x), and the quadratic
// control weight R (symmetric positive definite, dim_u x dim_u).
struct CostSpec {
    std::function<double(const Eigen::VectorXd&)> terminal;
    std::function<double(double, const Eigen::VectorXd&)> state_cost;
    Eigen::MatrixXd control_weight;

    [[nodiscard]] int dim_u() const { return static_cast<int>(control_weight.rows()); }
};

// Validates R (square, symmetric, positive definite via Cholesky). dim_u == 0 is
// allowed and models control-free problems.
CostSpec make_cost(std::function<double(const Eigen::VectorXd&)> terminal,
                   std::function<double(double, const Eigen::VectorXd&)> state_cost,
                   Eigen::MatrixXd control_weight);

// Q(t,x) + 0.5 * u'Ru
double running_cost(const CostSpec& cost, double t, const Eigen::VectorXd& x,
                    const Eigen::VectorXd& u);

} // namespace fbsde
