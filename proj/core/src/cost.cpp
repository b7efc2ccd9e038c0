#include "fbsde/cost.hpp"

#include <stdexcept>
#include <utility>

#include <Eigen/Cholesky>

namespace fbsde {

CostSpec make_cost(std::function<double(const Eigen::VectorXd&)> terminal,
                   std::function<double(double, const Eigen::VectorXd&)> state_cost,
                   Eigen::MatrixXd control_weight) {
    if (!terminal || !state_cost) throw std::invalid_argument("make_cost: missing cost function");
    if (control_weight.rows() != control_weight.cols())
        throw std::invalid_argument("make_cost: control weight R must be square");
    if (control_weight.rows() > 0) {
        if (!control_weight.isApprox(control_weight.transpose(), 1e-12))
            throw std::invalid_argument("make_cost: control weight R must be symmetric");
        Eigen::LLT<Eigen::MatrixXd> llt(control_weight);
        if (llt.info() != Eigen::Success)
            throw std::invalid_argument("make_cost: control weight R must be positive definite");
    }
    return CostSpec{std::move(terminal), std::move(state_cost), std::move(control_weight)};
}

double running_cost(const CostSpec& cost, double t, const Eigen::VectorXd& x,
                    const Eigen::VectorXd& u) {
    if (u.size() != cost.control_weight.rows())
        throw std::invalid_argument("running_cost: control dimension mismatch");
    double quad = 0.0;
    if (u.size() > 0) quad = 0.5 * u.dot(cost.control_weight * u);
    return cost.state_cost(t, x) + quad;
}

} // namespace fbsde
