#include "fbsde/problems.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace fbsde {

ControlProblem example1_problem(int n) {
    if (n < 1) throw std::invalid_argument("example1_problem: n must be >= 1");
    ControlAffineModel model;
    model.dim_x = n;
    model.dim_u = 0;
    model.drift = [n](double, const Eigen::VectorXd&) { return Eigen::VectorXd::Zero(n); };
    model.gain = [n](double, const Eigen::VectorXd&) { return Eigen::MatrixXd(n, 0); };

    CostSpec cost = make_cost(
        [](const Eigen::VectorXd& x) { return x.squaredNorm(); },
        [n](double, const Eigen::VectorXd&) { return static_cast<double>(-n); },
        Eigen::MatrixXd(0, 0));

    return ControlProblem{std::move(model), std::move(cost), Eigen::VectorXd::Zero(n)};
}

double example1_true_y(double, const Eigen::VectorXd& x) { return x.squaredNorm(); }

Eigen::VectorXd example1_true_z(double, const Eigen::VectorXd& x) { return 2.0 * x; }

double example1_yerr(double theta, int n, double T) {
    const double nn = n;
    return nn * (nn + 2) * T * T * T *
           (1.0 / 3.0 + theta * theta * (nn + 4) * (nn + 6) * T * T / 5.0 -
            2.0 * theta * (nn + 4) * T / 4.0);
}

double example1_zerr(double theta, int n, double T) {
    const double nn = n;
    return 4.0 * nn * T * T *
           (0.5 + theta * theta * (nn + 2) * (nn + 4) * T * T -
            (4.0 / 3.0) * theta * (nn + 2) * T);
}

double example1_theta_star_y(int n, double T) { return 5.0 / (4.0 * (n + 6) * T); }

double example1_theta_star_z(int n, double T) { return 2.0 / (3.0 * (n + 4) * T); }

ControlAffineModel pendulum_model(double a, double b, double inertia) {
    ControlAffineModel model;
    model.dim_x = 2;
    model.dim_u = 1;
    model.drift = [a, b, inertia](double, const Eigen::VectorXd& x) {
        Eigen::VectorXd f(2);
        f[0] = x[1];
        f[1] = (a * std::sin(x[0]) - b * x[1]) / inertia;
        return f;
    };
    model.gain = [inertia](double, const Eigen::VectorXd& x) {
        Eigen::MatrixXd g(2, 1);
        g(0, 0) = 0.0;
        g(1, 0) = std::cos(x[0]) / inertia;
        return g;
    };
    return model;
}

CostSpec pendulum_cost(double lambda1, double lambda2, double r, const Eigen::Vector2d& x_star) {
    Eigen::MatrixXd R(1, 1);
    R(0, 0) = r;
    return make_cost(
        [](const Eigen::VectorXd&) { return 0.0; },
        [lambda1, lambda2, x_star](double, const Eigen::VectorXd& x) {
            const double d0 = x[0] - x_star[0];
            const double d1 = x[1] - x_star[1];
            return lambda1 * d0 * d0 + lambda2 * d1 * d1;
        },
        R);
}

ControlProblem pendulum_problem(double a, double b, double inertia, double lambda1,
                                double lambda2, double r, const Eigen::Vector2d& x_star) {
    Eigen::VectorXd x0(2);
    x0 << std::numbers::pi, 0.0;
    return ControlProblem{pendulum_model(a, b, inertia),
                          pendulum_cost(lambda1, lambda2, r, x_star), std::move(x0)};
}

} // namespace fbsde
