#pragma once

#include <Eigen/Core>

#include "fbsde/cost.hpp"
#include "fbsde/model.hpp"

namespace fbsde {

// A model, its cost functional and the fixed initial state, bundled for rollouts.
struct ControlProblem {
    ControlAffineModel model;
    CostSpec cost;
    Eigen::VectorXd x0;
};

enum class Example1Param { well_specified, misspecified };

// Pure policy-evaluation instance: the state is n-dimensional Brownian motion
// (F = 0, no control), running cost -n, terminal cost |x|^2, x0 = 0. The value
// function is v(t,x) = |x|^2.
ControlProblem example1_problem(int n);

// True adapted solution: Y = |x|^2, Z = 2x.
double example1_true_y(double t, const Eigen::VectorXd& x);
Eigen::VectorXd example1_true_z(double t, const Eigen::VectorXd& x);

// Closed-form criteria for the misspecified family y = theta*|x|^4, z = 4*theta*x*|x|^2
// against the true solution, as functions of theta.
double example1_yerr(double theta, int n, double T);
double example1_zerr(double theta, int n, double T);

// Minimizers of the two criteria: theta*_Y = 5/(4(n+6)T), theta*_Z = 2/(3(n+4)T).
double example1_theta_star_y(int n, double T);
double example1_theta_star_z(int n, double T);

// Pendulum swing-up: state (theta_p, theta_dot), F = (theta_dot, (a sin - b theta_dot)/I),
// G = (0, cos theta_p / I).
ControlAffineModel pendulum_model(double a = 9.8, double b = 0.1, double inertia = 1.0);

// phi = 0, Q = (x - x_star)' diag(lambda1, lambda2) (x - x_star), R = [[r]].
CostSpec pendulum_cost(double lambda1 = 1.01, double lambda2 = 0.01, double r = 0.005,
                       const Eigen::Vector2d& x_star = Eigen::Vector2d::Zero());

ControlProblem pendulum_problem(double a = 9.8, double b = 0.1, double inertia = 1.0,
                                double lambda1 = 1.01, double lambda2 = 0.01,
                                double r = 0.005,
                                const Eigen::Vector2d& x_star = Eigen::Vector2d::Zero());

} // namespace fbsde
