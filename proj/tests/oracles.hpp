#pragma once

// Test-only oracles. Everything here is independent of the library code paths it
// is used to check: dense RK4 for Riccati/Lyapunov references, a derivative-free
// 1-D minimizer, and plain statistics helpers.

#include <functional>
#include <vector>

#include <Eigen/Core>

namespace fbsde::oracles {

// Piecewise-linear curve on a uniform grid over [0, T].
class CurveOnGrid {
public:
    CurveOnGrid(double T, std::vector<double> values);
    double operator()(double t) const;
    [[nodiscard]] double front() const { return values_.front(); } // value at t = 0

private:
    double T_;
    std::vector<double> values_;
};

// Backward RK4 for y' = rhs(t, y), y(T) = terminal, returning y on a uniform
// grid with `steps` intervals (values[k] at t = k*T/steps).
CurveOnGrid solve_terminal_ode_rk4(const std::function<double(double, double)>& rhs, double T,
                                   double terminal, int steps = 20000);

// Scalar LQ instance: dx = (a x + b u) dt + sigma dW, running cost q x^2 + r u^2 / 2,
// terminal cost qT x^2.
struct LqInstance {
    double a = 0.0;
    double b = 1.0;
    double q = 1.0;
    double r = 0.5;
    double qT = 0.5;
    double x0 = 1.0;
    double T = 1.0;
};

// Optimal-value Riccati curve: P' = -q - 2aP + 2 b^2 P^2 / r, P(T) = qT.
// The optimal deterministic cost is P(0) x0^2 and the optimal gain -2bP(t)/r.
CurveOnGrid lq_riccati_P(const LqInstance& lq, int steps = 20000);

// Value curve of a fixed linear feedback u = k(t) x:
// P' = -(q + r k^2 / 2) - 2 (a + b k) P, P(T) = qT.
CurveOnGrid lq_policy_value_P(const LqInstance& lq, const std::function<double(double)>& gain,
                              int steps = 20000);

// Noise offset of the stochastic value function, c(0) = sigma^2 * int_0^T P dt.
double lq_noise_offset(const CurveOnGrid& P, double sigma, double T, int steps = 20000);

// Golden-section minimizer on [lo, hi].
double golden_minimize(const std::function<double(double)>& f, double lo, double hi,
                       double tol = 1e-12);

// Vertex of the parabola through three samples of f; exact (to rounding) for
// quadratics, where comparison-based searches stall at sqrt(eps) resolution.
double parabolic_minimize(const std::function<double(double)>& f, double lo, double hi);

struct MeanSE {
    double mean = 0.0;
    double se = 0.0;
};

MeanSE mean_se(const Eigen::VectorXd& samples);

// Population variance of the samples together with the (asymptotic) standard
// error of that variance estimate.
MeanSE variance_with_se(const Eigen::VectorXd& samples);

} // namespace fbsde::oracles
