#include "oracles.hpp"

#include <cmath>
#include <stdexcept>

namespace fbsde::oracles {

CurveOnGrid::CurveOnGrid(double T, std::vector<double> values)
    : T_(T), values_(std::move(values)) {
    if (values_.size() < 2) throw std::invalid_argument("CurveOnGrid: need at least 2 nodes");
}

double CurveOnGrid::operator()(double t) const {
    const double pos = t / T_ * static_cast<double>(values_.size() - 1);
    if (pos <= 0.0) return values_.front();
    if (pos >= static_cast<double>(values_.size() - 1)) return values_.back();
    const auto lo = static_cast<std::size_t>(pos);
    const double frac = pos - static_cast<double>(lo);
    return values_[lo] * (1.0 - frac) + values_[lo + 1] * frac;
}

CurveOnGrid solve_terminal_ode_rk4(const std::function<double(double, double)>& rhs, double T,
                                   double terminal, int steps) {
    std::vector<double> values(static_cast<std::size_t>(steps) + 1);
    const double h = T / steps;
    values[static_cast<std::size_t>(steps)] = terminal;
    double y = terminal;
    for (int k = steps; k > 0; --k) {
        // RK4 step of size -h from t_k down to t_{k-1}.
        const double t = k * h;
        const double k1 = rhs(t, y);
        const double k2 = rhs(t - 0.5 * h, y - 0.5 * h * k1);
        const double k3 = rhs(t - 0.5 * h, y - 0.5 * h * k2);
        const double k4 = rhs(t - h, y - h * k3);
        y -= h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
        values[static_cast<std::size_t>(k) - 1] = y;
    }
    return CurveOnGrid(T, std::move(values));
}

CurveOnGrid lq_riccati_P(const LqInstance& lq, int steps) {
    return solve_terminal_ode_rk4(
        [&lq](double, double p) {
            return -lq.q - 2.0 * lq.a * p + 2.0 * lq.b * lq.b * p * p / lq.r;
        },
        lq.T, lq.qT, steps);
}

CurveOnGrid lq_policy_value_P(const LqInstance& lq, const std::function<double(double)>& gain,
                              int steps) {
    return solve_terminal_ode_rk4(
        [&lq, &gain](double t, double p) {
            const double k = gain(t);
            return -(lq.q + 0.5 * lq.r * k * k) - 2.0 * (lq.a + lq.b * k) * p;
        },
        lq.T, lq.qT, steps);
}

double lq_noise_offset(const CurveOnGrid& P, double sigma, double T, int steps) {
    double acc = 0.0;
    const double h = T / steps;
    for (int k = 0; k < steps; ++k) acc += 0.5 * (P(k * h) + P((k + 1) * h)) * h;
    return sigma * sigma * acc;
}

double golden_minimize(const std::function<double(double)>& f, double lo, double hi,
                       double tol) {
    const double phi = (std::sqrt(5.0) - 1.0) / 2.0;
    double a = lo, b = hi;
    double c = b - phi * (b - a);
    double d = a + phi * (b - a);
    double fc = f(c), fd = f(d);
    while (b - a > tol) {
        if (fc < fd) {
            b = d;
            d = c;
            fd = fc;
            c = b - phi * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + phi * (b - a);
            fd = f(d);
        }
    }
    return 0.5 * (a + b);
}

double parabolic_minimize(const std::function<double(double)>& f, double lo, double hi) {
    double a = lo, m = 0.5 * (lo + hi), b = hi;
    for (int pass = 0; pass < 2; ++pass) {
        const double fa = f(a), fm = f(m), fb = f(b);
        const double num = (m - a) * (m - a) * (fm - fb) - (m - b) * (m - b) * (fm - fa);
        const double den = (m - a) * (fm - fb) - (m - b) * (fm - fa);
        if (den == 0.0) return m;
        const double vertex = m - 0.5 * num / den;
        // Re-center with a narrower bracket and fit once more.
        const double half = 0.25 * (b - a);
        a = vertex - half;
        b = vertex + half;
        m = vertex;
    }
    return m;
}

MeanSE mean_se(const Eigen::VectorXd& samples) {
    const auto n = static_cast<double>(samples.size());
    MeanSE out;
    out.mean = samples.mean();
    if (samples.size() > 1) {
        const double var = (samples.array() - out.mean).square().sum() / (n - 1.0);
        out.se = std::sqrt(var / n);
    }
    return out;
}

MeanSE variance_with_se(const Eigen::VectorXd& samples) {
    const auto n = static_cast<double>(samples.size());
    const double mean = samples.mean();
    const Eigen::ArrayXd centered = samples.array() - mean;
    MeanSE out;
    out.mean = centered.square().sum() / n;
    const double m4 = centered.pow(4).sum() / n;
    out.se = std::sqrt(std::max(0.0, m4 - out.mean * out.mean) / n);
    return out;
}

} // namespace fbsde::oracles
