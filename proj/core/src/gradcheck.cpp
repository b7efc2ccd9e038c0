#include "fbsde/gradcheck.hpp"

#include <cmath>

#include "fbsde/linear_family.hpp"
#include "fbsde/losses.hpp"
#include "fbsde/mlp_bn.hpp"
#include "fbsde/policy_iteration.hpp"
#include "fbsde/simulate.hpp"

namespace fbsde {

Eigen::VectorXd finite_difference_gradient(const ParamFn& fn,
                                           const std::function<double(ParamFn&)>& loss,
                                           double h) {
    const Eigen::VectorXd theta = fn.params();
    Eigen::VectorXd grad(theta.size());
    for (Eigen::Index i = 0; i < theta.size(); ++i) {
        Eigen::VectorXd probe = theta;
        probe[i] = theta[i] + h;
        auto plus = fn.clone();
        plus->set_params(probe);
        const double f_plus = loss(*plus);

        probe[i] = theta[i] - h;
        auto minus = fn.clone();
        minus->set_params(probe);
        const double f_minus = loss(*minus);

        grad[i] = (f_plus - f_minus) / (2.0 * h);
    }
    return grad;
}

double max_relative_error(const Eigen::VectorXd& analytic, const Eigen::VectorXd& numeric) {
    if (analytic.size() != numeric.size())
        throw std::invalid_argument("max_relative_error: size mismatch");
    double worst = 0.0;
    for (Eigen::Index i = 0; i < analytic.size(); ++i) {
        const double denom = std::max({std::abs(analytic[i]), std::abs(numeric[i]), 1e-3});
        worst = std::max(worst, std::abs(analytic[i] - numeric[i]) / denom);
    }
    return worst;
}

namespace {

std::vector<Trajectory> small_example1_batch(int n, std::uint64_t seed, int count) {
    const ControlProblem problem = example1_problem(n);
    const TimeGrid grid = make_grid(0.25, 10);
    const LinearBasisFn no_control = zero_fn(n, 0);
    const NoiseScheme scheme{NoiseMode::model_based, 1.0};
    const RngStream root(seed);
    std::vector<Trajectory> batch;
    batch.reserve(count);
    for (int i = 0; i < count; ++i)
        batch.push_back(simulate_model_based(problem.model, problem.x0, scheme, no_control,
                                             problem.cost, grid, root.substream(i)));
    return batch;
}

GradCheckResult check_loss(const std::string& name, const ParamFn& fn,
                           const std::function<double(ParamFn&)>& loss,
                           const Eigen::VectorXd& analytic, double tol, double h) {
    const Eigen::VectorXd numeric = finite_difference_gradient(fn, loss, h);
    return GradCheckResult{name, max_relative_error(analytic, numeric), tol};
}

} // namespace

std::vector<GradCheckResult> run_gradcheck_suite(std::uint64_t seed) {
    constexpr double kLinearTol = 1e-8;
    constexpr double kMlpTol = 1e-5;
    constexpr double kLinearH = 1e-3; // losses are quadratic in theta: no truncation error
    constexpr double kMlpH = 1e-5;

    const int n = 2;
    const std::vector<Trajectory> batch = small_example1_batch(n, seed, 6);
    std::span<const Trajectory> view(batch);
    const double y0_db = 0.7;

    std::vector<GradCheckResult> results;

    auto meas = [view](ParamFn& f) { return measurability_loss(view, f, Mode::train).loss; };
    auto db = [view, y0_db](ParamFn& f) {
        return deep_bsde_loss(view, f, y0_db, Mode::train).loss;
    };
    auto mart = [view](ParamFn& f) { return martingale_loss(view, f, Mode::train).loss; };

    // Linear families.
    {
        LinearBasisFn z = example1_z_family(n, Example1Param::well_specified, 0.4);
        results.push_back(check_loss("linear-z-well x measurability", z,
                                     meas, measurability_loss(view, z, Mode::train).grad,
                                     kLinearTol, kLinearH));
        results.push_back(check_loss("linear-z-well x deep-bsde", z, db,
                                     deep_bsde_loss(view, z, y0_db, Mode::train).grad,
                                     kLinearTol, kLinearH));
    }
    {
        LinearBasisFn z = example1_z_family(n, Example1Param::misspecified, 0.3);
        results.push_back(check_loss("linear-z-mis x measurability", z, meas,
                                     measurability_loss(view, z, Mode::train).grad,
                                     kLinearTol, kLinearH));
        results.push_back(check_loss("linear-z-mis x deep-bsde", z, db,
                                     deep_bsde_loss(view, z, y0_db, Mode::train).grad,
                                     kLinearTol, kLinearH));
    }
    {
        LinearBasisFn y = example1_y_family(n, Example1Param::well_specified, 0.4);
        results.push_back(check_loss("linear-y-well x martingale", y, mart,
                                     martingale_loss(view, y, Mode::train).grad,
                                     kLinearTol, kLinearH));
    }
    {
        LinearBasisFn y = example1_y_family(n, Example1Param::misspecified, 0.3);
        results.push_back(check_loss("linear-y-mis x martingale", y, mart,
                                     martingale_loss(view, y, Mode::train).grad,
                                     kLinearTol, kLinearH));
    }
    {
        // Two-basis linear function, z = theta_0 * 2x + theta_1 * t * x.
        std::vector<LinearBasisFn::Basis> bases;
        bases.emplace_back([](const Eigen::VectorXd&, const Eigen::MatrixXd& x) {
            return Eigen::MatrixXd(2.0 * x);
        });
        bases.emplace_back([](const Eigen::VectorXd& t, const Eigen::MatrixXd& x) {
            return Eigen::MatrixXd(x * t.asDiagonal());
        });
        Eigen::VectorXd theta(2);
        theta << 0.5, -0.2;
        LinearBasisFn z(n, n, std::move(bases), theta);
        results.push_back(check_loss("linear-2basis x measurability", z, meas,
                                     measurability_loss(view, z, Mode::train).grad,
                                     kLinearTol, kLinearH));
    }

    // Batch-norm MLP against every loss.
    {
        MlpBN z(n, n, seed + 11);
        results.push_back(check_loss("mlp-bn x measurability", z, meas,
                                     measurability_loss(view, z, Mode::train).grad,
                                     kMlpTol, kMlpH));
        results.push_back(check_loss("mlp-bn x deep-bsde", z, db,
                                     deep_bsde_loss(view, z, y0_db, Mode::train).grad,
                                     kMlpTol, kMlpH));

        // d(deep-BSDE)/d(y0_db) by scalar central difference.
        const double analytic_dy0 = *deep_bsde_loss(view, z, y0_db, Mode::train).grad_y0_db;
        auto z_probe = z.clone();
        const double h = kMlpH;
        const double numeric_dy0 =
            (deep_bsde_loss(view, *z_probe, y0_db + h, Mode::train).loss -
             deep_bsde_loss(view, *z_probe, y0_db - h, Mode::train).loss) /
            (2.0 * h);
        Eigen::VectorXd a(1), b(1);
        a << analytic_dy0;
        b << numeric_dy0;
        results.push_back(GradCheckResult{"deep-bsde d/dy0_db (mlp-bn)",
                                          max_relative_error(a, b), kMlpTol});
    }
    {
        MlpBN y(n, 1, seed + 13);
        results.push_back(check_loss("mlp-bn x martingale", y, mart,
                                     martingale_loss(view, y, Mode::train).grad,
                                     kMlpTol, kMlpH));
    }
    {
        // Policy-improvement regression onto fixed targets.
        MlpBN u(n, 1, seed + 17);
        const int points = 40;
        auto rng = RngStream(seed + 19).engine();
        std::normal_distribution<double> gauss(0.0, 1.0);
        Eigen::VectorXd ts(points);
        Eigen::MatrixXd xs(n, points);
        Eigen::MatrixXd targets(1, points);
        for (int i = 0; i < points; ++i) {
            ts[i] = 0.1 * i;
            for (int d = 0; d < n; ++d) xs(d, i) = gauss(rng);
            targets(0, i) = gauss(rng);
        }
        auto reg = [&](ParamFn& f) {
            return regression_mse_loss(ts, xs, targets, f, Mode::train).loss;
        };
        results.push_back(check_loss("mlp-bn x policy-regression", u, reg,
                                     regression_mse_loss(ts, xs, targets, u, Mode::train).grad,
                                     kMlpTol, kMlpH));
    }
    {
        // Zero-parameter edge: nothing to differentiate, vacuous pass.
        LinearBasisFn z = zero_fn(n, n);
        const Eigen::VectorXd analytic = measurability_loss(view, z, Mode::train).grad;
        const Eigen::VectorXd numeric = finite_difference_gradient(z, meas, kLinearH);
        results.push_back(GradCheckResult{"zero-params x measurability",
                                          max_relative_error(analytic, numeric), kLinearTol});
    }
    return results;
}

} // namespace fbsde
