#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <filesystem>

#include "fbsde/adam.hpp"
#include "fbsde/gradcheck.hpp"
#include "fbsde/linear_family.hpp"
#include "fbsde/mlp_bn.hpp"
#include "fbsde/rng.hpp"

using namespace fbsde;

namespace {

Eigen::MatrixXd random_batch_x(int dim, int n, std::uint64_t seed) {
    auto rng = RngStream(seed).engine();
    std::normal_distribution<double> gauss(0.0, 1.0);
    Eigen::MatrixXd x(dim, n);
    for (int j = 0; j < n; ++j)
        for (int i = 0; i < dim; ++i) x(i, j) = gauss(rng);
    return x;
}

} // namespace

TEST_CASE("linear family forward values") {
    SUBCASE("well-specified z is 2 theta x") {
        LinearBasisFn z = example1_z_family(2, Example1Param::well_specified, 1.0);
        Eigen::VectorXd x(2);
        x << 3.0, 4.0;
        CHECK(z.value(0.0, x).isApprox(Eigen::Vector2d(6.0, 8.0), 1e-15));
    }
    SUBCASE("misspecified z is 4 theta x |x|^2") {
        LinearBasisFn z = example1_z_family(2, Example1Param::misspecified, 0.5);
        Eigen::VectorXd x(2);
        x << 1.0, 0.0;
        CHECK(z.value(0.0, x).isApprox(Eigen::Vector2d(2.0, 0.0), 1e-15));
    }
    SUBCASE("y families") {
        LinearBasisFn y_well = example1_y_family(3, Example1Param::well_specified, 0.5);
        LinearBasisFn y_mis = example1_y_family(3, Example1Param::misspecified, 0.5);
        Eigen::VectorXd x(3);
        x << 1.0, 2.0, 2.0; // |x|^2 = 9
        CHECK(y_well.value(0.0, x)[0] == doctest::Approx(4.5));
        CHECK(y_mis.value(0.0, x)[0] == doctest::Approx(40.5));
    }
    SUBCASE("zero function") {
        LinearBasisFn z = zero_fn(3, 2);
        CHECK(z.params().size() == 0);
        Eigen::VectorXd x(3);
        x << 5.0, -1.0, 0.3;
        CHECK(z.value(0.7, x).norm() == 0.0);
    }
}

TEST_CASE("linear family backward accumulates basis-weighted upstream") {
    // Objective sum_i <z(x_i), c_i> has d/dtheta = sum_i <2 x_i, c_i>.
    LinearBasisFn z = example1_z_family(2, Example1Param::well_specified, 0.7);
    const int n = 5;
    Eigen::VectorXd ts = Eigen::VectorXd::Zero(n);
    const Eigen::MatrixXd xs = random_batch_x(2, n, 1);
    const Eigen::MatrixXd cs = random_batch_x(2, n, 2);

    z.forward(ts, xs, Mode::train);
    z.zero_grad();
    z.backward(cs);
    const double expected = (2.0 * xs.array() * cs.array()).sum();
    CHECK(z.grad()[0] == doctest::Approx(expected).epsilon(1e-13));

    SUBCASE("zero upstream gives zero gradient") {
        z.zero_grad();
        z.backward(Eigen::MatrixXd::Zero(2, n));
        CHECK(z.grad()[0] == 0.0);
    }
    SUBCASE("repeated backward accumulates") {
        z.zero_grad();
        z.backward(cs);
        z.backward(cs);
        CHECK(z.grad()[0] == doctest::Approx(2.0 * expected).epsilon(1e-13));
    }
}

TEST_CASE("backward before forward is a state error") {
    LinearBasisFn z = example1_z_family(2, Example1Param::well_specified, 1.0);
    CHECK_THROWS_AS(z.backward(Eigen::MatrixXd::Zero(2, 1)), std::logic_error);
    MlpBN net(2, 1, 7);
    CHECK_THROWS_AS(net.backward(Eigen::MatrixXd::Zero(1, 1)), std::logic_error);
}

TEST_CASE("MlpBN basics") {
    SUBCASE("zero output init is exactly the zero function") {
        MlpBN net(2, 1, 42, /*zero_output_init=*/true);
        Eigen::VectorXd x(2);
        x << 3.0, -7.0;
        CHECK(net.value(0.9, x)[0] == 0.0);
        Eigen::VectorXd ts(3);
        ts << 0.0, 0.5, 1.0;
        const Eigen::MatrixXd out = net.forward(ts, random_batch_x(2, 3, 3), Mode::train);
        CHECK(out.cwiseAbs().maxCoeff() == 0.0);
    }
    SUBCASE("all-zero parameters give zero output for any input") {
        MlpBN net(2, 2, 42);
        net.set_params(Eigen::VectorXd::Zero(net.params().size()));
        Eigen::VectorXd x(2);
        x << 1.5, 2.5;
        CHECK(net.value(0.2, x).norm() == 0.0);
    }
    SUBCASE("hidden width is 16") {
        MlpBN net(2, 1, 1);
        // gamma(3) + beta(3) + W1(16x3) + b1(16) + W2(1x16) + b2(1)
        CHECK(net.params().size() == 3 + 3 + 48 + 16 + 16 + 1);
    }
    SUBCASE("eval-mode forward is bitwise repeatable and running stats stay fixed") {
        MlpBN net(2, 2, 11);
        Eigen::VectorXd ts(4);
        ts << 0.1, 0.2, 0.3, 0.4;
        const Eigen::MatrixXd xs = random_batch_x(2, 4, 5);
        const Eigen::VectorXd mean_before = net.running_mean();
        const Eigen::MatrixXd a = net.forward(ts, xs, Mode::eval);
        const Eigen::MatrixXd b = net.forward(ts, xs, Mode::eval);
        CHECK((a.array() == b.array()).all());
        CHECK((net.running_mean().array() == mean_before.array()).all());

        Eigen::VectorXd x1 = xs.col(1);
        const Eigen::VectorXd v1 = net.value(ts[1], x1);
        const Eigen::VectorXd v2 = net.value(ts[1], x1);
        CHECK((v1.array() == v2.array()).all());
        CHECK(v1.isApprox(a.col(1), 1e-12));
    }
    SUBCASE("train mode updates running statistics toward batch statistics") {
        MlpBN net(1, 1, 11);
        Eigen::VectorXd ts(2);
        ts << 10.0, 10.0; // batch mean of the t feature is 10
        Eigen::MatrixXd xs = Eigen::MatrixXd::Zero(1, 2);
        net.forward(ts, xs, Mode::train);
        CHECK(net.running_mean()[0] == doctest::Approx(0.9 * 0.0 + 0.1 * 10.0));
        CHECK(net.running_var()[0] == doctest::Approx(0.9 * 1.0 + 0.1 * 0.0));
    }
}

TEST_CASE("gradcheck suite passes for every architecture x loss pair") {
    const auto results = run_gradcheck_suite(2026);
    for (const auto& res : results) {
        INFO(res.name, " max_rel_err=", res.max_rel_err, " tol=", res.tolerance);
        CHECK(res.passed());
    }
    CHECK(results.size() >= 12);
}

TEST_CASE("adam") {
    SUBCASE("zero gradient and zero decay leave parameters unchanged") {
        AdamState opt(AdamConfig{.lr = 0.1});
        Eigen::VectorXd params = Eigen::VectorXd::Constant(3, 1.5);
        adam_step(opt, params, Eigen::VectorXd::Zero(3));
        CHECK(params.isApprox(Eigen::VectorXd::Constant(3, 1.5), 1e-15));
    }
    SUBCASE("first step moves against the gradient, bounded by lr") {
        AdamState opt(AdamConfig{.lr = 0.01});
        Eigen::VectorXd params(1);
        params << 2.0;
        Eigen::VectorXd grad(1);
        grad << 0.37;
        adam_step(opt, params, grad);
        CHECK(params[0] < 2.0);
        CHECK(std::abs(params[0] - 2.0) <= 0.01 * (1.0 + 1e-6));
    }
    SUBCASE("quadratic convergence oracle") {
        AdamState opt(AdamConfig{.lr = 0.1});
        Eigen::VectorXd theta(1);
        theta << 0.0;
        for (int step = 0; step < 500; ++step) {
            Eigen::VectorXd grad(1);
            grad << 2.0 * (theta[0] - 3.0);
            adam_step(opt, theta, grad);
        }
        CHECK(std::abs(theta[0] - 3.0) < 1e-3);
    }
    SUBCASE("weight decay pulls parameters toward zero") {
        AdamState opt(AdamConfig{.lr = 0.01, .weight_decay = 0.1});
        Eigen::VectorXd params(1);
        params << 1.0;
        for (int step = 0; step < 10; ++step) adam_step(opt, params, Eigen::VectorXd::Zero(1));
        CHECK(params[0] < 1.0);
        CHECK(params[0] > 0.0);
    }
    SUBCASE("empty parameter vector is a no-op") {
        AdamState opt;
        Eigen::VectorXd params(0), grad(0);
        adam_step(opt, params, grad);
        CHECK(opt.step_count == 1);
    }
}

TEST_CASE("parameter snapshots round-trip exactly") {
    const std::string path =
        (std::filesystem::temp_directory_path() / "fbsde_test_params.txt").string();

    SUBCASE("mlp-bn with running statistics") {
        MlpBN net(2, 1, 77);
        Eigen::VectorXd ts(8);
        Eigen::MatrixXd xs = random_batch_x(2, 8, 6);
        for (int i = 0; i < 8; ++i) ts[i] = 0.125 * i;
        net.forward(ts, xs, Mode::train); // moves the running stats off their init
        save_params(net, path);

        MlpBN restored(2, 1, 1234);
        load_params(restored, path);
        CHECK((restored.params().array() == net.params().array()).all());
        CHECK((restored.aux_state().array() == net.aux_state().array()).all());

        Eigen::VectorXd x(2);
        x << 0.3, -0.8;
        CHECK((restored.value(0.2, x).array() == net.value(0.2, x).array()).all());
    }
    SUBCASE("architecture mismatch is rejected") {
        MlpBN net(2, 1, 77);
        save_params(net, path);
        MlpBN other(3, 1, 77);
        CHECK_THROWS_AS(load_params(other, path), std::runtime_error);
        LinearBasisFn lin = example1_z_family(2, Example1Param::well_specified, 1.0);
        CHECK_THROWS_AS(load_params(lin, path), std::runtime_error);
    }
    std::remove(path.c_str());
}

TEST_CASE("forward_point matches a one-column batch in either mode") {
    MlpBN net(2, 2, 21);
    Eigen::VectorXd x(2);
    x << 0.4, -1.2;
    const Eigen::VectorXd eval_pt = net.forward_point(0.3, x, Mode::eval);
    CHECK(eval_pt.isApprox(net.value(0.3, x), 1e-12));
    // Train mode on a single point normalizes it to the batch mean, so the
    // batch-norm output is beta alone pushed through the dense layers.
    const Eigen::VectorXd train_pt = net.forward_point(0.3, x, Mode::train);
    const Eigen::VectorXd train_other = net.forward_point(9.9, 5.0 * x, Mode::train);
    CHECK(train_pt.isApprox(train_other, 1e-12));
}

TEST_CASE("forward rejects mismatched batch shapes") {
    MlpBN net(2, 1, 3);
    Eigen::VectorXd ts(3);
    ts << 0.0, 0.1, 0.2;
    CHECK_THROWS_AS(net.forward(ts, Eigen::MatrixXd::Zero(3, 3), Mode::eval),
                    std::invalid_argument);
    CHECK_THROWS_AS(net.forward(ts, Eigen::MatrixXd::Zero(2, 2), Mode::eval),
                    std::invalid_argument);
    LinearBasisFn z = example1_z_family(2, Example1Param::well_specified, 1.0);
    CHECK_THROWS_AS(z.forward(ts, Eigen::MatrixXd::Zero(1, 3), Mode::eval),
                    std::invalid_argument);
}
