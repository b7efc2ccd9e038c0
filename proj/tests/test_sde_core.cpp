#include <doctest.h>

#include <cmath>
#include <numbers>
#include <sstream>

#include "fbsde/linear_family.hpp"
#include "fbsde/mlp_bn.hpp"
#include "fbsde/problems.hpp"
#include "fbsde/simulate.hpp"

using namespace fbsde;

namespace {

bool bitwise_equal(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b) {
    return a.rows() == b.rows() && a.cols() == b.cols() && (a.array() == b.array()).all();
}

} // namespace

TEST_CASE("make_grid produces the documented grids") {
    const TimeGrid g1 = make_grid(0.5, 50);
    CHECK(g1.dt == doctest::Approx(0.01).epsilon(1e-15));
    const TimeGrid g2 = make_grid(1.0, 100);
    CHECK(g2.dt == doctest::Approx(0.01).epsilon(1e-15));

    const TimeGrid g3 = make_grid(1.0, 1);
    CHECK(g3.dt == 1.0);
    const Eigen::VectorXd nodes = g3.nodes();
    REQUIRE(nodes.size() == 2);
    CHECK(nodes[0] == 0.0);
    CHECK(nodes[1] == 1.0);

    // dt * H recovers T up to one ulp-scaled rounding, nodes strictly increase.
    const TimeGrid g4 = make_grid(0.7, 13);
    CHECK(std::abs(g4.dt * g4.steps_H - g4.horizon_T) <= 4 * 0.7 * 1e-16);
    for (int k = 0; k < g4.steps_H; ++k) CHECK(g4.node(k) < g4.node(k + 1));

    CHECK_THROWS_AS(make_grid(0.0, 10), std::invalid_argument);
    CHECK_THROWS_AS(make_grid(-1.0, 10), std::invalid_argument);
    CHECK_THROWS_AS(make_grid(1.0, 0), std::invalid_argument);
}

TEST_CASE("sample_brownian is seeded and has the right moments") {
    const TimeGrid grid = make_grid(0.5, 50);
    const RngStream stream(123);

    const BrownianIncrements a = sample_brownian(grid, 3, stream);
    const BrownianIncrements b = sample_brownian(grid, 3, stream);
    CHECK(bitwise_equal(a.dw, b.dw));
    CHECK(a.dim_w() == 3);
    CHECK(a.steps() == 50);

    const BrownianIncrements c = sample_brownian(grid, 3, RngStream(124));
    CHECK_FALSE(bitwise_equal(a.dw, c.dw));

    // 1e5 draws of each coordinate: mean within 3 sqrt(dt/N), variance within 5%.
    const int paths = 2000; // 2000 paths x 50 steps = 1e5 draws per coordinate
    Eigen::ArrayXd sum = Eigen::ArrayXd::Zero(3), sumsq = Eigen::ArrayXd::Zero(3);
    for (int p = 0; p < paths; ++p) {
        const BrownianIncrements inc = sample_brownian(grid, 3, stream.substream(p));
        sum += inc.dw.array().rowwise().sum();
        sumsq += inc.dw.array().square().rowwise().sum();
    }
    const double n_draws = paths * 50.0;
    for (int i = 0; i < 3; ++i) {
        const double mean = sum[i] / n_draws;
        const double var = sumsq[i] / n_draws - mean * mean;
        CHECK(std::abs(mean) <= 3.0 * std::sqrt(grid.dt / n_draws));
        CHECK(var == doctest::Approx(grid.dt).epsilon(0.05));
    }
}

TEST_CASE("drift-free unit-noise simulation is the discrete Brownian path") {
    const int n = 3;
    const ControlProblem problem = example1_problem(n);
    const TimeGrid grid = make_grid(0.5, 50);
    const LinearBasisFn no_control = zero_fn(n, 0);
    const RngStream stream(7);

    const Trajectory traj = simulate_model_based(problem.model, problem.x0,
                                                 NoiseScheme{NoiseMode::model_based, 1.0},
                                                 no_control, problem.cost, grid, stream);
    REQUIRE(traj.states.cols() == 51);
    Eigen::VectorXd w = Eigen::VectorXd::Zero(n);
    for (int k = 0; k < grid.steps_H; ++k) {
        w += traj.dw.col(k);
        CHECK((traj.states.col(k + 1).array() == w.array()).all());
    }
    CHECK(traj.running_costs[0] == -static_cast<double>(n));
    CHECK(traj.terminal_cost == traj.states.col(50).squaredNorm());
}

TEST_CASE("sigma0=0 pendulum under zero control stays at the unstable equilibrium") {
    const ControlProblem problem = pendulum_problem();
    const TimeGrid grid = make_grid(1.0, 100);
    const LinearBasisFn no_control = zero_fn(2, 1);

    const Trajectory traj = simulate_model_based(problem.model, problem.x0,
                                                 NoiseScheme{NoiseMode::model_based, 0.0},
                                                 no_control, problem.cost, grid, RngStream(1));
    // F(pi, 0) vanishes up to sin(pi) rounding; the state cannot move beyond that.
    for (int k = 0; k <= grid.steps_H; ++k) {
        CHECK(std::abs(traj.states(0, k) - std::numbers::pi) < 1e-12);
        CHECK(std::abs(traj.states(1, k)) < 1e-12);
    }
}

TEST_CASE("simulation diverging reports the failing step") {
    ControlAffineModel model;
    model.dim_x = 1;
    model.dim_u = 0;
    model.drift = [](double, const Eigen::VectorXd& x) { return Eigen::VectorXd(3000.0 * x); };
    model.gain = [](double, const Eigen::VectorXd&) { return Eigen::MatrixXd(1, 0); };
    CostSpec cost = make_cost([](const Eigen::VectorXd&) { return 0.0; },
                              [](double, const Eigen::VectorXd&) { return 0.0; },
                              Eigen::MatrixXd(0, 0));
    Eigen::VectorXd x0(1);
    x0 << 1.0;
    const TimeGrid grid = make_grid(1.0, 100);
    const LinearBasisFn no_control = zero_fn(1, 0);

    try {
        simulate_model_based(model, x0, NoiseScheme{NoiseMode::model_based, 0.0}, no_control,
                             cost, grid, RngStream(3));
        FAIL("expected SimulationDivergedError");
    } catch (const SimulationDivergedError& e) {
        CHECK(e.step_index >= 0);
        CHECK(e.step_index < 100);
        // x grows 31x per step from 1; the 1e6 bound falls at step 4.
        CHECK(e.step_index == 4);
    }
}

TEST_CASE("model-free simulation: zero noise equals the deterministic rollout") {
    const ControlProblem problem = pendulum_problem();
    const TimeGrid grid = make_grid(1.0, 50);
    MlpBN policy(2, 1, 99);

    auto env = euler_env_from_model(problem.model, problem.x0);
    const Trajectory free0 =
        simulate_model_free(*env, 0.0, policy, problem.cost, grid, RngStream(5));
    const Trajectory based0 = simulate_model_based(problem.model, problem.x0,
                                                   NoiseScheme{NoiseMode::model_based, 0.0},
                                                   policy, problem.cost, grid, RngStream(6));
    CHECK(bitwise_equal(free0.states, based0.states));
    CHECK(bitwise_equal(free0.controls, based0.controls));
    CHECK(free0.terminal_cost == based0.terminal_cost);
}

TEST_CASE("mode equivalence: control-noise env rollout matches the sigma=sigma0*G path") {
    const ControlProblem problem = pendulum_problem();
    const TimeGrid grid = make_grid(0.5, 50);
    MlpBN policy(2, 1, 17);
    const double sigma0 = 1.414;

    const BrownianIncrements shared = sample_brownian(grid, 1, RngStream(21));
    auto env = euler_env_from_model(problem.model, problem.x0);
    const Trajectory via_env =
        simulate_model_free(*env, sigma0, policy, problem.cost, grid, shared);
    const Trajectory via_state_noise = simulate_model_based(
        problem.model, problem.x0, NoiseScheme{NoiseMode::model_free, sigma0}, policy,
        problem.cost, grid, shared);

    REQUIRE(bitwise_equal(via_env.dw, via_state_noise.dw));
    for (int k = 0; k <= grid.steps_H; ++k) {
        for (int i = 0; i < 2; ++i) {
            const double a = via_env.states(i, k);
            const double b = via_state_noise.states(i, k);
            CHECK(std::abs(a - b) <= 1e-12 * std::max({std::abs(a), std::abs(b), 1.0}));
        }
    }
    // Controls are policy evaluations of states that agree to 1e-12, so they
    // match at the same tolerance (bitwise only at k = 0).
    CHECK(via_env.controls(0, 0) == via_state_noise.controls(0, 0));
    for (int k = 0; k < grid.steps_H; ++k) {
        const double a = via_env.controls(0, k);
        const double b = via_state_noise.controls(0, k);
        CHECK(std::abs(a - b) <= 1e-11 * std::max({std::abs(a), std::abs(b), 1.0}));
    }
}

TEST_CASE("model-free pendulum rollout records the unperturbed policy output") {
    const ControlProblem problem = pendulum_problem();
    const TimeGrid grid = make_grid(1.0, 100);
    MlpBN policy(2, 1, 31);
    auto env = euler_env_from_model(problem.model, problem.x0);

    const Trajectory traj =
        simulate_model_free(*env, 1.414, policy, problem.cost, grid, RngStream(11));
    CHECK(traj.states.cols() == 101);
    CHECK(traj.states.allFinite());
    CHECK(traj.states(0, 0) == std::numbers::pi);
    CHECK(traj.states(1, 0) == 0.0);
    for (int k = 0; k < grid.steps_H; ++k) {
        const Eigen::VectorXd u = policy.value(grid.node(k), traj.states.col(k));
        CHECK(traj.controls(0, k) == u[0]);
        CHECK(traj.running_costs[k] ==
              running_cost(problem.cost, grid.node(k), traj.states.col(k), u));
    }

    SUBCASE("zero policy, fixed seed: finite path from (pi, 0), zero recorded controls") {
        const LinearBasisFn no_control = zero_fn(2, 1);
        const Trajectory zero_traj =
            simulate_model_free(*env, 1.414, no_control, problem.cost, grid, RngStream(11));
        CHECK(zero_traj.states.cols() == 101);
        CHECK(zero_traj.states.allFinite());
        CHECK(zero_traj.states(0, 0) == std::numbers::pi);
        CHECK(zero_traj.controls.cwiseAbs().maxCoeff() == 0.0);
    }
}

TEST_CASE("euler_env_from_model steps match the model") {
    SUBCASE("pendulum at the equilibrium with zero control stays put") {
        const ControlProblem problem = pendulum_problem();
        auto env = euler_env_from_model(problem.model, problem.x0);
        const Eigen::VectorXd x = env->reset();
        Eigen::VectorXd u(1);
        u << 0.0;
        const Eigen::VectorXd next = env->step(x, u, 0.01);
        CHECK(std::abs(next[0] - std::numbers::pi) < 1e-14);
        CHECK(std::abs(next[1]) < 1e-14);
    }
    SUBCASE("constant drift advances by c*dt per step") {
        ControlAffineModel model;
        model.dim_x = 2;
        model.dim_u = 0;
        const Eigen::Vector2d c(0.5, -2.0);
        model.drift = [c](double, const Eigen::VectorXd&) { return Eigen::VectorXd(c); };
        model.gain = [](double, const Eigen::VectorXd&) { return Eigen::MatrixXd(2, 0); };
        auto env = euler_env_from_model(model, Eigen::Vector2d::Zero());
        Eigen::VectorXd x = env->reset();
        const Eigen::VectorXd u(0);
        for (int k = 1; k <= 5; ++k) {
            x = env->step(x, u, 0.1);
            CHECK(x.isApprox(Eigen::VectorXd(k * 0.1 * c), 1e-14));
        }
    }
}

TEST_CASE("sigma * Upsilon recovers G in both modes") {
    const ControlAffineModel model = pendulum_model();
    const NoiseScheme based{NoiseMode::model_based, 1.414};
    const NoiseScheme free{NoiseMode::model_free, 1.414};
    auto rng = RngStream(42).engine();
    std::uniform_real_distribution<double> unif(-3.0, 3.0);
    for (int trial = 0; trial < 100; ++trial) {
        const double t = 0.01 * trial;
        Eigen::VectorXd x(2);
        x << unif(rng), unif(rng);
        const Eigen::MatrixXd g = model.gain(t, x);
        for (const NoiseScheme& scheme : {based, free}) {
            const Eigen::MatrixXd prod = scheme.sigma(model, t, x) * scheme.upsilon(model, t, x);
            REQUIRE(prod.rows() == g.rows());
            REQUIRE(prod.cols() == g.cols());
            CHECK((prod - g).cwiseAbs().maxCoeff() <=
                  1e-13 * std::max(1.0, g.cwiseAbs().maxCoeff()));
        }
    }
}

TEST_CASE("pure Brownian terminal second moment matches n*T") {
    const int n = 3;
    const double T = 0.5;
    const ControlProblem problem = example1_problem(n);
    const TimeGrid grid = make_grid(T, 50);
    const LinearBasisFn no_control = zero_fn(n, 0);
    const RngStream root(2024);

    const int paths = 10000;
    double acc = 0.0;
    for (int p = 0; p < paths; ++p) {
        const Trajectory traj =
            simulate_model_based(problem.model, problem.x0,
                                 NoiseScheme{NoiseMode::model_based, 1.0}, no_control,
                                 problem.cost, grid, root.substream(p));
        acc += traj.states.col(grid.steps_H).squaredNorm();
    }
    CHECK(acc / paths == doctest::Approx(n * T).epsilon(0.05));
}

TEST_CASE("simulation is a pure function of inputs and seed") {
    const ControlProblem problem = pendulum_problem();
    const TimeGrid grid = make_grid(1.0, 50);
    MlpBN policy(2, 1, 13);
    const NoiseScheme scheme{NoiseMode::model_based, 1.414};

    const Trajectory a = simulate_model_based(problem.model, problem.x0, scheme, policy,
                                              problem.cost, grid, RngStream(77));
    const Trajectory b = simulate_model_based(problem.model, problem.x0, scheme, policy,
                                              problem.cost, grid, RngStream(77));
    CHECK(bitwise_equal(a.states, b.states));
    CHECK(bitwise_equal(a.dw, b.dw));
    CHECK(bitwise_equal(a.controls, b.controls));
    CHECK((a.running_costs.array() == b.running_costs.array()).all());
}

TEST_CASE("trajectory CSV layout") {
    const ControlProblem problem = pendulum_problem();
    const TimeGrid grid = make_grid(0.1, 2);
    MlpBN policy(2, 1, 5);
    std::vector<Trajectory> batch;
    batch.push_back(simulate_model_based(problem.model, problem.x0,
                                         NoiseScheme{NoiseMode::model_based, 1.0}, policy,
                                         problem.cost, grid, RngStream(9)));

    std::ostringstream os;
    write_trajectory_csv(os, batch);
    std::istringstream is(os.str());
    std::string line;
    std::getline(is, line);
    CHECK(line == "trajectory_id,k,t,x0,x1,u0,dw0,dw1,g");
    int rows = 0;
    std::string last;
    while (std::getline(is, line)) {
        ++rows;
        last = line;
    }
    CHECK(rows == 3); // H+1 rows for one trajectory
    // terminal row keeps the state columns and leaves u/dw/g empty
    CHECK(last.substr(0, 4) == "0,2,");
    CHECK(last.substr(last.size() - 4) == ",,,,");
}

TEST_CASE("cost_to_go is non-increasing for nonnegative running costs") {
    const ControlProblem problem = pendulum_problem();
    const TimeGrid grid = make_grid(1.0, 50);
    MlpBN policy(2, 1, 55);
    const Trajectory traj = simulate_model_based(problem.model, problem.x0,
                                                 NoiseScheme{NoiseMode::model_based, 1.414},
                                                 policy, problem.cost, grid, RngStream(4));
    const Eigen::VectorXd ctg = traj.cost_to_go();
    REQUIRE(ctg.size() == 51);
    for (int k = 0; k < 50; ++k) CHECK(ctg[k] >= ctg[k + 1]);
    CHECK(ctg[50] == traj.terminal_cost);
}
