#include <benchmark/benchmark.h>

#include "fbsde/linear_family.hpp"
#include "fbsde/losses.hpp"
#include "fbsde/mlp_bn.hpp"
#include "fbsde/policy_iteration.hpp"
#include "fbsde/problems.hpp"
#include "fbsde/simulate.hpp"

namespace {

using namespace fbsde;

void bench_sample_brownian(benchmark::State& state) {
    const TimeGrid grid = make_grid(1.0, 100);
    const RngStream stream(7);
    const int dim = static_cast<int>(state.range(0));
    for (auto _ : state) {
        auto inc = sample_brownian(grid, dim, stream);
        benchmark::DoNotOptimize(inc.dw.data());
    }
    state.SetItemsProcessed(state.iterations() * grid.steps_H * dim);
}
BENCHMARK(bench_sample_brownian)->Arg(2)->Arg(100);

void bench_pendulum_rollout_model_based(benchmark::State& state) {
    const ControlProblem problem = pendulum_problem();
    const TimeGrid grid = make_grid(1.0, 100);
    const NoiseScheme scheme{NoiseMode::model_based, 1.414};
    MlpBN policy(2, 1, 3);
    const RngStream stream(11);
    std::uint64_t i = 0;
    for (auto _ : state) {
        auto traj = simulate_model_based(problem.model, problem.x0, scheme, policy,
                                         problem.cost, grid, stream.substream(i++));
        benchmark::DoNotOptimize(traj.states.data());
    }
    state.SetItemsProcessed(state.iterations() * grid.steps_H);
}
BENCHMARK(bench_pendulum_rollout_model_based);

void bench_pendulum_rollout_model_free(benchmark::State& state) {
    const ControlProblem problem = pendulum_problem();
    const TimeGrid grid = make_grid(1.0, 100);
    auto env = euler_env_from_model(problem.model, problem.x0);
    MlpBN policy(2, 1, 3);
    const RngStream stream(11);
    std::uint64_t i = 0;
    for (auto _ : state) {
        auto traj = simulate_model_free(*env, 1.414, policy, problem.cost, grid,
                                        stream.substream(i++));
        benchmark::DoNotOptimize(traj.states.data());
    }
    state.SetItemsProcessed(state.iterations() * grid.steps_H);
}
BENCHMARK(bench_pendulum_rollout_model_free);

void bench_measurability_step_mlp(benchmark::State& state) {
    const ControlProblem problem = pendulum_problem();
    const TimeGrid grid = make_grid(1.0, 100);
    const NoiseScheme scheme{NoiseMode::model_based, 1.414};
    MlpBN policy(2, 1, 3);
    MlpBN z(2, 2, 5);
    const RngStream stream(13);
    const int batch = static_cast<int>(state.range(0));
    std::vector<Trajectory> trajs;
    trajs.reserve(batch);
    for (int i = 0; i < batch; ++i)
        trajs.push_back(simulate_model_based(problem.model, problem.x0, scheme, policy,
                                             problem.cost, grid, stream.substream(i)));
    for (auto _ : state) {
        auto report = measurability_loss(trajs, z, Mode::train);
        benchmark::DoNotOptimize(report.grad.data());
    }
    state.SetItemsProcessed(state.iterations() * batch * grid.steps_H);
}
BENCHMARK(bench_measurability_step_mlp)->Arg(32)->Arg(128);

void bench_adam_step(benchmark::State& state) {
    const Eigen::Index n = state.range(0);
    AdamState opt(AdamConfig{.lr = 1e-3});
    Eigen::VectorXd params = Eigen::VectorXd::Constant(n, 0.5);
    const Eigen::VectorXd grad = Eigen::VectorXd::Constant(n, 0.1);
    for (auto _ : state) {
        adam_step(opt, params, grad);
        benchmark::DoNotOptimize(params.data());
    }
    state.SetItemsProcessed(state.iterations() * n);
}
BENCHMARK(bench_adam_step)->Arg(128)->Arg(4096);

} // namespace

BENCHMARK_MAIN();
