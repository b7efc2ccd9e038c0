#include "fbsde/experiments.hpp"

#include <chrono>
#include <cmath>
#include <filesystem>
#include <ostream>

#include "fbsde/csv.hpp"
#include "fbsde/gradcheck.hpp"
#include "fbsde/linear_family.hpp"
#include "fbsde/mlp_bn.hpp"
#include "fbsde/problems.hpp"

namespace fbsde {

namespace {

int steps_from(double horizon, double dt) {
    const double ratio = horizon / dt;
    const int H = static_cast<int>(std::lround(ratio));
    if (H < 1 || std::abs(ratio - H) > 1e-9 * std::max(1.0, ratio))
        throw std::invalid_argument("config: horizon must be an integer multiple of dt");
    return H;
}

std::filesystem::path ensure_out_dir(const RunConfig& cfg) {
    std::filesystem::path dir(cfg.out_dir);
    std::filesystem::create_directories(dir);
    return dir;
}

std::vector<Trajectory> fresh_batch(const ControlProblem& problem, const LinearBasisFn& policy,
                                    const NoiseScheme& scheme, const TimeGrid& grid,
                                    const RngStream& stream, int count) {
    std::vector<Trajectory> batch;
    batch.reserve(count);
    for (int j = 0; j < count; ++j)
        batch.push_back(simulate_model_based(problem.model, problem.x0, scheme, policy,
                                             problem.cost, grid, stream.substream(j)));
    return batch;
}

class PhaseTimer {
public:
    explicit PhaseTimer(bool enabled) : enabled_(enabled) {}

    void lap(const std::string& label) {
        if (!enabled_) return;
        const auto now = clock::now();
        rows_.emplace_back(
            label, std::chrono::duration_cast<std::chrono::milliseconds>(now - last_).count());
        last_ = now;
    }

    void write(const std::filesystem::path& dir) const {
        if (!enabled_) return;
        auto os = csv::open((dir / "timings.csv").string());
        os << "phase,wall_time_ms\n";
        for (const auto& [label, ms] : rows_) os << label << ',' << ms << '\n';
    }

private:
    using clock = std::chrono::steady_clock;
    bool enabled_;
    clock::time_point last_ = clock::now();
    std::vector<std::pair<std::string, long long>> rows_;
};

} // namespace

double example1_target_theta(const std::string& loss, const std::string& param, int n,
                             double T) {
    if (param == "well") return 1.0;
    if (loss == "martingale") return example1_theta_star_y(n, T);
    return example1_theta_star_z(n, T);
}

std::vector<Example1Summary> run_example1(const RunConfig& cfg) {
    validate(cfg);
    const Example1Config& e = cfg.example1;
    const auto dir = ensure_out_dir(cfg);
    const TimeGrid grid = make_grid(e.horizon_T, steps_from(e.horizon_T, e.dt));
    const Example1Param param =
        e.param == "well" ? Example1Param::well_specified : Example1Param::misspecified;
    const bool deep_bsde = e.loss == "deep-bsde";
    const bool martingale = e.loss == "martingale";
    PhaseTimer timer(cfg.timings);

    auto summary_csv = csv::open((dir / "example1_summary.csv").string());
    summary_csv << "n,loss,param,final_theta,target_theta,abs_error";
    if (deep_bsde) summary_csv << ",final_y0_db";
    summary_csv << '\n';

    std::vector<Example1Summary> summaries;
    for (std::size_t ni = 0; ni < e.n_list.size(); ++ni) {
        const int n = e.n_list[ni];
        const ControlProblem problem = example1_problem(n);
        const LinearBasisFn no_control = zero_fn(n, 0);
        const NoiseScheme scheme{NoiseMode::model_based, 1.0};

        LinearBasisFn fam = martingale ? example1_y_family(n, param, e.theta0)
                                       : example1_z_family(n, param, e.theta0);
        AdamState opt(AdamConfig{.lr = e.lr});
        AdamState y0_opt(AdamConfig{.lr = e.lr});
        Eigen::VectorXd y0_db(1);
        y0_db[0] = e.y0_db0;

        auto curve = csv::open((dir / ("example1_n" + std::to_string(n) + ".csv")).string());
        curve << "step,train_loss,val_loss,theta";
        if (deep_bsde) curve << ",y0_db";
        curve << '\n';

        // Each step draws a fresh training batch and an equal-size validation batch.
        const RngStream root = RngStream(cfg.seed).substream(ni);
        for (int step = 0; step < e.steps; ++step) {
            const auto train = fresh_batch(problem, no_control, scheme, grid,
                                           root.substream(2 * step), e.batch);
            const auto val = fresh_batch(problem, no_control, scheme, grid,
                                         root.substream(2 * step + 1), e.batch);

            double train_loss = 0.0, val_loss = 0.0;
            if (martingale) {
                const LossReport report = martingale_loss(train, fam, Mode::train);
                train_loss = report.loss;
                val_loss = martingale_loss(val, fam, Mode::eval).loss;
                Eigen::VectorXd theta = fam.params();
                adam_step(opt, theta, report.grad);
                fam.set_params(theta);
            } else if (deep_bsde) {
                const LossReport report = deep_bsde_loss(train, fam, y0_db[0], Mode::train);
                train_loss = report.loss;
                val_loss = deep_bsde_loss(val, fam, y0_db[0], Mode::eval).loss;
                Eigen::VectorXd theta = fam.params();
                adam_step(opt, theta, report.grad);
                fam.set_params(theta);
                Eigen::VectorXd dy0(1);
                dy0[0] = *report.grad_y0_db;
                adam_step(y0_opt, y0_db, dy0);
            } else {
                const LossReport report = measurability_loss(train, fam, Mode::train);
                train_loss = report.loss;
                val_loss = measurability_loss(val, fam, Mode::eval).loss;
                Eigen::VectorXd theta = fam.params();
                adam_step(opt, theta, report.grad);
                fam.set_params(theta);
            }

            curve << step << ',' << csv::num(train_loss) << ',' << csv::num(val_loss) << ','
                  << csv::num(fam.params()[0]);
            if (deep_bsde) curve << ',' << csv::num(y0_db[0]);
            curve << '\n';
        }

        Example1Summary summary;
        summary.n = n;
        summary.loss = e.loss;
        summary.param = e.param;
        summary.final_theta = fam.params()[0];
        summary.target_theta = example1_target_theta(e.loss, e.param, n, e.horizon_T);
        summary.abs_error = std::abs(summary.final_theta - summary.target_theta);
        if (deep_bsde) summary.final_y0_db = y0_db[0];
        summaries.push_back(summary);

        summary_csv << n << ',' << e.loss << ',' << e.param << ','
                    << csv::num(summary.final_theta) << ',' << csv::num(summary.target_theta)
                    << ',' << csv::num(summary.abs_error);
        if (deep_bsde) summary_csv << ',' << csv::num(summary.final_y0_db);
        summary_csv << '\n';
        timer.lap("example1_n" + std::to_string(n));
    }
    timer.write(dir);
    return summaries;
}

std::vector<IterationReport> run_pendulum(const RunConfig& cfg) {
    validate(cfg);
    const PendulumConfig& p = cfg.pendulum;
    const auto dir = ensure_out_dir(cfg);
    PhaseTimer timer(cfg.timings);

    const ControlProblem problem =
        pendulum_problem(p.a, p.b, p.inertia, p.lambda1, p.lambda2, p.r,
                         Eigen::Vector2d(p.x_star[0], p.x_star[1]));
    const bool model_based = p.mode == "model-based";
    PIConfig pi;
    pi.outer_iterations = p.iters;
    pi.rollouts_per_iteration = p.rollouts;
    pi.buffer_capacity = static_cast<std::size_t>(p.buffer);
    pi.eval_phase = TrainPhaseConfig{p.eval_steps, p.tolerance, p.patience, p.batch};
    pi.improve_phase = TrainPhaseConfig{p.improve_steps, p.tolerance, p.patience, p.batch};
    pi.eval_adam = AdamConfig{.lr = p.lr, .weight_decay = p.weight_decay};
    pi.improve_adam = AdamConfig{.lr = p.lr, .weight_decay = p.weight_decay};
    pi.scheme = NoiseScheme{model_based ? NoiseMode::model_based : NoiseMode::model_free,
                            p.sigma0};
    pi.grid = make_grid(p.horizon_T, steps_from(p.horizon_T, p.dt));
    pi.seed = cfg.seed;

    const int dim_w = pi.scheme.noise_dim(problem.model);
    MlpBN z(problem.model.dim_x, dim_w, cfg.seed ^ 0x5A5Au);
    MlpBN u(problem.model.dim_x, problem.model.dim_u, cfg.seed ^ 0xA5A5u,
            /*zero_output_init=*/true);

    const auto reports = run_policy_iteration(pi, problem, z, u);
    timer.lap("policy_iteration");

    auto report_csv = csv::open((dir / "reports.csv").string());
    report_csv << "iteration,eval_loss,improve_loss,eval_steps,improve_steps,det_cost,"
                  "terminal_theta,terminal_theta_dot\n";
    for (const auto& rep : reports) {
        report_csv << rep.iteration << ',' << csv::num(rep.final_eval_loss) << ','
                   << csv::num(rep.final_improve_loss) << ',' << rep.eval_steps << ','
                   << rep.improve_steps << ',' << csv::num(rep.det_cost()) << ','
                   << csv::num(rep.terminal_state[0]) << ','
                   << csv::num(rep.terminal_state[1]) << '\n';
    }

    auto trace_csv = csv::open((dir / "rollouts.csv").string());
    trace_csv << "iteration,k,t,theta_p,theta_dot,u,cost_to_go\n";
    for (const auto& rep : reports) {
        const Trajectory& traj = rep.det_rollout;
        for (int k = 0; k <= traj.steps(); ++k) {
            trace_csv << rep.iteration << ',' << k << ',' << csv::num(traj.grid.node(k)) << ','
                      << csv::num(traj.states(0, k)) << ',' << csv::num(traj.states(1, k))
                      << ',';
            if (k < traj.steps()) trace_csv << csv::num(traj.controls(0, k));
            trace_csv << ',' << csv::num(rep.cost_to_go[k]) << '\n';
        }
    }
    timer.lap("write_csv");
    timer.write(dir);

    save_params(z, (dir / "z_params.txt").string());
    save_params(u, (dir / "u_params.txt").string());
    return reports;
}

bool run_gradcheck(std::uint64_t seed, std::ostream& os) {
    const auto results = run_gradcheck_suite(seed);
    bool all_ok = true;
    double worst = 0.0;
    for (const auto& res : results) {
        all_ok = all_ok && res.passed();
        worst = std::max(worst, res.max_rel_err);
        os << (res.passed() ? "PASS" : "FAIL") << "  " << res.name << "  max_rel_err="
           << res.max_rel_err << "  tol=" << res.tolerance << '\n';
    }
    os << (all_ok ? "gradcheck OK" : "gradcheck FAILED") << ", worst max_rel_err=" << worst
       << '\n';
    return all_ok;
}

} // namespace fbsde
