#include <cstdint>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "fbsde/config.hpp"
#include "fbsde/experiments.hpp"
#include "fbsde/simulate.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitDiverged = 2;
constexpr int kExitVerification = 3;

struct CommonFlags {
    std::string config_path;
    std::uint64_t seed = 0;
    std::string out_dir;
    bool timings = false;
};

void add_common(CLI::App* cmd, CommonFlags& flags) {
    cmd->add_option("--config", flags.config_path, "JSON config file (overrides defaults)");
    cmd->add_option("--seed", flags.seed, "root RNG seed");
    cmd->add_option("--out", flags.out_dir, "output directory for CSV files");
    cmd->add_flag("--timings", flags.timings,
                  "also write wall-clock timings.csv (not byte-reproducible)");
}

// Precedence: built-in defaults, then the config file, then explicit flags.
fbsde::RunConfig base_config(const CLI::App* cmd, const CommonFlags& flags,
                             const std::string& experiment) {
    fbsde::RunConfig cfg = fbsde::default_config();
    cfg.experiment = experiment;
    if (cmd->count("--config") > 0) {
        const std::string requested = cfg.experiment;
        cfg = fbsde::load_config_file(flags.config_path);
        cfg.experiment = requested;
    }
    if (cmd->count("--seed") > 0) cfg.seed = flags.seed;
    if (cmd->count("--out") > 0) cfg.out_dir = flags.out_dir;
    if (cmd->count("--timings") > 0) cfg.timings = flags.timings;
    return cfg;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Policy iteration for control-affine diffusions via BSDE losses"};
    app.require_subcommand(1);

    auto* ex1 = app.add_subcommand("example1",
                                   "train a linear BSDE parameterization on Brownian paths");
    CommonFlags ex1_common;
    add_common(ex1, ex1_common);
    std::vector<int> n_list;
    std::string loss, param;
    int steps = 0, batch = 0;
    double lr = 0.0, dt = 0.0, horizon = 0.0, theta0 = 0.0, y0_db0 = 0.0;
    ex1->add_option("--n", n_list, "state dimension (repeatable)");
    ex1->add_option("--loss", loss, "measurability|deep-bsde|martingale");
    ex1->add_option("--param", param, "well|mis parameterization");
    ex1->add_option("--steps", steps, "gradient steps");
    ex1->add_option("--batch", batch, "trajectories per gradient step");
    ex1->add_option("--lr", lr, "Adam learning rate");
    ex1->add_option("--dt", dt, "time step");
    ex1->add_option("--horizon", horizon, "time horizon T");
    ex1->add_option("--theta0", theta0, "initial theta");
    ex1->add_option("--y0-db0", y0_db0, "initial y0 guess (deep-bsde)");

    auto* pend = app.add_subcommand("pendulum", "pendulum swing-up policy iteration");
    CommonFlags pend_common;
    add_common(pend, pend_common);
    std::string mode;
    int iters = 0, buffer = 0, rollouts = 0, pbatch = 0, eval_steps = 0, improve_steps = 0;
    double sigma0 = 0.0, plr = 0.0, pdt = 0.0, phorizon = 0.0, weight_decay = 0.0;
    pend->add_option("--mode", mode, "model-based|model-free");
    pend->add_option("--iters", iters, "outer policy iterations");
    pend->add_option("--sigma0", sigma0, "exploration noise scale");
    pend->add_option("--buffer", buffer, "buffer capacity (trajectories)");
    pend->add_option("--rollouts", rollouts, "rollouts per iteration");
    pend->add_option("--batch", pbatch, "trajectories per gradient step");
    pend->add_option("--lr", plr, "Adam learning rate");
    pend->add_option("--weight-decay", weight_decay, "Adam weight decay");
    pend->add_option("--eval-steps", eval_steps, "policy-evaluation step budget");
    pend->add_option("--improve-steps", improve_steps, "policy-improvement step budget");
    pend->add_option("--dt", pdt, "time step");
    pend->add_option("--horizon", phorizon, "time horizon T");

    auto* grad = app.add_subcommand("gradcheck",
                                    "finite-difference checks for every architecture x loss");
    CommonFlags grad_common;
    add_common(grad, grad_common);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? kExitOk : kExitUsage;
    }

    try {
        if (ex1->parsed()) {
            fbsde::RunConfig cfg = base_config(ex1, ex1_common, "example1");
            if (ex1->count("--n") > 0) cfg.example1.n_list = n_list;
            if (ex1->count("--loss") > 0) cfg.example1.loss = loss;
            if (ex1->count("--param") > 0) cfg.example1.param = param;
            if (ex1->count("--steps") > 0) cfg.example1.steps = steps;
            if (ex1->count("--batch") > 0) cfg.example1.batch = batch;
            if (ex1->count("--lr") > 0) cfg.example1.lr = lr;
            if (ex1->count("--dt") > 0) cfg.example1.dt = dt;
            if (ex1->count("--horizon") > 0) cfg.example1.horizon_T = horizon;
            if (ex1->count("--theta0") > 0) cfg.example1.theta0 = theta0;
            if (ex1->count("--y0-db0") > 0) cfg.example1.y0_db0 = y0_db0;
            const auto summaries = fbsde::run_example1(cfg);
            for (const auto& s : summaries)
                std::cout << "n=" << s.n << " loss=" << s.loss << " param=" << s.param
                          << " theta=" << s.final_theta << " target=" << s.target_theta
                          << " abs_error=" << s.abs_error << '\n';
            return kExitOk;
        }
        if (pend->parsed()) {
            fbsde::RunConfig cfg = base_config(pend, pend_common, "pendulum");
            if (pend->count("--mode") > 0) cfg.pendulum.mode = mode;
            if (pend->count("--iters") > 0) cfg.pendulum.iters = iters;
            if (pend->count("--sigma0") > 0) cfg.pendulum.sigma0 = sigma0;
            if (pend->count("--buffer") > 0) cfg.pendulum.buffer = buffer;
            if (pend->count("--rollouts") > 0) cfg.pendulum.rollouts = rollouts;
            if (pend->count("--batch") > 0) cfg.pendulum.batch = pbatch;
            if (pend->count("--lr") > 0) cfg.pendulum.lr = plr;
            if (pend->count("--weight-decay") > 0) cfg.pendulum.weight_decay = weight_decay;
            if (pend->count("--eval-steps") > 0) cfg.pendulum.eval_steps = eval_steps;
            if (pend->count("--improve-steps") > 0) cfg.pendulum.improve_steps = improve_steps;
            if (pend->count("--dt") > 0) cfg.pendulum.dt = pdt;
            if (pend->count("--horizon") > 0) cfg.pendulum.horizon_T = phorizon;
            const auto reports = fbsde::run_pendulum(cfg);
            for (const auto& rep : reports)
                std::cout << "iteration=" << rep.iteration << " det_cost=" << rep.det_cost()
                          << '\n';
            return kExitOk;
        }
        // gradcheck
        fbsde::RunConfig cfg = base_config(grad, grad_common, "gradcheck");
        return fbsde::run_gradcheck(cfg.seed, std::cout) ? kExitOk : kExitVerification;
    } catch (const fbsde::SimulationDivergedError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitDiverged;
    } catch (const fbsde::TrainingDivergedError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitDiverged;
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitUsage;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitUsage;
    }
}
