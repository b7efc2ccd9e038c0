#pragma once

#include <iosfwd>
#include <vector>

#include "fbsde/config.hpp"
#include "fbsde/policy_iteration.hpp"

namespace fbsde {

struct Example1Summary {
    int n = 0;
    std::string loss;
    std::string param;
    double final_theta = 0.0;
    double target_theta = 0.0;
    double abs_error = 0.0;
    double final_y0_db = std::numeric_limits<double>::quiet_NaN(); // deep-bsde only
};

// Target theta for a loss/parameterization pair: 1 when well-specified,
// theta*_Z for the measurability and deep-BSDE losses and theta*_Y for the
// martingale loss when misspecified.
double example1_target_theta(const std::string& loss, const std::string& param, int n, double T);

// Trains the configured loss for each n in cfg.example1.n_list on fresh
// trajectory batches. Writes per-step curves to <out>/example1_n<k>.csv
// (step,train_loss,val_loss,theta[,y0_db]) and a summary to
// <out>/example1_summary.csv. Every value is reproducible from the seed.
std::vector<Example1Summary> run_example1(const RunConfig& cfg);

// Runs the pendulum policy iteration. Writes <out>/reports.csv (one row per
// iteration report) and <out>/rollouts.csv (deterministic rollout traces,
// iteration,k,t,theta_p,theta_dot,u,cost_to_go).
std::vector<IterationReport> run_pendulum(const RunConfig& cfg);

// Runs the gradient-check suite, printing one line per case; true iff all pass.
bool run_gradcheck(std::uint64_t seed, std::ostream& os);

} // namespace fbsde
