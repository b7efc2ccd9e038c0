#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "fbsde/param_fn.hpp"

namespace fbsde {

// Central-difference d(loss)/d(params). Each evaluation runs on a fresh clone of
// fn, so train-mode side effects (running statistics) cannot leak between probes.
Eigen::VectorXd finite_difference_gradient(const ParamFn& fn,
                                           const std::function<double(ParamFn&)>& loss,
                                           double h = 1e-5);

// max_i |a_i - n_i| / max(|a_i|, |n_i|, 1e-3). Zero for empty gradients.
double max_relative_error(const Eigen::VectorXd& analytic, const Eigen::VectorXd& numeric);

struct GradCheckResult {
    std::string name;
    double max_rel_err = 0.0;
    double tolerance = 0.0;
    [[nodiscard]] bool passed() const { return max_rel_err <= tolerance; }
};

// Every architecture x loss pairing on small random batches: the Example-1 linear
// families and multi-basis linear functions against the measurability, deep-BSDE
// and martingale losses, the batch-norm MLP against all three plus the policy
// regression, the deep-BSDE y0 derivative, and the zero-parameter edge case.
std::vector<GradCheckResult> run_gradcheck_suite(std::uint64_t seed);

} // namespace fbsde
