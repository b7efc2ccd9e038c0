#pragma once

#include <Eigen/Core>

namespace fbsde {

// Uniform discretization of [0, T] into H steps of width dt = T/H.
struct TimeGrid {
    double horizon_T = 0.0;
    int steps_H = 0;
    double dt = 0.0;

    [[nodiscard]] double node(int k) const { return k * dt; }
    [[nodiscard]] Eigen::VectorXd nodes() const;
};

// Throws std::invalid_argument on nonpositive T or H.
TimeGrid make_grid(double horizon_T, int steps_H);

} // namespace fbsde
