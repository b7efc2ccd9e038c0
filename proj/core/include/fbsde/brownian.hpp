#pragma once

#include <Eigen/Core>

#include "fbsde/rng.hpp"
#include "fbsde/time_grid.hpp"

namespace fbsde {

// H Brownian increments, one column per step, each ~ N(0, dt * I).
struct BrownianIncrements {
    Eigen::MatrixXd dw; // dim_w x H

    [[nodiscard]] int dim_w() const { return static_cast<int>(dw.rows()); }
    [[nodiscard]] int steps() const { return static_cast<int>(dw.cols()); }
};

BrownianIncrements sample_brownian(const TimeGrid& grid, int dim_w, const RngStream& stream);

} // namespace fbsde
