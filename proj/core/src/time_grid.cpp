#include "fbsde/time_grid.hpp"

#include <stdexcept>

namespace fbsde {

Eigen::VectorXd TimeGrid::nodes() const {
    Eigen::VectorXd t(steps_H + 1);
    for (int k = 0; k <= steps_H; ++k) t[k] = node(k);
    return t;
}

TimeGrid make_grid(double horizon_T, int steps_H) {
    if (!(horizon_T > 0.0)) throw std::invalid_argument("make_grid: horizon T must be positive");
    if (steps_H < 1) throw std::invalid_argument("make_grid: step count H must be >= 1");
    return TimeGrid{horizon_T, steps_H, horizon_T / steps_H};
}

} // namespace fbsde
