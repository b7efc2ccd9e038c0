#include "fbsde/brownian.hpp"

#include <cmath>
#include <stdexcept>

namespace fbsde {

BrownianIncrements sample_brownian(const TimeGrid& grid, int dim_w, const RngStream& stream) {
    if (dim_w < 0) throw std::invalid_argument("sample_brownian: dim_w must be >= 0");
    auto rng = stream.engine();
    std::normal_distribution<double> gauss(0.0, 1.0);
    const double sqrt_dt = std::sqrt(grid.dt);

    BrownianIncrements inc;
    inc.dw.resize(dim_w, grid.steps_H);
    for (int k = 0; k < grid.steps_H; ++k)
        for (int i = 0; i < dim_w; ++i) inc.dw(i, k) = sqrt_dt * gauss(rng);
    return inc;
}

} // namespace fbsde
