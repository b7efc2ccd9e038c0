#include "fbsde/trajectory.hpp"

#include <ostream>

#include "fbsde/csv.hpp"

namespace fbsde {

Eigen::VectorXd Trajectory::cost_to_go() const {
    const int H = steps();
    Eigen::VectorXd ctg(H + 1);
    ctg[H] = terminal_cost;
    for (int k = H - 1; k >= 0; --k) ctg[k] = ctg[k + 1] + running_costs[k] * grid.dt;
    return ctg;
}

void write_trajectory_csv(std::ostream& os, std::span<const Trajectory> batch) {
    if (batch.empty()) {
        os << "trajectory_id,k,t\n";
        return;
    }
    const auto& first = batch.front();
    os << "trajectory_id,k,t";
    for (int i = 0; i < first.dim_x(); ++i) os << ",x" << i;
    for (int i = 0; i < first.dim_u(); ++i) os << ",u" << i;
    for (int i = 0; i < first.dim_w(); ++i) os << ",dw" << i;
    os << ",g\n";

    for (std::size_t id = 0; id < batch.size(); ++id) {
        const auto& traj = batch[id];
        const int H = traj.steps();
        for (int k = 0; k <= H; ++k) {
            os << id << ',' << k << ',' << csv::num(traj.grid.node(k));
            for (int i = 0; i < traj.dim_x(); ++i) os << ',' << csv::num(traj.states(i, k));
            if (k < H) {
                for (int i = 0; i < traj.dim_u(); ++i) os << ',' << csv::num(traj.controls(i, k));
                for (int i = 0; i < traj.dim_w(); ++i) os << ',' << csv::num(traj.dw(i, k));
                os << ',' << csv::num(traj.running_costs[k]);
            } else {
                for (int i = 0; i < traj.dim_u() + traj.dim_w() + 1; ++i) os << ',';
            }
            os << '\n';
        }
    }
}

void write_trajectory_csv(const std::string& path, std::span<const Trajectory> batch) {
    auto os = csv::open(path);
    write_trajectory_csv(os, batch);
}

} // namespace fbsde
