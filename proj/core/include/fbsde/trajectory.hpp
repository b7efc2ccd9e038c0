#pragma once

#include <iosfwd>
#include <span>
#include <string>

#include <Eigen/Core>

#include "fbsde/brownian.hpp"
#include "fbsde/time_grid.hpp"

namespace fbsde {

// One sampled path. States are columns 0..H, controls/increments/costs columns 0..H-1.
struct Trajectory {
    TimeGrid grid;
    Eigen::MatrixXd states;        // dim_x x (H+1)
    Eigen::MatrixXd dw;            // dim_w x H
    Eigen::MatrixXd controls;      // dim_u x H
    Eigen::VectorXd running_costs; // H, g at (t_k, X_k, U_k)
    double terminal_cost = 0.0;
    int generation = 0;            // policy generation that produced this path

    [[nodiscard]] int dim_x() const { return static_cast<int>(states.rows()); }
    [[nodiscard]] int dim_u() const { return static_cast<int>(controls.rows()); }
    [[nodiscard]] int dim_w() const { return static_cast<int>(dw.rows()); }
    [[nodiscard]] int steps() const { return grid.steps_H; }

    // Integrated running cost, sum_k g_k * dt.
    [[nodiscard]] double cost_integral() const { return running_costs.sum() * grid.dt; }

    // phi(X_H) + sum_{j>=k} g_j * dt for k = 0..H.
    [[nodiscard]] Eigen::VectorXd cost_to_go() const;
};

// Column order: trajectory_id,k,t,x0..,u0..,dw0..,g. The terminal row (k == H)
// carries the state only; control, increment and cost fields are left empty.
void write_trajectory_csv(std::ostream& os, std::span<const Trajectory> batch);
void write_trajectory_csv(const std::string& path, std::span<const Trajectory> batch);

} // namespace fbsde
