#pragma once

// Trajectory records: full snapshots at selected times plus a fine-cadence
// scalar diagnostic series, for one epsilon-run and for schedule sweeps.

#include <optional>
#include <string>
#include <vector>

#include "cfl/radial.hpp"
#include "cfl/regularization.hpp"

namespace cfl {

struct FlowSnapshot {
    double t = 0.0;
    std::vector<double> phi_hat;
    double mode = 0.0;
    std::vector<double> phi_dot_hat;
    double mode_dot = 0.0;
    std::vector<double> psi_dd;
};

// One scalar diagnostic sampled densely in t. Mode-dependent entries store
// the centered part; the constant channel is in the "mode_dot" series.
struct ScalarSeries {
    std::vector<double> t;
    std::vector<double> mabuchi_twisted, mabuchi_log;
    std::vector<double> y_functional, a_eps, alpha_eps;
    std::vector<double> aubin_i, aubin_j, ding_f0, ding_f;
    std::vector<double> phi_dot_hat_max, phi_dot_hat_min, mode_dot;
    std::vector<double> equivalence_A, twisted_scalar_min;

    size_t size() const { return t.size(); }
    void clear();
};

struct EpsilonRun {
    RegularizationParams params;
    RadialGrid grid;
    double t_end = 0.0;

    double c_tilde0 = 0.0; // provisional initial constant actually used
    double c_star = 0.0;   // corrected constant (after normalization)
    double grad_integral = 0.0; // int_0^t_end e^{-beta s} Y(s) ds
    bool normalized = false;

    std::vector<FlowSnapshot> snapshots;
    ScalarSeries series;

    bool ok = true;
    std::string error;

    const FlowSnapshot& at_time(double t) const;
    bool has_time(double t) const;
};

struct ConvergenceRow {
    double eps_coarse = 0.0, eps_fine = 0.0;
    double t = 0.0, window = 0.0;
    double c0 = 0.0, c1 = 0.0, c2 = 0.0;
};

struct SweepRecord {
    std::vector<double> schedule; // strictly decreasing
    std::vector<EpsilonRun> runs; // aligned to schedule
    std::vector<ConvergenceRow> convergence_table;
};

} // namespace cfl
