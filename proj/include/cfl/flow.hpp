#pragma once

// Time integration of the twisted parabolic Monge-Ampere flow for one
// epsilon. The potential relative to omega_eps is evolved split into a
// mean-zero profile and a spatially constant mode (the constant mode obeys
// cdot = beta c exactly and grows like e^{beta t}; keeping it separate
// preserves the profile's precision). The stepper works in long double:
// the metric density at the window edge is ~1e-11 and is formed as a second
// difference of an O(1) potential.

#include <functional>
#include <string>
#include <vector>

#include "cfl/geometry.hpp"
#include "cfl/regularization.hpp"

namespace cfl {

struct FlowSystem;

struct FlowState {
    double t = 0.0;
    RadialField phi_hat;     // mean-zero potential relative to omega_eps
    double mode = 0.0;       // constant part; phi = phi_hat + mode
    RadialField phi_dot_hat; // mean-zero part of the last evaluated RHS
    double mode_dot = 0.0;
    RadialField psi_dd;      // metric density (u0 + k chi + phi)''

    // authoritative representation for continued stepping; doubles are views
    std::vector<long double> phi_hat_ld;
    long double mode_ld = 0.0L;

    void set_mode(long double m) {
        mode_ld = m;
        mode = static_cast<double>(m);
    }

    RadialField phi() const;                          // phi_hat + mode
    RadialField phi_total(const FlowSystem& sys) const; // + k chi (rel. omega_0)
    RadialField phi_dot() const;                      // phi_dot_hat + mode_dot
    double max_abs_phi_dot() const;
};

struct SolverConfig {
    enum class Scheme { explicit_rk4, imex };

    double dt_safety = 0.2; // CFL safety factor sigma
    double t_end = 10.0;
    std::vector<double> snapshot_times; // {0,1,2,t_end} always added
    long max_steps = 100000000;
    Scheme scheme = Scheme::explicit_rk4;
    double imex_dt = 1e-3; // fixed step for the linearly implicit scheme

    void validate() const;
    static Scheme scheme_from_string(const std::string& s);
    static std::string scheme_to_string(Scheme s);
};

// Precomputed coefficient fields for one (grid, params) pair.
struct FlowSystem {
    RadialGrid grid;
    RegularizationParams params;
    ReferenceGeometry geom;

    RadialField u0_dd;        // reference density
    RadialField chi_tab;      // chi(eps^2+|s|^2) tabulated
    RadialField omega_eps_dd; // analytic omega_eps density
    RadialField F_eps;        // F_0 + log((omega_eps/omega_0)(eps^2+|s|^2)^(1-beta))
    RadialField log_eps_s;    // log(eps^2 + |s|^2)
    RadialField theta_dens;   // twist density

    FlowSystem(const RegularizationParams& p, const ReferenceGeometry& g,
               const RadialGrid& grid);

    FlowState initial_state() const; // phi = c_tilde0 (provisional constant)
    FlowState state_from_phi(double t, const RadialField& phi) const;

    double volume() const { return geom.total_volume; }

    // long double pipeline
    const std::vector<long double>& density_ld() const { return E_ld_; }
    const std::vector<long double>& rhs_base_ld() const { return base_ld_; }

private:
    std::vector<long double> E_ld_;    // omega_eps density
    std::vector<long double> base_ld_; // F_eps + beta k chi
};

// Pointwise RHS of the potential flow at the state (the CMAF1 assembly
//   log(psi''/u0'') + F0 + beta(k chi + phi) + (1-beta) log(eps^2+|s|^2) ).
RadialField flow_rhs(const FlowState& state, const FlowSystem& sys);

// Equivalent assembly relative to omega_eps:
//   log(psi''/omega_eps'') + F_eps + beta(k chi + phi).
RadialField flow_rhs_twisted_form(const FlowState& state, const FlowSystem& sys);

// One accepted time step (halves dt and retries on a Kahler-condition
// violation; throws StiffnessError below dt = 1e-12).
FlowState step(const FlowState& state, const SolverConfig& config, const FlowSystem& sys);

// Provisional initial constant: -(1/(beta V)) int (F_eps + k beta chi) dV_eps.
double initial_constant(const FlowSystem& sys);

// Damped Newton solve of the twisted Kahler-Einstein equation
//   log(psi''/u0'') + F0 + beta(k chi + phi) + (1-beta) log(eps^2+|s|^2) = 0;
// returns phi (relative to omega_eps) with residual max-norm <= tol.
RadialField solve_twisted_ke(const FlowSystem& sys, double tol = 1e-9,
                             int max_iter = 200);

namespace detail {

struct Stepper {
    const FlowSystem& sys;
    SolverConfig config;
    explicit Stepper(const FlowSystem& s, const SolverConfig& c);

    // advance to t_target exactly; refreshes the cached views at the end and
    // calls observe every observe_stride accepted steps
    void advance(FlowState& state, double t_target,
                 const std::function<void(const FlowState&)>& observe = nullptr,
                 long observe_stride = 1);

    // one accepted step of size at most h (halving on rejection)
    void single_step(FlowState& state, long double h);

    long steps_taken = 0;
    long rejections = 0;

private:
    std::vector<long double> N1_, N2_, N3_, N4_, ps_, k1_, k2_, stage_, rhs_;
    std::vector<long double> alo_, adi_, aup_, cc_, dd_;
    double dt_current_ = 0.0;

    bool eval_rhs(const std::vector<long double>& phat, long double beta_mode,
                  std::vector<long double>& N, std::vector<long double>& psidd) const;
    void refresh_views(FlowState& state) const;
    double min_density(const FlowState& state) const;
    bool try_step_imex(FlowState& state, long double h);
    bool try_step_rk4(FlowState& state, long double h);
};

} // namespace detail

} // namespace cfl
