#pragma once

// Energy functionals and potential-derived scalars evaluated on snapshots:
// Aubin I/J, Ding F0/F, twisted and log Mabuchi energies, the twisted Ricci
// potential u, its integral a, the gradient energy Y, and the Perelman-type
// W functional with its coupled (f, tau) evolution.
//
// Discretization note: the pairing integrals use the Neumann-mirrored
// second difference A and trapezoid weights W, for which W A is symmetric
// and f^T W (-A) f equals the staggered gradient energy exactly. This makes
// I = 2J, dM/dt = -Y and the Prop-style conservation identity hold at the
// semi-discrete level instead of only up to O(h^2).

#include "cfl/flow.hpp"
#include "cfl/geometry.hpp"
#include "cfl/radial.hpp"

namespace cfl {

struct FunctionalReport {
    double t = 0.0;
    double I = 0.0, J = 0.0;
    double F0_func = 0.0, F_func = 0.0;
    double mabuchi_twisted = 0.0, mabuchi_log = 0.0;
    double Y = 0.0, a_eps = 0.0, alpha_eps = 0.0;
    RadialField u_eps;
};

// (n!/V) int phi (dV_0 - dV_phi); equals 2 J exactly in n = 1.
double aubin_I(const RadialField& phi_total, const ReferenceGeometry& geom,
               const RadialGrid& grid);

// n = 1 closed form (1/(2V)) 2pi int (phi')^2 drho (staggered gradient).
double aubin_J(const RadialField& phi_total, const ReferenceGeometry& geom,
               const RadialGrid& grid);

// Twisted Ricci potential of omega_0 for the eps-twist, normalized so that
// (1/V) int e^{-u} dV_0 = 1.
RadialField twist_potential_omega0(const RadialGrid& grid, double beta, double eps);

double ding_F0(const RadialField& phi_total, const ReferenceGeometry& geom,
               const RadialGrid& grid);
double ding_F(const RadialField& phi_total, const ReferenceGeometry& geom,
              const RadialGrid& grid, const RadialField& twist_u_omega0);

double mabuchi_twisted(const RadialField& phi_total, const ReferenceGeometry& geom,
                       const RadialGrid& grid, const RegularizationParams& params);
double mabuchi_log(const RadialField& phi_total, const ReferenceGeometry& geom,
                   const RadialGrid& grid, double beta);

// u = phi_dot + c with c the unique constant making (1/V) int e^{-u} dV = 1
// (the constant is the log-mean; the spatially constant channel of phi_dot
// cancels exactly).
RadialField twisted_ricci_potential(const FlowState& state, const FlowSystem& sys);

// (beta/V) int u e^{-u} dV; <= 0 for normalized u (Jensen).
double a_eps(const RadialField& u, const FlowState& state,
             const ReferenceGeometry& geom, const RadialGrid& grid, double beta);

// (n!/V) int |del phi_dot|^2 dV = (n!/V) 2pi int (phi_dot')^2 drho.
double y_functional(const FlowState& state, const ReferenceGeometry& geom,
                    const RadialGrid& grid);

// (1/V) int phi_dot dV_phi.
double alpha_eps(const FlowState& state, const ReferenceGeometry& geom,
                 const RadialGrid& grid);

// W_theta(g, f, tau) = int e^{-f} tau^{-n} (tau(R - tr theta + |grad f|^2)
//                                           + beta f) dV.
double w_functional(const RadialField& psi, const RadialField& f, double tau,
                    const RadialField& theta_density, const ReferenceGeometry& geom,
                    const RadialGrid& grid, double beta);
double w_functional_from_density(const RadialField& psi_dd, const RadialField& f,
                                 double tau, const RadialField& theta_density,
                                 const ReferenceGeometry& geom, const RadialGrid& grid,
                                 double beta);

// One explicit step of the coupled system
//   df/dt  = beta n / tau - R + tr theta - Delta f + |grad f|^2,
//   dtau/dt = beta (tau - 1)   (tau updated by its exact solution),
// consistent with the metric step of the flow.
std::pair<RadialField, double> coupled_w_evolve(const FlowState& state,
                                                const RadialField& f, double tau,
                                                double dt, const RegularizationParams& params,
                                                const ReferenceGeometry& geom,
                                                const RadialGrid& grid,
                                                const RadialField& theta_density);

// Full per-snapshot report; the Mabuchi log-volume term uses the state's
// cached metric density so the semi-discrete identities hold along runs.
FunctionalReport build_report(const FlowState& state, const FlowSystem& sys);

namespace detail {
// Mabuchi energy with an externally supplied metric density for the
// log-volume term (the pairing terms always use the mirrored stencil).
double mabuchi_twisted_with_density(const RadialField& phi_total,
                                    const RadialField& psi_dd,
                                    const ReferenceGeometry& geom, const RadialGrid& grid,
                                    const RegularizationParams& params);
double mabuchi_log_with_density(const RadialField& phi_total, const RadialField& psi_dd,
                                const ReferenceGeometry& geom, const RadialGrid& grid,
                                double beta);
} // namespace detail

} // namespace cfl
