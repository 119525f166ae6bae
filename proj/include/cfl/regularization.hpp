#pragma once

// Epsilon-regularized objects: the smoothing function chi, the approximating
// metrics omega_eps = omega_0 + k i ddbar chi(eps^2+|s|^2), the semi-positive
// twist densities theta_eps, the barrier identity, and the cone-chart
// metric coefficient.

#include <vector>

#include "cfl/geometry.hpp"
#include "cfl/radial.hpp"

namespace cfl {

struct RegularizationParams {
    double beta = 0.5;         // cone angle parameter, in (0,1)
    double epsilon = 1e-2;     // regularization scale, > 0
    double k = 0.1;            // coefficient of chi in omega_eps
    double gamma_target = 0.5; // required lower bound for omega_eps/omega_0

    void validate() const;
};

// chi(eps^2 + t) = (1/beta) int_0^t ((eps^2+r)^beta - eps^(2 beta))/r dr,
// integrand extended continuously at r = 0; adaptive Simpson quadrature.
// eps = 0 reduces to the closed form t^beta / beta^2.
double chi_eval(double beta, double eps, double t);

// chi(eps^2 + |s|^2_h(rho)) tabulated on the grid (incremental quadrature
// over the sorted |s|^2 values; exactly even in rho).
RadialField chi_field(const RadialGrid& grid, double beta, double eps);

// (chi(eps^2+|s|^2_h))''(rho) by the chain rule from the closed forms of
// d chi/dt and the |s|^2_h derivatives; no differencing of the quadrature.
RadialField chi_dd_field(const RadialGrid& grid, double beta, double eps);

// Density of omega_eps: u0'' + k (chi(eps^2+|s|^2))''; must stay positive.
RadialField omega_eps_density(const RegularizationParams& params,
                              const ReferenceGeometry& geom, const RadialGrid& grid);

// Largest k in (0,1] (within 1e-3) with omega_eps >= gamma omega_0 at every
// node for every epsilon in the schedule simultaneously.
double select_k(const ReferenceGeometry& geom, const RadialGrid& grid, double beta,
                const std::vector<double>& epsilon_schedule, double gamma_target);

// Density of theta_eps = (1-beta)(omega_0 + i ddbar log(eps^2+|s|^2_h));
// smooth closed semi-positive form, evaluated in a manifestly nonnegative
// arrangement.
RadialField theta_eps_density(const RegularizationParams& params,
                              const ReferenceGeometry& geom, const RadialGrid& grid);

// Max-norm residual between the two sides of the ddbar identity for the
// barrier function chi_rho (exponent rho_exp in (0,1)):
//   i ddbar chi_p(eps^2+|s|^2) = <D's,D's>/(eps^2+|s|^2)^(1-p)
//                                - (1/p)((eps^2+|s|^2)^p - eps^(2p)) omega_0
// Left side: quadrature tabulation + second_derivative. Right side: closed
// forms of the <D's,D's> and omega_0 densities.
double chi_rho_identity_residual(double rho_exp, double epsilon,
                                 const ReferenceGeometry& geom, const RadialGrid& grid);

// (eps^2 + (eps^(2b)+r^2)^(1/b-1) r^2 e^-phi)^(b-1) (eps^(2b)+r^2)^(1/b-1),
// the pulled-back metric coefficient in the polar cone chart.
double cone_chart_coefficient(double beta, double eps, double polar_radius,
                              double phi_value);

namespace detail {
// d chi/dt and d^2 chi/dt^2 as functions of t (with their t -> 0 limits).
double chi_t(double beta, double eps, double t);
double chi_tt(double beta, double eps, double t);
} // namespace detail

} // namespace cfl
