#pragma once

// The rotationally symmetric Fano model on CP^1 with divisor at the two
// poles rho = +-infinity, in the fixed conventions:
//   omega = psi''(rho) drho ^ dtheta,   dV = psi'' drho dtheta
//   R = -(log psi'')''/psi''            |grad f|^2 = (f')^2/psi''
//   Delta f = f''/psi''                 meridian element sqrt(psi''/2) drho

#include <cmath>

#include "cfl/radial.hpp"

namespace cfl {

struct ReferenceGeometry {
    int n = 1;                          // complex dimension
    double total_volume = 4.0 * M_PI;   // int omega_0 = 2 pi c_1, c_1 = 2

    // reference Kahler potential u0(rho) = 2 log(1+e^rho)
    static double u0(double rho) {
        return rho > 0 ? 2.0 * (rho + std::log1p(std::exp(-rho)))
                       : 2.0 * std::log1p(std::exp(rho));
    }
    static double u0_d(double rho) { return 2.0 * logistic(rho); }
    static double u0_dd(double rho) {
        const double s = logistic(rho);
        return 2.0 * s * (1.0 - s);
    }

    // divisor norm |s|^2_h = e^rho/(1+e^rho)^2, even in rho, max 1/4 at 0
    static double s_norm_sq(double rho) {
        const double s = logistic(rho);
        return s * (1.0 - s);
    }

    // twisted Ricci potential of omega_0; Fubini-Study is Kahler-Einstein
    static double F0(double) { return 0.0; }

    static double logistic(double rho) {
        return rho > 0 ? 1.0 / (1.0 + std::exp(-rho))
                       : std::exp(rho) / (1.0 + std::exp(rho));
    }

    RadialField u0_field(const RadialGrid& g) const { return tabulate(g, u0); }
    RadialField u0_dd_field(const RadialGrid& g) const { return tabulate(g, u0_dd); }
    RadialField s_norm_sq_field(const RadialGrid& g) const { return tabulate(g, s_norm_sq); }
};

// Scalar curvature R = -(log psi'')''/psi'' of the metric with potential psi.
// Throws DegenerateMetricError if psi'' <= 0 anywhere.
RadialField scalar_curvature(const RadialField& psi);

// Same, starting from the metric density psi'' directly.
RadialField scalar_curvature_from_density(const RadialField& psi_dd);

// Pole-to-pole geodesic length int sqrt(psi''/2) drho over the window.
double meridian_diameter(const RadialField& psi);
double meridian_diameter_from_density(const RadialField& psi_dd);

namespace detail {
// psi'' via fourth-order stencils (calibration-grade accuracy).
RadialField density_of_potential(const RadialField& psi);
}

} // namespace cfl
