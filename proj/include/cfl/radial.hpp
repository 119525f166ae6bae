#pragma once

// Uniform grid in the log-modulus coordinate rho and tabulated radial
// functions on it, plus the discrete calculus shared by every module.

#include <cstddef>
#include <vector>

#include "cfl/errors.hpp"

namespace cfl {

struct RadialGrid {
    double rho_max = 30.0; // half-width L of the rho window
    int n_points = 2048;

    RadialGrid() = default;
    RadialGrid(double L, int n) : rho_max(L), n_points(n) { validate(); }

    void validate() const;
    double spacing() const { return 2.0 * rho_max / (n_points - 1); }
    double node(int i) const { return -rho_max + i * spacing(); }

    bool operator==(const RadialGrid& o) const {
        return rho_max == o.rho_max && n_points == o.n_points;
    }
};

struct RadialField {
    RadialGrid grid;
    std::vector<double> values;

    RadialField() = default;
    explicit RadialField(const RadialGrid& g, double fill = 0.0)
        : grid(g), values(static_cast<size_t>(g.n_points), fill) {}
    RadialField(const RadialGrid& g, std::vector<double> v);

    int size() const { return grid.n_points; }
    double& operator[](int i) { return values[static_cast<size_t>(i)]; }
    double operator[](int i) const { return values[static_cast<size_t>(i)]; }

    void check_finite() const;
};

// Tabulate f(rho) on the grid.
template <class F>
RadialField tabulate(const RadialGrid& g, F&& f) {
    RadialField out(g);
    for (int i = 0; i < g.n_points; ++i) out[i] = f(g.node(i));
    return out;
}

// Second-order stencils: central in the interior, one-sided at the two
// boundary nodes. Exact for quadratics.
RadialField second_derivative(const RadialField& field);

// Centered first derivative (one-sided second order at the ends).
RadialField first_derivative(const RadialField& field);

// 2pi * trapezoid(field * weight) over rho; realizes the surface integral
// of an S^1-invariant integrand with radial density weight.
double integrate(const RadialField& field, const RadialField& weight);

// Plain trapezoid over rho (no angular factor).
double trapezoid(const RadialField& field);

namespace detail {

// Neumann-reflected second difference in the difference-of-differences
// association: adjacent-value subtractions stay exact for smooth tails.
void neumann_second_difference(const std::vector<double>& f, double h,
                               std::vector<double>& out);
std::vector<double> neumann_second_difference(const std::vector<double>& f, double h);

// sum_i h * ((f[i+1]-f[i])/h)^2  -- the quadratic form paired with the
// Neumann stencil above (discrete integration by parts is exact).
double staggered_gradient_energy(const std::vector<double>& f, double h);

// Fourth-order second derivative, used where stencil bias matters
// (curvature diagnostics); shifted stencils near the ends.
std::vector<double> second_derivative_order4(const std::vector<double>& f, double h);

double trapezoid_weight(int i, int n, double h);

} // namespace detail

} // namespace cfl
