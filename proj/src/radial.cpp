#include "cfl/radial.hpp"

#include <cmath>
#include <utility>

namespace cfl {

void RadialGrid::validate() const {
    if (n_points < 64) throw InvalidGridError("RadialGrid: n_points must be >= 64");
    if (rho_max < 20.0) throw InvalidGridError("RadialGrid: rho_max must be >= 20");
}

RadialField::RadialField(const RadialGrid& g, std::vector<double> v)
    : grid(g), values(std::move(v)) {
    if (static_cast<int>(values.size()) != g.n_points)
        throw ShapeError("RadialField: values length does not match grid");
}

void RadialField::check_finite() const {
    for (double v : values)
        if (!std::isfinite(v)) throw NumericError("RadialField: non-finite value");
}

RadialField second_derivative(const RadialField& field) {
    const int n = field.size();
    if (n < 3) throw InvalidGridError("second_derivative: grid has fewer than 3 nodes");
    const double h = field.grid.spacing();
    const double h2 = h * h;
    RadialField out(field.grid);
    const auto& f = field.values;
    for (int i = 1; i < n - 1; ++i)
        out[i] = ((f[i + 1] - f[i]) - (f[i] - f[i - 1])) / h2;
    out[0] = (2.0 * f[0] - 5.0 * f[1] + 4.0 * f[2] - f[3]) / h2;
    out[n - 1] = (2.0 * f[n - 1] - 5.0 * f[n - 2] + 4.0 * f[n - 3] - f[n - 4]) / h2;
    return out;
}

RadialField first_derivative(const RadialField& field) {
    const int n = field.size();
    if (n < 3) throw InvalidGridError("first_derivative: grid has fewer than 3 nodes");
    const double h = field.grid.spacing();
    RadialField out(field.grid);
    const auto& f = field.values;
    for (int i = 1; i < n - 1; ++i) out[i] = (f[i + 1] - f[i - 1]) / (2.0 * h);
    out[0] = (-3.0 * f[0] + 4.0 * f[1] - f[2]) / (2.0 * h);
    out[n - 1] = (3.0 * f[n - 1] - 4.0 * f[n - 2] + f[n - 3]) / (2.0 * h);
    return out;
}

double integrate(const RadialField& field, const RadialField& weight) {
    if (!(field.grid == weight.grid))
        throw ShapeError("integrate: fields do not share a grid");
    const int n = field.size();
    const double h = field.grid.spacing();
    double s = 0.0;
    for (int i = 0; i < n; ++i)
        s += detail::trapezoid_weight(i, n, h) * field[i] * weight[i];
    return 2.0 * M_PI * s;
}

double trapezoid(const RadialField& field) {
    const int n = field.size();
    const double h = field.grid.spacing();
    double s = 0.0;
    for (int i = 0; i < n; ++i) s += detail::trapezoid_weight(i, n, h) * field[i];
    return s;
}

namespace detail {

double trapezoid_weight(int i, int n, double h) {
    return (i == 0 || i == n - 1) ? 0.5 * h : h;
}

void neumann_second_difference(const std::vector<double>& f, double h,
                               std::vector<double>& out) {
    const int n = static_cast<int>(f.size());
    out.resize(f.size());
    const double h2 = h * h;
    out[0] = 2.0 * (f[1] - f[0]) / h2;
    out[n - 1] = 2.0 * (f[n - 2] - f[n - 1]) / h2;
    for (int i = 1; i < n - 1; ++i)
        out[i] = ((f[i + 1] - f[i]) - (f[i] - f[i - 1])) / h2;
}

std::vector<double> neumann_second_difference(const std::vector<double>& f, double h) {
    std::vector<double> out;
    neumann_second_difference(f, h, out);
    return out;
}

double staggered_gradient_energy(const std::vector<double>& f, double h) {
    double s = 0.0;
    for (size_t i = 0; i + 1 < f.size(); ++i) {
        const double d = (f[i + 1] - f[i]) / h;
        s += h * d * d;
    }
    return s;
}

std::vector<double> second_derivative_order4(const std::vector<double>& f, double h) {
    const int n = static_cast<int>(f.size());
    std::vector<double> out(f.size());
    const double h2 = 12.0 * h * h;
    for (int i = 2; i < n - 2; ++i)
        out[i] = (-f[i + 2] + 16.0 * f[i + 1] - 30.0 * f[i] + 16.0 * f[i - 1] - f[i - 2]) / h2;
    // shifted five/six point stencils at the edges
    auto edge = [&](int i, int s) {
        // second derivative at f[i] from nodes f[i+s*j], j=0..5 (one-sided, order 4)
        static const double c[6] = {45.0, -154.0, 214.0, -156.0, 61.0, -10.0};
        double acc = 0.0;
        for (int j = 0; j < 6; ++j) acc += c[j] * f[i + s * j];
        return acc / h2;
    };
    out[0] = edge(0, 1);
    out[1] = edge(1, 1);
    out[n - 1] = edge(n - 1, -1);
    out[n - 2] = edge(n - 2, -1);
    return out;
}

} // namespace detail

} // namespace cfl
