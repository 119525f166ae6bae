#include "cfl/geometry.hpp"

namespace cfl {

namespace detail {
RadialField density_of_potential(const RadialField& psi) {
    RadialField out(psi.grid);
    out.values = detail::second_derivative_order4(psi.values, psi.grid.spacing());
    return out;
}
} // namespace detail

RadialField scalar_curvature_from_density(const RadialField& psi_dd) {
    const int n = psi_dd.size();
    RadialField logd(psi_dd.grid);
    for (int i = 0; i < n; ++i) {
        if (!(psi_dd[i] > 0.0))
            throw DegenerateMetricError("scalar_curvature: psi'' <= 0 at node " +
                                        std::to_string(i));
        logd[i] = std::log(psi_dd[i]);
    }
    const auto dd = detail::second_derivative_order4(logd.values, psi_dd.grid.spacing());
    RadialField out(psi_dd.grid);
    for (int i = 0; i < n; ++i) out[i] = -dd[i] / psi_dd[i];
    return out;
}

RadialField scalar_curvature(const RadialField& psi) {
    return scalar_curvature_from_density(detail::density_of_potential(psi));
}

double meridian_diameter_from_density(const RadialField& psi_dd) {
    RadialField integrand(psi_dd.grid);
    for (int i = 0; i < psi_dd.size(); ++i) {
        if (!(psi_dd[i] > 0.0))
            throw DegenerateMetricError("meridian_diameter: psi'' <= 0 at node " +
                                        std::to_string(i));
        integrand[i] = std::sqrt(0.5 * psi_dd[i]);
    }
    return trapezoid(integrand);
}

double meridian_diameter(const RadialField& psi) {
    return meridian_diameter_from_density(detail::density_of_potential(psi));
}

} // namespace cfl
