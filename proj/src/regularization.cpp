#include "cfl/regularization.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace cfl {

void RegularizationParams::validate() const {
    if (!(beta > 0.0 && beta < 1.0))
        throw DomainError("RegularizationParams: beta must lie in (0,1)");
    if (!(epsilon > 0.0)) throw DomainError("RegularizationParams: epsilon must be > 0");
    if (!(k > 0.0)) throw DomainError("RegularizationParams: k must be > 0");
}

namespace {

// ((eps^2+r)^beta - eps^(2 beta))/r, continuous at r = 0.
double chi_integrand(double beta, double eps, double r) {
    const double e2 = eps * eps;
    if (r <= 0.0) return beta * std::pow(eps, 2.0 * (beta - 1.0));
    return std::pow(eps, 2.0 * beta) * std::expm1(beta * std::log1p(r / e2)) / r;
}

double adaptive_simpson(double beta, double eps, double a, double b, double fa,
                        double fm, double fb, double whole, double tol, int depth) {
    const double m = 0.5 * (a + b);
    const double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
    const double flm = chi_integrand(beta, eps, lm);
    const double frm = chi_integrand(beta, eps, rm);
    const double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    const double err = left + right - whole;
    if (depth > 48 || std::abs(err) < 15.0 * tol)
        return left + right + err / 15.0;
    return adaptive_simpson(beta, eps, a, m, fa, flm, fm, left, 0.5 * tol, depth + 1) +
           adaptive_simpson(beta, eps, m, b, fm, frm, fb, right, 0.5 * tol, depth + 1);
}

double chi_segment(double beta, double eps, double a, double b, double tol) {
    if (b <= a) return 0.0;
    const double fa = chi_integrand(beta, eps, a);
    const double fb = chi_integrand(beta, eps, b);
    const double fm = chi_integrand(beta, eps, 0.5 * (a + b));
    const double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    return adaptive_simpson(beta, eps, a, b, fa, fm, fb, whole, tol, 0);
}

} // namespace

double chi_eval(double beta, double eps, double t) {
    if (!(beta > 0.0 && beta < 1.0)) throw DomainError("chi_eval: beta must lie in (0,1)");
    if (t < 0.0) throw DomainError("chi_eval: t must be >= 0");
    if (t == 0.0) return 0.0;
    if (eps == 0.0) return std::pow(t, beta) / (beta * beta);
    // split at the crossover r = eps^2 where the integrand turns over
    const double e2 = eps * eps;
    double acc = 0.0;
    if (t <= e2) {
        acc = chi_segment(beta, eps, 0.0, t, 1e-10);
    } else {
        acc = chi_segment(beta, eps, 0.0, e2, 0.5e-10) +
              chi_segment(beta, eps, e2, t, 0.5e-10);
    }
    return acc / beta;
}

RadialField chi_field(const RadialGrid& grid, double beta, double eps) {
    if (!(beta > 0.0 && beta < 1.0)) throw DomainError("chi_field: beta must lie in (0,1)");
    if (!(eps > 0.0)) throw DomainError("chi_field: eps must be > 0");
    const int n = grid.n_points;
    // |s|^2 is even in rho and increasing on [-L, 0]; integrate incrementally
    // over the left half, then mirror.
    const int half = (n - 1) / 2; // nodes 0..half cover rho <= 0
    std::vector<double> t(half + 1);
    for (int i = 0; i <= half; ++i) t[i] = ReferenceGeometry::s_norm_sq(grid.node(i));
    std::vector<double> acc(half + 1);
    double run = chi_segment(beta, eps, 0.0, t[0], 1e-12);
    acc[0] = run;
    for (int i = 1; i <= half; ++i) {
        run += chi_segment(beta, eps, t[i - 1], t[i], 5e-14);
        acc[i] = run;
    }
    RadialField out(grid);
    for (int i = 0; i <= half; ++i) {
        out[i] = acc[i] / beta;
        out[n - 1 - i] = out[i];
    }
    return out;
}

namespace detail {

double chi_t(double beta, double eps, double t) {
    const double e2 = eps * eps;
    if (t < 1e-12 * e2) return std::pow(eps, 2.0 * (beta - 1.0));
    return std::pow(eps, 2.0 * beta) * std::expm1(beta * std::log1p(t / e2)) / (beta * t);
}

double chi_tt(double beta, double eps, double t) {
    const double e2 = eps * eps;
    if (t < 1e-6 * e2) return 0.5 * (beta - 1.0) * std::pow(eps, 2.0 * (beta - 2.0));
    const double T = e2 + t;
    return (std::pow(T, beta - 1.0) * t -
            std::pow(eps, 2.0 * beta) * std::expm1(beta * std::log1p(t / e2)) / beta) /
           (t * t);
}

} // namespace detail

RadialField chi_dd_field(const RadialGrid& grid, double beta, double eps) {
    RadialField out(grid);
    for (int i = 0; i < grid.n_points; ++i) {
        const double rho = grid.node(i);
        const double sig = ReferenceGeometry::logistic(rho);
        const double S = sig * (1.0 - sig);
        const double Sp = S * (1.0 - 2.0 * sig);
        const double Spp = S * (1.0 - 2.0 * sig) * (1.0 - 2.0 * sig) - 2.0 * S * S;
        out[i] = detail::chi_tt(beta, eps, S) * Sp * Sp + detail::chi_t(beta, eps, S) * Spp;
    }
    return out;
}

RadialField omega_eps_density(const RegularizationParams& params,
                              const ReferenceGeometry& geom, const RadialGrid& grid) {
    params.validate();
    const auto cdd = chi_dd_field(grid, params.beta, params.epsilon);
    RadialField out(grid);
    for (int i = 0; i < grid.n_points; ++i) {
        out[i] = ReferenceGeometry::u0_dd(grid.node(i)) + params.k * cdd[i];
        if (!(out[i] > 0.0))
            throw KTooLargeError("omega_eps_density: nonpositive at rho = " +
                                 std::to_string(grid.node(i)) + "; shrink k");
    }
    (void)geom;
    return out;
}

double select_k(const ReferenceGeometry& geom, const RadialGrid& grid, double beta,
                const std::vector<double>& epsilon_schedule, double gamma_target) {
    if (epsilon_schedule.empty()) throw ConfigurationError("select_k: empty schedule");
    (void)geom;
    auto admissible = [&](double k) {
        for (double eps : epsilon_schedule) {
            const auto cdd = chi_dd_field(grid, beta, eps);
            for (int i = 0; i < grid.n_points; ++i) {
                const double u = ReferenceGeometry::u0_dd(grid.node(i));
                if (u + k * cdd[i] < gamma_target * u) return false;
            }
        }
        return true;
    };
    double lo = 0.0, hi = 1.0;
    if (admissible(hi)) return hi;
    while (hi - lo > 1e-3) {
        const double mid = 0.5 * (lo + hi);
        (admissible(mid) ? lo : hi) = mid;
    }
    if (lo < 1e-6)
        throw ConfigurationError("select_k: no admissible k >= 1e-6 for gamma_target " +
                                 std::to_string(gamma_target));
    return lo;
}

RadialField theta_eps_density(const RegularizationParams& params,
                              const ReferenceGeometry& geom, const RadialGrid& grid) {
    params.validate();
    (void)geom;
    const double b = params.beta, e2 = params.epsilon * params.epsilon;
    RadialField out(grid);
    for (int i = 0; i < grid.n_points; ++i) {
        const double sig = ReferenceGeometry::logistic(grid.node(i));
        const double S = sig * (1.0 - sig);
        const double T = e2 + S;
        const double c = 1.0 - 2.0 * sig;
        out[i] = (1.0 - b) * (2.0 * S * e2 / T + e2 * S * c * c / (T * T));
        if (out[i] < -1e-10)
            throw NumericError("theta_eps_density: negativity beyond tolerance");
    }
    return out;
}

double chi_rho_identity_residual(double rho_exp, double epsilon,
                                 const ReferenceGeometry& geom, const RadialGrid& grid) {
    if (!(rho_exp > 0.0 && rho_exp < 1.0))
        throw DomainError("chi_rho_identity_residual: exponent must lie in (0,1)");
    (void)geom;
    const double p = rho_exp;
    const auto lhs = second_derivative(chi_field(grid, p, epsilon));
    const double e2 = epsilon * epsilon;
    double worst = 0.0;
    for (int i = 0; i < grid.n_points; ++i) {
        const double rho = grid.node(i);
        const double sig = ReferenceGeometry::logistic(rho);
        const double S = sig * (1.0 - sig);
        const double u = ReferenceGeometry::u0_dd(rho);
        const double Sp = S * (1.0 - 2.0 * sig);
        const double Spp = S * (1.0 - 2.0 * sig) * (1.0 - 2.0 * sig) - 2.0 * S * S;
        const double ds_ds = Spp + S * u; // <D's,D's> density
        const double T = e2 + S;
        const double rhs = ds_ds * std::pow(T, p - 1.0) -
                           std::pow(epsilon, 2.0 * p) *
                               std::expm1(p * std::log1p(S / e2)) / p * u;
        worst = std::max(worst, std::abs(lhs[i] - rhs));
    }
    return worst;
}

double cone_chart_coefficient(double beta, double eps, double polar_radius,
                              double phi_value) {
    if (!(beta > 0.0 && beta < 1.0))
        throw DomainError("cone_chart_coefficient: beta must lie in (0,1)");
    if (polar_radius < 0.0)
        throw DomainError("cone_chart_coefficient: polar_radius must be >= 0");
    const double r2 = polar_radius * polar_radius;
    const double base = std::pow(eps, 2.0 * beta) + r2;
    const double q = std::pow(base, 1.0 / beta - 1.0);
    if (base == 0.0) return 1.0; // eps = r = 0 limit along r -> 0
    return std::pow(eps * eps + q * r2 * std::exp(-phi_value), beta - 1.0) * q;
}

} // namespace cfl
