#include "cfl/flow.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace cfl {

namespace {

long double trapz_mean(const std::vector<long double>& f) {
    const int n = static_cast<int>(f.size());
    long double s = 0.0L, sw = 0.0L;
    for (int i = 0; i < n; ++i) {
        const long double w = (i == 0 || i == n - 1) ? 0.5L : 1.0L;
        s += w * f[i];
        sw += w;
    }
    return s / sw;
}

// Neumann second difference in long double, difference-of-differences form.
void neumann_dd_ld(const std::vector<long double>& f, long double h2,
                   std::vector<long double>& out) {
    const int n = static_cast<int>(f.size());
    out.resize(f.size());
    out[0] = 2.0L * (f[1] - f[0]) / h2;
    out[n - 1] = 2.0L * (f[n - 2] - f[n - 1]) / h2;
    for (int i = 1; i < n - 1; ++i)
        out[i] = ((f[i + 1] - f[i]) - (f[i] - f[i - 1])) / h2;
}

} // namespace

void SolverConfig::validate() const {
    if (!(dt_safety > 0.0 && dt_safety <= 1.0))
        throw ConfigurationError("SolverConfig: dt_safety must lie in (0,1]");
    if (!(t_end > 0.0)) throw ConfigurationError("SolverConfig: t_end must be > 0");
    if (!(imex_dt > 0.0)) throw ConfigurationError("SolverConfig: imex_dt must be > 0");
    if (max_steps <= 0) throw ConfigurationError("SolverConfig: max_steps must be > 0");
}

SolverConfig::Scheme SolverConfig::scheme_from_string(const std::string& s) {
    if (s == "explicit-rk4") return Scheme::explicit_rk4;
    if (s == "imex") return Scheme::imex;
    throw ConfigurationError("unknown scheme '" + s + "' (explicit-rk4 | imex)");
}

std::string SolverConfig::scheme_to_string(Scheme s) {
    return s == Scheme::explicit_rk4 ? "explicit-rk4" : "imex";
}

FlowSystem::FlowSystem(const RegularizationParams& p, const ReferenceGeometry& g,
                       const RadialGrid& gr)
    : grid(gr), params(p), geom(g) {
    params.validate();
    u0_dd = geom.u0_dd_field(grid);
    chi_tab = chi_field(grid, params.beta, params.epsilon);
    omega_eps_dd = omega_eps_density(params, geom, grid);
    log_eps_s = tabulate(grid, [&](double rho) {
        return std::log(params.epsilon * params.epsilon +
                        ReferenceGeometry::s_norm_sq(rho));
    });
    F_eps = RadialField(grid);
    for (int i = 0; i < grid.n_points; ++i)
        F_eps[i] = ReferenceGeometry::F0(grid.node(i)) +
                   std::log(omega_eps_dd[i] / u0_dd[i]) +
                   (1.0 - params.beta) * log_eps_s[i];
    theta_dens = theta_eps_density(params, geom, grid);

    const int n = grid.n_points;
    E_ld_.resize(n);
    base_ld_.resize(n);
    for (int i = 0; i < n; ++i) {
        E_ld_[i] = omega_eps_dd[i];
        base_ld_[i] = static_cast<long double>(F_eps[i]) +
                      static_cast<long double>(params.beta) * params.k * chi_tab[i];
    }
}

FlowState FlowSystem::initial_state() const {
    FlowState s;
    s.t = 0.0;
    s.phi_hat = RadialField(grid);
    s.set_mode(initial_constant(*this));
    s.phi_hat_ld.assign(grid.n_points, 0.0L);
    detail::Stepper st(*this, SolverConfig{});
    st.advance(s, 0.0); // no-op advance to populate the cached views
    return s;
}

FlowState FlowSystem::state_from_phi(double t, const RadialField& phi) const {
    if (!(phi.grid == grid)) throw ShapeError("state_from_phi: grid mismatch");
    FlowState s;
    s.t = t;
    const int n = grid.n_points;
    std::vector<long double> ph(n);
    for (int i = 0; i < n; ++i) ph[i] = phi[i];
    const long double mu = trapz_mean(ph);
    s.phi_hat_ld.resize(n);
    for (int i = 0; i < n; ++i) s.phi_hat_ld[i] = ph[i] - mu;
    s.set_mode(mu);
    detail::Stepper st(*this, SolverConfig{});
    st.advance(s, t);
    return s;
}

RadialField FlowState::phi() const {
    RadialField out = phi_hat;
    for (auto& v : out.values) v += mode;
    return out;
}

RadialField FlowState::phi_total(const FlowSystem& sys) const {
    RadialField out = phi();
    for (int i = 0; i < out.size(); ++i) out[i] += sys.params.k * sys.chi_tab[i];
    return out;
}

RadialField FlowState::phi_dot() const {
    RadialField out = phi_dot_hat;
    for (auto& v : out.values) v += mode_dot;
    return out;
}

double FlowState::max_abs_phi_dot() const {
    double hi = -1e300, lo = 1e300;
    for (double v : phi_dot_hat.values) {
        hi = std::max(hi, v);
        lo = std::min(lo, v);
    }
    return std::max(std::abs(hi + mode_dot), std::abs(lo + mode_dot));
}

RadialField flow_rhs(const FlowState& state, const FlowSystem& sys) {
    const auto& g = sys.grid;
    RadialField phi = state.phi();
    RadialField out(g);
    const double b = sys.params.beta;
    for (int i = 0; i < g.n_points; ++i) {
        if (!(state.psi_dd[i] > 0.0))
            throw DegenerateMetricError("flow_rhs: psi'' <= 0 at node " + std::to_string(i));
        out[i] = std::log(state.psi_dd[i] / sys.u0_dd[i]) +
                 ReferenceGeometry::F0(g.node(i)) +
                 b * (sys.params.k * sys.chi_tab[i] + phi[i]) +
                 (1.0 - b) * sys.log_eps_s[i];
    }
    return out;
}

RadialField flow_rhs_twisted_form(const FlowState& state, const FlowSystem& sys) {
    const auto& g = sys.grid;
    RadialField phi = state.phi();
    RadialField out(g);
    const double b = sys.params.beta;
    for (int i = 0; i < g.n_points; ++i) {
        if (!(state.psi_dd[i] > 0.0))
            throw DegenerateMetricError("flow_rhs: psi'' <= 0 at node " + std::to_string(i));
        out[i] = std::log(state.psi_dd[i] / sys.omega_eps_dd[i]) + sys.F_eps[i] +
                 b * (sys.params.k * sys.chi_tab[i] + phi[i]);
    }
    return out;
}

double initial_constant(const FlowSystem& sys) {
    // -(1/(beta V)) int (F_eps + k beta chi) dV_eps
    const auto& g = sys.grid;
    RadialField integrand(g);
    for (int i = 0; i < g.n_points; ++i)
        integrand[i] = sys.F_eps[i] + sys.params.k * sys.params.beta * sys.chi_tab[i];
    return -integrate(integrand, sys.omega_eps_dd) / (sys.params.beta * sys.volume());
}

namespace detail {

Stepper::Stepper(const FlowSystem& s, const SolverConfig& c) : sys(s), config(c) {
    config.validate();
    const size_t n = static_cast<size_t>(sys.grid.n_points);
    N1_.resize(n); N2_.resize(n); N3_.resize(n); N4_.resize(n);
    ps_.resize(n); k1_.resize(n); k2_.resize(n); stage_.resize(n); rhs_.resize(n);
    alo_.resize(n); adi_.resize(n); aup_.resize(n); cc_.resize(n); dd_.resize(n);
    dt_current_ = config.scheme == SolverConfig::Scheme::imex ? config.imex_dt : 0.0;
}

bool Stepper::eval_rhs(const std::vector<long double>& phat, long double beta_mode,
                       std::vector<long double>& N,
                       std::vector<long double>& psidd) const {
    const int n = sys.grid.n_points;
    const long double h = sys.grid.spacing();
    neumann_dd_ld(phat, h * h, psidd); // psidd holds A(phat) first
    const auto& E = sys.density_ld();
    const auto& base = sys.rhs_base_ld();
    const long double b = sys.params.beta;
    for (int i = 0; i < n; ++i) {
        const long double ap = psidd[i];
        psidd[i] = E[i] + ap;
        if (!(psidd[i] > 0.0L)) return false;
        N[i] = log1pl(ap / E[i]) + base[i] + b * phat[i] + beta_mode;
    }
    return true;
}

void Stepper::refresh_views(FlowState& state) const {
    const int n = sys.grid.n_points;
    std::vector<long double> N(n), ps(n);
    if (!eval_rhs(state.phi_hat_ld, 0.0L, N, ps))
        throw DegenerateMetricError("flow state violates the Kahler condition");
    const long double q = trapz_mean(N);
    state.phi_hat = RadialField(sys.grid);
    state.phi_dot_hat = RadialField(sys.grid);
    state.psi_dd = RadialField(sys.grid);
    for (int i = 0; i < n; ++i) {
        state.phi_hat[i] = static_cast<double>(state.phi_hat_ld[i]);
        state.phi_dot_hat[i] = static_cast<double>(N[i] - q);
        state.psi_dd[i] = static_cast<double>(ps[i]);
    }
    state.mode_dot = static_cast<double>(q + (long double)sys.params.beta * state.mode_ld);
}

// One linearly implicit two-stage (Rosenbrock) step of size h; the Jacobian
// A/psi'' + beta is exact for the frozen density, which keeps the scheme
// stable through the stiff window tail.
bool Stepper::try_step_imex(FlowState& state, long double h) {
    const int n = sys.grid.n_points;
    const long double gamma = 1.0L + 1.0L / sqrtl(2.0L);
    const long double b = sys.params.beta;
    const long double hh = (long double)sys.grid.spacing() * sys.grid.spacing();

    if (!eval_rhs(state.phi_hat_ld, 0.0L, N1_, ps_)) return false;
    for (int i = 0; i < n; ++i) {
        const long double a = 1.0L / (ps_[i] * hh);
        long double lo, di, up;
        if (i == 0) { lo = 0; di = -2 * a; up = 2 * a; }
        else if (i == n - 1) { lo = 2 * a; di = -2 * a; up = 0; }
        else { lo = a; di = -2 * a; up = a; }
        alo_[i] = -gamma * h * lo;
        adi_[i] = 1.0L - gamma * h * (di + b);
        aup_[i] = -gamma * h * up;
    }
    auto solve = [&](const std::vector<long double>& r, std::vector<long double>& x) {
        cc_[0] = aup_[0] / adi_[0];
        dd_[0] = r[0] / adi_[0];
        for (int i = 1; i < n; ++i) {
            const long double m = adi_[i] - alo_[i] * cc_[i - 1];
            cc_[i] = i < n - 1 ? aup_[i] / m : 0.0L;
            dd_[i] = (r[i] - alo_[i] * dd_[i - 1]) / m;
        }
        x[n - 1] = dd_[n - 1];
        for (int i = n - 2; i >= 0; --i) x[i] = dd_[i] - cc_[i] * x[i + 1];
    };

    const long double denom = 1.0L - gamma * h * b;
    const long double q1 = trapz_mean(N1_);
    for (int i = 0; i < n; ++i) rhs_[i] = N1_[i] - q1;
    solve(rhs_, k1_);
    const long double m0 = state.mode_ld;
    const long double k1m = (q1 + b * m0) / denom;

    for (int i = 0; i < n; ++i) stage_[i] = state.phi_hat_ld[i] + h * k1_[i];
    if (!eval_rhs(stage_, 0.0L, N2_, ps_)) return false;
    const long double q2 = trapz_mean(N2_);
    for (int i = 0; i < n; ++i) rhs_[i] = (N2_[i] - q2) - 2.0L * k1_[i];
    solve(rhs_, k2_);
    const long double k2m = ((q2 + b * (m0 + h * k1m)) - 2.0L * k1m) / denom;

    for (int i = 0; i < n; ++i)
        stage_[i] = state.phi_hat_ld[i] + 1.5L * h * k1_[i] + 0.5L * h * k2_[i];
    if (!eval_rhs(stage_, 0.0L, N2_, ps_)) return false;

    const long double mu = trapz_mean(stage_);
    for (int i = 0; i < n; ++i) state.phi_hat_ld[i] = stage_[i] - mu;
    state.set_mode(m0 + 1.5L * h * k1m + 0.5L * h * k2m + mu);
    state.t += static_cast<double>(h);
    return true;
}

bool Stepper::try_step_rk4(FlowState& state, long double h) {
    const int n = sys.grid.n_points;
    const long double b = sys.params.beta;
    const long double m0 = state.mode_ld;
    const auto& y0 = state.phi_hat_ld;

    auto centered = [&](std::vector<long double>& N) {
        const long double q = trapz_mean(N);
        for (auto& v : N) v -= q;
        return q;
    };

    if (!eval_rhs(y0, 0.0L, N1_, ps_)) return false;
    const long double q1 = centered(N1_);
    const long double km1 = q1 + b * m0;

    for (int i = 0; i < n; ++i) stage_[i] = y0[i] + 0.5L * h * N1_[i];
    if (!eval_rhs(stage_, 0.0L, N2_, ps_)) return false;
    const long double q2 = centered(N2_);
    const long double km2 = q2 + b * (m0 + 0.5L * h * km1);

    for (int i = 0; i < n; ++i) stage_[i] = y0[i] + 0.5L * h * N2_[i];
    if (!eval_rhs(stage_, 0.0L, N3_, ps_)) return false;
    const long double q3 = centered(N3_);
    const long double km3 = q3 + b * (m0 + 0.5L * h * km2);

    for (int i = 0; i < n; ++i) stage_[i] = y0[i] + h * N3_[i];
    if (!eval_rhs(stage_, 0.0L, N4_, ps_)) return false;
    const long double q4 = centered(N4_);
    const long double km4 = q4 + b * (m0 + h * km3);

    for (int i = 0; i < n; ++i)
        stage_[i] = y0[i] + h / 6.0L * (N1_[i] + 2.0L * N2_[i] + 2.0L * N3_[i] + N4_[i]);
    if (!eval_rhs(stage_, 0.0L, N4_, ps_)) return false;

    const long double mu = trapz_mean(stage_);
    for (int i = 0; i < n; ++i) state.phi_hat_ld[i] = stage_[i] - mu;
    state.set_mode(m0 + h / 6.0L * (km1 + 2.0L * km2 + 2.0L * km3 + km4) + mu);
    state.t += static_cast<double>(h);
    return true;
}

void Stepper::single_step(FlowState& state, long double h) {
    bool ok = false;
    while (!ok) {
        ok = config.scheme == SolverConfig::Scheme::imex ? try_step_imex(state, h)
                                                         : try_step_rk4(state, h);
        if (!ok) {
            ++rejections;
            h *= 0.5L;
            dt_current_ = static_cast<double>(h);
            if (h < 1e-12L) {
                std::ostringstream os;
                os << "stiffness failure: dt underflow at t = " << state.t
                   << " (beta = " << sys.params.beta << ", eps = " << sys.params.epsilon
                   << ", min psi'' = " << min_density(state)
                   << ", rejections = " << rejections << ")";
                throw StiffnessError(os.str());
            }
        }
    }
    ++steps_taken;
}

double Stepper::min_density(const FlowState& state) const {
    std::vector<long double> N(sys.grid.n_points), ps(sys.grid.n_points);
    if (!eval_rhs(state.phi_hat_ld, 0.0L, N, ps)) return -1.0;
    long double mn = ps[0];
    for (auto v : ps) mn = std::min(mn, v);
    return static_cast<double>(mn);
}

void Stepper::advance(FlowState& state, double t_target,
                      const std::function<void(const FlowState&)>& observe,
                      long observe_stride) {
    if (state.phi_hat_ld.empty()) {
        // lift the double view into the working representation
        state.phi_hat_ld.resize(state.phi_hat.values.size());
        for (size_t i = 0; i < state.phi_hat_ld.size(); ++i)
            state.phi_hat_ld[i] = state.phi_hat.values[i];
        if (state.mode_ld == 0.0L && state.mode != 0.0) state.mode_ld = state.mode;
    }
    if (state.t >= t_target) {
        refresh_views(state);
        return;
    }
    while (state.t < t_target - 1e-13) {
        long double dt;
        if (config.scheme == SolverConfig::Scheme::imex) {
            dt = dt_current_;
        } else {
            // explicit diffusion limit of the linearized operator
            const double mn = min_density(state);
            if (!(mn > 0.0))
                throw DegenerateMetricError("flow state violates the Kahler condition");
            const long double h = sys.grid.spacing();
            dt = (long double)config.dt_safety * h * h * mn;
            if (dt_current_ > 0.0 && dt > (long double)dt_current_) dt = dt_current_;
        }
        const long double h = std::min<long double>(dt, (long double)t_target - state.t);
        single_step(state, h);
        if (config.scheme == SolverConfig::Scheme::imex)
            dt_current_ = std::min(config.imex_dt, 2.0 * dt_current_);
        else if (dt_current_ > 0.0)
            dt_current_ *= 2.0; // recover the CFL step after rejections
        if (steps_taken > config.max_steps)
            throw StiffnessError("max_steps exceeded at t = " + std::to_string(state.t));
        if (observe && steps_taken % observe_stride == 0) {
            refresh_views(state);
            observe(state);
        }
    }
    refresh_views(state);
}

} // namespace detail

FlowState step(const FlowState& state, const SolverConfig& config, const FlowSystem& sys) {
    FlowState out = state;
    detail::Stepper st(sys, config);
    if (out.phi_hat_ld.empty()) {
        out.phi_hat_ld.resize(out.phi_hat.values.size());
        for (size_t i = 0; i < out.phi_hat_ld.size(); ++i)
            out.phi_hat_ld[i] = out.phi_hat.values[i];
        if (out.mode_ld == 0.0L && out.mode != 0.0) out.mode_ld = out.mode;
    }
    double dt;
    if (config.scheme == SolverConfig::Scheme::imex) {
        dt = config.imex_dt;
    } else {
        double mn = 1e300;
        for (double v : state.psi_dd.values) mn = std::min(mn, v);
        if (!(mn > 0.0)) throw DegenerateMetricError("step: state not Kahler");
        const double h = sys.grid.spacing();
        dt = config.dt_safety * h * h * mn;
    }
    st.single_step(out, dt);
    st.advance(out, out.t); // refresh cached views only
    return out;
}

RadialField solve_twisted_ke(const FlowSystem& sys, double tol, int max_iter) {
    const int n = sys.grid.n_points;
    const long double hh = (long double)sys.grid.spacing() * sys.grid.spacing();
    const long double b = sys.params.beta;
    const auto& E = sys.density_ld();
    const auto& base = sys.rhs_base_ld();

    std::vector<long double> phi(n, 0.0L), G(n), ps(n), delta(n), cand(n), Gc(n), psc(n);
    std::vector<long double> alo(n), adi(n), aup(n), cc(n), dd(n);

    auto residual = [&](const std::vector<long double>& p, std::vector<long double>& out,
                        std::vector<long double>& psidd) -> bool {
        neumann_dd_ld(p, hh, psidd);
        for (int i = 0; i < n; ++i) {
            const long double ap = psidd[i];
            psidd[i] = E[i] + ap;
            if (!(psidd[i] > 0.0L)) return false;
            out[i] = log1pl(ap / E[i]) + base[i] + b * p[i];
        }
        return true;
    };
    auto max_norm = [&](const std::vector<long double>& v) {
        long double m = 0.0L;
        for (auto x : v) m = std::max(m, fabsl(x));
        return m;
    };

    if (!residual(phi, G, ps)) throw NumericError("solve_twisted_ke: bad initial state");
    long double res = max_norm(G);
    for (int it = 0; it < max_iter; ++it) {
        if (res <= (long double)tol) {
            RadialField out(sys.grid);
            for (int i = 0; i < n; ++i) out[i] = static_cast<double>(phi[i]);
            return out;
        }
        // solve (A/psi'' + beta) delta = -G
        for (int i = 0; i < n; ++i) {
            const long double a = 1.0L / (ps[i] * hh);
            long double lo, di, up;
            if (i == 0) { lo = 0; di = -2 * a; up = 2 * a; }
            else if (i == n - 1) { lo = 2 * a; di = -2 * a; up = 0; }
            else { lo = a; di = -2 * a; up = a; }
            alo[i] = lo;
            adi[i] = di + b;
            aup[i] = up;
        }
        cc[0] = aup[0] / adi[0];
        dd[0] = -G[0] / adi[0];
        for (int i = 1; i < n; ++i) {
            const long double m = adi[i] - alo[i] * cc[i - 1];
            cc[i] = i < n - 1 ? aup[i] / m : 0.0L;
            dd[i] = (-G[i] - alo[i] * dd[i - 1]) / m;
        }
        delta[n - 1] = dd[n - 1];
        for (int i = n - 2; i >= 0; --i) delta[i] = dd[i] - cc[i] * delta[i + 1];

        long double lambda = 1.0L;
        bool improved = false;
        for (int tries = 0; tries < 60; ++tries) {
            for (int i = 0; i < n; ++i) cand[i] = phi[i] + lambda * delta[i];
            if (residual(cand, Gc, psc)) {
                const long double rc = max_norm(Gc);
                if (rc < res) {
                    phi.swap(cand);
                    G.swap(Gc);
                    ps.swap(psc);
                    res = rc;
                    improved = true;
                    break;
                }
            }
            lambda *= 0.5L;
        }
        if (!improved)
            throw NumericError("solve_twisted_ke: Newton stagnation, residual " +
                               std::to_string((double)res));
    }
    throw NumericError("solve_twisted_ke: no convergence after " +
                       std::to_string(max_iter) + " iterations");
}

} // namespace cfl
