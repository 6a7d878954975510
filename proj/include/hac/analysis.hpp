#pragma once

// Closed-loop analysis of the L-filter converter under hybrid angle control:
// closed-form stationary points, an independent damped-Newton oracle, the
// energy function and its time derivative, the critical gain-ratio condition,
// and a numerical linearization with dense eigenvalues.

#include <Eigen/Dense>
#include <array>
#include <cmath>
#include <complex>
#include <functional>
#include <vector>

#include "hac/control.hpp"
#include "hac/errors.hpp"
#include "hac/plant.hpp"

namespace hac {

// Stationary point of the closed-loop system, branch k in {1, 2}
// (delta* = delta_r and delta_r + 2 pi; the other states coincide).
struct Equilibrium {
    double delta = 0.0;
    double zeta = 0.0;
    double v_dc = 0.0;
    double i_d = 0.0;
    double i_q = 0.0;
    int branch = 1;

    SysState as_state() const { return {delta, zeta, v_dc, i_d, i_q}; }
};

// The analysis-grade closed loop: L-filter plant, dc PID source control,
// feedforward modulation magnitude and the exact (or energy-variant) angle law.
struct StiffGridLoop {
    PlantParams plant;
    HacGains hac;
    DcPidGains dc;
    double mu = 1.0 / 3.0;
    double omega_g = two_pi * 60.0;

    double omega_cmd(const SysState& x) const {
        return hac.variant == HacVariant::energy ? hac_energy(x.v_dc, x.delta, hac)
                                                 : hac_exact(x.v_dc, x.delta, hac);
    }

    SysState rhs(const SysState& x) const {
        const double i_dc0 =
            dc_source_pid(x.v_dc, plant.v_dc_r, x.zeta, 0.0, {dc.kappa_p, dc.kappa_i, 0.0});
        SysState d = rhs_dq_l(x, {mu, i_dc0}, plant, omega_cmd(x), omega_g);
        // The derivative term feeds dv_dc back into i_dc; solved algebraically.
        if (dc.kappa_d > 0.0) d.v_dc *= plant.c_dc / (plant.c_dc + dc.kappa_d);
        return d;
    }

    double i_dc(const SysState& x) const {
        const double dv = rhs(x).v_dc;
        return dc_source_pid(x.v_dc, plant.v_dc_r, x.zeta, dv, dc);
    }
};

// ---------------------------------------------------------------------------
// Equilibria

// Closed-form stationary points. The integrator state is obtained from the
// dc-side steady-state balance; current components from the RL phasor solve.
inline std::array<Equilibrium, 2> equilibria_closed_form(const PlantParams& g, double mu,
                                                         double delta_r,
                                                         const DcPidGains& dc) {
    const double x_l = g.l * g.omega0;
    const double det = g.r * g.r + x_l * x_l;
    if (!(det > 0.0)) throw DegenerateImpedance("equilibria_closed_form: R^2 + (L w0)^2 == 0");
    if (!(dc.kappa_i > 0.0))
        throw DegenerateParams("equilibria_closed_form: kappa_i must be > 0 for zeta*");

    std::array<Equilibrium, 2> out;
    const double v = g.v_dc_r;
    for (int k = 1; k <= 2; ++k) {
        Equilibrium e;
        e.branch = k;
        e.delta = delta_r + two_pi * static_cast<double>(k - 1);
        e.v_dc = v;
        const double c = std::cos(e.delta);
        const double s = std::sin(e.delta);
        e.i_d = (mu * v * (g.r * c + x_l * s) - g.r * g.v0) / det;
        e.i_q = (mu * v * (g.r * s - x_l * c) + x_l * g.v0) / det;
        e.zeta = (-g.g_dc * v - 1.5 * mu * (e.i_d * c + e.i_q * s)) / dc.kappa_i;
        out[static_cast<std::size_t>(k - 1)] = e;
    }
    return out;
}

// ---------------------------------------------------------------------------
// Generic damped Newton with a finite-difference Jacobian. Used as the
// independent equilibrium oracle here and for LC fixed points in tests.

struct NewtonOptions {
    double tol = 1e-12;    // scaled residual tolerance
    int max_iter = 100;
    double min_lambda = 1.0 / 1024.0;  // backtracking floor
};

inline Eigen::VectorXd newton_solve(
    const std::function<Eigen::VectorXd(const Eigen::VectorXd&)>& f, Eigen::VectorXd x,
    const Eigen::VectorXd& state_scales, const Eigen::VectorXd& residual_scales,
    const NewtonOptions& opt = {}) {
    const auto n = x.size();
    auto scaled_norm = [&](const Eigen::VectorXd& r) {
        double m = 0.0;
        for (Eigen::Index i = 0; i < n; ++i) m = std::max(m, std::abs(r[i]) / residual_scales[i]);
        return m;
    };

    Eigen::VectorXd r = f(x);
    double rn = scaled_norm(r);
    for (int it = 0; it < opt.max_iter; ++it) {
        if (rn < opt.tol) return x;
        Eigen::MatrixXd jac(n, n);
        for (Eigen::Index j = 0; j < n; ++j) {
            const double h = 1e-7 * std::max(std::abs(x[j]), state_scales[j]);
            Eigen::VectorXd xp = x, xm = x;
            xp[j] += h;
            xm[j] -= h;
            jac.col(j) = (f(xp) - f(xm)) / (2.0 * h);
        }
        const Eigen::VectorXd step = jac.partialPivLu().solve(-r);
        if (!step.allFinite()) throw NoConvergence("newton_solve: singular Jacobian");

        double lambda = 1.0;
        while (true) {
            const Eigen::VectorXd x_try = x + lambda * step;
            const Eigen::VectorXd r_try = f(x_try);
            const double rn_try = scaled_norm(r_try);
            if (rn_try < rn || rn_try < opt.tol) {
                x = x_try;
                r = r_try;
                rn = rn_try;
                break;
            }
            lambda *= 0.5;
            if (lambda < opt.min_lambda)
                throw NoConvergence("newton_solve: line search stalled");
        }
    }
    if (rn < opt.tol) return x;
    throw NoConvergence("newton_solve: no convergence within iteration limit");
}

struct NewtonEquilibriumResult {
    Equilibrium eq;
    double residual = 0.0;  // scaled max residual at the returned point
    int branch_offset = 0;
};

// Independent oracle: damped Newton on the five steady-state residuals of the
// closed loop. Default initial guess: references and zero currents.
inline NewtonEquilibriumResult newton_equilibrium(const StiffGridLoop& loop,
                                                  const SysState* guess = nullptr) {
    if (!(loop.dc.kappa_i > 0.0))
        throw DegenerateParams("newton_equilibrium: kappa_i must be > 0");
    const auto& g = loop.plant;
    SysState x0 = guess ? *guess : SysState{loop.hac.delta_r, 0.0, g.v_dc_r, 0.0, 0.0};

    auto pack = [](const SysState& s) {
        Eigen::VectorXd v(5);
        v << s.delta, s.zeta, s.v_dc, s.i_d, s.i_q;
        return v;
    };
    auto unpack = [](const Eigen::VectorXd& v) {
        return SysState{v[0], v[1], v[2], v[3], v[4]};
    };

    auto f = [&](const Eigen::VectorXd& v) {
        const SysState d = loop.rhs(unpack(v));
        return pack(d);
    };

    Eigen::VectorXd state_scales(5);
    const double i_scale = std::max(1.0, g.v0 / std::hypot(g.r, g.l * g.omega0));
    state_scales << 1.0, std::max(1.0, g.v_dc_r / loop.dc.kappa_i), g.v_dc_r, i_scale, i_scale;

    // rhs rows carry 1/C and 1/L; the residual scales follow suit.
    Eigen::VectorXd residual_scales(5);
    residual_scales << std::max(1.0, loop.hac.kappa_ac + loop.hac.kappa_dc * g.v_dc_r),
        g.v_dc_r, g.v_dc_r * std::max(loop.dc.kappa_p, g.g_dc) / g.c_dc, g.v0 / g.l,
        g.v0 / g.l;

    const Eigen::VectorXd sol = newton_solve(f, pack(x0), state_scales, residual_scales, {});

    NewtonEquilibriumResult res;
    const SysState xs = unpack(sol);
    res.eq = {xs.delta, xs.zeta, xs.v_dc, xs.i_d, xs.i_q, 1};
    res.branch_offset =
        static_cast<int>(std::lround((xs.delta - loop.hac.delta_r) / two_pi));
    res.eq.branch = 1 + (((res.branch_offset % 2) + 2) % 2);

    const Eigen::VectorXd r = f(sol);
    double rn = 0.0;
    for (int i = 0; i < 5; ++i) rn = std::max(rn, std::abs(r[i]) / residual_scales[i]);
    res.residual = rn;
    return res;
}

// ---------------------------------------------------------------------------
// Energy function

struct LyapCoeffs {
    double c1 = 0.0, c2 = 0.0, c3 = 0.0, c4 = 0.0, c5 = 0.0;

    static LyapCoeffs from_gains(double kappa_dc, double kappa_i, double c_dc, double l) {
        if (!(kappa_dc > 0.0))
            throw DegenerateParams("LyapCoeffs: kappa_dc must be > 0 for c1");
        return {4.0 / kappa_dc, 0.5 * kappa_i, 0.5 * c_dc, 0.5 * l, 0.5 * l};
    }
};

inline double lyapunov_value(const SysState& x, const Equilibrium& eq, const LyapCoeffs& c) {
    const double dd = x.delta - eq.delta;
    const double dz = x.zeta - eq.zeta;
    const double dv = x.v_dc - eq.v_dc;
    const double did = x.i_d - eq.i_d;
    const double diq = x.i_q - eq.i_q;
    return c.c1 * (1.0 - std::cos(0.5 * dd)) + c.c2 * dz * dz + c.c3 * dv * dv +
           c.c4 * did * did + c.c5 * diq * diq;
}

// Chain-rule derivative of the energy function along the closed-loop flow.
inline double lyapunov_derivative(const SysState& x, const Equilibrium& eq,
                                  const LyapCoeffs& c, const StiffGridLoop& loop) {
    const SysState d = loop.rhs(x);
    const double dd = x.delta - eq.delta;
    return 0.5 * c.c1 * std::sin(0.5 * dd) * d.delta +
           2.0 * (c.c2 * (x.zeta - eq.zeta) * d.zeta + c.c3 * (x.v_dc - eq.v_dc) * d.v_dc +
                  c.c4 * (x.i_d - eq.i_d) * d.i_d + c.c5 * (x.i_q - eq.i_q) * d.i_q);
}

// ---------------------------------------------------------------------------
// Stability condition

// rho_critical = 1/(G+kp) + mu^2 |i*|^2 / (G+kp) + mu^2 v*^2 / R.
inline double rho_critical(const PlantParams& g, const Equilibrium& eq, double mu,
                           double kappa_p) {
    if (!(g.r > 0.0)) throw DegenerateParams("rho_critical: R must be > 0");
    const double gkp = g.g_dc + kappa_p;
    if (!(gkp > 0.0)) throw DegenerateParams("rho_critical: G_dc + kappa_p must be > 0");
    const double mu2 = mu * mu;
    return 1.0 / gkp + mu2 * (eq.i_d * eq.i_d + eq.i_q * eq.i_q) / gkp +
           mu2 * eq.v_dc * eq.v_dc / g.r;
}

struct StabilityReport {
    double rho = 0.0;
    double rho_critical = 0.0;
    double margin = 0.0;
    bool satisfied = false;
};

inline StabilityReport stability_report(const StiffGridLoop& loop, const Equilibrium& eq) {
    if (!(loop.hac.kappa_dc > 0.0))
        throw DegenerateParams("stability_report: kappa_dc must be > 0 for rho");
    StabilityReport r;
    r.rho = loop.hac.kappa_ac / loop.hac.kappa_dc;
    r.rho_critical = rho_critical(loop.plant, eq, loop.mu, loop.dc.kappa_p);
    r.margin = r.rho - r.rho_critical;
    r.satisfied = r.margin > 0.0;
    return r;
}

// ---------------------------------------------------------------------------
// Numerical linearization

inline Eigen::Matrix<double, 5, 5> closed_loop_jacobian(const StiffGridLoop& loop,
                                                        const SysState& x0) {
    auto pack = [](const SysState& s) {
        Eigen::Matrix<double, 5, 1> v;
        v << s.delta, s.zeta, s.v_dc, s.i_d, s.i_q;
        return v;
    };
    const Eigen::Matrix<double, 5, 1> x = pack(x0);
    Eigen::Matrix<double, 5, 5> jac;
    for (int j = 0; j < 5; ++j) {
        const double h = 1e-6 * std::max(1.0, std::abs(x[j]));
        Eigen::Matrix<double, 5, 1> xp = x, xm = x;
        xp[j] += h;
        xm[j] -= h;
        const SysState dp = loop.rhs({xp[0], xp[1], xp[2], xp[3], xp[4]});
        const SysState dm = loop.rhs({xm[0], xm[1], xm[2], xm[3], xm[4]});
        jac.col(j) = (pack(dp) - pack(dm)) / (2.0 * h);
    }
    return jac;
}

// Eigenvalues of the closed-loop linearization at eq, real part descending.
inline std::vector<std::complex<double>> jacobian_eigenvalues(const StiffGridLoop& loop,
                                                              const Equilibrium& eq) {
    const auto jac = closed_loop_jacobian(loop, eq.as_state());
    Eigen::EigenSolver<Eigen::Matrix<double, 5, 5>> solver(jac);
    std::vector<std::complex<double>> ev(5);
    for (int i = 0; i < 5; ++i) ev[static_cast<std::size_t>(i)] = solver.eigenvalues()[i];
    std::sort(ev.begin(), ev.end(), [](const auto& a, const auto& b) {
        if (a.real() != b.real()) return a.real() > b.real();
        return a.imag() > b.imag();
    });
    return ev;
}

}  // namespace hac
