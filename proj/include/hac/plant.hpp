#pragma once

// Electrical models: dc link + averaged switch + L filter to a stiff grid
// (in abc and dq coordinates), LC filter to a weak grid, islanded resistive
// load, a two-converter network, and the dc-link energy bookkeeping.
//
// All rhs functions are pure. dq models are expressed in a frame rotating at
// the grid (or common reference) frequency, d-axis on the grid voltage, using
// the frames.hpp conventions. With the amplitude-invariant Clarke scaling the
// switched dc current carries an explicit 3/2: i_s = (3/2)(m_d i_d + m_q i_q).

#include <array>
#include <cmath>

#include "hac/errors.hpp"
#include "hac/frames.hpp"

namespace hac {

// Electrical constants of converter, filter and grid. Defaults are the
// 500 kVA / 60 Hz baseline system used throughout the scenario suite.
struct PlantParams {
    double c_dc = 0.01;                // dc-link capacitance (F)
    double g_dc = 0.01;                // dc-side conductance (S)
    double l = 0.12e-3;                // filter inductance (H)
    double r = 4.5e-3;                 // filter series resistance (Ohm)
    double c_f = 0.13e-3;              // filter capacitance (F); 0 for pure-L models
    double l_g = 0.56e-3;              // grid equivalent inductance (H)
    double r_g = 0.064;                // grid equivalent resistance (Ohm)
    double omega0 = two_pi * 60.0;     // nominal angular frequency (rad/s)
    double v0 = 326.59;                // grid phase-peak voltage (V)
    double v_dc_r = 3.0 * 326.59;      // dc voltage reference (V)

    void validate() const {
        if (!(c_dc > 0.0)) throw ConfigError("PlantParams: c_dc must be > 0");
        if (!(l > 0.0)) throw ConfigError("PlantParams: l must be > 0");
        if (!(r > 0.0)) throw ConfigError("PlantParams: r must be > 0");
        if (g_dc < 0.0) throw ConfigError("PlantParams: g_dc must be >= 0");
        if (c_f < 0.0) throw ConfigError("PlantParams: c_f must be >= 0");
        if (l_g < 0.0) throw ConfigError("PlantParams: l_g must be >= 0");
        if (r_g < 0.0) throw ConfigError("PlantParams: r_g must be >= 0");
        if (!(omega0 > 0.0)) throw ConfigError("PlantParams: omega0 must be > 0");
        if (!(v0 > 0.0)) throw ConfigError("PlantParams: v0 must be > 0");
        if (!(v_dc_r > 0.0)) throw ConfigError("PlantParams: v_dc_r must be > 0");
    }

    // Weak-grid L model: filter and grid impedances merged into one branch.
    PlantParams merged_weak_grid() const {
        PlantParams m = *this;
        m.l += l_g;
        m.r += r_g;
        m.l_g = 0.0;
        m.r_g = 0.0;
        m.c_f = 0.0;
        return m;
    }
};

// Closed-loop state of the L-filter model: x = (delta, zeta, v_dc, i_d, i_q).
struct SysState {
    double delta = 0.0;  // converter-grid relative angle (rad)
    double zeta = 0.0;   // dc PI integrator (V*s)
    double v_dc = 0.0;   // dc-link voltage (V)
    double i_d = 0.0;    // filter current, d (A)
    double i_q = 0.0;    // filter current, q (A)
};

// Converter control inputs seen by the L-filter plant.
struct PlantInput {
    double mu = 0.0;    // modulation magnitude
    double i_dc = 0.0;  // dc source current (A)
};

struct PowerPQ {
    double p = 0.0;  // active power (W)
    double q = 0.0;  // reactive power (var)
};

// dc-link energy bookkeeping (inertial-response analogy).
struct EnergyReport {
    double e_p = 0.0;     // stored dc energy 1/2 C v^2 (J)
    double de_p = 0.0;    // its time derivative (W)
    double p_dc = 0.0;    // power injected by the dc source (W)
    double p_loss = 0.0;  // dc conductance loss G v^2 (W)
    double p_ac = 0.0;    // power out of the switched ac terminal (W)
};

// Lossless power-preserving averaged switch model:
// i_s = m^T i, v_s = v_dc m, so v_dc i_s == v_s^T i identically.
struct SwitchOutput {
    double i_s = 0.0;  // dc-side switched current (A)
    ThreePhase v_s;    // ac-side switched voltage (V)
};

inline SwitchOutput averaged_switch(const ThreePhase& m, const ThreePhase& i, double v_dc) {
    return {m.a * i.a + m.b * i.b + m.c * i.c,
            {v_dc * m.a, v_dc * m.b, v_dc * m.c}};
}

// Active/reactive power at a node, amplitude-invariant scaling.
inline PowerPQ pcc_power(const Dq& v, const Dq& i) {
    return {1.5 * (v.d * i.d + v.q * i.q), 1.5 * (v.q * i.d - v.d * i.q)};
}

// dq switched current for modulation m_dq (grid frame) and current i_dq.
inline double switch_current_dq(const Dq& m, const Dq& i) {
    return 1.5 * (m.d * i.d + m.q * i.q);
}

// Closed-loop dq dynamics of the L-filter converter against a stiff grid
// (weak-grid variant: call with merged (L+L_g, R+R_g) parameters). The dc PI
// integrator state advances with the plant; omega_cmd is the converter
// frequency commanded by the grid-forming control.
inline SysState rhs_dq_l(const SysState& x, const PlantInput& u, const PlantParams& g,
                         double omega_cmd, double omega_g) {
    if (!(x.v_dc > 0.0)) throw NonPhysicalState("rhs_dq_l: v_dc <= 0");
    const double c = std::cos(x.delta);
    const double s = std::sin(x.delta);
    SysState d;
    d.delta = omega_cmd - omega_g;
    d.zeta = x.v_dc - g.v_dc_r;
    d.v_dc = (u.i_dc - g.g_dc * x.v_dc - 1.5 * u.mu * (x.i_d * c + x.i_q * s)) / g.c_dc;
    d.i_d = (u.mu * x.v_dc * c - g.r * x.i_d + g.l * omega_g * x.i_q - g.v0) / g.l;
    d.i_q = (u.mu * x.v_dc * s - g.r * x.i_q - g.l * omega_g * x.i_d) / g.l;
    return d;
}

// Open-loop three-phase counterpart of rhs_dq_l, for cross-validation.
// v_g_abc is the instantaneous grid voltage triple.
struct AbcState {
    double v_dc = 0.0;
    ThreePhase i;
};

inline AbcState rhs_abc_l(const AbcState& x, const ThreePhase& m, double i_dc,
                          const ThreePhase& v_g_abc, const PlantParams& g) {
    if (!(x.v_dc > 0.0)) throw NonPhysicalState("rhs_abc_l: v_dc <= 0");
    const auto sw = averaged_switch(m, x.i, x.v_dc);
    AbcState d;
    d.v_dc = (i_dc - g.g_dc * x.v_dc - sw.i_s) / g.c_dc;
    d.i.a = (sw.v_s.a - g.r * x.i.a - v_g_abc.a) / g.l;
    d.i.b = (sw.v_s.b - g.r * x.i.b - v_g_abc.b) / g.l;
    d.i.c = (sw.v_s.c - g.r * x.i.c - v_g_abc.c) / g.l;
    return d;
}

// Energy bookkeeping along the dc-link equation. de_p is evaluated from the
// same balance that drives v_dc, so de_p = p_dc - p_loss - p_ac exactly.
inline EnergyReport energy_report(const SysState& x, double i_dc, double mu,
                                  const PlantParams& g) {
    const double c = std::cos(x.delta);
    const double s = std::sin(x.delta);
    const double i_s = 1.5 * mu * (x.i_d * c + x.i_q * s);
    EnergyReport rep;
    rep.e_p = 0.5 * g.c_dc * x.v_dc * x.v_dc;
    rep.p_dc = x.v_dc * i_dc;
    rep.p_loss = g.g_dc * x.v_dc * x.v_dc;
    rep.p_ac = x.v_dc * i_s;
    rep.de_p = x.v_dc * (i_dc - g.g_dc * x.v_dc - i_s);
    return rep;
}

// ---------------------------------------------------------------------------
// LC output filter connected to a weak grid: converter RL branch (l, r) into
// capacitor node c_f, grid branch (l_g, r_g) to the stiff source. The frame
// rotates at omega_frame (grid frequency when a grid is present).

struct LcPlantState {
    double delta = 0.0;  // converter angle relative to the simulation frame (rad)
    double v_dc = 0.0;   // dc-link voltage (V)
    Dq i_f;              // converter-side filter current (A)
    Dq v_c;              // capacitor / PCC voltage (V)
    Dq i_g;              // grid-side current (A)
};

struct LcInput {
    Dq mu;              // modulation in the converter's own dq frame
    double i_dc = 0.0;  // dc source current (A)
};

inline LcPlantState rhs_dq_lc(const LcPlantState& x, const LcInput& u, const PlantParams& g,
                              double omega_cmd, double omega_g) {
    if (!(x.v_dc > 0.0)) throw NonPhysicalState("rhs_dq_lc: v_dc <= 0");
    if (!(g.c_f > 0.0)) throw ConfigError("rhs_dq_lc: c_f must be > 0");
    if (!(g.l_g > 0.0)) throw ConfigError("rhs_dq_lc: l_g must be > 0");
    const Dq m = rotate(u.mu, x.delta);  // modulation in the simulation frame
    const Dq v_s{m.d * x.v_dc, m.q * x.v_dc};
    const double w = omega_g;
    LcPlantState d;
    d.delta = omega_cmd - omega_g;
    d.v_dc = (u.i_dc - g.g_dc * x.v_dc - switch_current_dq(m, x.i_f)) / g.c_dc;
    d.i_f.d = (v_s.d - g.r * x.i_f.d + w * g.l * x.i_f.q - x.v_c.d) / g.l;
    d.i_f.q = (v_s.q - g.r * x.i_f.q - w * g.l * x.i_f.d - x.v_c.q) / g.l;
    d.v_c.d = (x.i_f.d - x.i_g.d + w * g.c_f * x.v_c.q) / g.c_f;
    d.v_c.q = (x.i_f.q - x.i_g.q - w * g.c_f * x.v_c.d) / g.c_f;
    d.i_g.d = (x.v_c.d - g.r_g * x.i_g.d + w * g.l_g * x.i_g.q - g.v0) / g.l_g;
    d.i_g.q = (x.v_c.q - g.r_g * x.i_g.q - w * g.l_g * x.i_g.d) / g.l_g;
    return d;
}

// Islanded LC variant: grid branch replaced by a resistive load at the PCC.
// i_g is the (algebraic) load current v_c / r_load; the state's i_g entries
// are unused. omega_frame is the fixed common reference frame speed.
struct IslandPlantState {
    double delta = 0.0;
    double v_dc = 0.0;
    Dq i_f;
    Dq v_c;
};

inline IslandPlantState rhs_dq_lc_island(const IslandPlantState& x, const LcInput& u,
                                         const PlantParams& g, double r_load,
                                         double omega_cmd, double omega_frame) {
    if (!(x.v_dc > 0.0)) throw NonPhysicalState("rhs_dq_lc_island: v_dc <= 0");
    if (!(g.c_f > 0.0)) throw ConfigError("rhs_dq_lc_island: c_f must be > 0");
    if (!(r_load > 0.0)) throw ConfigError("rhs_dq_lc_island: r_load must be > 0");
    const Dq m = rotate(u.mu, x.delta);
    const Dq v_s{m.d * x.v_dc, m.q * x.v_dc};
    const Dq i_load{x.v_c.d / r_load, x.v_c.q / r_load};
    const double w = omega_frame;
    IslandPlantState d;
    d.delta = omega_cmd - omega_frame;
    d.v_dc = (u.i_dc - g.g_dc * x.v_dc - switch_current_dq(m, x.i_f)) / g.c_dc;
    d.i_f.d = (v_s.d - g.r * x.i_f.d + w * g.l * x.i_f.q - x.v_c.d) / g.l;
    d.i_f.q = (v_s.q - g.r * x.i_f.q - w * g.l * x.i_f.d - x.v_c.q) / g.l;
    d.v_c.d = (x.i_f.d - i_load.d + w * g.c_f * x.v_c.q) / g.c_f;
    d.v_c.q = (x.i_f.q - i_load.q - w * g.c_f * x.v_c.d) / g.c_f;
    return d;
}

// ---------------------------------------------------------------------------
// Two LC-filtered converters joined through RL lines at a middle bus with a
// resistive load. The bus voltage is algebraic: v_bus = r_load (i_l1 + i_l2).
// The common reference frame rotates at omega_frame (nominal frequency).

struct RlLine {
    double r = 0.064;     // line resistance (Ohm)
    double l = 0.56e-3;   // line inductance (H)
};

struct TwoConvPlantState {
    double delta = 0.0;  // converter angle relative to the common frame (rad)
    double v_dc = 0.0;
    Dq i_f;
    Dq v_c;
    Dq i_l;  // line current, converter PCC -> bus (A)
};

inline Dq two_converter_bus_voltage(const TwoConvPlantState& x1, const TwoConvPlantState& x2,
                                    double r_load) {
    return {r_load * (x1.i_l.d + x2.i_l.d), r_load * (x1.i_l.q + x2.i_l.q)};
}

inline std::array<TwoConvPlantState, 2> rhs_two_converter(
    const TwoConvPlantState& x1, const TwoConvPlantState& x2, const LcInput& u1,
    const LcInput& u2, const std::array<RlLine, 2>& lines, double r_load,
    const std::array<PlantParams, 2>& g, double omega_cmd1, double omega_cmd2,
    double omega_frame) {
    if (!(r_load > 0.0)) throw ConfigError("rhs_two_converter: r_load must be > 0");
    const Dq v_bus = two_converter_bus_voltage(x1, x2, r_load);
    const double w = omega_frame;

    auto one = [&](const TwoConvPlantState& x, const LcInput& u, const RlLine& line,
                   const PlantParams& p, double omega_cmd) {
        if (!(x.v_dc > 0.0)) throw NonPhysicalState("rhs_two_converter: v_dc <= 0");
        const Dq m = rotate(u.mu, x.delta);
        const Dq v_s{m.d * x.v_dc, m.q * x.v_dc};
        TwoConvPlantState d;
        d.delta = omega_cmd - omega_frame;
        d.v_dc = (u.i_dc - p.g_dc * x.v_dc - switch_current_dq(m, x.i_f)) / p.c_dc;
        d.i_f.d = (v_s.d - p.r * x.i_f.d + w * p.l * x.i_f.q - x.v_c.d) / p.l;
        d.i_f.q = (v_s.q - p.r * x.i_f.q - w * p.l * x.i_f.d - x.v_c.q) / p.l;
        d.v_c.d = (x.i_f.d - x.i_l.d + w * p.c_f * x.v_c.q) / p.c_f;
        d.v_c.q = (x.i_f.q - x.i_l.q - w * p.c_f * x.v_c.d) / p.c_f;
        d.i_l.d = (x.v_c.d - line.r * x.i_l.d + w * line.l * x.i_l.q - v_bus.d) / line.l;
        d.i_l.q = (x.v_c.q - line.r * x.i_l.q - w * line.l * x.i_l.d - v_bus.q) / line.l;
        return d;
    };

    return {one(x1, u1, lines[0], g[0], omega_cmd1), one(x2, u2, lines[1], g[1], omega_cmd2)};
}

}  // namespace hac
