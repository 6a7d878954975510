#pragma once

// Controller laws: dc-source PID, the grid-forming hybrid angle law and its
// power / arctan / energy variants, the measurement-based construction of the
// synchronization term, feedforward modulation magnitude, cascaded PI
// voltage/current loops and first-order measurement filters.

#include <algorithm>
#include <cmath>

#include "hac/errors.hpp"
#include "hac/frames.hpp"

namespace hac {

// ---------------------------------------------------------------------------
// dc energy source control

struct DcPidGains {
    double kappa_p = 10.0;   // proportional gain (A/V)
    double kappa_i = 500.0;  // integral gain (A/(V*s))
    double kappa_d = 0.0;    // derivative gain (A*s/V); implemented, off by default

    void validate() const {
        if (kappa_p < 0.0 || kappa_i < 0.0 || kappa_d < 0.0)
            throw ConfigError("DcPidGains: gains must be nonnegative");
    }
};

// i_dc = -kp (v_dc - v_dc_r) - ki zeta - kd dv_dc; zeta integrated externally.
inline double dc_source_pid(double v_dc, double v_dc_r, double zeta, double dv_dc,
                            const DcPidGains& g) {
    return -g.kappa_p * (v_dc - v_dc_r) - g.kappa_i * zeta - g.kappa_d * dv_dc;
}

// ---------------------------------------------------------------------------
// Hybrid angle control

enum class HacVariant { exact, power, arctan, energy };

struct HacGains {
    double omega0 = two_pi * 60.0;  // nominal frequency (rad/s)
    double kappa_dc = 0.18;         // dc matching gain (rad/s per V)
    double kappa_ac = 0.0;          // ac synchronization gain, exact form (rad/s)
    double kappa_ac_bar = 0.0;      // droop gain, power form (rad/s per W)
    double delta_r = 0.0;           // relative angle reference (rad)
    double p_r = 0.0;               // active power reference (W)
    double v_dc_r = 3.0 * 326.59;   // dc voltage reference (V)
    HacVariant variant = HacVariant::exact;
    double kappa_ac1 = 0.0;   // arctan variant outer gain (rad/s)
    double kappa_ac2 = 0.0;   // arctan variant inner gain (1/W)
    double kappa_dc_e = 0.0;  // energy variant dc gain (rad/s per V^2)

    void validate() const {
        if (kappa_dc < 0.0 || kappa_ac < 0.0 || kappa_ac_bar < 0.0 || kappa_ac1 < 0.0 ||
            kappa_dc_e < 0.0)
            throw ConfigError("HacGains: gains must be nonnegative");
        const bool has_dc = kappa_dc > 0.0 || (variant == HacVariant::energy && kappa_dc_e > 0.0);
        const bool has_ac = kappa_ac > 0.0 || kappa_ac_bar > 0.0 ||
                            (variant == HacVariant::arctan && kappa_ac1 > 0.0);
        if (!has_dc && !has_ac)
            throw ConfigError("HacGains: dc and ac gains cannot both be zero");
    }
};

// omega = omega0 + kdc (v_dc - v_dc_r) - kac sin((delta - delta_r)/2)
inline double hac_exact(double v_dc, double delta, const HacGains& g) {
    return g.omega0 + g.kappa_dc * (v_dc - g.v_dc_r) -
           g.kappa_ac * std::sin(0.5 * (delta - g.delta_r));
}

// Power-based approximation: omega = omega0 + kdc dv - kbar (p_filt - p_r).
inline double hac_power(double v_dc, double p_filt, const HacGains& g) {
    return g.omega0 + g.kappa_dc * (v_dc - g.v_dc_r) - g.kappa_ac_bar * (p_filt - g.p_r);
}

// Inverse tangent variant (saturating droop).
inline double hac_arctan(double v_dc, double p_filt, const HacGains& g) {
    return g.omega0 + g.kappa_dc * (v_dc - g.v_dc_r) -
           g.kappa_ac1 * std::atan(g.kappa_ac2 * (p_filt - g.p_r));
}

// Energy-like variant: dc term proportional to the dc energy error.
inline double hac_energy(double v_dc, double delta, const HacGains& g) {
    return g.omega0 + g.kappa_dc_e * (v_dc * v_dc - g.v_dc_r * g.v_dc_r) -
           g.kappa_ac * std::sin(0.5 * (delta - g.delta_r));
}

// ---------------------------------------------------------------------------
// Power-angle linearization. Under a dominantly inductive connection with
// regulated voltage magnitudes, delta ~ alpha * p with
// alpha = X_total / (1.5 |v_s| |v_g|); the 3/2 makes alpha consistent with the
// amplitude-invariant power convention used by pcc_power.

inline double power_angle_coefficient(double l_total, double omega0, double v_s_mag,
                                      double v_g_mag) {
    if (!(v_s_mag > 0.0) || !(v_g_mag > 0.0))
        throw DegenerateParams("power_angle_coefficient: voltage magnitudes must be > 0");
    return l_total * omega0 / (1.5 * v_s_mag * v_g_mag);
}

inline double delta_ref_from_power(double p_r, double alpha) { return alpha * p_r; }

// kbar = alpha * kac / 2 links the exact and power forms to first order.
inline double kappa_ac_bar_from_exact(double kappa_ac, double alpha) {
    return 0.5 * alpha * kappa_ac;
}
inline double kappa_ac_exact_from_bar(double kappa_ac_bar, double alpha) {
    if (!(alpha > 0.0)) throw DegenerateParams("kappa_ac_exact_from_bar: alpha must be > 0");
    return 2.0 * kappa_ac_bar / alpha;
}

// ---------------------------------------------------------------------------
// Measurement-based construction of sin((delta - delta_r)/2) from the
// converter modulation signal and the grid voltage, without an explicit angle
// state. Half-angle identities give |sin(delta/2)|, |cos(delta/2)|; the sign
// branch is tracked across calls by counting windings of the wrapped angle.

class SyncTermTracker {
  public:
    SyncTermTracker(double delta_r, double v_g_nominal)
        : sin_half_ref_(std::sin(0.5 * delta_r)),
          cos_half_ref_(std::cos(0.5 * delta_r)),
          v_g_nominal_(v_g_nominal) {
        if (!(v_g_nominal > 0.0))
            throw ConfigError("SyncTermTracker: nominal grid voltage must be > 0");
    }

    // Core form: converter angle given as (cos theta, sin theta).
    double step(double cos_theta, double sin_theta, const ThreePhase& v_g_abc) {
        const TwoAxis g = abc_to_alphabeta(v_g_abc);
        const double g_mag = magnitude(g);
        if (g_mag < 0.01 * v_g_nominal_)
            throw DegenerateGridVoltage("SyncTermTracker: grid voltage below 1% of nominal");
        const double m_mag = std::hypot(cos_theta, sin_theta);
        if (m_mag < 1e-12)
            throw DegenerateParams("SyncTermTracker: modulation signal vanished");
        const double cg = g.alpha / g_mag;  // cos(theta_g)
        const double sg = g.beta / g_mag;   // sin(theta_g)
        const double ct = cos_theta / m_mag;
        const double st = sin_theta / m_mag;

        const double cos_delta = ct * cg + st * sg;
        const double sin_delta = st * cg - ct * sg;
        const double wrapped = std::atan2(sin_delta, cos_delta);

        if (has_prev_) {
            const double diff = wrapped - prev_wrapped_;
            if (diff > std::numbers::pi) --winding_;
            else if (diff < -std::numbers::pi) ++winding_;
        }
        prev_wrapped_ = wrapped;
        has_prev_ = true;

        // Half-angle of the wrapped angle; wrapped/2 lies in (-pi/2, pi/2].
        const double cos_half_w = std::sqrt(std::max(0.0, 0.5 * (1.0 + cos_delta)));
        double sin_half_w;
        if (cos_half_w > 1e-9) {
            sin_half_w = 0.5 * sin_delta / cos_half_w;
        } else {
            sin_half_w = 1.0;  // wrapped == pi
        }
        // Winding parity flips both half-angle signs: sin((w + 2 pi k)/2) = (-1)^k sin(w/2).
        const double parity = (winding_ % 2 == 0) ? 1.0 : -1.0;
        const double sin_half = parity * sin_half_w;
        const double cos_half = parity * cos_half_w;

        return sin_half * cos_half_ref_ - cos_half * sin_half_ref_;
    }

    // Convenience form: converter trig extracted from the modulation triple.
    double step(const ThreePhase& m_abc, const ThreePhase& v_g_abc) {
        const TwoAxis m = abc_to_alphabeta(m_abc);
        return step(m.alpha, m.beta, v_g_abc);
    }

    void reset() {
        has_prev_ = false;
        winding_ = 0;
    }

  private:
    double sin_half_ref_;
    double cos_half_ref_;
    double v_g_nominal_;
    bool has_prev_ = false;
    double prev_wrapped_ = 0.0;
    long winding_ = 0;
};

// ---------------------------------------------------------------------------
// AC voltage control

// Feedforward modulation magnitude mu = v_r / v_dc_r.
inline double feedforward_mu(double v_r, double v_dc_r) {
    if (!(v_dc_r > 0.0)) throw ConfigError("feedforward_mu: v_dc_r must be > 0");
    const double mu = v_r / v_dc_r;
    if (mu > 1.0) throw ModulationOverflow("feedforward_mu: v_r exceeds v_dc_r");
    if (mu < 0.0) throw ConfigError("feedforward_mu: v_r must be >= 0");
    return mu;
}

// Cascaded PI gains (voltage loop -> current loop). Current-loop defaults are
// tuned for ~500 Hz bandwidth on the baseline filter (kp = wc L, ki = wc R).
struct CascadeGains {
    double kp_v = 0.1;      // voltage loop proportional (A/V)
    double ki_v = 20.0;     // voltage loop integral (A/(V*s))
    double kp_c = 0.376991; // current loop proportional (V/A)
    double ki_c = 14.1372;  // current loop integral (V/(A*s))
    bool cap_current_ff = true;   // omega C_f v decoupling in the voltage loop
    bool grid_current_ff = true;  // grid current feedforward in the voltage loop
    bool voltage_ff = true;       // PCC voltage feedforward in the current loop
    bool decoupling_ff = true;    // omega L i decoupling in the current loop
    double v_integ_limit = 2500.0;  // anti-windup clamp, voltage loop integrator (A)
    double c_integ_limit = 1200.0;  // anti-windup clamp, current loop integrator (V)

    void validate() const {
        if (kp_v < 0.0 || ki_v < 0.0 || kp_c < 0.0 || ki_c < 0.0)
            throw ConfigError("CascadeGains: gains must be nonnegative");
        if (kp_v == 0.0 && ki_v == 0.0)
            throw ConfigError("CascadeGains: voltage loop gains cannot both be zero");
        if (kp_c == 0.0 && ki_c == 0.0)
            throw ConfigError("CascadeGains: current loop gains cannot both be zero");
        if (!(v_integ_limit > 0.0) || !(c_integ_limit > 0.0))
            throw ConfigError("CascadeGains: integrator limits must be > 0");
    }
};

inline double clamp_sym(double x, double limit) { return std::clamp(x, -limit, limit); }

struct PiEval {
    Dq out;      // controller output
    Dq d_integ;  // integrator state derivative (before clamping)
};

// Voltage loop: i_ref = kp e + integ + i_g + j omega C_f v_c. All quantities
// in the converter dq frame.
inline PiEval pi_ac_voltage(const Dq& v_meas, const Dq& v_ref, const Dq& integ,
                            const CascadeGains& g, const Dq& i_g, double omega, double c_f) {
    const Dq e{v_ref.d - v_meas.d, v_ref.q - v_meas.q};
    Dq out{g.kp_v * e.d + integ.d, g.kp_v * e.q + integ.q};
    if (g.grid_current_ff) {
        out.d += i_g.d;
        out.q += i_g.q;
    }
    if (g.cap_current_ff) {
        out.d += -omega * c_f * v_meas.q;
        out.q += omega * c_f * v_meas.d;
    }
    return {out, {g.ki_v * e.d, g.ki_v * e.q}};
}

// Current loop: v_s_ref = kp e + integ + v_c + j omega L i_f.
inline PiEval pi_current(const Dq& i_meas, const Dq& i_ref, const Dq& integ,
                         const CascadeGains& g, const Dq& v_c, double omega, double l) {
    const Dq e{i_ref.d - i_meas.d, i_ref.q - i_meas.q};
    Dq out{g.kp_c * e.d + integ.d, g.kp_c * e.q + integ.q};
    if (g.voltage_ff) {
        out.d += v_c.d;
        out.q += v_c.q;
    }
    if (g.decoupling_ff) {
        out.d += -omega * l * i_meas.q;
        out.q += omega * l * i_meas.d;
    }
    return {out, {g.ki_c * e.d, g.ki_c * e.q}};
}

// ---------------------------------------------------------------------------
// First-order low-pass filter

struct Lpf1 {
    double state = 0.0;
    double omega_c = two_pi * 10.0;  // cutoff (rad/s)

    void validate() const {
        if (!(omega_c > 0.0)) throw ConfigError("Lpf1: omega_c must be > 0");
    }
};

// Exact zero-order-hold discretization: state += (1 - exp(-wc h)) (u - state).
inline Lpf1 lpf_step(Lpf1 f, double u, double h) {
    if (!(h > 0.0)) throw ConfigError("lpf_step: h must be > 0");
    if (!(f.omega_c * h < 2.0))
        throw ConfigError("lpf_step: omega_c * h must be < 2 (discrete stability)");
    f.state += (1.0 - std::exp(-f.omega_c * h)) * (u - f.state);
    return f;
}

// Continuous form, for composing filters into an ODE state.
inline double lpf_rhs(const Lpf1& f, double u) { return f.omega_c * (u - f.state); }

}  // namespace hac
