#pragma once

// Coordinate transforms (abc <-> alphabeta <-> dq), angle arithmetic and the
// per-unit base shared by the rest of the toolkit.
//
// Conventions, fixed once for the whole library:
//  * amplitude-invariant Clarke (2/3 scaling): a balanced set with phase
//    amplitude M maps to an alphabeta vector of magnitude M. Instantaneous
//    three-phase power therefore carries an explicit 3/2 factor; see
//    plant.hpp.
//  * positive phase sequence a-b-c: x_a = M cos(th), x_b = M cos(th - 2pi/3),
//    x_c = M cos(th + 2pi/3).
//  * Park rotation d + jq = e^{-j theta} (alpha + j beta).
//  * zero-sequence is discarded (balanced networks only).

#include <cmath>
#include <numbers>

#include "hac/errors.hpp"

namespace hac {

inline constexpr double two_pi = 2.0 * std::numbers::pi;
inline constexpr double two_pi_3 = two_pi / 3.0;

// Instantaneous values of a three-phase signal (V or A).
struct ThreePhase {
    double a = 0.0;
    double b = 0.0;
    double c = 0.0;
};

// Stationary two-axis (alphabeta) components, same units as the source.
struct TwoAxis {
    double alpha = 0.0;
    double beta = 0.0;
};

// Rotating-frame components.
struct Dq {
    double d = 0.0;
    double q = 0.0;
};

// Per-unit normalization base. i_base follows from the amplitude-invariant
// scaling: p_b = (3/2) v_base i_base at rated phase-peak voltage/current.
struct PerUnitBase {
    double p_b = 0.0;     // base power (VA)
    double f_b = 0.0;     // base frequency (Hz)
    double v_base = 0.0;  // base voltage (V, phase peak)

    double i_base() const { return (2.0 / 3.0) * p_b / v_base; }
    double omega_b() const { return two_pi * f_b; }

    void validate() const {
        if (!(p_b > 0.0) || !(f_b > 0.0) || !(v_base > 0.0))
            throw ConfigError("PerUnitBase: p_b, f_b and v_base must be strictly positive");
    }
};

// Wrap an angle into (-pi, pi].
inline double wrap_to_pi(double angle) {
    double w = std::remainder(angle, two_pi);
    if (w <= -std::numbers::pi) w += two_pi;
    return w;
}

// Amplitude-invariant Clarke transform; zero-sequence discarded.
inline TwoAxis abc_to_alphabeta(const ThreePhase& x) {
    return {(2.0 / 3.0) * (x.a - 0.5 * x.b - 0.5 * x.c),
            (2.0 / 3.0) * (std::numbers::sqrt3 / 2.0) * (x.b - x.c)};
}

// Inverse Clarke for a balanced (zero-sequence-free) signal.
inline ThreePhase alphabeta_to_abc(const TwoAxis& x) {
    const double half_sqrt3_beta = (std::numbers::sqrt3 / 2.0) * x.beta;
    return {x.alpha, -0.5 * x.alpha + half_sqrt3_beta, -0.5 * x.alpha - half_sqrt3_beta};
}

// Park rotation by theta: d + jq = e^{-j theta} (alpha + j beta).
inline Dq alphabeta_to_dq(const TwoAxis& x, double theta) {
    const double c = std::cos(theta);
    const double s = std::sin(theta);
    return {x.alpha * c + x.beta * s, -x.alpha * s + x.beta * c};
}

inline TwoAxis dq_to_alphabeta(const Dq& x, double theta) {
    const double c = std::cos(theta);
    const double s = std::sin(theta);
    return {x.d * c - x.q * s, x.d * s + x.q * c};
}

inline ThreePhase dq_to_abc(const Dq& x, double theta) {
    return alphabeta_to_abc(dq_to_alphabeta(x, theta));
}

inline Dq abc_to_dq(const ThreePhase& x, double theta) {
    return alphabeta_to_dq(abc_to_alphabeta(x), theta);
}

// Rotate a dq vector by angle (frame change by -angle).
inline Dq rotate(const Dq& x, double angle) {
    const double c = std::cos(angle);
    const double s = std::sin(angle);
    return {x.d * c - x.q * s, x.d * s + x.q * c};
}

inline double magnitude(const TwoAxis& x) { return std::hypot(x.alpha, x.beta); }
inline double magnitude(const Dq& x) { return std::hypot(x.d, x.q); }

// Balanced positive-sequence triple with phase amplitude mag at angle theta.
inline ThreePhase balanced_abc(double mag, double theta) {
    return {mag * std::cos(theta), mag * std::cos(theta - two_pi_3),
            mag * std::cos(theta + two_pi_3)};
}

}  // namespace hac
