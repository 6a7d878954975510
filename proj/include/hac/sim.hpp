#pragma once

// Fixed-step integration of composed plant+controller systems with event
// scheduling, discrete controller-rate execution (zero-order hold) and
// decimated trajectory logging. No adaptive stepping: runs are reproducible
// bit-for-bit and controller updates stay aligned with step boundaries.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <string>
#include <vector>

#include "hac/errors.hpp"

namespace hac {

// Small fixed-size state vector with the arithmetic RK4 needs.
template <std::size_t N>
struct StateVec {
    std::array<double, N> v{};

    static constexpr std::size_t size() { return N; }
    double& operator[](std::size_t i) { return v[i]; }
    double operator[](std::size_t i) const { return v[i]; }

    friend StateVec operator+(StateVec a, const StateVec& b) {
        for (std::size_t i = 0; i < N; ++i) a.v[i] += b.v[i];
        return a;
    }
    friend StateVec operator*(double s, StateVec a) {
        for (std::size_t i = 0; i < N; ++i) a.v[i] *= s;
        return a;
    }

    bool all_finite() const {
        for (double x : v)
            if (!std::isfinite(x)) return false;
        return true;
    }
};

// Classical 4th-order Runge-Kutta update; local error O(h^5).
template <class Rhs, class State>
State rk4_step(Rhs&& f, const State& x, double t, double h) {
    if (!(h > 0.0)) throw ConfigError("rk4_step: h must be > 0");
    const State k1 = f(x, t);
    const State k2 = f(x + (0.5 * h) * k1, t + 0.5 * h);
    const State k3 = f(x + (0.5 * h) * k2, t + 0.5 * h);
    const State k4 = f(x + h * k3, t + h);
    return x + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
}

// ---------------------------------------------------------------------------
// Events

enum class EventKind { set_load, set_p_ref, set_grid_freq, set_v_dc_ref, set_gain };

struct Event {
    double t = 0.0;
    EventKind kind = EventKind::set_load;
    double value = 0.0;
    std::string path;  // config path, set_gain only

    static Event load(double t, double r_load) { return {t, EventKind::set_load, r_load, {}}; }
    static Event p_ref(double t, double watts) { return {t, EventKind::set_p_ref, watts, {}}; }
    static Event grid_freq(double t, double omega) {
        return {t, EventKind::set_grid_freq, omega, {}};
    }
    static Event v_dc_ref(double t, double volts) {
        return {t, EventKind::set_v_dc_ref, volts, {}};
    }
    static Event gain(double t, std::string path, double value) {
        return {t, EventKind::set_gain, value, std::move(path)};
    }
};

// ---------------------------------------------------------------------------
// Trajectory log: uniformly sampled records of named channels.

struct TrajectoryLog {
    std::vector<std::string> channels;          // names, excluding time
    std::vector<double> t;                      // sample instants (s)
    std::vector<std::vector<double>> samples;   // samples[k][channel]
    double sample_period = 0.0;

    std::size_t channel_index(const std::string& name) const {
        for (std::size_t i = 0; i < channels.size(); ++i)
            if (channels[i] == name) return i;
        throw ConfigError("TrajectoryLog: unknown channel " + name);
    }

    std::vector<double> column(const std::string& name) const {
        const std::size_t ci = channel_index(name);
        std::vector<double> out(samples.size());
        for (std::size_t k = 0; k < samples.size(); ++k) out[k] = samples[k][ci];
        return out;
    }

    bool empty() const { return t.empty(); }
};

// ---------------------------------------------------------------------------
// Simulation driver

enum class CtrlMode { discrete, continuous };

struct SimOptions {
    double t_start = 0.0;
    double t_stop = 2.0;
    double h = 20e-6;             // plant integration step (s)
    double ctrl_rate_hz = 5000.0; // discrete controller execution rate
    int decimation = 10;          // log every decimation-th step
    CtrlMode mode = CtrlMode::discrete;
    bool log_enabled = true;
};

// Integrates sys from x over [t_start, t_stop]. Events are snapped to the
// nearest step boundary and applied exactly once, before the step (and before
// the controller update at that instant). In discrete mode the controller
// runs every ctrl-period and its outputs are held between updates.
//
// System requirements:
//   using State = StateVec<N>;
//   void set_mode(CtrlMode);
//   State rhs(const State&, double t) const;
//   void ctrl_update(State&, double t);             (discrete mode)
//   void apply(const Event&, State&);
//   void validate_state(const State&) const;        (throws NonPhysicalState)
//   std::vector<std::string> channel_names() const;
//   void log_sample(const State&, double t, std::vector<double>& out) const;
template <class System>
TrajectoryLog simulate(System& sys, typename System::State& x, std::vector<Event> events,
                       const SimOptions& opt) {
    if (!(opt.h > 0.0)) throw ConfigError("simulate: h must be > 0");
    if (!(opt.t_stop > opt.t_start)) throw ConfigError("simulate: t_stop must exceed t_start");
    if (opt.decimation < 1) throw ConfigError("simulate: decimation must be >= 1");

    const long long steps = std::llround((opt.t_stop - opt.t_start) / opt.h);
    if (steps < 1) throw ConfigError("simulate: span shorter than one step");

    long long ctrl_every = 0;
    if (opt.mode == CtrlMode::discrete) {
        if (!(opt.ctrl_rate_hz > 0.0)) throw ConfigError("simulate: ctrl_rate_hz must be > 0");
        const double period = 1.0 / opt.ctrl_rate_hz;
        ctrl_every = std::llround(period / opt.h);
        if (ctrl_every < 1 || std::abs(ctrl_every * opt.h - period) > 1e-9 * period)
            throw ConfigError("simulate: h must divide the controller period");
    }

    struct Pending {
        long long step;
        Event ev;
    };
    std::vector<Pending> pending;
    pending.reserve(events.size());
    for (auto& e : events) {
        if (e.t < opt.t_start - 0.5 * opt.h)
            throw ConfigError("simulate: event scheduled before t_start");
        long long idx = std::llround((e.t - opt.t_start) / opt.h);
        if (idx < 0) idx = 0;
        if (idx > steps) idx = steps;
        pending.push_back({idx, std::move(e)});
    }
    std::stable_sort(pending.begin(), pending.end(),
                     [](const Pending& a, const Pending& b) { return a.step < b.step; });

    sys.set_mode(opt.mode);

    TrajectoryLog log;
    log.channels = sys.channel_names();
    log.sample_period = opt.decimation * opt.h;
    std::vector<double> record(log.channels.size());

    std::size_t next_event = 0;
    auto rhs = [&sys](const typename System::State& s, double tt) { return sys.rhs(s, tt); };

    for (long long k = 0; k <= steps; ++k) {
        const double t = opt.t_start + static_cast<double>(k) * opt.h;

        while (next_event < pending.size() && pending[next_event].step == k) {
            sys.apply(pending[next_event].ev, x);
            ++next_event;
        }
        if (opt.mode == CtrlMode::discrete && k % ctrl_every == 0) sys.ctrl_update(x, t);

        if (opt.log_enabled && k % opt.decimation == 0) {
            sys.log_sample(x, t, record);
            log.t.push_back(t);
            log.samples.push_back(record);
        }
        if (k == steps) break;

        x = rk4_step(rhs, x, t, opt.h);
        if (!x.all_finite())
            throw NonFiniteDerivative("simulate: non-finite state at t=" + std::to_string(t));
        sys.validate_state(x);
    }
    return log;
}

}  // namespace hac
