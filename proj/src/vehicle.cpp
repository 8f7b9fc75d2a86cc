#include "morphsweep/vehicle.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "morphsweep/errors.hpp"

namespace morphsweep {

namespace {

struct sensed_rate {
    double dx;
    double dy;
    double dalpha;
    double v;
    double s1;
    double s2;
};

inline double inverse_square(double px, double py, double floor_sq) {
    const double d2 = px * px + py * py;
    return 1.0 / (d2 > floor_sq ? d2 : floor_sq);
}

// Sensor readings and the resulting motor command at one pose. The sensor
// offsets are rotated with the same (cos, sin) pair used for the heading, and
// every operation is sign-symmetric in (y, alpha) so that mirrored runs stay
// bitwise mirrored.
inline sensed_rate sense(double x, double y, double alpha, const sensor_layout& layout,
                         const controller_weights& w, double floor_sq) {
    const double c = std::cos(alpha);
    const double s = std::sin(alpha);
    const double s1 = inverse_square(x + (c * layout.l1.x - s * layout.l1.y),
                                     y + (s * layout.l1.x + c * layout.l1.y), floor_sq);
    const double s2 = inverse_square(x + (c * layout.l2.x - s * layout.l2.y),
                                     y + (s * layout.l2.x + c * layout.l2.y), floor_sq);
    const double a = w.w1 * s1;
    const double b = w.w2 * s2;
    const double v = (a + b) * 0.5;
    return {v * c, v * s, a - b, v, s1, s2};
}

// Same as sense() but with speeds clamped before they are turned into rates.
inline sensed_rate sense_saturated(double x, double y, double alpha, const sensor_layout& layout,
                                   const controller_weights& w, double floor_sq,
                                   const saturation_limits& lim) {
    const double c = std::cos(alpha);
    const double s = std::sin(alpha);
    const double s1 = inverse_square(x + (c * layout.l1.x - s * layout.l1.y),
                                     y + (s * layout.l1.x + c * layout.l1.y), floor_sq);
    const double s2 = inverse_square(x + (c * layout.l2.x - s * layout.l2.y),
                                     y + (s * layout.l2.x + c * layout.l2.y), floor_sq);
    const double a = w.w1 * s1;
    const double b = w.w2 * s2;
    const double v = std::clamp((a + b) * 0.5, -lim.v_max, lim.v_max);
    const double omega = std::clamp(a - b, -lim.omega_max, lim.omega_max);
    return {v * c, v * s, omega, v, s1, s2};
}

[[noreturn]] void diverged(const robot_state& st, std::int64_t step) {
    std::ostringstream msg;
    msg.precision(17);
    msg << "non-finite state at step " << step << ": x=" << st.x << " y=" << st.y
        << " alpha=" << st.alpha;
    throw numerical_divergence(msg.str());
}

// Shared driver: `advance` maps a pose to the next one, `probe` gives the
// trajectory sample (sensor values and commanded speed) at a pose.
template <class Advance, class Probe>
sim_outcome run(const robot_state& initial, const sim_config& cfg, bool record, Advance advance,
                Probe probe) {
    cfg.validate();
    sim_outcome out;
    if (record) out.trajectory.emplace();

    auto push = [&](const robot_state& st) {
        const sensed_rate r = probe(st);
        out.trajectory->push_back({st.t, st.x, st.y, st.alpha, r.s1, r.s2, r.v});
    };

    robot_state st = initial;
    double min_d2 = st.x * st.x + st.y * st.y;
    if (record) push(st);

    const std::int64_t every = cfg.record_every;
    std::int64_t step = 0;
    bool stopped = cfg.early_stop && std::sqrt(min_d2) <= cfg.success_radius;
    while (!stopped && step < cfg.steps) {
        ++step;
        st = advance(st);
        st.t = initial.t + static_cast<double>(step) * cfg.dt;
        if (!std::isfinite(st.x) || !std::isfinite(st.y) || !std::isfinite(st.alpha)) {
            diverged(st, step);
        }
        const double d2 = st.x * st.x + st.y * st.y;
        if (d2 < min_d2) {
            min_d2 = d2;
            if (cfg.early_stop && std::sqrt(min_d2) <= cfg.success_radius) stopped = true;
        }
        if (record && (step % every == 0 || stopped || step == cfg.steps)) push(st);
    }

    out.min_distance = std::sqrt(min_d2);
    out.success = out.min_distance <= cfg.success_radius;
    out.steps_taken = step;
    out.final_state = st;
    return out;
}

}  // namespace

sim_config sim_config::theoretical() { return sim_config{}; }

sim_config sim_config::saturated() {
    sim_config cfg;
    cfg.dt = 0.05;
    cfg.steps = 2500;
    cfg.saturation = saturation_limits{};
    return cfg;
}

void sim_config::validate() const {
    if (!(dt > 0.0) || !std::isfinite(dt)) throw config_error("dt must be a positive finite number");
    if (steps < 1) throw config_error("steps must be >= 1");
    if (!(success_radius > 0.0)) throw config_error("success radius must be > 0");
    if (!(distance_floor > 0.0) || !(distance_floor < success_radius)) {
        throw config_error("distance floor must satisfy 0 < floor < success radius");
    }
    if (record_every < 1) throw config_error("trajectory downsample factor must be >= 1");
    if (saturation && (!(saturation->v_max > 0.0) || !(saturation->omega_max > 0.0))) {
        throw config_error("saturation limits must be > 0");
    }
}

bool is_valid(const sensor_layout& layout) {
    auto ok = [](double c) { return c >= -body_half_extent && c <= body_half_extent; };
    return ok(layout.l1.x) && ok(layout.l1.y) && ok(layout.l2.x) && ok(layout.l2.y);
}

bool is_valid(const controller_weights& weights) {
    auto ok = [](double w) { return w >= -weight_limit && w <= weight_limit; };
    return ok(weights.w1) && ok(weights.w2);
}

matrix2 rotation_matrix(double alpha) {
    const double c = std::cos(alpha);
    const double s = std::sin(alpha);
    return {{{c, -s}, {s, c}}};
}

vec2 sensor_world_position(const robot_state& state, vec2 offset) {
    const double c = std::cos(state.alpha);
    const double s = std::sin(state.alpha);
    return {state.x + (c * offset.x - s * offset.y), state.y + (s * offset.x + c * offset.y)};
}

double sensor_value(const robot_state& state, vec2 offset, double floor) {
    const vec2 p = sensor_world_position(state, offset);
    return inverse_square(p.x, p.y, floor * floor);
}

state_rate derivatives(const robot_state& state, const sensor_layout& layout,
                       const controller_weights& weights, double floor) {
    const sensed_rate r = sense(state.x, state.y, state.alpha, layout, weights, floor * floor);
    return {r.dx, r.dy, r.dalpha};
}

sim_outcome integrate(const robot_state& initial, const sensor_layout& layout,
                      const controller_weights& weights, const sim_config& cfg,
                      bool record_trajectory) {
    const double h = cfg.dt;
    const double half = 0.5 * h;
    const double sixth = h / 6.0;
    const double floor_sq = cfg.distance_floor * cfg.distance_floor;

    auto advance = [&](const robot_state& s) {
        const sensed_rate k1 = sense(s.x, s.y, s.alpha, layout, weights, floor_sq);
        const sensed_rate k2 = sense(s.x + half * k1.dx, s.y + half * k1.dy,
                                     s.alpha + half * k1.dalpha, layout, weights, floor_sq);
        const sensed_rate k3 = sense(s.x + half * k2.dx, s.y + half * k2.dy,
                                     s.alpha + half * k2.dalpha, layout, weights, floor_sq);
        const sensed_rate k4 = sense(s.x + h * k3.dx, s.y + h * k3.dy, s.alpha + h * k3.dalpha,
                                     layout, weights, floor_sq);
        robot_state next = s;
        next.x += sixth * (k1.dx + 2.0 * k2.dx + 2.0 * k3.dx + k4.dx);
        next.y += sixth * (k1.dy + 2.0 * k2.dy + 2.0 * k3.dy + k4.dy);
        next.alpha += sixth * (k1.dalpha + 2.0 * k2.dalpha + 2.0 * k3.dalpha + k4.dalpha);
        return next;
    };
    auto probe = [&](const robot_state& s) {
        return sense(s.x, s.y, s.alpha, layout, weights, floor_sq);
    };
    return run(initial, cfg, record_trajectory, advance, probe);
}

sim_outcome integrate_saturated(const robot_state& initial, const sensor_layout& layout,
                                const controller_weights& weights, const sim_config& cfg,
                                bool record_trajectory) {
    if (!cfg.saturation) throw config_error("saturated model requires saturation limits");
    const saturation_limits lim = *cfg.saturation;
    const double h = cfg.dt;
    const double floor_sq = cfg.distance_floor * cfg.distance_floor;

    auto advance = [&](const robot_state& s) {
        const sensed_rate r = sense_saturated(s.x, s.y, s.alpha, layout, weights, floor_sq, lim);
        robot_state next = s;
        next.x += h * r.dx;
        next.y += h * r.dy;
        next.alpha += h * r.dalpha;
        return next;
    };
    auto probe = [&](const robot_state& s) {
        return sense_saturated(s.x, s.y, s.alpha, layout, weights, floor_sq, lim);
    };
    return run(initial, cfg, record_trajectory, advance, probe);
}

}  // namespace morphsweep
