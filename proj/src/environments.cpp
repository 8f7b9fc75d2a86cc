#include "morphsweep/environments.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

#include "morphsweep/errors.hpp"

namespace morphsweep {

namespace {

// (cos, sin) of an angle in degrees, evaluated on the reference angle in the
// first quadrant so that reflected bearings give exactly negated sines.
vec2 unit_direction_deg(double deg) {
    double a = std::fmod(deg, 360.0);
    if (a < 0.0) a += 360.0;
    double ref = a;
    double sx = 1.0;
    double sy = 1.0;
    if (a > 270.0) {
        ref = 360.0 - a;
        sy = -1.0;
    } else if (a > 180.0) {
        ref = a - 180.0;
        sx = -1.0;
        sy = -1.0;
    } else if (a > 90.0) {
        ref = 180.0 - a;
        sx = -1.0;
    }
    const double rad = ref * (std::numbers::pi / 180.0);
    return {sx * std::cos(rad), sy * std::sin(rad)};
}

}  // namespace

environment_set make_environments(double radius, double success_radius) {
    if (!std::isfinite(radius) || !(radius > success_radius)) {
        throw invalid_radius("light distance " + std::to_string(radius) +
                             " must exceed the success radius " + std::to_string(success_radius));
    }
    environment_set envs;
    for (std::size_t k = 0; k < env_count; ++k) {
        const vec2 u = unit_direction_deg(env_bearings_deg[k]);
        envs[k].id = static_cast<int>(k) + 1;
        envs[k].bearing_deg = env_bearings_deg[k];
        envs[k].radius = radius;
        envs[k].initial_state = {-radius * u.x, -radius * u.y, 0.0, 0.0};
    }
    return envs;
}

uniform_axis::uniform_axis(int count, double half_width) : count_(count), half_width_(half_width) {
    if (count < 2) throw config_error("grid resolution must be >= 2, got " + std::to_string(count));
}

double uniform_axis::operator[](int i) const {
    const int span = count_ - 1;
    return half_width_ * static_cast<double>(2 * i - span) / static_cast<double>(span);
}

int uniform_axis::index_of(double value) const {
    const double approx = (value / half_width_ + 1.0) * 0.5 * (count_ - 1);
    const long guess = std::lround(approx);
    for (long i = guess - 1; i <= guess + 1; ++i) {
        if (i >= 0 && i < count_ && (*this)[static_cast<int>(i)] == value) return static_cast<int>(i);
    }
    return -1;
}

design_grid::design_grid(int positions_per_axis) : axis_(positions_per_axis, body_half_extent) {
    const int n = positions_per_axis;
    designs_.reserve(static_cast<std::size_t>(n) * n * n * n);
    for (int a = 0; a < n; ++a)
        for (int b = 0; b < n; ++b)
            for (int c = 0; c < n; ++c)
                for (int d = 0; d < n; ++d)
                    designs_.push_back({{axis_[a], axis_[b]}, {axis_[c], axis_[d]}});
}

std::size_t design_grid::index_of(const sensor_layout& layout) const {
    const int idx[4] = {axis_.index_of(layout.l1.x), axis_.index_of(layout.l1.y),
                        axis_.index_of(layout.l2.x), axis_.index_of(layout.l2.y)};
    std::size_t out = 0;
    const auto n = static_cast<std::size_t>(axis_.size());
    for (int i : idx) {
        if (i < 0) throw std::out_of_range("sensor layout is not a design grid point");
        out = out * n + static_cast<std::size_t>(i);
    }
    return out;
}

weight_grid::weight_grid(int values_per_axis) : axis_(values_per_axis, weight_limit) {
    const int n = values_per_axis;
    weights_.reserve(static_cast<std::size_t>(n) * n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) weights_.push_back({axis_[i], axis_[j]});
}

design_grid make_design_grid(int positions_per_axis) { return design_grid(positions_per_axis); }

weight_grid make_weight_grid(int values_per_axis) { return weight_grid(values_per_axis); }

sensor_layout mirror_design(const sensor_layout& layout) {
    // "+ 0.0" keeps a centred sensor at +0 instead of -0.
    return {{layout.l2.x, -layout.l2.y + 0.0}, {layout.l1.x, -layout.l1.y + 0.0}};
}

}  // namespace morphsweep
