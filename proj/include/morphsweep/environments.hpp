#pragma once

#include <array>
#include <cstddef>
#include <vector>

#include "morphsweep/vehicle.hpp"

namespace morphsweep {

inline constexpr std::size_t env_count = 4;
inline constexpr std::array<double, env_count> env_bearings_deg{45.0, 135.0, 225.0, 315.0};
inline constexpr double default_radius = 3.0;

// One phototaxis task. The light is always at the world origin; the robot
// starts so that the light lies at polar (radius, bearing) relative to it.
struct environment {
    int id = 0;  // 1..4
    double bearing_deg = 0.0;
    double radius = 0.0;
    robot_state initial_state;
};

using environment_set = std::array<environment, env_count>;

// Throws invalid_radius unless radius > success_radius.
environment_set make_environments(double radius, double success_radius = 0.2);

// Position of environment `k` (0-based) after reflecting the world about the
// x-axis: 45 <-> 315, 135 <-> 225.
constexpr std::size_t mirrored_env(std::size_t k) { return env_count - 1 - k; }

// Uniform axis with inclusive endpoints at -half_width and +half_width. Values
// are computed from integer numerators so the axis is exactly symmetric.
class uniform_axis {
public:
    uniform_axis(int count, double half_width);

    int size() const { return count_; }
    double operator[](int i) const;
    // Exact lookup; returns -1 if `value` is not a grid point.
    int index_of(double value) const;

private:
    int count_;
    double half_width_;
};

// Row-major over (l1.x, l1.y, l2.x, l2.y).
class design_grid {
public:
    explicit design_grid(int positions_per_axis);

    int positions_per_axis() const { return axis_.size(); }
    std::size_t size() const { return designs_.size(); }
    const sensor_layout& operator[](std::size_t i) const { return designs_[i]; }
    const std::vector<sensor_layout>& designs() const { return designs_; }
    const uniform_axis& axis() const { return axis_; }

    // Throws std::out_of_range if the layout is not on the grid.
    std::size_t index_of(const sensor_layout& layout) const;

private:
    uniform_axis axis_;
    std::vector<sensor_layout> designs_;
};

// Row-major over (w1, w2): index = i * n + j with i the w1 index.
class weight_grid {
public:
    explicit weight_grid(int values_per_axis);

    int values_per_axis() const { return axis_.size(); }
    std::size_t size() const { return weights_.size(); }
    const controller_weights& operator[](std::size_t i) const { return weights_[i]; }
    const std::vector<controller_weights>& weights() const { return weights_; }
    const uniform_axis& axis() const { return axis_; }

private:
    uniform_axis axis_;
    std::vector<controller_weights> weights_;
};

design_grid make_design_grid(int positions_per_axis);
weight_grid make_weight_grid(int values_per_axis);

// Reflection about the sagittal plane: (reflect(l2), reflect(l1)) with
// reflect((x, y)) = (x, -y). An involution.
sensor_layout mirror_design(const sensor_layout& layout);

// True when the layout is its own mirror image.
inline bool is_sagittally_symmetric(const sensor_layout& layout) {
    return mirror_design(layout) == layout;
}

}  // namespace morphsweep
