#pragma once

#include <array>
#include <cstdint>
#include <numbers>
#include <optional>
#include <vector>

namespace morphsweep {

// Planar coordinate pair. In the robot frame (0, 0) is the body centre and
// +x points forward; body coordinates lie in [-0.5, 0.5].
struct vec2 {
    double x = 0.0;
    double y = 0.0;

    friend bool operator==(const vec2&, const vec2&) = default;
};

inline constexpr double body_half_extent = 0.5;
inline constexpr double weight_limit = 1.0;

// Placement of the two light sensors; l1 drives the first synapse, l2 the second.
struct sensor_layout {
    vec2 l1;
    vec2 l2;

    friend bool operator==(const sensor_layout&, const sensor_layout&) = default;
};

struct controller_weights {
    double w1 = 0.0;
    double w2 = 0.0;

    friend bool operator==(const controller_weights&, const controller_weights&) = default;
};

// Pose in the world frame. The light source sits at the origin; alpha = 0
// faces +x.
struct robot_state {
    double x = 0.0;
    double y = 0.0;
    double alpha = 0.0;
    double t = 0.0;

    friend bool operator==(const robot_state&, const robot_state&) = default;
};

struct saturation_limits {
    double v_max = 1.0;
    double omega_max = std::numbers::pi;
};

struct sim_config {
    double dt = 0.01;
    std::int64_t steps = 100000;
    double success_radius = 0.2;
    double distance_floor = 1e-3;
    bool early_stop = true;
    std::optional<saturation_limits> saturation;
    // Trajectory downsampling: keep step 0, every k-th step, and the last step.
    std::int64_t record_every = 1;

    // Defaults of the continuous model (fixed-step RK4).
    static sim_config theoretical();
    // Defaults of the discrete saturated-motor surrogate (explicit Euler).
    static sim_config saturated();

    // Throws config_error if any field is out of range.
    void validate() const;
};

struct trajectory_sample {
    double t = 0.0;
    double x = 0.0;
    double y = 0.0;
    double alpha = 0.0;
    double s1 = 0.0;
    double s2 = 0.0;
    double v = 0.0;
};

struct sim_outcome {
    bool success = false;
    double min_distance = 0.0;
    std::int64_t steps_taken = 0;
    robot_state final_state;
    std::optional<std::vector<trajectory_sample>> trajectory;
};

using matrix2 = std::array<std::array<double, 2>, 2>;

struct state_rate {
    double dx = 0.0;
    double dy = 0.0;
    double dalpha = 0.0;
};

bool is_valid(const sensor_layout& layout);
bool is_valid(const controller_weights& weights);

// Counterclockwise rotation by alpha radians.
matrix2 rotation_matrix(double alpha);

// World position of a sensor mounted at body offset `offset`.
vec2 sensor_world_position(const robot_state& state, vec2 offset);

// Inverse-square intensity of the light at the origin, with the distance
// clamped below at `floor`.
double sensor_value(const robot_state& state, vec2 offset, double floor);

state_rate derivatives(const robot_state& state, const sensor_layout& layout,
                       const controller_weights& weights, double floor);

// Fixed-step classical Runge-Kutta integration of the vehicle ODE. Success is
// evaluated on the robot centre at step endpoints. Throws numerical_divergence
// if the state stops being finite.
sim_outcome integrate(const robot_state& initial, const sensor_layout& layout,
                      const controller_weights& weights, const sim_config& cfg,
                      bool record_trajectory = false);

// Explicit-Euler update with linear and angular speed clamped to the
// configured saturation limits. Requires cfg.saturation.
sim_outcome integrate_saturated(const robot_state& initial, const sensor_layout& layout,
                                const controller_weights& weights, const sim_config& cfg,
                                bool record_trajectory = false);

}  // namespace morphsweep
