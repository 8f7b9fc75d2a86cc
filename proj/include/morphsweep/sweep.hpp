#pragma once

#include <array>
#include <atomic>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "morphsweep/bit_matrix.hpp"
#include "morphsweep/environments.hpp"
#include "morphsweep/metrics.hpp"
#include "morphsweep/vehicle.hpp"

namespace morphsweep {

enum class model_variant { theoretical, saturated };

std::string_view to_string(model_variant model);
// Throws config_error on an unknown name.
model_variant parse_model(std::string_view name);

// The model follows from the config: saturation limits select the discrete
// saturated surrogate, otherwise the RK4 continuous model is used.
inline model_variant model_of(const sim_config& cfg) {
    return cfg.saturation ? model_variant::saturated : model_variant::theoretical;
}

sim_outcome simulate(const robot_state& initial, const sensor_layout& layout,
                     const controller_weights& weights, const sim_config& cfg,
                     bool record_trajectory = false);

// Bit k set <=> the controller solves environment k (0-based, bearing order).
using success_bits = std::uint8_t;
inline constexpr success_bits all_envs_solved = 0b1111;

// Throws numerical_divergence annotated with the design, weights and
// environment that produced it.
success_bits evaluate_controller(const sensor_layout& layout, const controller_weights& weights,
                                 const environment_set& envs, const sim_config& cfg);

struct design_result {
    std::size_t design_index = 0;
    sensor_layout layout;
    // matrices[k](i, j): controller (w1 index i, w2 index j) solves env k.
    std::array<bit_matrix, env_count> matrices;
    value_counts g{};

    design_record record() const;
};

design_result evaluate_design(const sensor_layout& layout, const weight_grid& weights,
                              const environment_set& envs, const sim_config& cfg,
                              std::size_t design_index = 0);

// Evaluates every layout with up to `workers` threads; one design per work
// item. Results come back in input order with design_index = position.
std::vector<design_result> evaluate_designs(std::span<const sensor_layout> layouts,
                                            const weight_grid& weights,
                                            const environment_set& envs, const sim_config& cfg,
                                            unsigned workers);

// Everything that determines the bytes of a sweep's output. Worker count,
// batch size and early stopping are deliberately absent.
struct sweep_snapshot {
    model_variant model = model_variant::theoretical;
    double radius = default_radius;
    double dt = 0.01;
    std::int64_t steps = 100000;
    double success_radius = 0.2;
    double distance_floor = 1e-3;
    std::optional<saturation_limits> saturation;
    int design_res = 9;
    int weight_res = 121;

    friend bool operator==(const sweep_snapshot& a, const sweep_snapshot& b);
};

sweep_snapshot make_snapshot(const design_grid& designs, const weight_grid& weights,
                             const environment_set& envs, const sim_config& cfg);

struct sweep_manifest {
    sweep_snapshot config;
    std::string config_checksum;
    std::size_t total_designs = 0;
    // Half-open [first, last) ranges of finished design indices, ascending.
    std::vector<std::pair<std::size_t, std::size_t>> completed;
    bool complete = false;
    std::filesystem::path results_path;
    std::filesystem::path partial_path;
    std::optional<std::filesystem::path> matrices_dir;

    std::size_t completed_count() const;
};

struct sweep_progress {
    std::size_t completed = 0;
    std::size_t total = 0;
    // Designs already done when this call started (from a checkpoint).
    std::size_t resumed = 0;
};

struct sweep_options {
    unsigned workers = 1;
    std::filesystem::path checkpoint_path;
    std::filesystem::path output_path;
    std::optional<std::filesystem::path> matrices_dir;
    // Designs per checkpoint flush.
    std::size_t batch_size = 64;
    // Stop cleanly once at least this many designs are done in this call.
    std::optional<std::size_t> stop_after;
    // Polled between batches; set from a signal handler to interrupt.
    const std::atomic<bool>* cancel = nullptr;
    std::function<void(const sweep_progress&)> on_progress;
};

// Runs (or resumes) the full grid. The results file is written only once
// every design is done, ordered by design index. Throws checksum_mismatch when
// an existing checkpoint was produced by a different configuration.
sweep_manifest run_sweep(const design_grid& designs, const weight_grid& weights,
                         const environment_set& envs, const sim_config& cfg,
                         const sweep_options& options);

}  // namespace morphsweep
