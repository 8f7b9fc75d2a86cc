#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "morphsweep/metrics.hpp"
#include "morphsweep/vehicle.hpp"

namespace morphsweep {

using rgb = std::array<std::uint8_t, 3>;

// Colour per overlap value 0..4; 4 (solved everywhere) is cyan.
inline constexpr std::array<rgb, 5> overlap_palette{{
    {0, 0, 64},
    {0, 64, 160},
    {64, 128, 192},
    {128, 192, 224},
    {0, 255, 255},
}};

// Binary PPM (P6), one pixel per controller. Row i is the w1 index (top row
// w1 = -1), column j the w2 index.
std::string render_heatmap_ppm(const overlap_matrix& o);

// "t,x,y,alpha,s1,s2,v" header plus one row per sample.
std::string trajectory_csv(std::span<const trajectory_sample> samples);

enum class histogram_metric { learnability, cf_resistance };

struct histogram_bin {
    double lower = 0.0;
    double upper = 0.0;
    std::size_t count = 0;
};

// Uniform bins over [0, 1]; every bin is right-open except the last.
std::vector<histogram_bin> metric_histogram(std::span<const design_record> records,
                                            histogram_metric metric, std::size_t bins);
std::string histogram_csv(std::span<const histogram_bin> bins);

// Fixed-width table used by the rank command.
std::string rank_table(std::span<const design_record> ranked);

}  // namespace morphsweep
