#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "morphsweep/bit_matrix.hpp"
#include "morphsweep/vehicle.hpp"

namespace morphsweep {

// Element-wise sum of the per-environment success matrices; entries 0..4.
class overlap_matrix {
public:
    overlap_matrix() = default;
    explicit overlap_matrix(int n) : n_(n), values_(static_cast<std::size_t>(n) * n, 0) {}
    // Throws std::invalid_argument on a size mismatch or an entry above 4.
    overlap_matrix(int n, std::vector<std::uint8_t> values);

    int n() const { return n_; }
    std::uint8_t at(int i, int j) const { return values_[static_cast<std::size_t>(i) * n_ + j]; }
    std::span<const std::uint8_t> values() const { return values_; }

private:
    int n_ = 0;
    std::vector<std::uint8_t> values_;
};

// g_0 .. g_4: number of entries of the overlap matrix with each value.
using value_counts = std::array<std::uint64_t, 5>;

struct metric_pair {
    double m_l = 0.0;
    double m_cf = 0.0;
};

// Throws dimension_mismatch unless given exactly four matrices of equal size.
overlap_matrix overlap(std::span<const bit_matrix> success);

std::uint64_t count_values(const overlap_matrix& o, int k);
value_counts count_all_values(const overlap_matrix& o);

// Proportion of generalists (entries equal to 4) over the whole grid.
double learnability(const overlap_matrix& o);
// Generalists over controllers that succeed anywhere; 0 for a null matrix.
double cf_resistance(const overlap_matrix& o);

// Both metrics from the counts alone; n^2 is the sum of the counts.
metric_pair metrics_from_counts(const value_counts& g);

struct design_record {
    std::size_t design_index = 0;
    sensor_layout layout;
    value_counts g{};
    metric_pair metrics;
};

enum class rank_key { learnability, cf_resistance };

// Descending by `key`, then by the other metric, then ascending design index.
std::vector<design_record> rank_designs(std::span<const design_record> records, rank_key key,
                                        std::size_t top);

}  // namespace morphsweep
