#include "morphsweep/metrics.hpp"

#include <algorithm>
#include <numeric>
#include <stdexcept>
#include <string>

#include "morphsweep/errors.hpp"

namespace morphsweep {

overlap_matrix::overlap_matrix(int n, std::vector<std::uint8_t> values)
    : n_(n), values_(std::move(values)) {
    if (n < 0 || values_.size() != static_cast<std::size_t>(n) * static_cast<std::size_t>(n)) {
        throw std::invalid_argument("overlap values do not form an n x n matrix");
    }
    for (std::uint8_t v : values_) {
        if (v > 4) throw std::invalid_argument("overlap entry out of range 0..4");
    }
}

overlap_matrix overlap(std::span<const bit_matrix> success) {
    if (success.size() != 4) {
        throw dimension_mismatch("overlap needs 4 success matrices, got " +
                                 std::to_string(success.size()));
    }
    const int n = success[0].n();
    for (const bit_matrix& s : success) {
        if (s.n() != n) {
            throw dimension_mismatch("success matrices differ in size: " + std::to_string(n) +
                                     " vs " + std::to_string(s.n()));
        }
    }
    std::vector<std::uint8_t> values(static_cast<std::size_t>(n) * n, 0);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            std::uint8_t sum = 0;
            for (const bit_matrix& s : success) sum += s.get(i, j) ? 1 : 0;
            values[static_cast<std::size_t>(i) * n + j] = sum;
        }
    return overlap_matrix(n, std::move(values));
}

std::uint64_t count_values(const overlap_matrix& o, int k) {
    if (k < 0 || k > 4) throw std::invalid_argument("overlap value must be in 0..4");
    const auto v = static_cast<std::uint8_t>(k);
    return static_cast<std::uint64_t>(std::count(o.values().begin(), o.values().end(), v));
}

value_counts count_all_values(const overlap_matrix& o) {
    value_counts g{};
    for (std::uint8_t v : o.values()) ++g[v];
    return g;
}

metric_pair metrics_from_counts(const value_counts& g) {
    const std::uint64_t total = std::accumulate(g.begin(), g.end(), std::uint64_t{0});
    const std::uint64_t specialists = total - g[0];
    metric_pair m;
    if (total > 0) m.m_l = static_cast<double>(g[4]) / static_cast<double>(total);
    if (specialists > 0) m.m_cf = static_cast<double>(g[4]) / static_cast<double>(specialists);
    return m;
}

double learnability(const overlap_matrix& o) { return metrics_from_counts(count_all_values(o)).m_l; }

double cf_resistance(const overlap_matrix& o) {
    return metrics_from_counts(count_all_values(o)).m_cf;
}

std::vector<design_record> rank_designs(std::span<const design_record> records, rank_key key,
                                        std::size_t top) {
    std::vector<design_record> out(records.begin(), records.end());
    const bool by_l = key == rank_key::learnability;
    auto before = [by_l](const design_record& a, const design_record& b) {
        const double pa = by_l ? a.metrics.m_l : a.metrics.m_cf;
        const double pb = by_l ? b.metrics.m_l : b.metrics.m_cf;
        if (pa != pb) return pa > pb;
        const double sa = by_l ? a.metrics.m_cf : a.metrics.m_l;
        const double sb = by_l ? b.metrics.m_cf : b.metrics.m_l;
        if (sa != sb) return sa > sb;
        return a.design_index < b.design_index;
    };
    const std::size_t keep = std::min(top, out.size());
    std::partial_sort(out.begin(), out.begin() + static_cast<std::ptrdiff_t>(keep), out.end(), before);
    out.resize(keep);
    return out;
}

}  // namespace morphsweep
