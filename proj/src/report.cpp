#include "morphsweep/report.hpp"

#include <cmath>
#include <cstdio>
#include <stdexcept>

#include "morphsweep/results_io.hpp"

namespace morphsweep {

std::string render_heatmap_ppm(const overlap_matrix& o) {
    const int n = o.n();
    std::string out = "P6\n" + std::to_string(n) + " " + std::to_string(n) + "\n255\n";
    out.reserve(out.size() + 3 * static_cast<std::size_t>(n) * n);
    for (std::uint8_t v : o.values()) {
        const rgb& c = overlap_palette.at(v);
        out.append(reinterpret_cast<const char*>(c.data()), c.size());
    }
    return out;
}

std::string trajectory_csv(std::span<const trajectory_sample> samples) {
    std::string out = "t,x,y,alpha,s1,s2,v\n";
    for (const trajectory_sample& s : samples) {
        out += format_double(s.t) + "," + format_double(s.x) + "," + format_double(s.y) + "," +
               format_double(s.alpha) + "," + format_double(s.s1) + "," + format_double(s.s2) + "," +
               format_double(s.v) + "\n";
    }
    return out;
}

std::vector<histogram_bin> metric_histogram(std::span<const design_record> records,
                                            histogram_metric metric, std::size_t bins) {
    if (bins == 0) throw std::invalid_argument("histogram needs at least one bin");
    const double width = static_cast<double>(bins);
    std::vector<histogram_bin> out(bins);
    for (std::size_t k = 0; k < bins; ++k) {
        out[k].lower = static_cast<double>(k) / width;
        out[k].upper = static_cast<double>(k + 1) / width;
    }
    for (const design_record& r : records) {
        const double v = metric == histogram_metric::learnability ? r.metrics.m_l : r.metrics.m_cf;
        if (!(v >= 0.0 && v <= 1.0)) throw std::invalid_argument("metric value outside [0, 1]");
        auto k = static_cast<std::size_t>(std::floor(v * width));
        if (k >= bins) k = bins - 1;
        // Settle rounding at the edges against the printed bounds.
        while (k > 0 && v < out[k].lower) --k;
        while (k + 1 < bins && v >= out[k].upper) ++k;
        ++out[k].count;
    }
    return out;
}

std::string histogram_csv(std::span<const histogram_bin> bins) {
    std::string out = "bin_lower,bin_upper,count\n";
    for (const histogram_bin& b : bins) {
        out += format_double(b.lower) + "," + format_double(b.upper) + "," + std::to_string(b.count) + "\n";
    }
    return out;
}

std::string rank_table(std::span<const design_record> ranked) {
    std::string out;
    char line[256];
    std::snprintf(line, sizeof line, "%4s  %12s  %-18s  %-18s  %-20s  %-20s\n", "rank", "design_index",
                  "l1", "l2", "M_L", "M_CF");
    out += line;
    std::size_t rank = 1;
    for (const design_record& r : ranked) {
        char l1[40];
        char l2[40];
        std::snprintf(l1, sizeof l1, "(%g, %g)", r.layout.l1.x, r.layout.l1.y);
        std::snprintf(l2, sizeof l2, "(%g, %g)", r.layout.l2.x, r.layout.l2.y);
        std::snprintf(line, sizeof line, "%4zu  %12zu  %-18s  %-18s  %-20s  %-20s\n", rank++, r.design_index,
                      l1, l2, format_double(r.metrics.m_l).c_str(), format_double(r.metrics.m_cf).c_str());
        out += line;
    }
    return out;
}

}  // namespace morphsweep
