#include <doctest.h>

#include <stdexcept>

#include "morphsweep/report.hpp"

using namespace morphsweep;

namespace {

design_record with_counts(std::size_t index, value_counts g) {
    design_record r;
    r.design_index = index;
    r.g = g;
    r.metrics = metrics_from_counts(g);
    return r;
}

std::string ppm_header(int n) { return "P6\n" + std::to_string(n) + " " + std::to_string(n) + "\n255\n"; }

}  // namespace

TEST_CASE("heatmap PPM") {
    SUBCASE("all-fail design is uniformly dark blue") {
        const std::string img = render_heatmap_ppm(overlap_matrix(4));
        REQUIRE(img.size() == ppm_header(4).size() + 3 * 16);
        for (std::size_t p = ppm_header(4).size(); p < img.size(); p += 3) {
            CHECK(static_cast<unsigned char>(img[p]) == 0);
            CHECK(static_cast<unsigned char>(img[p + 1]) == 0);
            CHECK(static_cast<unsigned char>(img[p + 2]) == 64);
        }
    }

    SUBCASE("all-generalist design is uniformly cyan") {
        const std::string img = render_heatmap_ppm(overlap_matrix(2, {4, 4, 4, 4}));
        for (std::size_t p = ppm_header(2).size(); p < img.size(); p += 3) {
            CHECK(static_cast<unsigned char>(img[p]) == 0);
            CHECK(static_cast<unsigned char>(img[p + 1]) == 255);
            CHECK(static_cast<unsigned char>(img[p + 2]) == 255);
        }
    }

    SUBCASE("full-size header is 15 bytes") {
        const std::string img = render_heatmap_ppm(overlap_matrix(121));
        CHECK(ppm_header(121).size() == 15);
        CHECK(img.substr(0, 15) == ppm_header(121));
        CHECK(img.size() == 15 + 3 * 121 * 121);
    }

    SUBCASE("row-major pixel order with the palette") {
        const std::string img = render_heatmap_ppm(overlap_matrix(2, {0, 1, 2, 3}));
        const std::size_t h = ppm_header(2).size();
        for (int v = 0; v < 4; ++v)
            for (int c = 0; c < 3; ++c)
                CHECK(static_cast<unsigned char>(img[h + 3 * v + c]) == overlap_palette[v][c]);
    }
}

TEST_CASE("metric histogram") {
    const std::vector<design_record> one{with_counts(0, {9, 0, 0, 0, 0})};
    auto bins = metric_histogram(one, histogram_metric::learnability, 10);
    REQUIRE(bins.size() == 10);
    CHECK(bins[0].count == 1);
    CHECK(bins[0].lower == 0.0);
    CHECK(bins[9].upper == 1.0);

    std::vector<design_record> many;
    for (std::uint64_t g4 = 0; g4 <= 16; ++g4) many.push_back(with_counts(g4, {16 - g4, 0, 0, 0, g4}));
    bins = metric_histogram(many, histogram_metric::learnability, 1);
    REQUIRE(bins.size() == 1);
    CHECK(bins[0].count == many.size());

    bins = metric_histogram(many, histogram_metric::learnability, 4);
    std::size_t total = 0;
    for (const auto& b : bins) total += b.count;
    CHECK(total == many.size());
    // Right-open bins: 0.25 belongs to the second bin, 1.0 to the last.
    CHECK(bins[0].count == 4);  // 0, 1/16, 2/16, 3/16
    CHECK(bins[1].count == 4);
    CHECK(bins[2].count == 4);
    CHECK(bins[3].count == 5);  // 12/16 .. 16/16

    bins = metric_histogram(many, histogram_metric::cf_resistance, 2);
    CHECK(bins[0].count == 1);  // the null design has M_CF = 0
    CHECK(bins[1].count == 16);

    CHECK_THROWS_AS(metric_histogram(many, histogram_metric::learnability, 0), std::invalid_argument);
    CHECK(histogram_csv(metric_histogram(one, histogram_metric::learnability, 2)) ==
          "bin_lower,bin_upper,count\n0,0.5,1\n0.5,1,0\n");
}

TEST_CASE("trajectory CSV") {
    const std::vector<trajectory_sample> s{{0, 1, 2, 0.5, 0.25, 0.125, 0.1}};
    CHECK(trajectory_csv(s) == "t,x,y,alpha,s1,s2,v\n0,1,2,0.5,0.25,0.125,0.10000000000000001\n");
}

TEST_CASE("rank table") {
    const std::vector<design_record> r{with_counts(3, {0, 0, 0, 0, 9})};
    const std::string t = rank_table(r);
    CHECK(t.find("design_index") != std::string::npos);
    CHECK(t.find("   3  ") != std::string::npos);
    CHECK(t.find("1 ") != std::string::npos);
}
