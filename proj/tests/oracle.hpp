#pragma once

// Test-only reference evaluator for the vehicle model. Written directly from
// the equations with its own state layout, integrator loop and counting, and
// no dependency on the library, so it can be used to cross-check it.

#include <array>
#include <cstdint>
#include <vector>

namespace oracle {

struct design {
    double l1x, l1y, l2x, l2y;
};

struct settings {
    double radius = 3.0;
    double dt = 0.01;
    long steps = 100000;
    double success_radius = 0.2;
    double floor = 1e-3;
};

// Whether the robot centre comes within the success radius during the run.
bool reaches_light(const design& d, double w1, double w2, double bearing_deg, const settings& s);

// success[k][i * n + j] for bearings 45, 135, 225, 315 over an n x n weight
// grid spanning [-1, 1].
std::array<std::vector<std::uint8_t>, 4> success_grids(const design& d, int n, const settings& s);

// Counts of the overlap values 0..4 computed from success_grids.
std::array<std::uint64_t, 5> overlap_counts(const design& d, int n, const settings& s);

}  // namespace oracle
