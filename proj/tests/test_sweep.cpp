#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>

#include "morphsweep/errors.hpp"
#include "morphsweep/results_io.hpp"
#include "morphsweep/sweep.hpp"
#include "oracle.hpp"
#include "temp_dir.hpp"

using namespace morphsweep;
namespace fs = std::filesystem;

namespace {

const sensor_layout canonical{{0.5, 0.5}, {0.5, -0.5}};

// Shorter horizon than the default keeps the sample-heavy checks quick; the
// properties below hold for any horizon.
sim_config short_config() {
    sim_config cfg = sim_config::theoretical();
    cfg.steps = 20000;
    return cfg;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
}

success_bits reflect_bits(success_bits b) {
    success_bits out = 0;
    for (std::size_t k = 0; k < env_count; ++k)
        if (b & (1u << k)) out |= static_cast<success_bits>(1u << mirrored_env(k));
    return out;
}

}  // namespace

TEST_CASE("evaluate_controller") {
    const environment_set envs = make_environments(default_radius);
    CHECK(evaluate_controller(canonical, {0, 0}, envs, sim_config::theoretical()) == 0);
    CHECK(evaluate_controller(canonical, {0.77, 0.77}, envs, sim_config::theoretical()) == all_envs_solved);

    SUBCASE("divergence carries design, weights and environment") {
        try {
            evaluate_controller(canonical, {std::nan(""), 0.1}, envs, short_config());
            FAIL("expected numerical_divergence");
        } catch (const numerical_divergence& e) {
            const std::string what = e.what();
            CHECK(what.find("l1=(0.5, 0.5)") != std::string::npos);
            CHECK(what.find("environment 1") != std::string::npos);
            CHECK(what.find("weights (nan") != std::string::npos);
        }
    }
}

TEST_CASE("evaluate_controller: mirrored design with swapped weights reflects the environments") {
    std::mt19937_64 rng(17);
    std::uniform_real_distribution<double> u(-0.5, 0.5);
    std::uniform_real_distribution<double> w(-1.0, 1.0);
    const environment_set envs = make_environments(default_radius);
    const sim_config cfg = short_config();
    int nonzero = 0;
    for (int trial = 0; trial < 100; ++trial) {
        const sensor_layout d{{u(rng), u(rng)}, {u(rng), u(rng)}};
        const controller_weights c{w(rng), w(rng)};
        const success_bits a = evaluate_controller(d, c, envs, cfg);
        const success_bits b = evaluate_controller(mirror_design(d), {c.w2, c.w1}, envs, cfg);
        CHECK(b == reflect_bits(a));
        nonzero += a != 0;
    }
    CHECK(nonzero > 0);
}

TEST_CASE("evaluate_design") {
    const environment_set envs = make_environments(default_radius);

    SUBCASE("nothing succeeds within a single step") {
        sim_config cfg;
        cfg.steps = 1;
        const design_result r = evaluate_design(canonical, make_weight_grid(5), envs, cfg);
        CHECK(r.g[0] == 25);
        CHECK(r.g[1] + r.g[2] + r.g[3] + r.g[4] == 0);
        CHECK(r.record().metrics.m_l == 0.0);
        CHECK(r.record().metrics.m_cf == 0.0);
    }

    SUBCASE("matches the serial reference evaluator on a 3x3 weight grid") {
        std::mt19937_64 rng(23);
        std::uniform_int_distribution<std::size_t> pick(0, 6560);
        const design_grid grid = make_design_grid(9);
        oracle::settings s;
        s.steps = 20000;
        for (int trial = 0; trial < 4; ++trial) {
            const sensor_layout d = grid[pick(rng)];
            const design_result r = evaluate_design(d, make_weight_grid(3), envs, short_config());
            const oracle::design od{d.l1.x, d.l1.y, d.l2.x, d.l2.y};
            const auto expected = oracle::success_grids(od, 3, s);
            for (std::size_t k = 0; k < env_count; ++k)
                for (int i = 0; i < 3; ++i)
                    for (int j = 0; j < 3; ++j)
                        CHECK(r.matrices[k].get(i, j) == (expected[k][static_cast<std::size_t>(i) * 3 + j] != 0));
            CHECK(r.g == oracle::overlap_counts(od, 3, s));
        }
    }

    SUBCASE("a mirrored design transposes the matrices and reflects the environments") {
        std::mt19937_64 rng(29);
        std::uniform_int_distribution<std::size_t> pick(0, 6560);
        const design_grid grid = make_design_grid(9);
        const weight_grid weights = make_weight_grid(5);
        const sim_config cfg = short_config();
        for (int trial = 0; trial < 20; ++trial) {
            const sensor_layout d = grid[pick(rng)];
            const design_result a = evaluate_design(d, weights, envs, cfg);
            const design_result b = evaluate_design(mirror_design(d), weights, envs, cfg);
            for (std::size_t k = 0; k < env_count; ++k) CHECK(b.matrices[mirrored_env(k)] == transpose(a.matrices[k]));
            CHECK(a.g == b.g);
        }
    }

    SUBCASE("rejects layouts off the body") {
        CHECK_THROWS_AS(evaluate_design({{0.6, 0}, {0, 0}}, make_weight_grid(3), envs, short_config()), config_error);
    }
}

TEST_CASE("evaluate_designs keeps input order under any worker count") {
    const environment_set envs = make_environments(default_radius);
    const design_grid grid = make_design_grid(2);
    const weight_grid weights = make_weight_grid(3);
    const auto serial = evaluate_designs(grid.designs(), weights, envs, short_config(), 1);
    const auto parallel = evaluate_designs(grid.designs(), weights, envs, short_config(), 4);
    REQUIRE(serial.size() == 16);
    for (std::size_t i = 0; i < serial.size(); ++i) {
        CHECK(serial[i].design_index == i);
        CHECK(parallel[i].design_index == i);
        CHECK(serial[i].g == parallel[i].g);
        CHECK(serial[i].layout == grid[i]);
    }
}

TEST_CASE("run_sweep") {
    test_support::temp_dir dir;
    const environment_set envs = make_environments(default_radius);
    const design_grid designs = make_design_grid(2);
    const weight_grid weights = make_weight_grid(3);
    const sim_config cfg = short_config();

    auto options = [&](const std::string& name, unsigned workers) {
        sweep_options o;
        o.workers = workers;
        o.output_path = dir.path() / (name + ".jsonl");
        o.checkpoint_path = dir.path() / (name + ".manifest.json");
        o.batch_size = 4;
        return o;
    };

    sweep_options base = options("w1", 1);
    base.matrices_dir = dir.path() / "mats";
    std::vector<sweep_progress> progress;
    base.on_progress = [&](const sweep_progress& p) { progress.push_back(p); };
    const sweep_manifest m = run_sweep(designs, weights, envs, cfg, base);
    CHECK(m.complete);
    CHECK(m.completed_count() == 16);
    CHECK(progress.size() == 4);
    CHECK(progress.back().completed == 16);
    CHECK_FALSE(fs::exists(m.partial_path));
    const std::string reference = slurp(base.output_path);

    SUBCASE("records are ordered and consistent") {
        const auto records = read_results(base.output_path);
        REQUIRE(records.size() == 16);
        for (std::size_t i = 0; i < records.size(); ++i) {
            CHECK(records[i].design_index == i);
            CHECK(records[i].layout == designs[i]);
            std::uint64_t total = 0;
            for (auto g : records[i].g) total += g;
            CHECK(total == 9);
            const auto dump = read_matrix_dump(matrix_dump_path(*base.matrices_dir, i));
            CHECK(count_all_values(overlap(dump)) == records[i].g);
            std::uint64_t generalists = 0;
            for (int a = 0; a < 3; ++a)
                for (int b = 0; b < 3; ++b) {
                    bool all = true;
                    for (const auto& s : dump) all = all && s.get(a, b);
                    generalists += all;
                }
            CHECK(generalists == records[i].g[4]);
        }
    }

    SUBCASE("worker count does not change the bytes") {
        for (unsigned w : {2u, 8u}) {
            const sweep_options o = options("w" + std::to_string(w), w);
            run_sweep(designs, weights, envs, cfg, o);
            CHECK(slurp(o.output_path) == reference);
        }
    }

    SUBCASE("early stopping does not change the bytes") {
        sim_config full = cfg;
        full.early_stop = false;
        const sweep_options o = options("full", 1);
        run_sweep(designs, weights, envs, full, o);
        CHECK(slurp(o.output_path) == reference);
    }

    SUBCASE("interrupt and resume") {
        sweep_options o = options("resume", 2);
        o.stop_after = 8;
        const sweep_manifest half = run_sweep(designs, weights, envs, cfg, o);
        CHECK_FALSE(half.complete);
        CHECK(half.completed_count() == 8);
        CHECK_FALSE(fs::exists(o.output_path));
        CHECK(fs::exists(half.partial_path));
        const sweep_manifest on_disk = read_manifest(o.checkpoint_path);
        CHECK(on_disk.completed == std::vector<std::pair<std::size_t, std::size_t>>{{0, 8}});

        // A torn trailing line from a crash is ignored.
        std::ofstream(half.partial_path, std::ios::app) << "{\"design_index\":9,\"l1\":[";

        o.stop_after.reset();
        int calls = 0;
        o.on_progress = [&](const sweep_progress& p) {
            ++calls;
            CHECK(p.resumed == 8);
        };
        const sweep_manifest done = run_sweep(designs, weights, envs, cfg, o);
        CHECK(done.complete);
        CHECK(calls == 2);
        CHECK(slurp(o.output_path) == reference);

        // Re-running a finished sweep is a no-op.
        CHECK(run_sweep(designs, weights, envs, cfg, o).complete);
        CHECK(slurp(o.output_path) == reference);
    }

    SUBCASE("cancellation flag stops between batches") {
        std::atomic<bool> cancel{false};
        sweep_options o = options("cancel", 1);
        o.cancel = &cancel;
        o.on_progress = [&](const sweep_progress&) { cancel = true; };
        const sweep_manifest part = run_sweep(designs, weights, envs, cfg, o);
        CHECK(part.completed_count() == 4);
        cancel = false;
        o.on_progress = nullptr;
        run_sweep(designs, weights, envs, cfg, o);
        CHECK(slurp(o.output_path) == reference);
    }

    SUBCASE("resume with a different config is refused") {
        sweep_options o = options("mismatch", 1);
        o.stop_after = 4;
        run_sweep(designs, weights, envs, cfg, o);
        sim_config other = cfg;
        other.steps = 1000;
        o.stop_after.reset();
        CHECK_THROWS_AS(run_sweep(designs, weights, envs, other, o), checksum_mismatch);
        CHECK_THROWS_AS(run_sweep(designs, weights, make_environments(2.0), cfg, o), checksum_mismatch);
    }

    SUBCASE("snapshot records the configuration") {
        const sweep_manifest on_disk = read_manifest(base.checkpoint_path);
        CHECK(on_disk.config.radius == default_radius);
        CHECK(on_disk.config.steps == 20000);
        CHECK(on_disk.config.design_res == 2);
        CHECK(on_disk.config.weight_res == 3);
        CHECK(on_disk.config.model == model_variant::theoretical);
    }
}

TEST_CASE("saturated model sweeps through the same engine") {
    test_support::temp_dir dir;
    const environment_set envs = make_environments(default_radius);
    sweep_options o;
    o.output_path = dir.path() / "sat.jsonl";
    o.checkpoint_path = dir.path() / "sat.manifest.json";
    const sweep_manifest m = run_sweep(make_design_grid(2), make_weight_grid(3), envs, sim_config::saturated(), o);
    CHECK(m.complete);
    CHECK(m.config.model == model_variant::saturated);
    CHECK(read_results(o.output_path).size() == 16);
}
