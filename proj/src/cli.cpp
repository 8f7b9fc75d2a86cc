#include "morphsweep/cli.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <csignal>
#include <filesystem>
#include <fstream>
#include <optional>
#include <set>
#include <thread>

#include <CLI11.hpp>
#include <json.hpp>

#include "morphsweep/environments.hpp"
#include "morphsweep/errors.hpp"
#include "morphsweep/metrics.hpp"
#include "morphsweep/report.hpp"
#include "morphsweep/results_io.hpp"
#include "morphsweep/sweep.hpp"

namespace morphsweep {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

std::atomic<bool> interrupted{false};

extern "C" void on_sigint(int) { interrupted = true; }

// Flags shared by simulate and sweep. Unset optionals fall back to the
// model's defaults.
struct model_flags {
    std::string model = "theoretical";
    double radius = default_radius;
    std::optional<double> dt;
    std::optional<std::int64_t> steps;
    double success_radius = 0.2;
    double distance_floor = 1e-3;
    std::optional<double> v_max;
    std::optional<double> omega_max;
    bool no_early_stop = false;

    void attach(CLI::App& app) {
        app.add_option("--model", model, "theoretical (RK4) or saturated (Euler, clamped motors)")
            ->capture_default_str();
        app.add_option("--radius", radius, "distance from robot to light")->capture_default_str();
        app.add_option("--dt", dt, "step size (default 0.01 theoretical, 0.05 saturated)");
        app.add_option("--steps", steps, "step count (default 100000 theoretical, 2500 saturated)");
        app.add_option("--success-radius", success_radius, "success distance")->capture_default_str();
        app.add_option("--distance-floor", distance_floor, "sensor distance clamp")->capture_default_str();
        app.add_option("--v-max", v_max, "saturated model: linear speed cap (default 1)");
        app.add_option("--omega-max", omega_max, "saturated model: angular speed cap (default pi)");
        app.add_flag("--no-early-stop", no_early_stop, "integrate the full horizon even after success");
    }

    sim_config resolve() const {
        const model_variant variant = parse_model(model);
        sim_config cfg = variant == model_variant::saturated ? sim_config::saturated() : sim_config::theoretical();
        if (dt) cfg.dt = *dt;
        if (steps) cfg.steps = *steps;
        cfg.success_radius = success_radius;
        cfg.distance_floor = distance_floor;
        cfg.early_stop = !no_early_stop;
        if (variant == model_variant::saturated) {
            if (v_max) cfg.saturation->v_max = *v_max;
            if (omega_max) cfg.saturation->omega_max = *omega_max;
        } else if (v_max || omega_max) {
            throw config_error("--v-max/--omega-max only apply to the saturated model");
        }
        cfg.validate();
        return cfg;
    }
};

vec2 to_point(const std::vector<double>& v, const char* flag) {
    if (v.size() != 2) throw config_error(std::string(flag) + " expects x,y");
    return {v[0], v[1]};
}

void ensure_parent(const fs::path& p) {
    if (p.has_parent_path()) {
        std::error_code ec;
        fs::create_directories(p.parent_path(), ec);
        if (ec) throw io_error("cannot create " + p.parent_path().string() + ": " + ec.message());
    }
}

void write_text(const fs::path& p, const std::string& contents) {
    ensure_parent(p);
    std::ofstream out(p, std::ios::binary | std::ios::trunc);
    if (!out) throw io_error("cannot write " + p.string());
    out << contents;
    if (!out) throw io_error("write failed for " + p.string());
}

struct simulate_cmd {
    model_flags model;
    std::vector<double> l1{0.5, 0.5};
    std::vector<double> l2{0.5, -0.5};
    double w1 = 0.77;
    double w2 = 0.77;
    std::vector<int> envs;
    std::int64_t every = 10;
    fs::path out_dir = "trajectories";

    int run(std::ostream& out) const {
        sim_config cfg = model.resolve();
        cfg.record_every = every;
        cfg.validate();
        const sensor_layout layout{to_point(l1, "--l1"), to_point(l2, "--l2")};
        const controller_weights weights{w1, w2};
        if (!is_valid(layout)) throw config_error("sensor coordinates must lie in [-0.5, 0.5]");
        if (!is_valid(weights)) throw config_error("weights must lie in [-1, 1]");
        const environment_set all = make_environments(model.radius, cfg.success_radius);
        std::set<int> chosen(envs.begin(), envs.end());
        if (chosen.empty()) chosen = {1, 2, 3, 4};
        for (int e : chosen) {
            if (e < 1 || e > 4) throw config_error("--env must be in 1..4");
        }

        json summary;
        summary["model"] = std::string(to_string(model_of(cfg)));
        summary["radius"] = model.radius;
        summary["l1"] = {layout.l1.x, layout.l1.y};
        summary["l2"] = {layout.l2.x, layout.l2.y};
        summary["weights"] = {w1, w2};
        summary["environments"] = json::array();
        for (int e : chosen) {
            const environment& env = all[static_cast<std::size_t>(e - 1)];
            const sim_outcome r = simulate(env.initial_state, layout, weights, cfg, true);
            write_text(out_dir / ("trajectory_env" + std::to_string(e) + ".csv"), trajectory_csv(*r.trajectory));
            summary["environments"].push_back({{"env", e},
                                               {"bearing", env.bearing_deg},
                                               {"success", r.success},
                                               {"min_distance", r.min_distance},
                                               {"steps_taken", r.steps_taken}});
        }
        const std::string text = summary.dump(2) + "\n";
        write_text(out_dir / "summary.json", text);
        out << text;
        return exit_ok;
    }
};

struct sweep_cmd {
    model_flags model;
    int weights_res = 121;
    int design_res = 9;
    unsigned workers = std::max(1u, std::thread::hardware_concurrency());
    fs::path out_path = "results.jsonl";
    std::optional<fs::path> checkpoint;
    std::optional<fs::path> matrices;
    std::size_t batch_size = 64;
    std::optional<std::size_t> stop_after;

    int run(std::ostream& out, std::ostream& status) const {
        const sim_config cfg = model.resolve();
        if (workers < 1) throw config_error("--workers must be >= 1");
        if (batch_size < 1) throw config_error("--batch-size must be >= 1");
        const environment_set envs = make_environments(model.radius, cfg.success_radius);
        const design_grid designs = make_design_grid(design_res);
        const weight_grid weights = make_weight_grid(weights_res);

        sweep_options opts;
        opts.workers = workers;
        opts.output_path = out_path;
        opts.checkpoint_path = checkpoint ? *checkpoint : fs::path(out_path.string() + ".manifest.json");
        opts.matrices_dir = matrices;
        opts.batch_size = batch_size;
        opts.stop_after = stop_after;
        opts.cancel = &interrupted;
        const auto started = std::chrono::steady_clock::now();
        opts.on_progress = [&](const sweep_progress& p) {
            const double secs =
                std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
            const double rate = secs > 0 ? static_cast<double>(p.completed - p.resumed) / secs : 0.0;
            char line[160];
            std::snprintf(line, sizeof line, "designs %zu/%zu (%.1f%%), %.3g designs/s\n", p.completed, p.total,
                          100.0 * static_cast<double>(p.completed) / static_cast<double>(p.total), rate);
            status << line << std::flush;
        };
        ensure_parent(out_path);
        ensure_parent(opts.checkpoint_path);

        interrupted = false;
        auto previous = std::signal(SIGINT, on_sigint);
        sweep_manifest m;
        try {
            m = run_sweep(designs, weights, envs, cfg, opts);
        } catch (...) {
            std::signal(SIGINT, previous);
            throw;
        }
        std::signal(SIGINT, previous);

        if (!m.complete) {
            status << "sweep stopped after " << m.completed_count() << "/" << m.total_designs
                   << " designs; rerun the same command to resume from " << opts.checkpoint_path.string() << "\n";
            return interrupted ? exit_runtime : exit_ok;
        }
        out << "wrote " << m.total_designs << " records to " << out_path.string() << "\n";
        return exit_ok;
    }
};

struct rank_cmd {
    fs::path results;
    std::string key = "M_L";
    std::size_t top = 10;

    int run(std::ostream& out) const {
        rank_key k;
        if (key == "M_L")
            k = rank_key::learnability;
        else if (key == "M_CF")
            k = rank_key::cf_resistance;
        else
            throw config_error("--key must be M_L or M_CF");
        const std::vector<design_record> records = read_results(results);
        if (records.empty()) throw parse_error(results.string() + ": no records");
        out << rank_table(rank_designs(records, k, top));
        return exit_ok;
    }
};

struct heatmap_cmd {
    fs::path source;
    std::size_t design = 0;
    fs::path out_path = "heatmap.ppm";

    // A matrix dump file, a directory of dumps, or a sweep manifest naming one.
    fs::path dump_file() const {
        if (fs::is_directory(source)) return matrix_dump_path(source, design);
        std::ifstream in(source, std::ios::binary);
        char magic[4] = {};
        in.read(magic, 4);
        if (in && std::string_view(magic, 4) == "MSWP") return source;
        if (!fs::exists(source)) throw missing_matrix_dump("no such file: " + source.string());
        sweep_manifest m;
        try {
            m = read_manifest(source);
        } catch (const parse_error&) {
            throw missing_matrix_dump(source.string() +
                                      " is neither a matrix dump, a dump directory, nor a manifest");
        }
        if (!m.matrices_dir) throw missing_matrix_dump("sweep in " + source.string() + " did not dump matrices");
        return matrix_dump_path(*m.matrices_dir, design);
    }

    int run(std::ostream& out) const {
        const auto matrices = read_matrix_dump(dump_file());
        const overlap_matrix o = overlap(matrices);
        write_text(out_path, render_heatmap_ppm(o));
        out << "wrote " << o.n() << "x" << o.n() << " heatmap to " << out_path.string() << "\n";
        return exit_ok;
    }
};

struct histogram_cmd {
    fs::path results;
    std::string metric = "M_L";
    std::size_t bins = 20;
    std::optional<fs::path> out_path;

    int run(std::ostream& out) const {
        histogram_metric m;
        if (metric == "M_L")
            m = histogram_metric::learnability;
        else if (metric == "M_CF")
            m = histogram_metric::cf_resistance;
        else
            throw config_error("--metric must be M_L or M_CF");
        if (bins < 1) throw config_error("--bins must be >= 1");
        const std::vector<design_record> records = read_results(results);
        const std::string csv = histogram_csv(metric_histogram(records, m, bins));
        if (out_path)
            write_text(*out_path, csv);
        else
            out << csv;
        return exit_ok;
    }
};

void add_config_option(CLI::App& app) {
    // Read by expand_config before parsing; registered here for --help and validation.
    app.add_option("--config", "key = value config file; command-line flags take precedence")
        ->check(CLI::ExistingFile);
}

// Splices the entries of `<subcommand> --config FILE` in as flags directly
// after the subcommand name, so that flags given on the command line, which
// come later, win. Keys may be bare or under a [subcommand] section.
std::vector<std::string> expand_config(const std::vector<std::string>& args) {
    if (args.empty()) return args;
    std::optional<std::string> path;
    for (std::size_t i = 1; i < args.size(); ++i) {
        if (args[i] == "--config" && i + 1 < args.size()) path = args[i + 1];
        else if (args[i].rfind("--config=", 0) == 0) path = args[i].substr(9);
    }
    if (!path) return args;
    std::vector<std::string> out{args[0]};
    for (const CLI::ConfigItem& item : CLI::ConfigINI().from_file(*path)) {
        if (item.name == "++" || item.name == "--") continue;  // section markers
        if (!item.parents.empty() && item.parents != std::vector<std::string>{args[0]}) continue;
        std::string value;
        for (const std::string& v : item.inputs) value += (value.empty() ? "" : ",") + v;
        out.push_back("--" + item.name + "=" + value);
    }
    out.insert(out.end(), args.begin() + 1, args.end());
    return out;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& status) {
    CLI::App app{"morphsweep: sensor-placement sweeps for two-sensor phototaxis vehicles", "morphsweep"};
    app.require_subcommand(1);
    app.option_defaults()->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);

    simulate_cmd sim;
    CLI::App* sim_app = app.add_subcommand("simulate", "simulate one design and controller, write trajectory CSVs");
    add_config_option(*sim_app);
    sim.model.attach(*sim_app);
    sim_app->add_option("--l1", sim.l1, "first sensor x,y")->delimiter(',')->expected(2)->capture_default_str();
    sim_app->add_option("--l2", sim.l2, "second sensor x,y")->delimiter(',')->expected(2)->capture_default_str();
    sim_app->add_option("--w1", sim.w1, "first synapse weight")->capture_default_str();
    sim_app->add_option("--w2", sim.w2, "second synapse weight")->capture_default_str();
    sim_app->add_option("--env", sim.envs, "environment(s) 1..4 (default all)")->delimiter(',');
    sim_app->add_option("--every", sim.every, "record every k-th step")->capture_default_str();
    sim_app->add_option("--out", sim.out_dir, "output directory")->capture_default_str();

    sweep_cmd sweep;
    CLI::App* sweep_app = app.add_subcommand("sweep", "evaluate every design x controller x environment");
    add_config_option(*sweep_app);
    sweep.model.attach(*sweep_app);
    sweep_app->add_option("--weights-res", sweep.weights_res, "values per weight axis")->capture_default_str();
    sweep_app->add_option("--design-res", sweep.design_res, "positions per sensor axis")->capture_default_str();
    sweep_app->add_option("--workers", sweep.workers, "worker threads")->capture_default_str();
    sweep_app->add_option("--out", sweep.out_path, "results JSON-lines file")->capture_default_str();
    sweep_app->add_option("--checkpoint", sweep.checkpoint, "manifest path (default <out>.manifest.json)");
    sweep_app->add_option("--matrices", sweep.matrices, "directory for per-design matrix dumps");
    sweep_app->add_option("--batch-size", sweep.batch_size, "designs per checkpoint flush")->capture_default_str();
    sweep_app->add_option("--stop-after", sweep.stop_after, "stop after this many designs (resume later)");

    rank_cmd rank;
    CLI::App* rank_app = app.add_subcommand("rank", "print the best designs from a results file");
    rank_app->add_option("results", rank.results, "results JSON-lines file")->required();
    rank_app->add_option("--key", rank.key, "M_L or M_CF")->capture_default_str();
    rank_app->add_option("--top", rank.top, "number of designs")->capture_default_str();

    heatmap_cmd heat;
    CLI::App* heat_app = app.add_subcommand("heatmap", "render a design's overlap matrix as PPM");
    heat_app->add_option("source", heat.source, "matrix dump, dump directory, or sweep manifest")->required();
    heat_app->add_option("--design", heat.design, "design index")->capture_default_str();
    heat_app->add_option("--out", heat.out_path, "output PPM")->capture_default_str();

    histogram_cmd hist;
    CLI::App* hist_app = app.add_subcommand("histogram", "histogram of M_L or M_CF over all designs");
    hist_app->add_option("results", hist.results, "results JSON-lines file")->required();
    hist_app->add_option("--metric", hist.metric, "M_L or M_CF")->capture_default_str();
    hist_app->add_option("--bins", hist.bins, "number of bins")->capture_default_str();
    hist_app->add_option("--out", hist.out_path, "output CSV (default stdout)");

    try {
        const std::vector<std::string> expanded = expand_config(args);
        app.parse(std::vector<std::string>(expanded.rbegin(), expanded.rend()));
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, status);
        return code == 0 ? exit_ok : exit_usage;
    }

    try {
        if (*sim_app) return sim.run(out);
        if (*sweep_app) return sweep.run(out, status);
        if (*rank_app) return rank.run(out);
        if (*heat_app) return heat.run(out);
        if (*hist_app) return hist.run(out);
    } catch (const config_error& e) {
        status << "error: " << e.what() << "\n";
        return exit_usage;
    } catch (const std::exception& e) {
        status << "error: " << e.what() << "\n";
        return exit_runtime;
    }
    return exit_usage;
}

}  // namespace morphsweep
