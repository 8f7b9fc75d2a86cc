#include "morphsweep/sweep.hpp"

#include <algorithm>
#include <exception>
#include <fstream>
#include <map>
#include <mutex>
#include <set>
#include <sstream>
#include <thread>

#include "morphsweep/errors.hpp"
#include "morphsweep/results_io.hpp"

namespace morphsweep {

namespace fs = std::filesystem;

namespace {

std::string describe(const sensor_layout& l) {
    std::ostringstream s;
    s.precision(17);
    s << "l1=(" << l.l1.x << ", " << l.l1.y << ") l2=(" << l.l2.x << ", " << l.l2.y << ")";
    return s.str();
}

// Runs job(i) for i in [0, count) on up to `workers` threads. The first
// exception stops the remaining work and is rethrown on the caller's thread.
template <class Job>
void parallel_for(std::size_t count, unsigned workers, Job job) {
    const std::size_t threads = std::min<std::size_t>(std::max(1u, workers), count);
    if (threads <= 1) {
        for (std::size_t i = 0; i < count; ++i) job(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::atomic<bool> failed{false};
    std::exception_ptr first_error;
    std::mutex error_mutex;

    auto worker = [&] {
        for (;;) {
            if (failed.load(std::memory_order_relaxed)) return;
            const std::size_t i = next.fetch_add(1, std::memory_order_relaxed);
            if (i >= count) return;
            try {
                job(i);
            } catch (...) {
                std::lock_guard lock(error_mutex);
                if (!first_error) first_error = std::current_exception();
                failed = true;
            }
        }
    };
    std::vector<std::jthread> pool;
    pool.reserve(threads);
    for (std::size_t t = 0; t < threads; ++t) pool.emplace_back(worker);
    pool.clear();  // joins
    if (first_error) std::rethrow_exception(first_error);
}

std::vector<std::pair<std::size_t, std::size_t>> to_ranges(const std::set<std::size_t>& done) {
    std::vector<std::pair<std::size_t, std::size_t>> ranges;
    for (std::size_t i : done) {
        if (!ranges.empty() && ranges.back().second == i)
            ++ranges.back().second;
        else
            ranges.emplace_back(i, i + 1);
    }
    return ranges;
}

fs::path partial_path_for(const fs::path& output) {
    fs::path p = output;
    p += ".partial";
    return p;
}

void append_lines(const fs::path& path, const std::vector<std::string>& lines) {
    std::ofstream out(path, std::ios::binary | std::ios::app);
    if (!out) throw io_error("cannot append to " + path.string());
    for (const std::string& l : lines) out << l << '\n';
    out.flush();
    if (!out) throw io_error("write failed for " + path.string());
}

// Records from a previous run that the manifest vouches for. Lines written
// after the last manifest flush are dropped and recomputed.
std::map<std::size_t, std::string> load_partial(const fs::path& path,
                                                const std::set<std::size_t>& done) {
    std::map<std::size_t, std::string> kept;
    std::ifstream in(path);
    if (!in) return kept;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        design_record r;
        try {
            r = parse_record(line, line_no);
        } catch (const parse_error&) {
            continue;  // torn final line after a crash
        }
        if (done.count(r.design_index)) kept[r.design_index] = line;
    }
    return kept;
}

}  // namespace

std::string_view to_string(model_variant model) {
    return model == model_variant::saturated ? "saturated" : "theoretical";
}

model_variant parse_model(std::string_view name) {
    if (name == "theoretical") return model_variant::theoretical;
    if (name == "saturated") return model_variant::saturated;
    throw config_error("unknown model '" + std::string(name) + "' (expected theoretical|saturated)");
}

sim_outcome simulate(const robot_state& initial, const sensor_layout& layout,
                     const controller_weights& weights, const sim_config& cfg,
                     bool record_trajectory) {
    return cfg.saturation ? integrate_saturated(initial, layout, weights, cfg, record_trajectory)
                          : integrate(initial, layout, weights, cfg, record_trajectory);
}

success_bits evaluate_controller(const sensor_layout& layout, const controller_weights& weights,
                                 const environment_set& envs, const sim_config& cfg) {
    success_bits bits = 0;
    for (std::size_t k = 0; k < env_count; ++k) {
        try {
            if (simulate(envs[k].initial_state, layout, weights, cfg).success) {
                bits |= static_cast<success_bits>(1u << k);
            }
        } catch (const numerical_divergence& e) {
            std::ostringstream msg;
            msg.precision(17);
            msg << e.what() << " [design " << describe(layout) << ", weights (" << weights.w1
                << ", " << weights.w2 << "), environment " << envs[k].id << "]";
            throw numerical_divergence(msg.str());
        }
    }
    return bits;
}

design_record design_result::record() const {
    return {design_index, layout, g, metrics_from_counts(g)};
}

design_result evaluate_design(const sensor_layout& layout, const weight_grid& weights,
                              const environment_set& envs, const sim_config& cfg,
                              std::size_t design_index) {
    cfg.validate();
    if (!is_valid(layout)) throw config_error("sensor layout outside the body: " + describe(layout));
    const int n = weights.values_per_axis();
    design_result out;
    out.design_index = design_index;
    out.layout = layout;
    for (bit_matrix& m : out.matrices) m = bit_matrix(n);

    std::size_t idx = 0;
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j, ++idx) {
            const success_bits bits = evaluate_controller(layout, weights[idx], envs, cfg);
            for (std::size_t k = 0; k < env_count; ++k) {
                if (bits & (1u << k)) out.matrices[k].set(i, j, true);
            }
        }
    }
    out.g = count_all_values(overlap(out.matrices));
    return out;
}

std::vector<design_result> evaluate_designs(std::span<const sensor_layout> layouts,
                                            const weight_grid& weights,
                                            const environment_set& envs, const sim_config& cfg,
                                            unsigned workers) {
    std::vector<design_result> out(layouts.size());
    parallel_for(layouts.size(), workers,
                 [&](std::size_t i) { out[i] = evaluate_design(layouts[i], weights, envs, cfg, i); });
    return out;
}

bool operator==(const sweep_snapshot& a, const sweep_snapshot& b) {
    return snapshot_json(a) == snapshot_json(b);
}

sweep_snapshot make_snapshot(const design_grid& designs, const weight_grid& weights,
                             const environment_set& envs, const sim_config& cfg) {
    sweep_snapshot s;
    s.model = model_of(cfg);
    s.radius = envs[0].radius;
    s.dt = cfg.dt;
    s.steps = cfg.steps;
    s.success_radius = cfg.success_radius;
    s.distance_floor = cfg.distance_floor;
    s.saturation = cfg.saturation;
    s.design_res = designs.positions_per_axis();
    s.weight_res = weights.values_per_axis();
    return s;
}

std::size_t sweep_manifest::completed_count() const {
    std::size_t total = 0;
    for (const auto& [first, last] : completed) total += last - first;
    return total;
}

sweep_manifest run_sweep(const design_grid& designs, const weight_grid& weights,
                         const environment_set& envs, const sim_config& cfg,
                         const sweep_options& options) {
    cfg.validate();
    if (options.batch_size == 0) throw config_error("batch size must be >= 1");
    if (options.output_path.empty() || options.checkpoint_path.empty()) {
        throw config_error("sweep needs both an output path and a checkpoint path");
    }

    sweep_manifest manifest;
    manifest.config = make_snapshot(designs, weights, envs, cfg);
    manifest.config_checksum = snapshot_checksum(manifest.config);
    manifest.total_designs = designs.size();
    manifest.results_path = options.output_path;
    manifest.partial_path = partial_path_for(options.output_path);
    manifest.matrices_dir = options.matrices_dir;

    std::set<std::size_t> done;
    std::map<std::size_t, std::string> lines;
    if (fs::exists(options.checkpoint_path)) {
        const sweep_manifest previous = read_manifest(options.checkpoint_path);
        if (previous.config_checksum != manifest.config_checksum || !(previous.config == manifest.config)) {
            throw checksum_mismatch("checkpoint " + options.checkpoint_path.string() +
                                    " was written for config " + previous.config_checksum +
                                    ", current config is " + manifest.config_checksum);
        }
        if (previous.complete && fs::exists(options.output_path)) return previous;
        for (const auto& [first, last] : previous.completed)
            for (std::size_t i = first; i < last; ++i) done.insert(i);
        lines = load_partial(previous.partial_path, done);
        // Anything the partial file lost is simply recomputed.
        done.clear();
        for (const auto& entry : lines) done.insert(entry.first);
    }
    if (options.matrices_dir) {
        std::error_code ec;
        fs::create_directories(*options.matrices_dir, ec);
        if (ec) throw io_error("cannot create " + options.matrices_dir->string() + ": " + ec.message());
    }

    {
        std::string kept;
        for (const auto& entry : lines) kept += entry.second + "\n";
        write_file_atomic(manifest.partial_path, kept);
    }
    manifest.completed = to_ranges(done);
    write_manifest(options.checkpoint_path, manifest);

    std::vector<std::size_t> pending;
    for (std::size_t i = 0; i < designs.size(); ++i)
        if (!done.count(i)) pending.push_back(i);

    const std::size_t resumed = done.size();
    std::size_t finished_here = 0;
    for (std::size_t start = 0; start < pending.size(); start += options.batch_size) {
        if (options.cancel && options.cancel->load()) break;
        if (options.stop_after && finished_here >= *options.stop_after) break;

        const std::size_t count = std::min(options.batch_size, pending.size() - start);
        std::vector<std::string> batch(count);
        parallel_for(count, options.workers, [&](std::size_t b) {
            const std::size_t index = pending[start + b];
            const design_result r = evaluate_design(designs[index], weights, envs, cfg, index);
            if (options.matrices_dir) write_matrix_dump(matrix_dump_path(*options.matrices_dir, index), r.matrices);
            batch[b] = format_record(r.record());
        });

        append_lines(manifest.partial_path, batch);
        for (std::size_t b = 0; b < count; ++b) {
            done.insert(pending[start + b]);
            lines[pending[start + b]] = std::move(batch[b]);
        }
        manifest.completed = to_ranges(done);
        write_manifest(options.checkpoint_path, manifest);
        finished_here += count;
        if (options.on_progress) options.on_progress({done.size(), designs.size(), resumed});
    }

    if (done.size() == designs.size()) {
        std::string all;
        for (const auto& entry : lines) all += entry.second + "\n";
        write_file_atomic(options.output_path, all);
        manifest.complete = true;
        write_manifest(options.checkpoint_path, manifest);
        std::error_code ec;
        fs::remove(manifest.partial_path, ec);
    }
    return manifest;
}

}  // namespace morphsweep
