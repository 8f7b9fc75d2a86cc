#include "morphsweep/results_io.hpp"

#include <cstdio>
#include <fstream>
#include <iterator>
#include <sstream>

#include <json.hpp>

#include "morphsweep/errors.hpp"

namespace morphsweep {

using nlohmann::json;
namespace fs = std::filesystem;

namespace {

constexpr char matrix_magic[4] = {'M', 'S', 'W', 'P'};
constexpr std::string_view manifest_format = "morphsweep-manifest";

[[noreturn]] void bad_record(std::size_t line_no, const std::string& what) {
    throw parse_error("results line " + std::to_string(line_no) + ": " + what);
}

vec2 parse_point(const json& j, const char* key, std::size_t line_no) {
    const auto it = j.find(key);
    if (it == j.end() || !it->is_array() || it->size() != 2 || !(*it)[0].is_number() ||
        !(*it)[1].is_number()) {
        bad_record(line_no, std::string("\"") + key + "\" must be a [x, y] number pair");
    }
    return {(*it)[0].get<double>(), (*it)[1].get<double>()};
}

json snapshot_to_json(const sweep_snapshot& s) {
    json j;
    j["model"] = std::string(to_string(s.model));
    j["radius"] = s.radius;
    j["dt"] = s.dt;
    j["steps"] = s.steps;
    j["success_radius"] = s.success_radius;
    j["distance_floor"] = s.distance_floor;
    if (s.saturation) {
        j["v_max"] = s.saturation->v_max;
        j["omega_max"] = s.saturation->omega_max;
    } else {
        j["v_max"] = nullptr;
        j["omega_max"] = nullptr;
    }
    j["design_res"] = s.design_res;
    j["weight_res"] = s.weight_res;
    return j;
}

sweep_snapshot snapshot_from_json(const json& j) {
    sweep_snapshot s;
    s.model = parse_model(j.at("model").get<std::string>());
    s.radius = j.at("radius").get<double>();
    s.dt = j.at("dt").get<double>();
    s.steps = j.at("steps").get<std::int64_t>();
    s.success_radius = j.at("success_radius").get<double>();
    s.distance_floor = j.at("distance_floor").get<double>();
    if (!j.at("v_max").is_null()) {
        s.saturation = saturation_limits{j.at("v_max").get<double>(), j.at("omega_max").get<double>()};
    }
    s.design_res = j.at("design_res").get<int>();
    s.weight_res = j.at("weight_res").get<int>();
    return s;
}

void put_u16(std::string& out, std::uint16_t v) {
    out.push_back(static_cast<char>(v & 0xff));
    out.push_back(static_cast<char>(v >> 8));
}

std::uint16_t get_u16(const unsigned char* p) {
    return static_cast<std::uint16_t>(p[0] | (p[1] << 8));
}

std::string read_binary(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw io_error("cannot open " + path.string());
    return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

}  // namespace

std::string format_double(double value) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", value);
    return buf;
}

std::string format_record(const design_record& r) {
    std::string s;
    s.reserve(160);
    s += "{\"design_index\":" + std::to_string(r.design_index);
    s += ",\"l1\":[" + format_double(r.layout.l1.x) + "," + format_double(r.layout.l1.y) + "]";
    s += ",\"l2\":[" + format_double(r.layout.l2.x) + "," + format_double(r.layout.l2.y) + "]";
    s += ",\"g\":[";
    for (std::size_t k = 0; k < r.g.size(); ++k) {
        if (k) s += ",";
        s += std::to_string(r.g[k]);
    }
    s += "],\"M_L\":" + format_double(r.metrics.m_l);
    s += ",\"M_CF\":" + format_double(r.metrics.m_cf) + "}";
    return s;
}

design_record parse_record(std::string_view line, std::size_t line_no) {
    json j;
    try {
        j = json::parse(line);
    } catch (const json::parse_error& e) {
        bad_record(line_no, e.what());
    }
    if (!j.is_object()) bad_record(line_no, "record is not a JSON object");

    design_record r;
    const auto idx = j.find("design_index");
    if (idx == j.end() || !idx->is_number_unsigned()) {
        bad_record(line_no, "\"design_index\" must be a non-negative integer");
    }
    r.design_index = idx->get<std::size_t>();
    r.layout.l1 = parse_point(j, "l1", line_no);
    r.layout.l2 = parse_point(j, "l2", line_no);

    const auto g = j.find("g");
    if (g == j.end() || !g->is_array() || g->size() != 5) {
        bad_record(line_no, "\"g\" must be an array of five counts");
    }
    for (std::size_t k = 0; k < 5; ++k) {
        if (!(*g)[k].is_number_unsigned()) bad_record(line_no, "\"g\" entries must be non-negative integers");
        r.g[k] = (*g)[k].get<std::uint64_t>();
    }
    r.metrics = metrics_from_counts(r.g);
    return r;
}

std::vector<design_record> read_results(const fs::path& path) {
    std::ifstream in(path);
    if (!in) throw io_error("cannot open results file " + path.string());
    std::vector<design_record> out;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        out.push_back(parse_record(line, line_no));
    }
    if (in.bad()) throw io_error("error reading " + path.string());
    return out;
}

fs::path matrix_dump_path(const fs::path& dir, std::size_t design_index) {
    char name[40];
    std::snprintf(name, sizeof name, "design_%06zu.mswp", design_index);
    return dir / name;
}

void write_matrix_dump(const fs::path& path, const std::array<bit_matrix, env_count>& matrices) {
    const int n = matrices[0].n();
    if (n > 0xffff) throw dimension_mismatch("matrix dimension does not fit in u16");
    std::string out(matrix_magic, sizeof matrix_magic);
    put_u16(out, matrix_dump_version);
    put_u16(out, static_cast<std::uint16_t>(n));
    out.push_back(static_cast<char>(env_count));
    for (const bit_matrix& m : matrices) {
        if (m.n() != n) throw dimension_mismatch("matrix dump needs equally sized matrices");
        out.append(reinterpret_cast<const char*>(m.bytes().data()), m.bytes().size());
    }
    write_file_atomic(path, out);
}

std::array<bit_matrix, env_count> read_matrix_dump(const fs::path& path) {
    if (!fs::exists(path)) throw missing_matrix_dump("no matrix dump at " + path.string());
    const std::string data = read_binary(path);
    constexpr std::size_t header = 4 + 2 + 2 + 1;
    const auto* p = reinterpret_cast<const unsigned char*>(data.data());
    if (data.size() < header || data.compare(0, 4, matrix_magic, 4) != 0) {
        throw parse_error(path.string() + ": not a matrix dump (bad magic)");
    }
    if (get_u16(p + 4) != matrix_dump_version) {
        throw parse_error(path.string() + ": unsupported matrix dump version " +
                          std::to_string(get_u16(p + 4)));
    }
    const int n = get_u16(p + 6);
    if (p[8] != env_count) {
        throw parse_error(path.string() + ": expected 4 environments, found " + std::to_string(p[8]));
    }
    const std::size_t per = bit_matrix::packed_size(n);
    if (data.size() != header + env_count * per) {
        throw parse_error(path.string() + ": truncated or oversized matrix dump");
    }
    std::array<bit_matrix, env_count> out;
    for (std::size_t k = 0; k < env_count; ++k) {
        const auto* begin = p + header + k * per;
        out[k] = bit_matrix(n, std::vector<std::uint8_t>(begin, begin + per));
    }
    return out;
}

std::string snapshot_json(const sweep_snapshot& snapshot) { return snapshot_to_json(snapshot).dump(); }

std::string snapshot_checksum(const sweep_snapshot& snapshot) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : snapshot_json(snapshot)) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

void write_manifest(const fs::path& path, const sweep_manifest& m) {
    json j;
    j["format"] = manifest_format;
    j["version"] = 1;
    j["config"] = snapshot_to_json(m.config);
    j["config_checksum"] = m.config_checksum;
    j["total_designs"] = m.total_designs;
    json ranges = json::array();
    for (const auto& [first, last] : m.completed) ranges.push_back({first, last});
    j["completed"] = std::move(ranges);
    j["complete"] = m.complete;
    j["outputs"] = {{"results", m.results_path.string()},
                    {"partial", m.partial_path.string()},
                    {"matrices", m.matrices_dir ? json(m.matrices_dir->string()) : json(nullptr)}};
    write_file_atomic(path, j.dump(2) + "\n");
}

sweep_manifest read_manifest(const fs::path& path) {
    std::ifstream in(path);
    if (!in) throw io_error("cannot open manifest " + path.string());
    sweep_manifest m;
    try {
        const json j = json::parse(in);
        if (j.at("format") != manifest_format) throw parse_error(path.string() + ": not a sweep manifest");
        m.config = snapshot_from_json(j.at("config"));
        m.config_checksum = j.at("config_checksum").get<std::string>();
        m.total_designs = j.at("total_designs").get<std::size_t>();
        for (const json& r : j.at("completed")) {
            m.completed.emplace_back(r.at(0).get<std::size_t>(), r.at(1).get<std::size_t>());
        }
        m.complete = j.at("complete").get<bool>();
        const json& outputs = j.at("outputs");
        m.results_path = outputs.at("results").get<std::string>();
        m.partial_path = outputs.at("partial").get<std::string>();
        if (!outputs.at("matrices").is_null()) m.matrices_dir = outputs.at("matrices").get<std::string>();
    } catch (const json::exception& e) {
        throw parse_error(path.string() + ": malformed manifest: " + e.what());
    }
    for (const auto& [first, last] : m.completed) {
        if (first >= last || last > m.total_designs) {
            throw parse_error(path.string() + ": completed range outside [0, total_designs)");
        }
    }
    return m;
}

void write_file_atomic(const fs::path& path, std::string_view contents) {
    fs::path tmp = path;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw io_error("cannot write " + tmp.string());
        out.write(contents.data(), static_cast<std::streamsize>(contents.size()));
        out.flush();
        if (!out) throw io_error("write failed for " + tmp.string());
    }
    std::error_code ec;
    fs::rename(tmp, path, ec);
    if (ec) throw io_error("cannot rename " + tmp.string() + " to " + path.string() + ": " + ec.message());
}

}  // namespace morphsweep
