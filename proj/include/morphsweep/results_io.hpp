#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "morphsweep/bit_matrix.hpp"
#include "morphsweep/environments.hpp"
#include "morphsweep/metrics.hpp"
#include "morphsweep/sweep.hpp"

namespace morphsweep {

// printf-style "%.17g".
std::string format_double(double value);

// One JSON-lines results record, without the trailing newline:
// {"design_index":N,"l1":[x,y],"l2":[x,y],"g":[g0,..,g4],"M_L":m,"M_CF":m}
std::string format_record(const design_record& record);

// Parses one record. Metrics are recomputed from "g"; the stored floats are
// ignored. Throws parse_error mentioning `line_no`.
design_record parse_record(std::string_view line, std::size_t line_no);

// Reads a whole results file; blank lines are skipped.
std::vector<design_record> read_results(const std::filesystem::path& path);

// Binary per-design matrix dump: "MSWP", u16 version, u16 n, u8 env count
// (all little-endian), then one packed bitset per environment.
inline constexpr std::uint16_t matrix_dump_version = 1;

std::filesystem::path matrix_dump_path(const std::filesystem::path& dir, std::size_t design_index);
void write_matrix_dump(const std::filesystem::path& path,
                       const std::array<bit_matrix, env_count>& matrices);
std::array<bit_matrix, env_count> read_matrix_dump(const std::filesystem::path& path);

std::string snapshot_json(const sweep_snapshot& snapshot);
// FNV-1a 64 of the canonical snapshot JSON, as 16 hex digits.
std::string snapshot_checksum(const sweep_snapshot& snapshot);

void write_manifest(const std::filesystem::path& path, const sweep_manifest& manifest);
sweep_manifest read_manifest(const std::filesystem::path& path);

// Writes to a sibling temporary file and renames it over `path`.
void write_file_atomic(const std::filesystem::path& path, std::string_view contents);

}  // namespace morphsweep
