#pragma once

// File formats: return panels as CSV plus a JSON sidecar, matrix and table
// CSV export, and atomic writes.

#include <Eigen/Dense>

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "trendlab/market_model.hpp"

namespace trendlab::io {

/// %.12g formatting used for every report value.
std::string format_number(double v);

/// Shortest text that parses back to exactly `v`.
std::string format_exact(double v);

/// Writes `contents` to a temporary file beside `path` and renames it.
void atomic_write(const std::filesystem::path& path, std::string_view contents);

std::string read_file(const std::filesystem::path& path);

/// Sidecar path of a panel CSV: "x.csv" -> "x.json".
std::filesystem::path sidecar_path(const std::filesystem::path& csv);

/// Header `date,<asset>...`; dates default to a weekday calendar starting
/// 2000-01-03 when the panel has none. Returns are written exactly.
std::string panel_csv(const ReturnsPanel& panel);
std::string panel_sidecar(const ReturnsPanel& panel);

void write_panel(const ReturnsPanel& panel, const std::filesystem::path& csv);

/// Parses a panel CSV and its sidecar. Dates must be ISO-8601 and strictly
/// increasing; every cell must be a finite number. Errors are IngestError
/// with the offending line number.
ReturnsPanel parse_panel(std::string_view csv, std::string_view sidecar_json, std::string_view source = "input");
ReturnsPanel read_panel(const std::filesystem::path& csv);

/// CSV of a matrix with the given header (may be empty).
std::string matrix_csv(const Eigen::MatrixXd& m, const std::vector<std::string>& header);

/// 64-bit FNV-1a.
std::uint64_t fnv1a(std::string_view bytes);
std::string hex64(std::uint64_t v);

}  // namespace trendlab::io
