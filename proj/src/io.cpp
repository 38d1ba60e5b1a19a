#include "trendlab/io.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <system_error>

#include <json.hpp>

#include "trendlab/error.hpp"

namespace trendlab::io {

using nlohmann::json;

std::string format_number(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return buf;
}

std::string format_exact(double v) {
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

void atomic_write(const std::filesystem::path& path, std::string_view contents) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::filesystem::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(ErrorKind::IngestError, "cannot open " + tmp.string() + " for writing");
    out.write(contents.data(), static_cast<std::streamsize>(contents.size()));
    if (!out) throw Error(ErrorKind::IngestError, "write failed for " + tmp.string());
  }
  std::filesystem::rename(tmp, path);
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::IngestError, "cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::filesystem::path sidecar_path(const std::filesystem::path& csv) {
  std::filesystem::path p = csv;
  p.replace_extension(".json");
  return p;
}

std::string panel_csv(const ReturnsPanel& panel) {
  const std::vector<Date> dates =
      panel.dates.empty() ? weekday_calendar(Date{2000, 1, 3}, static_cast<std::size_t>(panel.T())) : panel.dates;
  std::string out = "date";
  for (Eigen::Index j = 0; j < panel.n(); ++j) out += "," + panel.name(j);
  out += "\n";
  for (Eigen::Index t = 0; t < panel.T(); ++t) {
    out += dates[static_cast<std::size_t>(t)].iso();
    for (Eigen::Index j = 0; j < panel.n(); ++j) {
      out += ',';
      out += format_exact(panel.returns(t, j));
    }
    out += '\n';
  }
  return out;
}

std::string panel_sidecar(const ReturnsPanel& panel) {
  json j;
  json classes = json::array();
  for (auto c : panel.asset_classes) classes.push_back(std::string(to_string(c)));
  j["asset_classes"] = classes;
  j["seed"] = panel.seed;
  return j.dump(2) + "\n";
}

void write_panel(const ReturnsPanel& panel, const std::filesystem::path& csv) {
  atomic_write(csv, panel_csv(panel));
  atomic_write(sidecar_path(csv), panel_sidecar(panel));
}

namespace {

[[noreturn]] void ingest_fail(std::string_view source, std::size_t line, const std::string& what) {
  throw Error(ErrorKind::IngestError, std::string(source) + ":" + std::to_string(line) + ": " + what);
}

std::vector<std::string_view> split(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const auto comma = line.find(',', start);
    out.push_back(line.substr(start, comma == std::string_view::npos ? std::string_view::npos : comma - start));
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return out;
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

}  // namespace

ReturnsPanel parse_panel(std::string_view csv, std::string_view sidecar_json, std::string_view source) {
  std::vector<std::string_view> lines;
  for (std::size_t start = 0; start < csv.size();) {
    const auto nl = csv.find('\n', start);
    const auto end = nl == std::string_view::npos ? csv.size() : nl;
    lines.push_back(csv.substr(start, end - start));
    start = end + 1;
  }
  while (!lines.empty() && trim(lines.back()).empty()) lines.pop_back();
  if (lines.empty()) ingest_fail(source, 1, "empty file");

  const auto header = split(trim(lines[0]));
  if (header.size() < 2 || trim(header[0]) != "date") ingest_fail(source, 1, "header must be date,<asset>...");
  const auto n = static_cast<Eigen::Index>(header.size() - 1);

  ReturnsPanel panel;
  for (Eigen::Index j = 0; j < n; ++j) {
    const auto name = trim(header[static_cast<std::size_t>(j + 1)]);
    if (name.empty()) ingest_fail(source, 1, "empty asset name in column " + std::to_string(j + 2));
    panel.names.emplace_back(name);
  }

  const auto T = static_cast<Eigen::Index>(lines.size() - 1);
  if (T < 1) ingest_fail(source, 2, "no data rows");
  panel.returns.resize(T, n);
  panel.dates.reserve(static_cast<std::size_t>(T));
  for (Eigen::Index t = 0; t < T; ++t) {
    const std::size_t line_no = static_cast<std::size_t>(t) + 2;
    const auto cells = split(trim(lines[static_cast<std::size_t>(t + 1)]));
    if (static_cast<Eigen::Index>(cells.size()) != n + 1)
      ingest_fail(source, line_no, "expected " + std::to_string(n + 1) + " cells, found " + std::to_string(cells.size()));
    const auto date = Date::parse_iso(trim(cells[0]));
    if (!date) ingest_fail(source, line_no, "unparseable date '" + std::string(cells[0]) + "'");
    if (!panel.dates.empty() && !(panel.dates.back() < *date))
      ingest_fail(source, line_no, "dates must be strictly increasing");
    panel.dates.push_back(*date);
    for (Eigen::Index j = 0; j < n; ++j) {
      const auto cell = trim(cells[static_cast<std::size_t>(j + 1)]);
      if (cell.empty()) ingest_fail(source, line_no, "missing value in column " + std::to_string(j + 2));
      double v = 0.0;
      const auto res = std::from_chars(cell.data(), cell.data() + cell.size(), v);
      if (res.ec != std::errc{} || res.ptr != cell.data() + cell.size() || !std::isfinite(v))
        ingest_fail(source, line_no, "bad value '" + std::string(cell) + "' in column " + std::to_string(j + 2));
      panel.returns(t, j) = v;
    }
  }

  json side;
  try {
    side = json::parse(sidecar_json);
  } catch (const json::exception& e) {
    throw Error(ErrorKind::IngestError, std::string(source) + " sidecar: " + e.what());
  }
  if (!side.contains("asset_classes") || !side["asset_classes"].is_array())
    throw Error(ErrorKind::IngestError, std::string(source) + " sidecar: missing asset_classes array");
  if (static_cast<Eigen::Index>(side["asset_classes"].size()) != n)
    throw Error(ErrorKind::IngestError, std::string(source) + " sidecar: asset_classes length does not match columns");
  for (const auto& c : side["asset_classes"]) {
    if (!c.is_string()) throw Error(ErrorKind::IngestError, std::string(source) + " sidecar: asset class must be a string");
    try {
      panel.asset_classes.push_back(parse_asset_class(c.get<std::string>()));
    } catch (const Error& e) {
      throw Error(ErrorKind::IngestError, std::string(source) + " sidecar: " + e.what());
    }
  }
  if (side.contains("seed") && side["seed"].is_number_unsigned()) panel.seed = side["seed"].get<std::uint64_t>();
  return panel;
}

ReturnsPanel read_panel(const std::filesystem::path& csv) {
  const auto side = sidecar_path(csv);
  if (!std::filesystem::exists(side)) throw Error(ErrorKind::IngestError, "missing sidecar " + side.string());
  return parse_panel(read_file(csv), read_file(side), csv.string());
}

std::string matrix_csv(const Eigen::MatrixXd& m, const std::vector<std::string>& header) {
  std::string out;
  for (std::size_t i = 0; i < header.size(); ++i) out += (i ? "," : "") + header[i];
  if (!header.empty()) out += '\n';
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    for (Eigen::Index c = 0; c < m.cols(); ++c) {
      if (c) out += ',';
      out += format_number(m(r, c));
    }
    out += '\n';
  }
  return out;
}

std::uint64_t fnv1a(std::string_view bytes) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::string hex64(std::uint64_t v) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

}  // namespace trendlab::io
