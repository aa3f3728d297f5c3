#include "enspace/trajectory_io.hpp"

#include <charconv>
#include <fstream>
#include <sstream>

#include <fmt/format.h>

#include "enspace/errors.hpp"

namespace enspace {

void write_trajectory_csv(std::ostream& out, const Trajectory& traj) {
  const auto header = trajectory_header(traj.plant);
  const auto& cols = trajectory_columns();
  std::string line;
  for (std::size_t k = 0; k < header.size(); ++k) {
    if (k > 0) line += ',';
    line += header[k];
  }
  out << line << '\n';
  fmt::memory_buffer buf;
  for (const auto& row : traj.rows) {
    buf.clear();
    for (std::size_t k = 0; k < cols.size(); ++k) {
      if (k > 0) buf.push_back(',');
      fmt::format_to(std::back_inserter(buf), "{:.17g}", row.*(cols[k].field));
    }
    buf.push_back('\n');
    out.write(buf.data(), static_cast<std::streamsize>(buf.size()));
  }
}

void write_trajectory_csv(const std::filesystem::path& path,
                          const Trajectory& traj) {
  std::ofstream out(path);
  if (!out) throw InvalidInput("cannot write " + path.string());
  write_trajectory_csv(out, traj);
  if (!out) throw InvalidInput("write failed for " + path.string());
}

namespace {

double parse_field(std::string_view s, long line, std::size_t col) {
  // from_chars does not accept a leading '+' or the "nan" spelling variants
  // some writers emit, so fall back to strtod for those.
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec == std::errc() && ptr == s.data() + s.size()) return v;
  const std::string copy(s);
  char* end = nullptr;
  v = std::strtod(copy.c_str(), &end);
  if (copy.empty() || end != copy.c_str() + copy.size()) {
    throw InvalidInput(fmt::format("trajectory CSV line {}, column {}: '{}' is not a number",
                                   line, col + 1, copy));
  }
  return v;
}

}  // namespace

Trajectory read_trajectory_csv(std::istream& in, double step, int record_every) {
  std::string line;
  if (!std::getline(in, line)) throw InvalidInput("trajectory CSV: empty file");
  if (!line.empty() && line.back() == '\r') line.pop_back();

  std::vector<std::string> names;
  {
    std::stringstream ss(line);
    for (std::string f; std::getline(ss, f, ',');) names.push_back(f);
  }
  Trajectory traj;
  traj.step = step;
  traj.record_every = record_every;
  bool matched = false;
  for (PlantKind p : {PlantKind::rlc, PlantKind::generator}) {
    if (names == trajectory_header(p)) {
      traj.plant = p;
      matched = true;
    }
  }
  if (!matched) {
    const auto expect = trajectory_header(PlantKind::rlc);
    std::string detail = fmt::format("{} columns, expected {}", names.size(),
                                     expect.size());
    for (std::size_t k = 0; k < std::min(names.size(), expect.size()); ++k) {
      if (k != 1 && k != 2 && names[k] != expect[k]) {
        detail = fmt::format("column {} is '{}', expected '{}'", k + 1,
                             names[k], expect[k]);
        break;
      }
    }
    throw InvalidInput("trajectory CSV header mismatch: " + detail);
  }

  const auto& cols = trajectory_columns();
  long lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    TrajectoryRow row;
    std::size_t col = 0, start = 0;
    while (true) {
      const auto comma = line.find(',', start);
      const std::string_view field(line.data() + start,
                                   (comma == std::string::npos ? line.size() : comma) - start);
      if (col >= cols.size()) {
        throw InvalidInput(fmt::format("trajectory CSV line {}: too many fields", lineno));
      }
      row.*(cols[col].field) = parse_field(field, lineno, col);
      ++col;
      if (comma == std::string::npos) break;
      start = comma + 1;
    }
    if (col != cols.size()) {
      throw InvalidInput(fmt::format("trajectory CSV line {}: {} fields, expected {}",
                                     lineno, col, cols.size()));
    }
    traj.rows.push_back(row);
  }
  return traj;
}

Trajectory read_trajectory_csv(const std::filesystem::path& path, double step,
                               int record_every) {
  std::ifstream in(path);
  if (!in) throw InvalidInput("cannot open " + path.string());
  return read_trajectory_csv(in, step, record_every);
}

}  // namespace enspace
