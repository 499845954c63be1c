#pragma once

#include <charconv>
#include <cstdio>
#include <fstream>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "rieszcap/vec.hpp"

// Hit files: header row x1,...,xd then one point per row. Values are written
// with 17 significant digits so a write/read round trip is exact.

namespace rieszcap {

class CsvError : public std::runtime_error {
 public:
  explicit CsvError(const std::string& what) : std::runtime_error(what) {}
};

namespace detail {

inline std::string format_double(double v) {
  char buf[32];
  const int len = std::snprintf(buf, sizeof buf, "%.17g", v);
  return std::string(buf, static_cast<std::size_t>(len));
}

inline std::vector<std::string_view> split_commas(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const std::size_t comma = line.find(',', start);
    out.push_back(line.substr(start, comma == std::string_view::npos ? std::string_view::npos : comma - start));
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return out;
}

inline std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

}  // namespace detail

inline std::string hits_header(int dim) {
  std::string h;
  for (int i = 1; i <= dim; ++i) {
    if (i > 1) h += ',';
    h += "x" + std::to_string(i);
  }
  return h;
}

inline void write_hits_csv(std::ostream& out, const std::vector<Vec>& points, int dim) {
  out << hits_header(dim) << '\n';
  for (const auto& p : points) {
    require_same_dim(p, dim, "hit point");
    for (int i = 0; i < dim; ++i) {
      if (i > 0) out << ',';
      out << detail::format_double(p[i]);
    }
    out << '\n';
  }
}

inline void write_hits_csv(const std::string& path, const std::vector<Vec>& points, int dim) {
  std::ofstream out(path);
  if (!out) throw CsvError("cannot open '" + path + "' for writing");
  write_hits_csv(out, points, dim);
}

/// Reads a hit file; the dimension comes from the header.
inline std::vector<Vec> read_hits_csv(std::istream& in, int* dim_out = nullptr) {
  std::string line;
  if (!std::getline(in, line)) throw CsvError("hit file is empty");
  const auto header = detail::split_commas(detail::trim(line));
  const int dim = static_cast<int>(header.size());
  if (dim < 1 || dim > kMaxDim) throw CsvError("hit file header has an unsupported number of columns");
  for (int i = 0; i < dim; ++i) {
    if (detail::trim(header[static_cast<std::size_t>(i)]) != "x" + std::to_string(i + 1)) {
      throw CsvError("hit file header must be x1,...,xd");
    }
  }
  std::vector<Vec> points;
  long line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    const auto t = detail::trim(line);
    if (t.empty()) continue;
    const auto fields = detail::split_commas(t);
    if (static_cast<int>(fields.size()) != dim) {
      throw CsvError("line " + std::to_string(line_no) + ": expected " + std::to_string(dim) + " values, got " +
                     std::to_string(fields.size()));
    }
    Vec p(dim);
    for (int i = 0; i < dim; ++i) {
      const auto f = detail::trim(fields[static_cast<std::size_t>(i)]);
      double v = 0.0;
      const auto res = std::from_chars(f.data(), f.data() + f.size(), v);
      if (res.ec != std::errc() || res.ptr != f.data() + f.size()) {
        throw CsvError("line " + std::to_string(line_no) + ", column " + std::to_string(i + 1) + ": '" +
                       std::string(f) + "' is not a number");
      }
      p[i] = v;
    }
    points.push_back(p);
  }
  if (dim_out) *dim_out = dim;
  return points;
}

inline std::vector<Vec> read_hits_csv(const std::string& path, int* dim_out = nullptr) {
  std::ifstream in(path);
  if (!in) throw CsvError("cannot open hit file '" + path + "'");
  try {
    return read_hits_csv(in, dim_out);
  } catch (const CsvError& e) {
    throw CsvError(path + ": " + e.what());
  }
}

/// Path dump: one row per recorded position, columns path_id,step,x1..xd.
inline void write_path_dump(std::ostream& out, const std::vector<std::vector<Vec>>& paths, int dim) {
  out << "path_id,step," << hits_header(dim) << '\n';
  for (std::size_t id = 0; id < paths.size(); ++id) {
    for (std::size_t step = 0; step < paths[id].size(); ++step) {
      out << id << ',' << step;
      for (int i = 0; i < dim; ++i) out << ',' << detail::format_double(paths[id][step][i]);
      out << '\n';
    }
  }
}

}  // namespace rieszcap
