#include "privci/dataset.hpp"

#include <algorithm>
#include <cerrno>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <istream>
#include <sstream>

#include "privci/errors.hpp"

namespace privci {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> out;
  std::string field;
  std::stringstream ss(line);
  while (std::getline(ss, field, ',')) out.push_back(trim(field));
  if (!line.empty() && line.back() == ',') out.emplace_back("");
  return out;
}

double parse_field(const std::string& field, std::size_t row, std::size_t col) {
  if (field.empty()) throw ParseFailure(row, col, "empty field");
  errno = 0;
  char* end = nullptr;
  const double v = std::strtod(field.c_str(), &end);
  if (end != field.c_str() + field.size() || errno == ERANGE) {
    throw ParseFailure(row, col, "not a number: '" + field + "'");
  }
  if (!std::isfinite(v)) throw NonFiniteValue(row, col, "non-finite value");
  return v;
}

}  // namespace

double infer_bound(std::size_t n, double c) {
  if (n < 2) throw InvalidParameter("infer_bound requires n >= 2");
  if (!(c > 0.0)) throw InvalidParameter("infer_bound requires c > 0");
  return std::sqrt(c * std::log(static_cast<double>(n)));
}

BoundedDataset rescale(const Dataset& ds, double scale_x, double scale_y,
                       bool clip) {
  if (!(scale_x > 0.0 && scale_y > 0.0)) {
    throw InvalidParameter("rescale requires positive scales");
  }
  if (ds.y.size() != ds.n() || ds.z.size() != ds.n() * ds.d) {
    throw DimensionMismatch("dataset column lengths disagree");
  }
  BoundedDataset out;
  out.z = ds.z;
  out.d = ds.d;
  out.scale_x = scale_x;
  out.scale_y = scale_y;
  out.x.reserve(ds.n());
  out.y.reserve(ds.n());
  for (std::size_t i = 0; i < ds.n(); ++i) {
    double xv = ds.x[i] / scale_x;
    double yv = ds.y[i] / scale_y;
    if (std::abs(xv) > 1.0) {
      if (!clip) throw BoundViolation(i, "x outside [-1, 1] after rescaling");
      xv = std::clamp(xv, -1.0, 1.0);
      ++out.clipped_x;
    }
    if (std::abs(yv) > 1.0) {
      if (!clip) throw BoundViolation(i, "y outside [-1, 1] after rescaling");
      yv = std::clamp(yv, -1.0, 1.0);
      ++out.clipped_y;
    }
    out.x.push_back(xv);
    out.y.push_back(yv);
  }
  return out;
}

Dataset load_csv(std::istream& in, std::size_t d) {
  if (d == 0) throw InvalidParameter("load_csv requires d >= 1");
  std::string line;
  if (!std::getline(in, line)) throw TooFewRows("empty input");
  const auto header = split_csv_line(line);

  auto column_of = [&](const std::string& name) -> std::size_t {
    const auto it = std::find(header.begin(), header.end(), name);
    if (it == header.end()) throw MissingColumn("missing column '" + name + "'");
    return static_cast<std::size_t>(it - header.begin());
  };

  const std::size_t cx = column_of("x");
  const std::size_t cy = column_of("y");
  std::vector<std::size_t> cz(d);
  for (std::size_t j = 0; j < d; ++j) cz[j] = column_of("z" + std::to_string(j + 1));

  Dataset ds;
  ds.d = d;
  std::size_t row = 0;
  while (std::getline(in, line)) {
    if (trim(line).empty()) continue;
    const auto fields = split_csv_line(line);
    if (fields.size() != header.size()) {
      throw ParseFailure(row, fields.size(),
                         "row has " + std::to_string(fields.size()) +
                             " fields, header has " + std::to_string(header.size()));
    }
    ds.x.push_back(parse_field(fields[cx], row, cx));
    ds.y.push_back(parse_field(fields[cy], row, cy));
    for (std::size_t j = 0; j < d; ++j) {
      ds.z.push_back(parse_field(fields[cz[j]], row, cz[j]));
    }
    ++row;
  }
  if (ds.n() < 2) throw TooFewRows("need at least 2 data rows, got " +
                                   std::to_string(ds.n()));
  return ds;
}

Dataset load_csv(const std::string& path, std::size_t d) {
  std::ifstream f(path);
  if (!f) throw ParseFailure(0, 0, "cannot open file: " + path);
  return load_csv(f, d);
}

}  // namespace privci
