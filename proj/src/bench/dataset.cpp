#include "ta2s2/bench/dataset.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include "ta2s2/error.hpp"

namespace ta2s2::bench {

namespace {

struct CsvLine {
  std::size_t number = 0;
  std::vector<std::string> cells;
};

std::vector<std::string> split_cells(const std::string& line) {
  std::vector<std::string> cells;
  std::string cell;
  std::istringstream in(line);
  while (std::getline(in, cell, ',')) cells.push_back(cell);
  if (!line.empty() && line.back() == ',') cells.emplace_back();
  return cells;
}

std::vector<CsvLine> read_lines(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  std::vector<CsvLine> lines;
  std::string line;
  std::size_t number = 0;
  while (std::getline(in, line)) {
    ++number;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    lines.push_back({number, split_cells(line)});
  }
  return lines;
}

double parse_cell(const std::string& cell, std::size_t line, std::size_t column) {
  const char* first = cell.data();
  const char* last = cell.data() + cell.size();
  while (first < last && *first == ' ') ++first;
  while (last > first && *(last - 1) == ' ') --last;
  if (first < last && *first == '+') ++first;
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(first, last, v);
  if (ec != std::errc() || ptr != last || first == last)
    throw ParseError("non-numeric cell '" + cell + "'", line, column);
  if (!std::isfinite(v)) throw ParseError("non-finite value '" + cell + "'", line, column);
  return v;
}

// Header must read prefix1,...,prefixp followed by the literal trailing names.
std::size_t check_header(const CsvLine& header, const std::string& prefix, const std::vector<std::string>& trailing) {
  if (header.cells.size() < trailing.size() + 1) throw ParseError("header has too few columns", header.number, 1);
  const std::size_t p = header.cells.size() - trailing.size();
  for (std::size_t j = 0; j < p; ++j) {
    if (header.cells[j] != prefix + std::to_string(j + 1))
      throw ParseError("expected header '" + prefix + std::to_string(j + 1) + "', found '" + header.cells[j] + "'",
                       header.number, j + 1);
  }
  for (std::size_t j = 0; j < trailing.size(); ++j) {
    if (header.cells[p + j] != trailing[j])
      throw ParseError("expected header '" + trailing[j] + "', found '" + header.cells[p + j] + "'", header.number,
                       p + j + 1);
  }
  return p;
}

void check_width(const CsvLine& line, std::size_t width) {
  if (line.cells.size() != width)
    throw ParseError("expected " + std::to_string(width) + " cells, found " + std::to_string(line.cells.size()),
                     line.number, std::min(line.cells.size(), width) + 1);
}

Matrix parse_block(const std::vector<CsvLine>& lines, std::size_t begin, std::size_t width) {
  Matrix M(static_cast<Eigen::Index>(lines.size() - begin), static_cast<Eigen::Index>(width));
  for (std::size_t r = begin; r < lines.size(); ++r) {
    check_width(lines[r], width);
    for (std::size_t c = 0; c < width; ++c)
      M(static_cast<Eigen::Index>(r - begin), static_cast<Eigen::Index>(c)) =
          parse_cell(lines[r].cells[c], lines[r].number, c + 1);
  }
  return M;
}

std::ofstream open_output(const std::filesystem::path& path) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  return out;
}

void write_header(std::ostream& out, const std::string& prefix, Eigen::Index p, const std::vector<std::string>& tail) {
  for (Eigen::Index j = 0; j < p; ++j) out << (j ? "," : "") << prefix << (j + 1);
  for (const auto& t : tail) out << ',' << t;
  out << '\n';
}

void write_row(std::ostream& out, const Eigen::Ref<const Vector>& row) {
  for (Eigen::Index j = 0; j < row.size(); ++j) out << (j ? "," : "") << format_double(row(j));
  out << '\n';
}

}  // namespace

ParseError::ParseError(const std::string& what, std::size_t line, std::size_t column)
    : std::runtime_error("line " + std::to_string(line) + ", column " + std::to_string(column) + ": " + what),
      line_(line),
      column_(column) {}

void Bounds::validate() const {
  if (lower.size() != upper.size() || lower.size() == 0) throw DomainError("bounds: size mismatch");
  for (Eigen::Index i = 0; i < lower.size(); ++i) {
    if (!(std::isfinite(lower(i)) && std::isfinite(upper(i)) && lower(i) < upper(i)))
      throw DomainError("bounds: degenerate range in column " + std::to_string(i + 1));
  }
}

Matrix rescale_to_unit(const Matrix& raw, const Bounds& bounds) {
  bounds.validate();
  if (raw.cols() != bounds.lower.size()) throw DomainError("rescale: column count does not match bounds");
  const Eigen::RowVectorXd width = (bounds.upper - bounds.lower).transpose();
  return (raw.rowwise() - bounds.lower.transpose()).array().rowwise() / width.array();
}

Matrix rescale_from_unit(const Matrix& unit, const Bounds& bounds) {
  bounds.validate();
  if (unit.cols() != bounds.lower.size()) throw DomainError("rescale: column count does not match bounds");
  const Eigen::RowVectorXd width = (bounds.upper - bounds.lower).transpose();
  Matrix out = unit.array().rowwise() * width.array();
  return out.rowwise() + bounds.lower.transpose();
}

Dataset ingest_csv(const std::filesystem::path& path) {
  const auto lines = read_lines(path);
  if (lines.empty()) throw ParseError("empty file", 1, 1);
  const std::size_t p = check_header(lines[0], "x", {"y"});

  std::optional<Vector> lower, upper;
  std::size_t first_data = 1;
  while (first_data < lines.size() && !lines[first_data].cells.empty() &&
         (lines[first_data].cells[0] == "#lower" || lines[first_data].cells[0] == "#upper")) {
    const auto& line = lines[first_data];
    check_width(line, p + 1);
    Vector b(static_cast<Eigen::Index>(p));
    for (std::size_t c = 0; c < p; ++c) b(static_cast<Eigen::Index>(c)) = parse_cell(line.cells[c + 1], line.number, c + 2);
    (line.cells[0] == "#lower" ? lower : upper) = b;
    ++first_data;
  }
  if (lower.has_value() != upper.has_value())
    throw ParseError("bounds need both #lower and #upper rows", lines[first_data - 1].number, 1);
  if (lines.size() - first_data < 2) throw ParseError("need at least 2 data rows", lines.back().number, 1);

  const Matrix block = parse_block(lines, first_data, p + 1);
  Dataset ds;
  ds.train.X = block.leftCols(static_cast<Eigen::Index>(p));
  ds.train.y = block.col(static_cast<Eigen::Index>(p));
  if (lower) {
    Bounds b{*lower, *upper};
    ds.train.X = rescale_to_unit(ds.train.X, b);
    ds.input_bounds = std::move(b);
  }
  ds.train.validate();
  return ds;
}

void write_dataset_csv(const std::filesystem::path& path, const TrainingSet& ts, const std::optional<Bounds>& bounds) {
  auto out = open_output(path);
  write_header(out, "x", ts.p(), {"y"});
  Matrix X = ts.X;
  if (bounds) {
    out << "#lower";
    for (Eigen::Index j = 0; j < bounds->lower.size(); ++j) out << ',' << format_double(bounds->lower(j));
    out << "\n#upper";
    for (Eigen::Index j = 0; j < bounds->upper.size(); ++j) out << ',' << format_double(bounds->upper(j));
    out << '\n';
    X = rescale_from_unit(ts.X, *bounds);
  }
  for (Eigen::Index i = 0; i < ts.n(); ++i) {
    Vector row(ts.p() + 1);
    row.head(ts.p()) = X.row(i).transpose();
    row(ts.p()) = ts.y(i);
    write_row(out, row);
  }
}

Matrix read_design_csv(const std::filesystem::path& path) {
  const auto lines = read_lines(path);
  if (lines.empty()) throw ParseError("empty file", 1, 1);
  const std::size_t p = check_header(lines[0], "x", {});
  return parse_block(lines, 1, p);
}

void write_design_csv(const std::filesystem::path& path, const Matrix& X) {
  auto out = open_output(path);
  write_header(out, "x", X.cols(), {});
  for (Eigen::Index i = 0; i < X.rows(); ++i) write_row(out, X.row(i).transpose());
}

void write_samples_csv(const std::filesystem::path& path, const WeightedSampleSet& samples) {
  auto out = open_output(path);
  if (samples.size() == 0) throw DomainError("write_samples_csv: no samples");
  const Eigen::Index dim = samples.points.front().size();
  write_header(out, "log_phi", dim - 1, {"z_delta", "H"});
  for (std::size_t i = 0; i < samples.size(); ++i) {
    Vector row(dim + 1);
    row.head(dim) = samples.points[i];
    row(dim) = samples.H[i];
    write_row(out, row);
  }
}

WeightedSampleSet read_samples_csv(const std::filesystem::path& path) {
  const auto lines = read_lines(path);
  if (lines.empty()) throw ParseError("empty file", 1, 1);
  const std::size_t p = check_header(lines[0], "log_phi", {"z_delta", "H"});
  if (lines.size() < 2) throw ParseError("no samples", lines[0].number, 1);
  const Matrix block = parse_block(lines, 1, p + 2);
  WeightedSampleSet s;
  for (Eigen::Index i = 0; i < block.rows(); ++i) {
    s.points.push_back(block.row(i).head(static_cast<Eigen::Index>(p + 1)).transpose());
    s.H.push_back(block(i, static_cast<Eigen::Index>(p + 1)));
  }
  s.set_uniform_weights();
  return s;
}

std::string format_double(double v) {
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  if (ec != std::errc()) throw std::runtime_error("format_double: conversion failed");
  return std::string(buf, ptr);
}

}  // namespace ta2s2::bench
