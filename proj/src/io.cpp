#include "lassoggm/io.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace lassoggm {

namespace fs = std::filesystem;

namespace {

std::vector<std::string> split_line(const std::string& line) {
  std::vector<std::string> out;
  std::string cell;
  std::istringstream is(line);
  while (std::getline(is, cell, ',')) {
    while (!cell.empty() && (cell.back() == '\r' || cell.back() == ' ')) cell.pop_back();
    std::size_t start = 0;
    while (start < cell.size() && cell[start] == ' ') ++start;
    cell = cell.substr(start);
    if (cell.size() >= 2 && cell.front() == '"' && cell.back() == '"') {
      cell = cell.substr(1, cell.size() - 2);
    }
    out.push_back(cell);
  }
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

std::ifstream open_in(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open '" + path.string() + "' for reading");
  return in;
}

std::ofstream open_out(const fs::path& path) {
  if (path.has_parent_path()) {
    std::error_code ec;
    fs::create_directories(path.parent_path(), ec);
    if (ec) throw IoError("cannot create directory '" + path.parent_path().string() + "'");
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open '" + path.string() + "' for writing");
  return out;
}

double parse_cell(const std::string& s, const fs::path& path, std::size_t row) {
  try {
    std::size_t used = 0;
    const double v = std::stod(s, &used);
    if (used != s.size()) throw std::invalid_argument(s);
    return v;
  } catch (const std::exception&) {
    throw IoError(path.string() + ": row " + std::to_string(row) + ": cannot parse '" + s + "'");
  }
}

std::vector<std::vector<double>> read_rows(std::ifstream& in, const fs::path& path,
                                           std::size_t width) {
  std::vector<std::vector<double>> rows;
  std::string line;
  std::size_t row = 1;
  while (std::getline(in, line)) {
    ++row;
    if (line.empty() || line == "\r") continue;
    const auto cells = split_line(line);
    if (cells.size() != width) {
      throw IoError(path.string() + ": row " + std::to_string(row) + " has " +
                    std::to_string(cells.size()) + " fields, expected " + std::to_string(width));
    }
    std::vector<double> v;
    for (const auto& c : cells) v.push_back(parse_cell(c, path, row));
    rows.push_back(std::move(v));
  }
  return rows;
}

}  // namespace

std::string format_double(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

LabeledData read_data_csv(const fs::path& path) {
  auto in = open_in(path);
  std::string header;
  if (!std::getline(in, header)) throw IoError(path.string() + ": empty file");
  LabeledData out;
  out.labels = split_line(header);
  const auto rows = read_rows(in, path, out.labels.size());
  Matrix m(static_cast<Index>(rows.size()), static_cast<Index>(out.labels.size()));
  for (std::size_t i = 0; i < rows.size(); ++i) {
    for (std::size_t j = 0; j < rows[i].size(); ++j) {
      m(static_cast<Index>(i), static_cast<Index>(j)) = rows[i][j];
    }
  }
  out.data = DataMatrix::from_samples(m);
  return out;
}

void write_data_csv(const fs::path& path, const DataMatrix& y,
                    const std::vector<std::string>& labels) {
  auto out = open_out(path);
  for (std::size_t j = 0; j < labels.size(); ++j) out << (j ? "," : "") << labels[j];
  out << '\n';
  for (Index i = 0; i < y.n(); ++i) {
    for (Index j = 0; j < y.p(); ++j) out << (j ? "," : "") << format_double(y.y(j, i));
    out << '\n';
  }
  if (!out) throw IoError("write failed for '" + path.string() + "'");
}

LabeledMatrix read_matrix_csv(const fs::path& path) {
  auto in = open_in(path);
  std::string header;
  if (!std::getline(in, header)) throw IoError(path.string() + ": empty file");
  LabeledMatrix out;
  out.labels = split_line(header);
  const auto rows = read_rows(in, path, out.labels.size());
  if (rows.size() != out.labels.size()) {
    throw IoError(path.string() + ": matrix is not square");
  }
  const auto p = static_cast<Index>(rows.size());
  out.values = Matrix(p, p);
  for (Index i = 0; i < p; ++i) {
    for (Index j = 0; j < p; ++j) {
      out.values(i, j) = rows[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];
    }
  }
  return out;
}

void write_matrix_csv(const fs::path& path, const Matrix& m,
                      const std::vector<std::string>& labels) {
  auto out = open_out(path);
  for (std::size_t j = 0; j < labels.size(); ++j) out << (j ? "," : "") << labels[j];
  out << '\n';
  for (Index i = 0; i < m.rows(); ++i) {
    for (Index j = 0; j < m.cols(); ++j) out << (j ? "," : "") << format_double(m(i, j));
    out << '\n';
  }
  if (!out) throw IoError("write failed for '" + path.string() + "'");
}

nlohmann::json read_json(const fs::path& path) {
  auto in = open_in(path);
  try {
    return nlohmann::json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw std::invalid_argument(path.string() + ": " + e.what());
  }
}

void write_json(const fs::path& path, const nlohmann::json& j) {
  write_text(path, j.dump(2) + "\n");
}

void write_text(const fs::path& path, const std::string& text) {
  auto out = open_out(path);
  out << text;
  if (!out) throw IoError("write failed for '" + path.string() + "'");
}

nlohmann::json to_json(const Matrix& m) {
  nlohmann::json rows = nlohmann::json::array();
  for (Index i = 0; i < m.rows(); ++i) {
    nlohmann::json r = nlohmann::json::array();
    for (Index j = 0; j < m.cols(); ++j) r.push_back(m(i, j));
    rows.push_back(std::move(r));
  }
  return rows;
}

nlohmann::json to_json(const Vector& v) {
  nlohmann::json out = nlohmann::json::array();
  for (Index i = 0; i < v.size(); ++i) out.push_back(v(i));
  return out;
}

nlohmann::json upper_triangle(const Matrix& m) {
  nlohmann::json out = nlohmann::json::array();
  for (Index i = 0; i < m.rows(); ++i) {
    for (Index j = i + 1; j < m.cols(); ++j) out.push_back(m(i, j));
  }
  return out;
}

}  // namespace lassoggm
