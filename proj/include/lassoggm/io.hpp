#pragma once

#include <filesystem>
#include <stdexcept>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "lassoggm/model.hpp"

namespace lassoggm {

class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct LabeledData {
  DataMatrix data;  // p x n
  std::vector<std::string> labels;
};

struct LabeledMatrix {
  Matrix values;
  std::vector<std::string> labels;
};

/// Header row of variable names, one sample per row.
LabeledData read_data_csv(const std::filesystem::path& path);
void write_data_csv(const std::filesystem::path& path, const DataMatrix& y,
                    const std::vector<std::string>& labels);

/// Square matrix with a header row of p names.
LabeledMatrix read_matrix_csv(const std::filesystem::path& path);
void write_matrix_csv(const std::filesystem::path& path, const Matrix& m,
                      const std::vector<std::string>& labels);

nlohmann::json read_json(const std::filesystem::path& path);
void write_json(const std::filesystem::path& path, const nlohmann::json& j);
void write_text(const std::filesystem::path& path, const std::string& text);

/// 17 significant digits, "nan"/"inf" for non-finite values.
std::string format_double(double x);

nlohmann::json to_json(const Matrix& m);
nlohmann::json to_json(const Vector& v);
nlohmann::json upper_triangle(const Matrix& m);

}  // namespace lassoggm
