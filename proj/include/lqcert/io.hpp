#pragma once

// CSV and JSON readers/writers for matrices and vectors. CSV is one row per
// line, '.' decimal separator, no header. JSON is an array of rows (matrix)
// or a flat array (vector). Loaders reject non-finite values.

#include "lqcert/core.hpp"

#include <json.hpp>

#include <filesystem>
#include <stdexcept>
#include <string>
#include <string_view>

namespace lqcert::io {

/// Malformed input or a file that cannot be read or written.
class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

DenseMatrix parse_matrix_csv(std::string_view text);
SignalVector parse_vector_csv(std::string_view text);
DenseMatrix matrix_from_json(const nlohmann::json& j);
SignalVector vector_from_json(const nlohmann::json& j);
nlohmann::json to_json(const DenseMatrix& a);
nlohmann::json to_json(const SignalVector& x);

/// Picks CSV or JSON by extension (.json means JSON, anything else CSV).
DenseMatrix load_matrix(const std::filesystem::path& path);
SignalVector load_vector(const std::filesystem::path& path);

std::string format_matrix_csv(const DenseMatrix& a);
std::string format_vector_csv(const SignalVector& x);

std::string read_file(const std::filesystem::path& path);
void write_file(const std::filesystem::path& path, std::string_view contents);

/// 12 significant digits, "%.12g".
std::string format_number(double v);
/// v rounded to 12 significant digits (so JSON output is stable text).
double round12(double v);

}  // namespace lqcert::io
