#include "lqcert/io.hpp"

#include <cerrno>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <vector>

namespace lqcert::io {
namespace {

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

double parse_double(std::string_view field, std::size_t line) {
  const std::string token(trim(field));
  if (token.empty()) throw IoError("empty field on line " + std::to_string(line));
  char* end = nullptr;
  errno = 0;
  const double v = std::strtod(token.c_str(), &end);
  if (end != token.c_str() + token.size() || errno == ERANGE)
    throw IoError("cannot parse '" + token + "' on line " + std::to_string(line));
  if (!std::isfinite(v)) throw IoError("non-finite value on line " + std::to_string(line));
  return v;
}

std::vector<std::vector<double>> parse_rows(std::string_view text) {
  std::vector<std::vector<double>> rows;
  std::size_t line_no = 0;
  while (!text.empty()) {
    const auto nl = text.find('\n');
    std::string_view line = text.substr(0, nl);
    text = nl == std::string_view::npos ? std::string_view{} : text.substr(nl + 1);
    ++line_no;
    if (trim(line).empty()) continue;
    std::vector<double> row;
    while (true) {
      const auto comma = line.find(',');
      row.push_back(parse_double(line.substr(0, comma), line_no));
      if (comma == std::string_view::npos) break;
      line = line.substr(comma + 1);
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

double finite_number(const nlohmann::json& v) {
  if (!v.is_number()) throw IoError("expected a number in JSON array");
  const double d = v.get<double>();
  if (!std::isfinite(d)) throw IoError("non-finite value in JSON array");
  return d;
}

bool has_json_extension(const std::filesystem::path& path) { return path.extension() == ".json"; }

}  // namespace

DenseMatrix parse_matrix_csv(std::string_view text) {
  const auto rows = parse_rows(text);
  if (rows.empty()) throw IoError("matrix CSV has no rows");
  const std::size_t n = rows.front().size();
  DenseMatrix a(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(n));
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (rows[i].size() != n) throw IoError("ragged matrix CSV at row " + std::to_string(i + 1));
    for (std::size_t j = 0; j < n; ++j) a(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = rows[i][j];
  }
  return a;
}

SignalVector parse_vector_csv(std::string_view text) {
  const auto rows = parse_rows(text);
  std::vector<double> flat;
  for (const auto& r : rows) flat.insert(flat.end(), r.begin(), r.end());
  if (flat.empty()) throw IoError("vector CSV is empty");
  return Eigen::Map<const SignalVector>(flat.data(), static_cast<Eigen::Index>(flat.size()));
}

DenseMatrix matrix_from_json(const nlohmann::json& j) {
  if (!j.is_array() || j.empty() || !j.front().is_array()) throw IoError("matrix JSON must be a non-empty array of arrays");
  const std::size_t n = j.front().size();
  DenseMatrix a(static_cast<Eigen::Index>(j.size()), static_cast<Eigen::Index>(n));
  for (std::size_t i = 0; i < j.size(); ++i) {
    if (!j[i].is_array() || j[i].size() != n) throw IoError("ragged matrix JSON at row " + std::to_string(i + 1));
    for (std::size_t k = 0; k < n; ++k) a(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(k)) = finite_number(j[i][k]);
  }
  return a;
}

SignalVector vector_from_json(const nlohmann::json& j) {
  if (!j.is_array() || j.empty()) throw IoError("vector JSON must be a non-empty array");
  SignalVector x(static_cast<Eigen::Index>(j.size()));
  for (std::size_t i = 0; i < j.size(); ++i) x[static_cast<Eigen::Index>(i)] = finite_number(j[i]);
  return x;
}

nlohmann::json to_json(const DenseMatrix& a) {
  auto out = nlohmann::json::array();
  for (Eigen::Index i = 0; i < a.rows(); ++i) {
    auto row = nlohmann::json::array();
    for (Eigen::Index j = 0; j < a.cols(); ++j) row.push_back(round12(a(i, j)));
    out.push_back(std::move(row));
  }
  return out;
}

nlohmann::json to_json(const SignalVector& x) {
  auto out = nlohmann::json::array();
  for (double v : x) out.push_back(round12(v));
  return out;
}

DenseMatrix load_matrix(const std::filesystem::path& path) {
  const std::string text = read_file(path);
  if (has_json_extension(path)) {
    try {
      return matrix_from_json(nlohmann::json::parse(text));
    } catch (const nlohmann::json::exception& e) {
      throw IoError(path.string() + ": " + e.what());
    }
  }
  return parse_matrix_csv(text);
}

SignalVector load_vector(const std::filesystem::path& path) {
  const std::string text = read_file(path);
  if (has_json_extension(path)) {
    try {
      return vector_from_json(nlohmann::json::parse(text));
    } catch (const nlohmann::json::exception& e) {
      throw IoError(path.string() + ": " + e.what());
    }
  }
  return parse_vector_csv(text);
}

std::string format_matrix_csv(const DenseMatrix& a) {
  std::string out;
  for (Eigen::Index i = 0; i < a.rows(); ++i) {
    for (Eigen::Index j = 0; j < a.cols(); ++j) {
      if (j > 0) out += ',';
      out += format_number(a(i, j));
    }
    out += '\n';
  }
  return out;
}

std::string format_vector_csv(const SignalVector& x) {
  std::string out;
  for (double v : x) {
    out += format_number(v);
    out += '\n';
  }
  return out;
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

void write_file(const std::filesystem::path& path, std::string_view contents) {
  if (path.has_parent_path()) {
    std::error_code ec;
    std::filesystem::create_directories(path.parent_path(), ec);
  }
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot write " + path.string());
  out.write(contents.data(), static_cast<std::streamsize>(contents.size()));
  if (!out) throw IoError("write failed for " + path.string());
}

std::string format_number(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.12g", v == 0.0 ? 0.0 : v);  // no "-0"
  return buf;
}

double round12(double v) {
  if (!std::isfinite(v)) return v;
  return std::strtod(format_number(v).c_str(), nullptr);
}

}  // namespace lqcert::io
