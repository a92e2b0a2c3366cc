#include "fgl/io.hpp"

#include <charconv>
#include <fstream>
#include <sstream>

namespace fgl::io {

namespace {

std::vector<std::string> split_line(const std::string& line) {
  std::vector<std::string> fields;
  std::string field;
  std::istringstream ss(line);
  while (std::getline(ss, field, ',')) fields.push_back(field);
  if (!line.empty() && line.back() == ',') fields.emplace_back();
  return fields;
}

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

bool parse_double(const std::string& text, double& out) {
  const char* first = text.data();
  const char* last = text.data() + text.size();
  if (first != last && *first == '+') ++first;
  auto [ptr, ec] = std::from_chars(first, last, out);
  return ec == std::errc() && ptr == last;
}

std::ifstream open_input(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open '" + path.string() + "' for reading");
  return in;
}

}  // namespace

ObservationTable parse_observations_csv(std::istream& in, const std::string& source) {
  ObservationTable table;
  std::string line;
  std::size_t line_no = 0;
  std::vector<std::vector<double>> rows;

  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    table.names.clear();
    for (const auto& f : split_line(line)) table.names.push_back(trim(f));
    break;
  }
  if (table.names.empty()) throw ParseError(source, line_no, 1, "missing header row");
  const std::size_t p = table.names.size();

  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    const auto fields = split_line(line);
    if (fields.size() != p) {
      throw ParseError(source, line_no, 1,
                       "expected " + std::to_string(p) + " fields, found " +
                           std::to_string(fields.size()));
    }
    std::vector<double> row(p);
    std::size_t column = 1;
    for (std::size_t c = 0; c < p; ++c) {
      const std::string value = trim(fields[c]);
      if (!parse_double(value, row[c])) {
        throw ParseError(source, line_no, column, "cannot parse '" + value + "' as a number");
      }
      column += fields[c].size() + 1;
    }
    rows.push_back(std::move(row));
  }

  table.values.resize(static_cast<Index>(rows.size()), static_cast<Index>(p));
  for (std::size_t r = 0; r < rows.size(); ++r) {
    for (std::size_t c = 0; c < p; ++c) {
      table.values(static_cast<Index>(r), static_cast<Index>(c)) = rows[r][c];
    }
  }
  return table;
}

ObservationTable read_observations_csv(const std::filesystem::path& path) {
  auto in = open_input(path);
  return parse_observations_csv(in, path.string());
}

std::string format_double(double x) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), x);
  if (ec != std::errc()) throw Error("format_double: conversion failed");
  return std::string(buf, ptr);
}

void write_matrix_csv(std::ostream& out, const Eigen::MatrixXd& m) {
  for (Index i = 0; i < m.rows(); ++i) {
    for (Index j = 0; j < m.cols(); ++j) {
      if (j > 0) out << ',';
      out << format_double(m(i, j));
    }
    out << '\n';
  }
}

void write_matrix_csv(const std::filesystem::path& path, const Eigen::MatrixXd& m) {
  std::ostringstream ss;
  write_matrix_csv(ss, m);
  write_text(path, ss.str());
}

Eigen::MatrixXd read_matrix_csv(const std::filesystem::path& path) {
  auto in = open_input(path);
  std::vector<std::vector<double>> rows;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    std::vector<double> row;
    std::size_t column = 1;
    for (const auto& f : split_line(line)) {
      double v = 0.0;
      if (!parse_double(trim(f), v)) {
        throw ParseError(path.string(), line_no, column, "cannot parse '" + trim(f) + "'");
      }
      row.push_back(v);
      column += f.size() + 1;
    }
    if (!rows.empty() && row.size() != rows.front().size()) {
      throw ParseError(path.string(), line_no, 1, "ragged matrix row");
    }
    rows.push_back(std::move(row));
  }
  if (rows.empty()) throw ParseError(path.string(), line_no, 1, "empty matrix");
  Eigen::MatrixXd m(static_cast<Index>(rows.size()), static_cast<Index>(rows.front().size()));
  for (Index i = 0; i < m.rows(); ++i) {
    for (Index j = 0; j < m.cols(); ++j) m(i, j) = rows[i][j];
  }
  return m;
}

nlohmann::json matrix_to_json(const Eigen::MatrixXd& m) {
  nlohmann::json rows = nlohmann::json::array();
  for (Index i = 0; i < m.rows(); ++i) {
    nlohmann::json row = nlohmann::json::array();
    for (Index j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
    rows.push_back(std::move(row));
  }
  return rows;
}

Eigen::MatrixXd matrix_from_json(const nlohmann::json& j) {
  if (!j.is_array() || j.empty()) throw InvalidInput("matrix JSON must be a non-empty array");
  const auto rows = static_cast<Index>(j.size());
  const auto cols = static_cast<Index>(j.front().size());
  Eigen::MatrixXd m(rows, cols);
  for (Index r = 0; r < rows; ++r) {
    const auto& row = j.at(static_cast<std::size_t>(r));
    if (!row.is_array() || static_cast<Index>(row.size()) != cols) {
      throw InvalidInput("matrix JSON rows must have equal length");
    }
    for (Index c = 0; c < cols; ++c) m(r, c) = row.at(static_cast<std::size_t>(c)).get<double>();
  }
  return m;
}

void write_text(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error("cannot open '" + path.string() + "' for writing");
  out << text;
  if (!out) throw Error("write to '" + path.string() + "' failed");
}

}  // namespace fgl::io
