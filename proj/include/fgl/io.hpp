#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "fgl/matrix_core.hpp"

namespace fgl::io {

struct ObservationTable {
  std::vector<std::string> names;
  Eigen::MatrixXd values;  // n x p
};

/// Header row of variable names, one observation per row. Throws ParseError
/// with the 1-based line and column of the offending field.
ObservationTable parse_observations_csv(std::istream& in, const std::string& source = "<csv>");
ObservationTable read_observations_csv(const std::filesystem::path& path);

/// Shortest decimal that round-trips to the same double.
std::string format_double(double x);

void write_matrix_csv(std::ostream& out, const Eigen::MatrixXd& m);
void write_matrix_csv(const std::filesystem::path& path, const Eigen::MatrixXd& m);

/// Headerless numeric CSV, p rows of p values.
Eigen::MatrixXd read_matrix_csv(const std::filesystem::path& path);

nlohmann::json matrix_to_json(const Eigen::MatrixXd& m);
Eigen::MatrixXd matrix_from_json(const nlohmann::json& j);

/// Truncates `path` and writes `text`; throws fgl::Error on I/O failure.
void write_text(const std::filesystem::path& path, const std::string& text);

}  // namespace fgl::io
