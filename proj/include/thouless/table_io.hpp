#pragma once

// Plain-text tables: '#' header lines, then tab-separated numbers
// printed with 12 significant digits.

#include <Eigen/Dense>

#include <filesystem>
#include <string>
#include <vector>

namespace thouless {

struct Column {
  std::string name;
  std::string unit;  // empty for dimensionless
  std::vector<double> values;
};

std::string format_number(double x);

// Throws Error if the columns differ in length or the file cannot be written.
void write_columns(const std::filesystem::path& path, const std::string& title, const std::vector<Column>& columns);
void write_matrix(const std::filesystem::path& path, const std::string& title, const Eigen::MatrixXd& m);

// Reads back a file written by write_columns / write_matrix (header skipped).
Eigen::MatrixXd read_table(const std::filesystem::path& path);

}  // namespace thouless
