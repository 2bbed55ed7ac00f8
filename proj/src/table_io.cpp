#include "thouless/table_io.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

#include "thouless/error.hpp"

namespace thouless {

namespace {

std::ofstream open_for_write(const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw Error("cannot write " + path.string());
  return out;
}

}  // namespace

std::string format_number(double x) {
  if (x == 0.0) return "0";  // folds -0
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.12g", x);
  return buf;
}

void write_columns(const std::filesystem::path& path, const std::string& title, const std::vector<Column>& columns) {
  if (columns.empty()) throw Error("write_columns: no columns");
  const std::size_t rows = columns.front().values.size();
  for (const Column& c : columns) {
    if (c.values.size() != rows) throw Error("write_columns: column '" + c.name + "' has a different length");
  }
  std::ofstream out = open_for_write(path);
  out << "# " << title << "\n# ";
  for (std::size_t c = 0; c < columns.size(); ++c) {
    out << (c ? "\t" : "") << columns[c].name;
    if (!columns[c].unit.empty()) out << '[' << columns[c].unit << ']';
  }
  out << '\n';
  for (std::size_t r = 0; r < rows; ++r) {
    for (std::size_t c = 0; c < columns.size(); ++c) out << (c ? "\t" : "") << format_number(columns[c].values[r]);
    out << '\n';
  }
  if (!out) throw Error("write failed: " + path.string());
}

void write_matrix(const std::filesystem::path& path, const std::string& title, const Eigen::MatrixXd& m) {
  std::ofstream out = open_for_write(path);
  out << "# " << title << "\n# " << m.rows() << " rows x " << m.cols() << " columns\n";
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    for (Eigen::Index c = 0; c < m.cols(); ++c) out << (c ? "\t" : "") << format_number(m(r, c));
    out << '\n';
  }
  if (!out) throw Error("write failed: " + path.string());
}

Eigen::MatrixXd read_table(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot read " + path.string());
  std::vector<std::vector<double>> rows;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    std::istringstream ss(line);
    std::vector<double> row;
    double x;
    while (ss >> x) row.push_back(x);
    if (!rows.empty() && row.size() != rows.front().size()) throw Error("ragged table: " + path.string());
    rows.push_back(std::move(row));
  }
  Eigen::MatrixXd m(rows.size(), rows.empty() ? 0 : rows.front().size());
  for (std::size_t r = 0; r < rows.size(); ++r) {
    for (std::size_t c = 0; c < rows[r].size(); ++c) m(r, c) = rows[r][c];
  }
  return m;
}

}  // namespace thouless
