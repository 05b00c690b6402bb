#include "fgof/io.hpp"

#include <charconv>
#include <fstream>
#include <sstream>

namespace fgof {

namespace {

std::string trim(const std::string& s) {
  auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

bool try_parse_double(const std::string& s, double* out) {
  const char* begin = s.data();
  const char* end = s.data() + s.size();
  auto res = std::from_chars(begin, end, *out);
  return res.ec == std::errc() && res.ptr == end;
}

std::vector<std::string> split_cells(const std::string& line) {
  std::vector<std::string> cells;
  std::stringstream ss(line);
  std::string cell;
  while (std::getline(ss, cell, ',')) cells.push_back(trim(cell));
  return cells;
}

}  // namespace

std::vector<std::vector<double>> read_numeric_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open file: " + path);
  std::vector<std::vector<double>> rows;
  std::string line;
  int lineno = 0;
  bool first_content = true;
  size_t expected_cols = 0;
  while (std::getline(in, line)) {
    ++lineno;
    std::string t = trim(line);
    if (t.empty()) continue;
    auto cells = split_cells(t);
    std::vector<double> row(cells.size());
    bool numeric = true;
    size_t bad_col = 0;
    for (size_t j = 0; j < cells.size(); ++j) {
      if (!try_parse_double(cells[j], &row[j])) {
        numeric = false;
        bad_col = j;
        break;
      }
    }
    if (!numeric) {
      // A non-numeric first content line is taken as a header.
      if (first_content) {
        first_content = false;
        continue;
      }
      throw DataError(path + ": non-numeric cell at row " +
                      std::to_string(lineno) + ", column " +
                      std::to_string(bad_col + 1));
    }
    if (rows.empty()) {
      expected_cols = row.size();
    } else if (row.size() != expected_cols) {
      throw DataError(path + ": row " + std::to_string(lineno) + " has " +
                      std::to_string(row.size()) + " cells, expected " +
                      std::to_string(expected_cols));
    }
    first_content = false;
    rows.push_back(std::move(row));
  }
  if (rows.empty()) throw DataError(path + ": no numeric rows");
  return rows;
}

std::vector<Curve> ingest_curves(const std::string& path,
                                 const std::optional<std::string>& grid_path) {
  auto rows = read_numeric_csv(path);
  const int g = static_cast<int>(rows[0].size());
  if (g < 2) throw DataError(path + ": curves need at least 2 grid columns");

  Grid grid = [&] {
    if (!grid_path) return Grid(g);
    auto grid_rows = read_numeric_csv(*grid_path);
    std::vector<double> pts;
    for (const auto& r : grid_rows) {
      if (r.size() != 1)
        throw DataError(*grid_path + ": grid file must have one column");
      pts.push_back(r[0]);
    }
    if (static_cast<int>(pts.size()) != g)
      throw DataError(*grid_path + ": grid has " + std::to_string(pts.size()) +
                      " points, curves have " + std::to_string(g) + " columns");
    return Grid::from_points(std::move(pts));
  }();

  std::vector<Curve> curves;
  curves.reserve(rows.size());
  for (auto& row : rows)
    curves.emplace_back(grid, Eigen::Map<Eigen::VectorXd>(row.data(), g));
  return curves;
}

Eigen::VectorXd read_response(const std::string& path) {
  auto rows = read_numeric_csv(path);
  if (rows[0].size() == 1) {
    Eigen::VectorXd y(rows.size());
    for (size_t i = 0; i < rows.size(); ++i) y(i) = rows[i][0];
    return y;
  }
  if (rows.size() == 1) {
    Eigen::VectorXd y(rows[0].size());
    for (size_t j = 0; j < rows[0].size(); ++j) y(j) = rows[0][j];
    return y;
  }
  throw DataError(path + ": response must be a single column or a single row");
}

void write_text_file(const std::string& path, const std::string& content) {
  std::ofstream out(path);
  if (!out) throw DataError("cannot write file: " + path);
  out << content;
}

std::string direction_table_csv(const std::vector<DirectionValue>& table,
                                double h) {
  std::ostringstream out;
  out.precision(17);
  int p = table.empty() ? 0 : static_cast<int>(table[0].gamma.size());
  out << "h";
  for (int j = 1; j <= p; ++j) out << ",gamma_" << j;
  out << ",q_n,v_sq,standardized,is_gamma0,degenerate\n";
  for (const auto& row : table) {
    out << h;
    for (int j = 0; j < p; ++j) out << ',' << row.gamma(j);
    out << ',' << row.q << ',' << row.var_sq << ',' << row.standardized << ','
        << (row.is_gamma0 ? 1 : 0) << ',' << (row.degenerate ? 1 : 0) << "\n";
  }
  return out.str();
}

}  // namespace fgof
