#pragma once

#include <Eigen/Dense>
#include <optional>
#include <string>
#include <vector>

#include "fgof/direction.hpp"
#include "fgof/funcspace.hpp"

namespace fgof {

// CSV curve matrix: one row per curve, G columns of function values, with an
// optional header row.  The grid is uniform over [0,1] unless an explicit
// grid file (one column of G abscissae) is given.
std::vector<Curve> ingest_curves(const std::string& path,
                                 const std::optional<std::string>& grid_path = {});

// One value per line (or a single CSV column/row), optional header.
Eigen::VectorXd read_response(const std::string& path);

// Raw numeric matrix with header detection; throws DataError with the
// offending row/column on ragged or non-numeric input.
std::vector<std::vector<double>> read_numeric_csv(const std::string& path);

void write_text_file(const std::string& path, const std::string& content);

// Diagnostics dump: one row per evaluated direction.
std::string direction_table_csv(const std::vector<DirectionValue>& table,
                                double h);

}  // namespace fgof
