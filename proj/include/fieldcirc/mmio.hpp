#pragma once

#include <Eigen/Dense>
#include <Eigen/Sparse>
#include <string>

namespace fieldcirc {

/// MatrixMarket coordinate format, real entries. The reader accepts the
/// "general" and "symmetric" qualifiers; the writer always emits "general"
/// with 17 significant digits so that a write/read cycle is exact.
Eigen::SparseMatrix<double> read_matrix_market(const std::string& path);
void write_matrix_market(const std::string& path, const Eigen::SparseMatrix<double>& m);
void write_matrix_market(const std::string& path, const Eigen::MatrixXd& m);

} // namespace fieldcirc
