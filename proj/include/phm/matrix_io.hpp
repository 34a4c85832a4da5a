#pragma once

#include <string>

#include "phm/common.hpp"

namespace phm {

// Binary matrix file: 8-byte magic "PHMMAT1\0", int64 rows, int64 cols,
// float64 payload in row-major order, all little-endian.

void save_matrix(const std::string& path, const Mat& m);
Mat load_matrix(const std::string& path);

void save_matrix_csv(const std::string& path, const Mat& m);
Mat load_matrix_csv(const std::string& path);

}  // namespace phm
