#pragma once

#include <cstddef>
#include <iosfwd>
#include <span>
#include <vector>

#include "soar/errors.hpp"

namespace soar {

using Vector = std::vector<double>;

/// Dense row-major matrix.
struct Matrix {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<double> data;  // rows*cols, row-major

  Matrix() = default;
  Matrix(std::size_t r, std::size_t c, double fill = 0.0)
      : rows(r), cols(c), data(r * c, fill) {}

  double& operator()(std::size_t i, std::size_t j) { return data[i * cols + j]; }
  double operator()(std::size_t i, std::size_t j) const { return data[i * cols + j]; }

  std::span<const double> row(std::size_t i) const {
    return {data.data() + i * cols, cols};
  }

  static Matrix identity(std::size_t n);
};

/// Text serialization: header line "rows cols", then one row per line,
/// full double precision. Round-trips bit-exactly.
void save_matrix_text(std::ostream& os, const Matrix& m);
Matrix load_matrix_text(std::istream& is);

}  // namespace soar
