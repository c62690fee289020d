#include <cstddef>

#include "kernels_internal.hpp"

// Reference kernels. Plain loops, no manual unrolling; these define the
// semantics the vector variants are tested against.

namespace soar::kernels::detail {
namespace {

double dot_scalar(const double* x, const double* y, std::size_t n) {
  double s = 0.0;
  for (std::size_t i = 0; i < n; ++i) s += x[i] * y[i];
  return s;
}

void axpy_scalar(double a, const double* x, double* y, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) y[i] += a * x[i];
}

void scal_scalar(double a, double* x, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) x[i] *= a;
}

void gemv_n_scalar(const double* a, std::size_t m, std::size_t n,
                   const double* x, double* y) {
  for (std::size_t i = 0; i < m; ++i) y[i] = dot_scalar(a + i * n, x, n);
}

void gemv_t_scalar(const double* a, std::size_t m, std::size_t n,
                   const double* x, double* y) {
  for (std::size_t j = 0; j < n; ++j) y[j] = 0.0;
  for (std::size_t i = 0; i < m; ++i) axpy_scalar(x[i], a + i * n, y, n);
}

}  // namespace

const KernelTable scalar_table = {dot_scalar, axpy_scalar, scal_scalar,
                                  gemv_n_scalar, gemv_t_scalar};

}  // namespace soar::kernels::detail
