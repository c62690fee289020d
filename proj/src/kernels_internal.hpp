#pragma once

#include <cstddef>

namespace soar::kernels::detail {

struct KernelTable {
  double (*dot)(const double*, const double*, std::size_t);
  void (*axpy)(double, const double*, double*, std::size_t);
  void (*scal)(double, double*, std::size_t);
  void (*gemv_n)(const double*, std::size_t, std::size_t, const double*, double*);
  void (*gemv_t)(const double*, std::size_t, std::size_t, const double*, double*);
};

extern const KernelTable scalar_table;

#if defined(__x86_64__) || defined(_M_X64)
#define SOAR_KERNELS_HAVE_AVX2 1
extern const KernelTable avx2_table;
#else
#define SOAR_KERNELS_HAVE_AVX2 0
#endif

}  // namespace soar::kernels::detail
