#include "soar/kernels.hpp"

#include <atomic>
#include <cmath>
#include <cstdlib>
#include <cstring>

#include "soar/errors.hpp"
#include "kernels_internal.hpp"

namespace soar::kernels {
namespace {

using detail::KernelTable;

std::atomic<const KernelTable*> g_table{nullptr};
std::atomic<Backend> g_backend{Backend::Scalar};

bool cpu_has_avx2() {
#if SOAR_KERNELS_HAVE_AVX2
  return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
  return false;
#endif
}

void install(Backend b) {
#if SOAR_KERNELS_HAVE_AVX2
  if (b == Backend::Avx2) {
    g_table.store(&detail::avx2_table, std::memory_order_release);
    g_backend.store(Backend::Avx2, std::memory_order_release);
    return;
  }
#endif
  g_table.store(&detail::scalar_table, std::memory_order_release);
  g_backend.store(Backend::Scalar, std::memory_order_release);
}

void autodetect() {
  Backend b = cpu_has_avx2() ? Backend::Avx2 : Backend::Scalar;
  if (const char* env = std::getenv("SOAR_KERNELS")) {
    if (std::strcmp(env, "scalar") == 0) b = Backend::Scalar;
    if (std::strcmp(env, "avx2") == 0 && cpu_has_avx2()) b = Backend::Avx2;
  }
  install(b);
}

const KernelTable& table() {
  const KernelTable* t = g_table.load(std::memory_order_acquire);
  if (!t) {
    autodetect();
    t = g_table.load(std::memory_order_acquire);
  }
  return *t;
}

}  // namespace

Backend active_backend() noexcept {
  table();
  return g_backend.load(std::memory_order_acquire);
}

const char* backend_name() noexcept {
  return active_backend() == Backend::Avx2 ? "avx2" : "scalar";
}

bool set_backend(Backend b) noexcept {
  if (b == Backend::Avx2 && !cpu_has_avx2()) return false;
  install(b);
  return true;
}

void reset_backend() noexcept { autodetect(); }

bool avx2_supported() noexcept { return cpu_has_avx2(); }

double dot(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size())
    throw ContractViolation("dot: size mismatch");
  return table().dot(x.data(), y.data(), x.size());
}

double nrm2(std::span<const double> x) {
  return std::sqrt(table().dot(x.data(), x.data(), x.size()));
}

void axpy(double a, std::span<const double> x, std::span<double> y) {
  if (x.size() != y.size())
    throw ContractViolation("axpy: size mismatch");
  table().axpy(a, x.data(), y.data(), x.size());
}

void scal(double a, std::span<double> x) { table().scal(a, x.data(), x.size()); }

void gemv_n(std::span<const double> a, std::size_t m, std::size_t n,
            std::span<const double> x, std::span<double> y) {
  if (a.size() != m * n || x.size() != n || y.size() != m)
    throw ContractViolation("gemv_n: size mismatch");
  table().gemv_n(a.data(), m, n, x.data(), y.data());
}

void gemv_t(std::span<const double> a, std::size_t m, std::size_t n,
            std::span<const double> x, std::span<double> y) {
  if (a.size() != m * n || x.size() != m || y.size() != n)
    throw ContractViolation("gemv_t: size mismatch");
  table().gemv_t(a.data(), m, n, x.data(), y.data());
}

}  // namespace soar::kernels
