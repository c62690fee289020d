#pragma once

#include <cstddef>
#include <span>

// Data-parallel inner loops behind a runtime-dispatched backend. The scalar
// implementations are the reference; the AVX2 variants must agree with them
// within floating-point reassociation tolerance (equivalence-tested).

namespace soar::kernels {

enum class Backend { Scalar, Avx2 };

Backend active_backend() noexcept;
const char* backend_name() noexcept;

/// Returns false if the requested backend is unsupported on this CPU.
bool set_backend(Backend b) noexcept;

/// Re-run detection (honors the SOAR_KERNELS=scalar|avx2 environment variable).
void reset_backend() noexcept;

bool avx2_supported() noexcept;

double dot(std::span<const double> x, std::span<const double> y);
double nrm2(std::span<const double> x);

/// y += a*x
void axpy(double a, std::span<const double> x, std::span<double> y);

/// x *= a
void scal(double a, std::span<double> x);

/// y = A x, A row-major m x n.
void gemv_n(std::span<const double> a, std::size_t m, std::size_t n,
            std::span<const double> x, std::span<double> y);

/// y = A^T x, A row-major m x n.
void gemv_t(std::span<const double> a, std::size_t m, std::size_t n,
            std::span<const double> x, std::span<double> y);

}  // namespace soar::kernels
