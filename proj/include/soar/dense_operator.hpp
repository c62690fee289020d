#pragma once

#include <cstddef>
#include <iosfwd>
#include <memory>
#include <mutex>
#include <optional>
#include <span>

#include "soar/matrix.hpp"

namespace soar {

/// Singular system {sigma_j; u_j, v_j} with A u_j = sigma_j v_j and
/// A^T v_j = sigma_j u_j. Singular values are nonincreasing and strictly
/// positive: values below 1e-14 * sigma_1 are dropped and counted in
/// truncated_count, since discretization does not always preserve
/// injectivity numerically.
struct SvdSystem {
  std::vector<double> singular_values;
  Matrix left_vectors;   // m x r, columns v_j (data space)
  Matrix right_vectors;  // n x r, columns u_j (solution space)
  std::size_t truncated_count = 0;

  std::size_t rank() const { return singular_values.size(); }
};

/// Discretized compact linear operator. Immutable after construction; the
/// norm and SVD caches are populated once under a lock, so shared instances
/// are safe to read from parallel workers.
class DenseOperator {
 public:
  explicit DenseOperator(Matrix a);

  // The cache lock is per-instance; copies share nothing but the values.
  DenseOperator(const DenseOperator& other);
  DenseOperator(DenseOperator&& other) noexcept;
  DenseOperator& operator=(const DenseOperator& other);
  DenseOperator& operator=(DenseOperator&& other) noexcept;

  static DenseOperator identity(std::size_t n);
  static DenseOperator diagonal(std::span<const double> d);

  std::size_t rows() const noexcept { return a_.rows; }
  std::size_t cols() const noexcept { return a_.cols; }
  const Matrix& matrix() const noexcept { return a_; }

  /// A x. Throws ContractViolation on dimension mismatch.
  Vector apply(const Vector& x) const;
  void apply(std::span<const double> x, std::span<double> y) const;

  /// A^T y. Throws ContractViolation on dimension mismatch.
  Vector apply_adjoint(const Vector& y) const;
  void apply_adjoint(std::span<const double> y, std::span<double> x) const;

  /// Largest singular value. Taken from the SVD when already computed,
  /// otherwise by power iteration on A^T A (tol 1e-12, <= 10000 sweeps).
  double operator_norm() const;

  bool is_zero() const { return operator_norm() == 0.0; }

  /// Full singular system (cached). Throws SvdError if the backend fails.
  const SvdSystem& svd() const;

  void save_text(std::ostream& os) const;
  static DenseOperator load_text(std::istream& is);

 private:
  Matrix a_;
  mutable std::mutex cache_mutex_;
  mutable std::optional<double> cached_norm_;
  mutable std::shared_ptr<const SvdSystem> cached_svd_;

  double power_iteration_norm() const;
};

}  // namespace soar
