#include "soar/dense_operator.hpp"

#include <Eigen/Dense>
#include <Eigen/SVD>

#include <cmath>
#include <istream>
#include <limits>
#include <ostream>
#include <sstream>

#include "soar/kernels.hpp"

namespace soar {

Matrix Matrix::identity(std::size_t n) {
  Matrix m(n, n);
  for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
  return m;
}

void save_matrix_text(std::ostream& os, const Matrix& m) {
  os << m.rows << ' ' << m.cols << '\n';
  os.precision(17);
  for (std::size_t i = 0; i < m.rows; ++i) {
    for (std::size_t j = 0; j < m.cols; ++j) {
      if (j) os << ' ';
      os << m(i, j);
    }
    os << '\n';
  }
}

Matrix load_matrix_text(std::istream& is) {
  std::size_t r = 0, c = 0;
  if (!(is >> r >> c)) throw ConfigError("matrix header: expected 'rows cols'");
  Matrix m(r, c);
  for (std::size_t i = 0; i < r * c; ++i) {
    if (!(is >> m.data[i]))
      throw ConfigError("matrix body: expected " + std::to_string(r * c) +
                        " entries");
  }
  return m;
}

DenseOperator::DenseOperator(Matrix a) : a_(std::move(a)) {
  for (double v : a_.data) {
    if (!std::isfinite(v))
      throw ContractViolation("operator entries must be finite");
  }
}

DenseOperator::DenseOperator(const DenseOperator& other) {
  std::lock_guard<std::mutex> lock(other.cache_mutex_);
  a_ = other.a_;
  cached_norm_ = other.cached_norm_;
  cached_svd_ = other.cached_svd_;
}

DenseOperator::DenseOperator(DenseOperator&& other) noexcept {
  std::lock_guard<std::mutex> lock(other.cache_mutex_);
  a_ = std::move(other.a_);
  cached_norm_ = other.cached_norm_;
  cached_svd_ = std::move(other.cached_svd_);
}

DenseOperator& DenseOperator::operator=(const DenseOperator& other) {
  if (this == &other) return *this;
  DenseOperator tmp(other);
  std::lock_guard<std::mutex> lock(cache_mutex_);
  a_ = std::move(tmp.a_);
  cached_norm_ = tmp.cached_norm_;
  cached_svd_ = std::move(tmp.cached_svd_);
  return *this;
}

DenseOperator& DenseOperator::operator=(DenseOperator&& other) noexcept {
  if (this == &other) return *this;
  std::lock_guard<std::mutex> lock(cache_mutex_);
  {
    std::lock_guard<std::mutex> lock2(other.cache_mutex_);
    a_ = std::move(other.a_);
    cached_norm_ = other.cached_norm_;
    cached_svd_ = std::move(other.cached_svd_);
  }
  return *this;
}

DenseOperator DenseOperator::identity(std::size_t n) {
  return DenseOperator(Matrix::identity(n));
}

DenseOperator DenseOperator::diagonal(std::span<const double> d) {
  Matrix m(d.size(), d.size());
  for (std::size_t i = 0; i < d.size(); ++i) m(i, i) = d[i];
  return DenseOperator(std::move(m));
}

void DenseOperator::apply(std::span<const double> x, std::span<double> y) const {
  kernels::gemv_n(a_.data, a_.rows, a_.cols, x, y);
}

Vector DenseOperator::apply(const Vector& x) const {
  if (x.size() != a_.cols)
    throw ContractViolation("apply: expected dim " + std::to_string(a_.cols) +
                            ", got " + std::to_string(x.size()));
  Vector y(a_.rows);
  apply(std::span<const double>(x), std::span<double>(y));
  return y;
}

void DenseOperator::apply_adjoint(std::span<const double> y,
                                  std::span<double> x) const {
  kernels::gemv_t(a_.data, a_.rows, a_.cols, y, x);
}

Vector DenseOperator::apply_adjoint(const Vector& y) const {
  if (y.size() != a_.rows)
    throw ContractViolation("apply_adjoint: expected dim " +
                            std::to_string(a_.rows) + ", got " +
                            std::to_string(y.size()));
  Vector x(a_.cols);
  apply_adjoint(std::span<const double>(y), std::span<double>(x));
  return x;
}

double DenseOperator::power_iteration_norm() const {
  const std::size_t n = a_.cols;
  // Deterministic start with components in every direction.
  Vector v(n), av(a_.rows), atav(n);
  for (std::size_t i = 0; i < n; ++i)
    v[i] = 1.0 + 0.5 * std::cos(static_cast<double>(i));
  double vn = kernels::nrm2(v);
  kernels::scal(1.0 / vn, v);

  double lambda = 0.0;  // Rayleigh quotient estimate of ||A||^2
  for (int it = 0; it < 10000; ++it) {
    apply(v, av);
    apply_adjoint(av, atav);
    double next = kernels::dot(v, atav);
    double norm_atav = kernels::nrm2(atav);
    if (norm_atav == 0.0) return 0.0;
    kernels::scal(1.0 / norm_atav, atav);
    v.swap(atav);
    if (std::abs(next - lambda) <= 1e-12 * std::max(next, 1e-300)) {
      lambda = next;
      break;
    }
    lambda = next;
  }
  return std::sqrt(std::max(lambda, 0.0));
}

double DenseOperator::operator_norm() const {
  std::lock_guard<std::mutex> lock(cache_mutex_);
  if (cached_norm_) return *cached_norm_;
  if (cached_svd_) {
    cached_norm_ = cached_svd_->singular_values.empty()
                       ? 0.0
                       : cached_svd_->singular_values.front();
    return *cached_norm_;
  }
  cached_norm_ = power_iteration_norm();
  return *cached_norm_;
}

const SvdSystem& DenseOperator::svd() const {
  std::lock_guard<std::mutex> lock(cache_mutex_);
  if (cached_svd_) return *cached_svd_;

  Eigen::Map<const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic,
                                 Eigen::RowMajor>>
      a(a_.data.data(), a_.rows, a_.cols);
  Eigen::BDCSVD<Eigen::MatrixXd> dec(a, Eigen::ComputeThinU | Eigen::ComputeThinV);
  if (dec.info() != Eigen::Success)
    throw SvdError("SVD backend failed to converge");

  const auto& sv = dec.singularValues();
  const double cutoff = sv.size() ? 1e-14 * sv(0) : 0.0;
  std::size_t rank = 0;
  while (rank < static_cast<std::size_t>(sv.size()) && sv(rank) > cutoff)
    ++rank;

  auto sys = std::make_shared<SvdSystem>();
  sys->truncated_count = static_cast<std::size_t>(sv.size()) - rank;
  sys->singular_values.assign(sv.data(), sv.data() + rank);
  sys->left_vectors = Matrix(a_.rows, rank);
  sys->right_vectors = Matrix(a_.cols, rank);
  for (std::size_t i = 0; i < a_.rows; ++i)
    for (std::size_t j = 0; j < rank; ++j)
      sys->left_vectors(i, j) = dec.matrixU()(i, j);
  for (std::size_t i = 0; i < a_.cols; ++i)
    for (std::size_t j = 0; j < rank; ++j)
      sys->right_vectors(i, j) = dec.matrixV()(i, j);

  cached_svd_ = std::move(sys);
  if (!cached_norm_)
    cached_norm_ = cached_svd_->singular_values.empty()
                       ? 0.0
                       : cached_svd_->singular_values.front();
  return *cached_svd_;
}

void DenseOperator::save_text(std::ostream& os) const {
  save_matrix_text(os, a_);
}

DenseOperator DenseOperator::load_text(std::istream& is) {
  return DenseOperator(load_matrix_text(is));
}

}  // namespace soar
