#include "soar/problems.hpp"

#include <Eigen/Dense>

#include <array>
#include <cmath>

#include "soar/errors.hpp"
#include "soar/kernels.hpp"

namespace soar::problems {

namespace {

double kernel(double s, double t) {
  return s <= t ? s * (1.0 - t) : t * (1.0 - s);
}

// 4-point Gauss-Legendre on [0,1]; exact through degree 7, enough for the
// piecewise-bilinear kernel times linear hats on any subelement.
struct GaussRule {
  std::array<double, 4> x;
  std::array<double, 4> w;
};

GaussRule unit_gauss() {
  const double a = std::sqrt(3.0 / 7.0 - 2.0 / 7.0 * std::sqrt(6.0 / 5.0));
  const double b = std::sqrt(3.0 / 7.0 + 2.0 / 7.0 * std::sqrt(6.0 / 5.0));
  const double w1 = (18.0 + std::sqrt(30.0)) / 36.0;
  const double w2 = (18.0 - std::sqrt(30.0)) / 36.0;
  GaussRule g;
  g.x = {0.5 * (1.0 - b), 0.5 * (1.0 - a), 0.5 * (1.0 + a), 0.5 * (1.0 + b)};
  g.w = {0.5 * w2, 0.5 * w1, 0.5 * w1, 0.5 * w2};
  return g;
}

// Kernel Galerkin matrix G_ij = int int K(s,t) phi_i(s) phi_j(t) ds dt.
// Off-diagonal element pairs keep a fixed kernel branch, so a tensor rule is
// exact; the diagonal pairs are split along s = t into two triangles,
// integrated by an iterated rule with a t-dependent inner limit.
Matrix assemble_kernel_matrix(std::size_t n) {
  const double h = 1.0 / static_cast<double>(n - 1);
  const GaussRule g = unit_gauss();
  Matrix G(n, n);

  auto accumulate = [&](std::size_t es, std::size_t et, double s, double t,
                        double weight) {
    const double us = (s - static_cast<double>(es) * h) / h;
    const double ut = (t - static_cast<double>(et) * h) / h;
    const double k = kernel(s, t) * weight;
    G(es, et) += k * (1.0 - us) * (1.0 - ut);
    G(es + 1, et) += k * us * (1.0 - ut);
    G(es, et + 1) += k * (1.0 - us) * ut;
    G(es + 1, et + 1) += k * us * ut;
  };

  for (std::size_t es = 0; es + 1 < n; ++es) {
    for (std::size_t et = 0; et + 1 < n; ++et) {
      if (es != et) {
        for (std::size_t a = 0; a < 4; ++a) {
          const double s = (static_cast<double>(es) + g.x[a]) * h;
          for (std::size_t b = 0; b < 4; ++b) {
            const double t = (static_cast<double>(et) + g.x[b]) * h;
            accumulate(es, et, s, t, g.w[a] * g.w[b] * h * h);
          }
        }
      } else {
        const double lo = static_cast<double>(es) * h;
        const double hi = lo + h;
        for (std::size_t b = 0; b < 4; ++b) {
          const double t = lo + g.x[b] * h;
          for (std::size_t a = 0; a < 4; ++a) {
            // lower triangle s in [lo, t]
            accumulate(es, es, lo + g.x[a] * (t - lo), t,
                       g.w[a] * g.w[b] * (t - lo) * h);
            // upper triangle s in [t, hi]
            accumulate(es, es, t + g.x[a] * (hi - t), t,
                       g.w[a] * g.w[b] * (hi - t) * h);
          }
        }
      }
    }
  }
  return G;
}

// Consistent mass matrix of linear elements, assembled exactly.
Matrix assemble_mass_matrix(std::size_t n) {
  const double h = 1.0 / static_cast<double>(n - 1);
  Matrix M(n, n);
  for (std::size_t e = 0; e + 1 < n; ++e) {
    M(e, e) += h / 3.0;
    M(e + 1, e + 1) += h / 3.0;
    M(e, e + 1) += h / 6.0;
    M(e + 1, e) += h / 6.0;
  }
  return M;
}

template <typename F>
Vector assemble_load(std::size_t n, F&& y) {
  const double h = 1.0 / static_cast<double>(n - 1);
  const GaussRule g = unit_gauss();
  Vector b(n, 0.0);
  // Two panels per element keep the rule exact for the degree-7 polynomial
  // right-hand side of Example 2.
  for (std::size_t e = 0; e + 1 < n; ++e) {
    for (int half = 0; half < 2; ++half) {
      const double lo = (static_cast<double>(e) + 0.5 * half) * h;
      for (std::size_t a = 0; a < 4; ++a) {
        const double t = lo + g.x[a] * 0.5 * h;
        const double u = (t - static_cast<double>(e) * h) / h;
        const double val = y(t) * g.w[a] * 0.5 * h;
        b[e] += val * (1.0 - u);
        b[e + 1] += val * u;
      }
    }
  }
  return b;
}

// Estimate of the projection defect ||(I - P_n) A||: probe the operator with
// the leading kernel eigenfunctions sin(j pi s) and measure the L2
// interpolation error of the images on the grid (fine composite quadrature).
double projection_error_estimate(std::size_t n) {
  const double pi = 3.14159265358979323846;
  double worst = 0.0;
  const std::size_t fine = 8 * (n - 1);
  const double hf = 1.0 / static_cast<double>(fine);
  const double h = 1.0 / static_cast<double>(n - 1);
  for (int j = 1; j <= 10; ++j) {
    const double sigma = 1.0 / (j * pi * j * pi);
    // A sin(j pi .) = sigma_j sin(j pi .): compare against its interpolant.
    double err2 = 0.0;
    for (std::size_t i = 0; i < fine; ++i) {
      const double s = (static_cast<double>(i) + 0.5) * hf;
      const std::size_t e = std::min(static_cast<std::size_t>(s / h), n - 2);
      const double u = (s - static_cast<double>(e) * h) / h;
      const double node0 = std::sin(j * pi * static_cast<double>(e) * h);
      const double node1 = std::sin(j * pi * (static_cast<double>(e) + 1) * h);
      const double interp = (1.0 - u) * node0 + u * node1;
      const double diff = std::sin(j * pi * s) - interp;
      err2 += diff * diff * hf;
    }
    // probe is sqrt(2)-normalized in L2
    worst = std::max(worst, sigma * std::sqrt(2.0 * err2));
  }
  return worst;
}

Matrix eigen_to_matrix(const Eigen::MatrixXd& e) {
  Matrix m(e.rows(), e.cols());
  for (Eigen::Index i = 0; i < e.rows(); ++i)
    for (Eigen::Index j = 0; j < e.cols(); ++j) m(i, j) = e(i, j);
  return m;
}

}  // namespace

const char* example_name(ExampleLabel l) noexcept {
  switch (l) {
    case ExampleLabel::Example1: return "example1";
    case ExampleLabel::Example2: return "example2";
    case ExampleLabel::Custom: return "custom";
  }
  return "?";
}

Vector IntegralProblem::to_coeff(const Vector& nodal) const {
  if (nodal.size() != n) throw ContractViolation("to_coeff: dimension mismatch");
  Vector w(n);
  kernels::gemv_n(mass_sqrt.data, n, n, nodal, w);
  return w;
}

Vector IntegralProblem::to_nodal(const Vector& coeff) const {
  if (coeff.size() != n) throw ContractViolation("to_nodal: dimension mismatch");
  Vector v(n);
  kernels::gemv_n(mass_sqrt_inv.data, n, n, coeff, v);
  return v;
}

IntegralProblem build_integral_problem(std::size_t n, ExampleLabel label) {
  if (n < 8) throw ConfigError("grid size must be at least 8");
  if (label == ExampleLabel::Custom)
    throw ConfigError("custom problems are constructed directly");

  const Matrix G = assemble_kernel_matrix(n);
  const Matrix M = assemble_mass_matrix(n);

  Eigen::Map<const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic,
                                 Eigen::RowMajor>>
      me(M.data.data(), n, n);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(me);
  if (es.info() != Eigen::Success)
    throw SvdError("mass matrix eigendecomposition failed");
  const Eigen::VectorXd lam = es.eigenvalues();
  const Eigen::MatrixXd V = es.eigenvectors();
  Eigen::MatrixXd msqrt =
      V * lam.array().sqrt().matrix().asDiagonal() * V.transpose();
  Eigen::MatrixXd misqrt =
      V * lam.array().rsqrt().matrix().asDiagonal() * V.transpose();

  Eigen::Map<const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic,
                                 Eigen::RowMajor>>
      ge(G.data.data(), n, n);
  Eigen::MatrixXd an = misqrt * ge * misqrt;
  an = 0.5 * (an + an.transpose()).eval();  // symmetric by construction

  auto y1 = [](double s) { return s * (1.0 - s); };
  auto y2 = [](double s) {
    return s * s * s * s * (1.0 - s) * (1.0 - s) * (1.0 - s);
  };

  Vector load = label == ExampleLabel::Example1 ? assemble_load(n, y1)
                                                : assemble_load(n, y2);
  Eigen::Map<const Eigen::VectorXd> be(load.data(), n);
  Eigen::VectorXd yw = misqrt * be;

  const double h = 1.0 / static_cast<double>(n - 1);
  Vector nodes(n), x_exact(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double t = static_cast<double>(i) * h;
    nodes[i] = t;
    if (label == ExampleLabel::Example1) {
      x_exact[i] = 2.0;
    } else {
      x_exact[i] = -6.0 * t * t * (1.0 - t) * (2.0 - 8.0 * t + 7.0 * t * t);
    }
  }

  IntegralProblem p{
      n,
      label,
      DenseOperator(eigen_to_matrix(an)),
      Vector(yw.data(), yw.data() + n),
      std::move(x_exact),
      label == ExampleLabel::Example1 ? 0.1125 : 0.5625,
      std::move(nodes),
      eigen_to_matrix(msqrt),
      eigen_to_matrix(misqrt),
      projection_error_estimate(n),
  };
  return p;
}

double counter_uniform(std::uint64_t seed, std::uint64_t counter) noexcept {
  std::uint64_t z = seed * 0x9E3779B97F4A7C15ULL + counter * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  z = z ^ (z >> 31);
  return static_cast<double>(z >> 11) * 0x1.0p-53;
}

NoisyData add_noise(const IntegralProblem& p, double delta_prime,
                    std::uint64_t seed) {
  if (delta_prime < 0.0)
    throw DomainError("noise magnitude must be nonnegative");
  NoisyData d;
  d.delta_prime = delta_prime;
  d.seed = seed;
  d.y_delta.resize(p.n);
  Vector diff(p.n);
  for (std::size_t j = 0; j < p.n; ++j) {
    const double u = counter_uniform(seed, j);
    d.y_delta[j] = (1.0 + delta_prime * (2.0 * u - 1.0)) * p.y_exact[j];
    diff[j] = d.y_delta[j] - p.y_exact[j];
  }
  d.delta = kernels::nrm2(diff);
  d.delta_nodal = kernels::nrm2(p.to_nodal(diff));
  return d;
}

double l2_relative_error(const Vector& x_coeff, const IntegralProblem& p) {
  if (x_coeff.size() != p.n)
    throw ContractViolation("l2_relative_error: dimension mismatch");
  const Vector xn = p.to_nodal(x_coeff);
  const double h = 1.0 / static_cast<double>(p.n - 1);
  double num = 0.0, den = 0.0;
  for (std::size_t i = 0; i < p.n; ++i) {
    const double w = (i == 0 || i + 1 == p.n) ? 0.5 * h : h;
    const double d = xn[i] - p.x_exact_nodal[i];
    num += w * d * d;
    den += w * p.x_exact_nodal[i] * p.x_exact_nodal[i];
  }
  if (den == 0.0)
    throw UndefinedMetricError("relative error undefined: exact solution is zero");
  return std::sqrt(num / den);
}

}  // namespace soar::problems
