#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <sstream>

#include "soar/dense_operator.hpp"
#include "soar/errors.hpp"
#include "soar/kernels.hpp"
#include "soar/problems.hpp"
#include "test_support.hpp"

using namespace soar;

TEST_CASE("apply: identity and diagonal action") {
  auto id = DenseOperator::identity(2);
  CHECK(id.apply({1.0, 2.0}) == Vector{1.0, 2.0});

  const double d[] = {3.0, 0.5};
  auto diag = DenseOperator::diagonal(d);
  CHECK(diag.apply({1.0, 1.0}) == Vector{3.0, 0.5});

  CHECK_THROWS_AS(id.apply({1.0, 2.0, 3.0}), ContractViolation);
}

TEST_CASE("apply_adjoint: identity, diagonal, bilinear-form symmetry") {
  auto id = DenseOperator::identity(2);
  CHECK(id.apply_adjoint({1.0, 2.0}) == Vector{1.0, 2.0});

  const double d[] = {2.0, 4.0};
  CHECK(DenseOperator::diagonal(d).apply_adjoint({1.0, 1.0}) == Vector{2.0, 4.0});

  testsup::Rng rng(3);
  DenseOperator a(rng.matrix(5, 3));
  for (int trial = 0; trial < 100; ++trial) {
    Vector x = rng.vector(3), y = rng.vector(5);
    const double lhs = kernels::dot(a.apply(x), y);
    const double rhs = kernels::dot(x, a.apply_adjoint(y));
    CHECK(std::abs(lhs - rhs) <= 1e-10 * std::max(1.0, std::abs(lhs)));
  }
  CHECK_THROWS_AS(a.apply_adjoint(Vector(3)), ContractViolation);
}

TEST_CASE("operator_norm: diagonal, zero, and power-iteration vs svd") {
  const double d[] = {3.0, 1.0};
  CHECK(DenseOperator::diagonal(d).operator_norm() == doctest::Approx(3.0).epsilon(1e-12));

  DenseOperator zero(Matrix(4, 4));
  CHECK(zero.operator_norm() == 0.0);
  CHECK(zero.is_zero());

  testsup::Rng rng(5);
  for (int trial = 0; trial < 5; ++trial) {
    DenseOperator a(rng.matrix(12, 9));
    const double by_power = a.operator_norm();
    DenseOperator b(a.matrix());
    const double by_svd = b.svd().singular_values.front();
    CHECK(by_power == doctest::Approx(by_svd).epsilon(1e-9));
  }
}

TEST_CASE("operator_norm of the assembled kernel matrix") {
  auto p = problems::build_integral_problem(400, problems::ExampleLabel::Example1);
  const double pi = 3.14159265358979323846;
  CHECK(p.op.operator_norm() ==
        doctest::Approx(1.0 / (pi * pi)).epsilon(1e-3));
}

TEST_CASE("svd: diagonal values, rank-1 truncation, reconstruction") {
  const double d[] = {2.0, 1.0};
  const SvdSystem& sys = DenseOperator::diagonal(d).svd();
  REQUIRE(sys.rank() == 2);
  CHECK(sys.singular_values[0] == doctest::Approx(2.0));
  CHECK(sys.singular_values[1] == doctest::Approx(1.0));
  // axis-aligned up to sign
  CHECK(std::abs(sys.right_vectors(0, 0)) == doctest::Approx(1.0));
  CHECK(std::abs(sys.left_vectors(0, 0)) == doctest::Approx(1.0));

  // rank-1 outer product u v^T keeps a single value
  testsup::Rng rng(9);
  Vector u = rng.vector(6), v = rng.vector(4);
  Matrix m(6, 4);
  for (std::size_t i = 0; i < 6; ++i)
    for (std::size_t j = 0; j < 4; ++j) m(i, j) = u[i] * v[j];
  const SvdSystem& r1 = DenseOperator(std::move(m)).svd();
  CHECK(r1.rank() == 1);
  CHECK(r1.truncated_count == 3);
}

TEST_CASE("svd invariants on random and structured operators") {
  testsup::Rng rng(13);
  std::vector<Matrix> mats;
  mats.push_back(rng.matrix(8, 8));
  mats.push_back(rng.matrix(10, 6));
  mats.push_back(rng.matrix(6, 10));
  for (auto& m : mats) {
    DenseOperator a(m);
    const SvdSystem& s = a.svd();
    const std::size_t r = s.rank();

    // nonincreasing positive values
    for (std::size_t j = 0; j + 1 < r; ++j)
      CHECK(s.singular_values[j] >= s.singular_values[j + 1]);
    CHECK(s.singular_values.back() > 0.0);

    // A u_j = sigma_j v_j and A^T v_j = sigma_j u_j, per entry
    for (std::size_t j = 0; j < r; ++j) {
      Vector uj(a.cols()), vj(a.rows());
      for (std::size_t i = 0; i < a.cols(); ++i) uj[i] = s.right_vectors(i, j);
      for (std::size_t i = 0; i < a.rows(); ++i) vj[i] = s.left_vectors(i, j);
      Vector au = a.apply(uj);
      Vector atv = a.apply_adjoint(vj);
      for (std::size_t i = 0; i < a.rows(); ++i)
        CHECK(std::abs(au[i] - s.singular_values[j] * vj[i]) <= 1e-8);
      for (std::size_t i = 0; i < a.cols(); ++i)
        CHECK(std::abs(atv[i] - s.singular_values[j] * uj[i]) <= 1e-8);
    }

    // orthonormality U^T U = I, V^T V = I
    for (std::size_t j = 0; j < r; ++j) {
      for (std::size_t l = j; l < r; ++l) {
        double du = 0.0, dv = 0.0;
        for (std::size_t i = 0; i < a.cols(); ++i)
          du += s.right_vectors(i, j) * s.right_vectors(i, l);
        for (std::size_t i = 0; i < a.rows(); ++i)
          dv += s.left_vectors(i, j) * s.left_vectors(i, l);
        const double want = j == l ? 1.0 : 0.0;
        CHECK(std::abs(du - want) <= 1e-8);
        CHECK(std::abs(dv - want) <= 1e-8);
      }
    }

    // reconstruction ||A - V S U^T|| <= 1e-8 ||A|| (Frobenius bound suffices)
    double frob = 0.0;
    for (std::size_t i = 0; i < a.rows(); ++i) {
      for (std::size_t jj = 0; jj < a.cols(); ++jj) {
        double rec = 0.0;
        for (std::size_t l = 0; l < r; ++l)
          rec += s.left_vectors(i, l) * s.singular_values[l] *
                 s.right_vectors(jj, l);
        const double diff = m(i, jj) - rec;
        frob += diff * diff;
      }
    }
    CHECK(std::sqrt(frob) <= 1e-8 * a.operator_norm());

    // norm equals the top singular value whenever both are computed
    CHECK(a.operator_norm() == doctest::Approx(s.singular_values.front()).epsilon(1e-10));
  }
}

TEST_CASE("fem operator applied to the constant solution of example 1") {
  // For the assembled kernel, the image of the constant 2 is s(1-s) up to
  // discretization error.
  auto p = problems::build_integral_problem(400, problems::ExampleLabel::Example1);
  Vector two(p.n, 2.0);
  Vector img = p.to_nodal(p.op.apply(p.to_coeff(two)));
  double worst = 0.0;
  for (std::size_t i = 0; i < p.n; ++i)
    worst = std::max(worst, std::abs(img[i] - p.nodes[i] * (1.0 - p.nodes[i])));
  CHECK(worst <= 1e-3);
}

TEST_CASE("text serialization round-trips") {
  testsup::Rng rng(17);
  DenseOperator a(rng.matrix(5, 7));
  std::stringstream ss;
  a.save_text(ss);
  DenseOperator b = DenseOperator::load_text(ss);
  REQUIRE(b.rows() == 5);
  REQUIRE(b.cols() == 7);
  CHECK(a.matrix().data == b.matrix().data);

  std::stringstream bad("3 x");
  CHECK_THROWS_AS(DenseOperator::load_text(bad), ConfigError);
}

TEST_CASE("non-finite entries are rejected") {
  Matrix m(2, 2);
  m(0, 0) = std::numeric_limits<double>::infinity();
  CHECK_THROWS_AS(DenseOperator{std::move(m)}, ContractViolation);
}
