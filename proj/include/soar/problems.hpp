#pragma once

#include <cstdint>

#include "soar/dense_operator.hpp"

// Test problems built from a Green's-kernel Fredholm equation of the first
// kind on [0,1],
//
//   (A x)(s) = int_0^1 K(s,t) x(t) dt = y(s),
//   K(s,t) = s(1-t) for s <= t,  t(1-s) for s > t,
//
// discretized with linear finite elements on a uniform grid of step
// 1/(n-1). With G_ij = int int K phi_i phi_j and mass matrix
// M_ij = int phi_i phi_j, the working operator is the symmetrized
//
//   A_n = M^{-1/2} G M^{-1/2},
//
// acting on coefficient vectors w = M^{1/2} (nodal values). This keeps A_n
// symmetric positive semidefinite, makes the Euclidean norm of coefficient
// vectors equal to the L2 norm of the interpolants, and reproduces the
// eigenvalues (j pi)^{-2} of the continuous kernel.

namespace soar::problems {

enum class ExampleLabel { Example1, Example2, Custom };

const char* example_name(ExampleLabel l) noexcept;

struct IntegralProblem {
  std::size_t n = 0;
  ExampleLabel label = ExampleLabel::Custom;
  DenseOperator op;        // A_n in coefficient coordinates
  Vector y_exact;          // right-hand side, coefficient coordinates
  Vector x_exact_nodal;    // exact solution sampled at the nodes
  double p_smoothness = 0; // reference Hoelder exponent of the example
  Vector nodes;
  Matrix mass_sqrt;        // M^{1/2}
  Matrix mass_sqrt_inv;    // M^{-1/2}
  double projection_error = 0;  // estimate of ||(I - P_n) A||, diagnostic

  Vector to_coeff(const Vector& nodal) const;  // M^{1/2} v
  Vector to_nodal(const Vector& coeff) const;  // M^{-1/2} w
  Vector x_exact_coeff() const { return to_coeff(x_exact_nodal); }
};

/// Assembles the chosen example at grid size n (>= 8; smaller grids cannot
/// resolve the kernel). Example 1: y = s(1-s), x = 2, reference p = 0.1125.
/// Example 2: y = s^4 (1-s)^3, x = -6 t^2 (1-t)(2 - 8t + 7t^2),
/// reference p = 0.5625.
IntegralProblem build_integral_problem(std::size_t n, ExampleLabel label);

struct NoisyData {
  Vector y_delta;       // coefficient coordinates
  double delta = 0.0;   // realized ||y_delta - y||_2 (recomputed, = L2 norm)
  double delta_nodal = 0.0;  // same perturbation measured on nodal values
  double delta_prime = 0.0;
  std::uint64_t seed = 0;
};

/// Multiplicative uniform noise y_j -> (1 + delta' (2 u_j - 1)) y_j with a
/// seeded counter generator: u_j is deterministic in (seed, j), so a fixed
/// seed reproduces bitwise identical data.
NoisyData add_noise(const IntegralProblem& p, double delta_prime,
                    std::uint64_t seed);

/// ||x - x^+||_{L2} / ||x^+||_{L2} by trapezoidal quadrature on the nodal
/// grid; x_coeff is in coefficient coordinates. Throws UndefinedMetricError
/// when the exact solution vanishes.
double l2_relative_error(const Vector& x_coeff, const IntegralProblem& p);

/// Uniform [0,1) deviate, deterministic in (seed, counter); splitmix64
/// finalizer over the pair, top 53 bits.
double counter_uniform(std::uint64_t seed, std::uint64_t counter) noexcept;

}  // namespace soar::problems
