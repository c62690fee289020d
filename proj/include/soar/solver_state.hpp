#pragma once

#include <cstddef>

#include "soar/matrix.hpp"

namespace soar::solvers {

/// Iterate of any of the stepping methods. v is zero-filled for first-order
/// methods; x_prev backs the multi-term recurrences. residual_norm and
/// velocity_norm are kept current every step except for the recursively
/// updated residual of the conjugate-gradient method, which is recomputed
/// from scratch at least every 64 steps.
struct SolverState {
  Vector x;
  Vector v;
  Vector x_prev;
  std::size_t k = 0;
  double t = 0.0;  // pseudo-time k * dt for the fixed-step methods
  double residual_norm = 0.0;
  double velocity_norm = 0.0;

  // Conjugate-gradient working set (unused by the other methods).
  Vector cg_residual;   // data-space residual y - A x
  Vector cg_direction;  // search direction
  double cg_gamma = 0.0;  // ||A^T (y - A x)||^2

  double energy() const {
    return residual_norm * residual_norm + velocity_norm * velocity_norm;
  }
};

}  // namespace soar::solvers
