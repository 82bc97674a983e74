#pragma once

// Velocity scales for nearest-neighbour chains: the Lieb-Robinson estimate
// from interaction norms, the XX free-fermion dispersion, and a direct
// evaluation of the commutator norm ||[A(t), B]|| that the LR bound limits.

#include <cstddef>

#include "qcausal/spinchain.hpp"

namespace qcausal {

struct LrEstimate {
  double g;       // total norm of interactions touching a bulk site, 2|J| + |h|
  double g_prop;  // part that couples distinct sites, 2|J|
  double v_lr;    // 2e * g_prop
};

/// Depends on the couplings alone; there is deliberately no state argument.
LrEstimate lr_velocity(const ChainModel& model);

/// max_k |d eps/dk| = 2|J|.
double xx_group_velocity(double coupling);

struct DispersionPoint {
  double k;
  double energy;    // 2J cos k
  double velocity;  // -2J sin k
};

/// Single-particle dispersion of the XX chain; k must lie in [-pi, pi].
DispersionPoint dispersion(double k, double coupling);

/// Largest singular value.
double operator_norm(const ComplexMatrix<double>& m);

/// ||[U(t)^dagger A U(t), B]|| with A on `site_a` and B on `site_b`.
double commutator_front_norm(const Hamiltonian<double>& H, std::size_t site_a, const ComplexMatrix<double>& op_a,
                             std::size_t site_b, const ComplexMatrix<double>& op_b, double t);

}  // namespace qcausal
