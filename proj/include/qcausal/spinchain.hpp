#pragma once

// Open-boundary spin-1/2 chains and their exact dynamics.
//
//   TFIM: H = -J sum_k Z_k Z_{k+1} - h sum_k X_k
//   XX:   H = (J/2) sum_k (X_k X_{k+1} + Y_k Y_{k+1}) + h sum_k Z_k
//
// Units: hbar = 1, time in units of 1/J.

#include <cmath>
#include <complex>
#include <string>

#include "qcausal/qstate.hpp"

namespace qcausal {

enum class ModelKind { Tfim, Xx };

inline std::string to_string(ModelKind kind) { return kind == ModelKind::Tfim ? "tfim" : "xx"; }

struct ChainModel {
  ModelKind kind = ModelKind::Xx;
  std::size_t n_sites = 2;
  double coupling = 1.0;  // J
  double field = 0.0;     // h

  void validate() const {
    require(n_sites >= 2 && n_sites <= kMaxSites, ErrorKind::InvalidInput,
            "chain length " + std::to_string(n_sites) + " outside [2, " + std::to_string(kMaxSites) + "]");
    require(std::isfinite(coupling) && std::isfinite(field), ErrorKind::InvalidInput,
            "coupling and field must be finite");
  }
};

namespace detail {

// sigma_z eigenvalue of `site` in basis state `b`: +1 for bit 0, -1 for bit 1.
inline int z_sign(Eigen::Index b, std::size_t site, std::size_t n) {
  return ((b >> (n - 1 - site)) & 1) ? -1 : 1;
}

template <typename Real>
ComplexMatrix<Real> assemble(const ChainModel& model) {
  model.validate();
  const std::size_t n = model.n_sites;
  const Eigen::Index dim = dimension_for(n);
  const Real J = static_cast<Real>(model.coupling);
  const Real h = static_cast<Real>(model.field);
  ComplexMatrix<Real> H = ComplexMatrix<Real>::Zero(dim, dim);

  for (Eigen::Index b = 0; b < dim; ++b) {
    if (model.kind == ModelKind::Tfim) {
      Real diag(0);
      for (std::size_t k = 0; k + 1 < n; ++k) diag -= J * Real(z_sign(b, k, n) * z_sign(b, k + 1, n));
      H(b, b) += diag;
      for (std::size_t k = 0; k < n; ++k) H(b ^ (Eigen::Index{1} << (n - 1 - k)), b) -= h;
    } else {
      Real diag(0);
      for (std::size_t k = 0; k < n; ++k) diag += h * Real(z_sign(b, k, n));
      H(b, b) += diag;
      // (XX + YY)/2 swaps antiparallel neighbours with unit amplitude.
      for (std::size_t k = 0; k + 1 < n; ++k) {
        if (z_sign(b, k, n) != z_sign(b, k + 1, n)) {
          const Eigen::Index flip = (Eigen::Index{1} << (n - 1 - k)) | (Eigen::Index{1} << (n - 2 - k));
          H(b ^ flip, b) += J;
        }
      }
    }
  }
  return H;
}

}  // namespace detail

/// Dense Hamiltonian with its spectral decomposition, computed once at
/// construction. Immutable afterwards, so concurrent reads are safe.
template <typename Real = double>
class Hamiltonian {
 public:
  using Matrix = ComplexMatrix<Real>;

  explicit Hamiltonian(const ChainModel& model) : model_(model), matrix_(detail::assemble<Real>(model)) {
    Eigen::SelfAdjointEigenSolver<Matrix> solver(matrix_);
    require(solver.info() == Eigen::Success, ErrorKind::NumericalInstability, "Hamiltonian eigensolver failed");
    eigenvalues_ = solver.eigenvalues();
    eigenvectors_ = solver.eigenvectors();
    for (Eigen::Index j = 0; j < eigenvectors_.cols(); ++j) {
      auto column = eigenvectors_.col(j);
      fix_global_phase(column);
    }
  }

  const ChainModel& model() const { return model_; }
  std::size_t n_sites() const { return model_.n_sites; }
  Eigen::Index dimension() const { return matrix_.rows(); }
  const Matrix& matrix() const { return matrix_; }
  /// Ascending.
  const RealVector<Real>& eigenvalues() const { return eigenvalues_; }
  const Matrix& eigenvectors() const { return eigenvectors_; }

 private:
  ChainModel model_;
  Matrix matrix_;
  RealVector<Real> eigenvalues_;
  Matrix eigenvectors_;
};

template <typename Real = double>
Hamiltonian<Real> build_tfim(std::size_t n, double coupling, double field) {
  return Hamiltonian<Real>(ChainModel{ModelKind::Tfim, n, coupling, field});
}

template <typename Real = double>
Hamiltonian<Real> build_xx(std::size_t n, double coupling, double field) {
  return Hamiltonian<Real>(ChainModel{ModelKind::Xx, n, coupling, field});
}

template <typename Real>
struct GroundState {
  Ket<Real> ket;
  Real energy;
  Real gap;  // to the next eigenvalue
  bool degenerate;
};

inline constexpr double kDegeneracyGap = 1e-10;

/// Lowest eigenvector. When the gap is below 1e-10 the first eigenvector of
/// the (deterministic) solver ordering is returned and `degenerate` is set.
template <typename Real>
GroundState<Real> ground_state(const Hamiltonian<Real>& H) {
  const auto& w = H.eigenvalues();
  const Real gap = w.size() > 1 ? w(1) - w(0) : Real(0);
  return GroundState<Real>{Ket<Real>::normalized(H.eigenvectors().col(0)), w(0), gap,
                           w.size() > 1 && gap < Real(kDegeneracyGap)};
}

template <typename Real>
struct Propagator {
  double time;
  ComplexMatrix<Real> matrix;
};

/// U(t) = V exp(-i Lambda t) V^dagger.
template <typename Real>
Propagator<Real> propagator(const Hamiltonian<Real>& H, double t) {
  require(std::isfinite(t), ErrorKind::InvalidInput, "propagation time must be finite");
  if (t == 0.0) return Propagator<Real>{t, ComplexMatrix<Real>::Identity(H.dimension(), H.dimension())};
  const auto& V = H.eigenvectors();
  const auto& w = H.eigenvalues();
  ComplexVector<Real> phases(w.size());
  for (Eigen::Index i = 0; i < w.size(); ++i) phases(i) = std::polar(Real(1), -w(i) * static_cast<Real>(t));
  return Propagator<Real>{t, V * phases.asDiagonal() * V.adjoint()};
}

template <typename Real>
DensityMatrix<Real> evolve(const DensityMatrix<Real>& rho, const Propagator<Real>& U) {
  require(rho.dimension() == U.matrix.rows(), ErrorKind::InvalidInput, "state and propagator dimensions differ");
  return DensityMatrix<Real>(U.matrix * rho.matrix() * U.matrix.adjoint());
}

template <typename Real>
Ket<Real> evolve(const Ket<Real>& ket, const Propagator<Real>& U) {
  require(ket.dimension() == U.matrix.rows(), ErrorKind::InvalidInput, "state and propagator dimensions differ");
  return Ket<Real>::normalized(U.matrix * ket.amplitudes());
}

/// Pure-state trajectory psi(t) = V exp(-i Lambda t) V^dagger psi0, with the
/// eigenbasis coefficients of psi0 cached so each time costs one mat-vec.
template <typename Real = double>
class KetTrajectory {
 public:
  KetTrajectory(const Hamiltonian<Real>& H, const Ket<Real>& initial) : H_(&H), initial_(initial) {
    require(initial.dimension() == H.dimension(), ErrorKind::InvalidInput,
            "state and Hamiltonian dimensions differ");
    coefficients_ = H.eigenvectors().adjoint() * initial.amplitudes();
  }

  Ket<Real> at(double t) const {
    require(std::isfinite(t), ErrorKind::InvalidInput, "propagation time must be finite");
    if (t == 0.0) return initial_;
    const auto& w = H_->eigenvalues();
    ComplexVector<Real> c(coefficients_.size());
    for (Eigen::Index i = 0; i < c.size(); ++i)
      c(i) = coefficients_(i) * std::polar(Real(1), -w(i) * static_cast<Real>(t));
    return Ket<Real>::normalized(H_->eigenvectors() * c);
  }

 private:
  const Hamiltonian<Real>* H_;
  Ket<Real> initial_;
  ComplexVector<Real> coefficients_;
};

}  // namespace qcausal
