#pragma once

// Dense multi-qubit states: kets, density matrices, local operator embedding,
// partial traces and von Neumann entropy.
//
// Basis convention: index b encodes the bitstring q0 q1 ... q_{N-1} with site 0
// as the most significant bit, b = sum_s q_s * 2^(N-1-s). A single-site
// operator on site s therefore acts on tensor factor s counted from the left.

#include <Eigen/Dense>
#include <unsupported/Eigen/KroneckerProduct>

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <initializer_list>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "qcausal/error.hpp"

#ifndef QCAUSAL_MAX_SITES
#define QCAUSAL_MAX_SITES 12
#endif

namespace qcausal {

inline constexpr std::size_t kMaxSites = QCAUSAL_MAX_SITES;

template <typename Real>
using ComplexMatrix = Eigen::Matrix<std::complex<Real>, Eigen::Dynamic, Eigen::Dynamic>;
template <typename Real>
using ComplexVector = Eigen::Matrix<std::complex<Real>, Eigen::Dynamic, 1>;
template <typename Real>
using RealVector = Eigen::Matrix<Real, Eigen::Dynamic, 1>;

/// Real scalar underlying an Eigen expression (real or complex).
template <typename Derived>
using RealOf = typename Eigen::NumTraits<typename Derived::Scalar>::Real;

namespace tolerance {
inline constexpr double kNorm = 1e-10;
inline constexpr double kHermiticity = 1e-10;
inline constexpr double kTrace = 1e-10;
inline constexpr double kMinEigenvalue = -1e-10;
// Eigenvalues below this contribute nothing to an entropy.
inline constexpr double kEigenvalueClamp = 1e-12;
// Eigenvalues below this are a genuinely invalid state, not rounding drift.
inline constexpr double kNegativeEigenvalue = 1e-8;
}  // namespace tolerance

inline void check_site_count(std::size_t n) {
  require(n >= 1 && n <= kMaxSites, ErrorKind::InvalidInput,
          "number of sites " + std::to_string(n) + " outside [1, " + std::to_string(kMaxSites) + "]");
}

inline Eigen::Index dimension_for(std::size_t n) { return Eigen::Index{1} << n; }

/// Number of qubits whose Hilbert space has dimension `dim`.
inline std::size_t sites_for_dimension(Eigen::Index dim) {
  require(dim >= 2 && (dim & (dim - 1)) == 0, ErrorKind::InvalidInput,
          "dimension " + std::to_string(dim) + " is not a power of two >= 2");
  std::size_t n = 0;
  while ((Eigen::Index{1} << n) < dim) ++n;
  check_site_count(n);
  return n;
}

/// Strictly increasing set of site indices.
class SiteSet {
 public:
  SiteSet() = default;
  SiteSet(std::initializer_list<std::size_t> sites) : SiteSet(std::vector<std::size_t>(sites)) {}
  explicit SiteSet(std::vector<std::size_t> sites) : sites_(std::move(sites)) {
    for (std::size_t i = 1; i < sites_.size(); ++i) {
      require(sites_[i - 1] < sites_[i], ErrorKind::InvalidInput,
              "site indices must be strictly increasing and distinct");
    }
  }

  /// Sites first, first+1, ..., last-1.
  static SiteSet range(std::size_t first, std::size_t last) {
    std::vector<std::size_t> s;
    for (std::size_t i = first; i < last; ++i) s.push_back(i);
    return SiteSet(std::move(s));
  }
  static SiteSet all(std::size_t n) { return range(0, n); }

  std::size_t size() const { return sites_.size(); }
  bool empty() const { return sites_.empty(); }
  std::size_t operator[](std::size_t i) const { return sites_[i]; }
  auto begin() const { return sites_.begin(); }
  auto end() const { return sites_.end(); }
  const std::vector<std::size_t>& indices() const { return sites_; }

  bool contains(std::size_t site) const { return std::binary_search(sites_.begin(), sites_.end(), site); }

  void check_within(std::size_t n) const {
    require(empty() || sites_.back() < n, ErrorKind::InvalidInput,
            "site set " + to_string() + " exceeds chain of " + std::to_string(n) + " sites");
  }

  SiteSet complement(std::size_t n) const {
    check_within(n);
    std::vector<std::size_t> rest;
    for (std::size_t i = 0; i < n; ++i)
      if (!contains(i)) rest.push_back(i);
    return SiteSet(std::move(rest));
  }

  SiteSet united(const SiteSet& other) const {
    std::vector<std::size_t> out;
    std::set_union(sites_.begin(), sites_.end(), other.sites_.begin(), other.sites_.end(),
                   std::back_inserter(out));
    return SiteSet(std::move(out));
  }

  bool disjoint(const SiteSet& other) const {
    return std::none_of(sites_.begin(), sites_.end(), [&](std::size_t s) { return other.contains(s); });
  }

  /// Positions of these sites inside `parent`, i.e. the labels they receive
  /// after reducing to `parent` and relabeling 0..|parent|-1.
  SiteSet relabeled_within(const SiteSet& parent) const {
    std::vector<std::size_t> out;
    out.reserve(size());
    for (std::size_t s : sites_) {
      auto it = std::lower_bound(parent.begin(), parent.end(), s);
      require(it != parent.end() && *it == s, ErrorKind::InvalidInput,
              "site " + std::to_string(s) + " not in " + parent.to_string());
      out.push_back(static_cast<std::size_t>(it - parent.begin()));
    }
    return SiteSet(std::move(out));
  }

  std::string to_string() const {
    std::string out = "{";
    for (std::size_t i = 0; i < sites_.size(); ++i) {
      if (i) out += ',';
      out += std::to_string(sites_[i]);
    }
    return out + "}";
  }

  friend bool operator==(const SiteSet&, const SiteSet&) = default;

 private:
  std::vector<std::size_t> sites_;
};

namespace detail {

// Splits a full basis index into (selected sites, remaining sites):
// full = inner[r] + outer[k], where r enumerates the selected sites with the
// first selected site most significant and k enumerates the rest likewise.
struct SubsystemIndex {
  std::vector<Eigen::Index> inner;
  std::vector<Eigen::Index> outer;

  SubsystemIndex(const SiteSet& sites, std::size_t n)
      : inner(offsets(sites, n)), outer(offsets(sites.complement(n), n)) {}

  static std::vector<Eigen::Index> offsets(const SiteSet& s, std::size_t n) {
    std::vector<Eigen::Index> out(std::size_t{1} << s.size());
    for (std::size_t r = 0; r < out.size(); ++r) {
      Eigen::Index full = 0;
      for (std::size_t k = 0; k < s.size(); ++k) {
        const auto bit = static_cast<Eigen::Index>((r >> (s.size() - 1 - k)) & 1u);
        full |= bit << (n - 1 - s[k]);
      }
      out[r] = full;
    }
    return out;
  }
};

}  // namespace detail

template <typename Real = double>
class Ket {
 public:
  using Vector = ComplexVector<Real>;

  explicit Ket(Vector amplitudes) : n_sites_(sites_for_dimension(amplitudes.size())), amplitudes_(std::move(amplitudes)) {
    const Real deviation = std::abs(amplitudes_.norm() - Real(1));
    require(deviation <= Real(tolerance::kNorm), ErrorKind::InvalidInput,
            "ket norm deviates from 1 by " + std::to_string(static_cast<double>(deviation)));
  }

  /// Rescales `amplitudes` to unit norm; a zero vector is rejected.
  static Ket normalized(Vector amplitudes) {
    const Real norm = amplitudes.norm();
    require(norm > Real(0), ErrorKind::InvalidInput, "cannot normalize a zero vector");
    return Ket(amplitudes / norm);
  }

  std::size_t n_sites() const { return n_sites_; }
  Eigen::Index dimension() const { return amplitudes_.size(); }
  const Vector& amplitudes() const { return amplitudes_; }

 private:
  std::size_t n_sites_;
  Vector amplitudes_;
};

template <typename Real = double>
class DensityMatrix {
 public:
  using Matrix = ComplexMatrix<Real>;

  /// Checks dimension, Hermiticity and unit trace. Positivity is left to
  /// validate_density_matrix / von_neumann_entropy, which need a spectrum.
  explicit DensityMatrix(Matrix matrix) : matrix_(std::move(matrix)) {
    require(matrix_.rows() == matrix_.cols(), ErrorKind::InvalidInput, "density matrix must be square");
    n_sites_ = sites_for_dimension(matrix_.rows());
    const Real herm = (matrix_ - matrix_.adjoint()).cwiseAbs().maxCoeff();
    require(herm <= Real(tolerance::kHermiticity), ErrorKind::InvalidInput,
            "density matrix not Hermitian (defect " + std::to_string(static_cast<double>(herm)) + ")");
    const Real trace_defect = std::abs(matrix_.trace() - std::complex<Real>(1));
    require(trace_defect <= Real(tolerance::kTrace), ErrorKind::InvalidInput,
            "density matrix trace deviates from 1 by " + std::to_string(static_cast<double>(trace_defect)));
  }

  static DensityMatrix from_ket(const Ket<Real>& ket) {
    return DensityMatrix(ket.amplitudes() * ket.amplitudes().adjoint());
  }

  static DensityMatrix maximally_mixed(std::size_t n) {
    check_site_count(n);
    const Eigen::Index dim = dimension_for(n);
    return DensityMatrix(Matrix::Identity(dim, dim) / static_cast<Real>(dim));
  }

  std::size_t n_sites() const { return n_sites_; }
  Eigen::Index dimension() const { return matrix_.rows(); }
  const Matrix& matrix() const { return matrix_; }

 private:
  Matrix matrix_;
  std::size_t n_sites_ = 0;
};

template <typename Real = double>
ComplexMatrix<Real> identity2() {
  return ComplexMatrix<Real>::Identity(2, 2);
}

template <typename Real = double>
ComplexMatrix<Real> pauli_x() {
  ComplexMatrix<Real> m(2, 2);
  m << 0, 1, 1, 0;
  return m;
}

template <typename Real = double>
ComplexMatrix<Real> pauli_y() {
  using C = std::complex<Real>;
  ComplexMatrix<Real> m(2, 2);
  m << C(0), C(0, -1), C(0, 1), C(0);
  return m;
}

template <typename Real = double>
ComplexMatrix<Real> pauli_z() {
  ComplexMatrix<Real> m(2, 2);
  m << 1, 0, 0, -1;
  return m;
}

template <typename Real = double>
Ket<Real> basis_ket(const std::vector<int>& bits) {
  require(!bits.empty(), ErrorKind::InvalidInput, "basis_ket needs at least one bit");
  check_site_count(bits.size());
  Eigen::Index index = 0;
  for (int b : bits) {
    require(b == 0 || b == 1, ErrorKind::InvalidInput, "basis bits must be 0 or 1");
    index = (index << 1) | b;
  }
  ComplexVector<Real> amps = ComplexVector<Real>::Zero(dimension_for(bits.size()));
  amps(index) = 1;
  return Ket<Real>(std::move(amps));
}

/// Bitstring form, e.g. "1000".
template <typename Real = double>
Ket<Real> basis_ket_from_string(std::string_view bits) {
  std::vector<int> parsed;
  for (char c : bits) {
    require(c == '0' || c == '1', ErrorKind::InvalidInput, "basis string may only contain 0 and 1");
    parsed.push_back(c - '0');
  }
  return basis_ket<Real>(parsed);
}

/// (|0...0> + |1...1>) / sqrt(2)
template <typename Real = double>
Ket<Real> ghz_state(std::size_t n) {
  require(n >= 2, ErrorKind::InvalidInput, "GHZ state needs at least two sites");
  check_site_count(n);
  const Eigen::Index dim = dimension_for(n);
  ComplexVector<Real> amps = ComplexVector<Real>::Zero(dim);
  amps(0) = amps(dim - 1) = Real(1) / std::sqrt(Real(2));
  return Ket<Real>(std::move(amps));
}

/// Operator acting as `op` on `sites` and identity elsewhere, as a dense
/// 2^n x 2^n matrix. `op` has dimension 2^|sites| with the first listed site
/// most significant.
template <typename Derived>
ComplexMatrix<RealOf<Derived>> embed_operator(const Eigen::MatrixBase<Derived>& op, const SiteSet& sites,
                                              std::size_t n) {
  using Real = RealOf<Derived>;
  check_site_count(n);
  require(!sites.empty(), ErrorKind::InvalidInput, "embed_operator needs at least one target site");
  sites.check_within(n);
  const Eigen::Index local = dimension_for(sites.size());
  require(op.rows() == local && op.cols() == local, ErrorKind::InvalidInput,
          "operator dimension does not match " + std::to_string(sites.size()) + " target sites");

  const detail::SubsystemIndex index(sites, n);
  const Eigen::Index dim = dimension_for(n);
  ComplexMatrix<Real> out = ComplexMatrix<Real>::Zero(dim, dim);
  for (Eigen::Index outer : index.outer)
    for (Eigen::Index r = 0; r < local; ++r)
      for (Eigen::Index c = 0; c < local; ++c)
        out(index.inner[r] + outer, index.inner[c] + outer) = static_cast<std::complex<Real>>(op(r, c));
  return out;
}

template <typename Derived>
ComplexMatrix<RealOf<Derived>> embed_operator(const Eigen::MatrixBase<Derived>& op, std::size_t site,
                                              std::size_t n) {
  require(site < n, ErrorKind::InvalidInput,
          "site " + std::to_string(site) + " out of range for " + std::to_string(n) + " sites");
  return embed_operator(op, SiteSet{site}, n);
}

/// (op on `sites`, identity elsewhere) * target, without materializing the
/// embedded operator. `target` has 2^n rows and any number of columns.
template <typename DerivedOp, typename DerivedTarget>
ComplexMatrix<RealOf<DerivedTarget>> apply_on_sites(const Eigen::MatrixBase<DerivedOp>& op, const SiteSet& sites,
                                                    const Eigen::MatrixBase<DerivedTarget>& target) {
  using Real = RealOf<DerivedTarget>;
  const std::size_t n = sites_for_dimension(target.rows());
  sites.check_within(n);
  const Eigen::Index local = dimension_for(sites.size());
  require(op.rows() == local && op.cols() == local, ErrorKind::InvalidInput,
          "operator dimension does not match target sites");

  const detail::SubsystemIndex index(sites, n);
  const ComplexMatrix<Real> cop = op.template cast<std::complex<Real>>();
  ComplexMatrix<Real> out(target.rows(), target.cols());
  ComplexMatrix<Real> block(local, target.cols());
  for (Eigen::Index outer : index.outer) {
    for (Eigen::Index r = 0; r < local; ++r) block.row(r) = target.row(index.inner[r] + outer);
    block = (cop * block).eval();
    for (Eigen::Index r = 0; r < local; ++r) out.row(index.inner[r] + outer) = block.row(r);
  }
  return out;
}

/// Reduced state on `keep`; kept sites are relabeled 0..|keep|-1 in order.
template <typename Real>
DensityMatrix<Real> partial_trace(const DensityMatrix<Real>& rho, const SiteSet& keep) {
  require(!keep.empty(), ErrorKind::InvalidInput, "partial_trace needs a non-empty set of kept sites");
  const std::size_t n = rho.n_sites();
  keep.check_within(n);
  const detail::SubsystemIndex index(keep, n);
  const auto& m = rho.matrix();
  const auto local = static_cast<Eigen::Index>(index.inner.size());
  ComplexMatrix<Real> out = ComplexMatrix<Real>::Zero(local, local);
  for (Eigen::Index c = 0; c < local; ++c)
    for (Eigen::Index r = 0; r < local; ++r) {
      std::complex<Real> sum(0);
      for (Eigen::Index outer : index.outer) sum += m(index.inner[r] + outer, index.inner[c] + outer);
      out(r, c) = sum;
    }
  return DensityMatrix<Real>(std::move(out));
}

namespace detail {

// Amplitudes reshaped so rows run over `keep` and columns over the rest.
template <typename Real>
ComplexMatrix<Real> split_amplitudes(const Ket<Real>& ket, const SiteSet& keep) {
  const SubsystemIndex index(keep, ket.n_sites());
  const auto rows = static_cast<Eigen::Index>(index.inner.size());
  const auto cols = static_cast<Eigen::Index>(index.outer.size());
  ComplexMatrix<Real> m(rows, cols);
  for (Eigen::Index c = 0; c < cols; ++c)
    for (Eigen::Index r = 0; r < rows; ++r) m(r, c) = ket.amplitudes()(index.inner[r] + index.outer[c]);
  return m;
}

}  // namespace detail

/// Reduced state of a pure state on `keep`.
template <typename Real>
DensityMatrix<Real> partial_trace(const Ket<Real>& ket, const SiteSet& keep) {
  require(!keep.empty(), ErrorKind::InvalidInput, "partial_trace needs a non-empty set of kept sites");
  keep.check_within(ket.n_sites());
  const ComplexMatrix<Real> m = detail::split_amplitudes(ket, keep);
  ComplexMatrix<Real> rho = m * m.adjoint();
  // Exact Hermiticity; the product is Hermitian only up to rounding.
  rho = (rho + rho.adjoint()).eval() / Real(2);
  return DensityMatrix<Real>(std::move(rho));
}

/// -sum lambda log2 lambda over a spectrum, in bits.
template <typename Real>
Real entropy_from_eigenvalues(const RealVector<Real>& eigenvalues) {
  Real bits(0);
  for (Eigen::Index i = 0; i < eigenvalues.size(); ++i) {
    const Real lambda = eigenvalues(i);
    require(lambda >= -Real(tolerance::kNegativeEigenvalue), ErrorKind::NotPositiveSemidefinite,
            "eigenvalue " + std::to_string(static_cast<double>(lambda)) + " below -1e-8");
    if (lambda < Real(tolerance::kEigenvalueClamp)) continue;
    bits -= lambda * std::log2(lambda);
  }
  return std::max(bits, Real(0));
}

/// Von Neumann entropy in bits of a Hermitian matrix expression.
template <typename Derived>
RealOf<Derived> von_neumann_entropy(const Eigen::MatrixBase<Derived>& rho) {
  using Real = RealOf<Derived>;
  require(rho.rows() == rho.cols(), ErrorKind::InvalidInput, "entropy needs a square matrix");
  const ComplexMatrix<Real> m = rho.template cast<std::complex<Real>>();
  Eigen::SelfAdjointEigenSolver<ComplexMatrix<Real>> solver(m, Eigen::EigenvaluesOnly);
  require(solver.info() == Eigen::Success, ErrorKind::NumericalInstability, "eigensolver did not converge");
  return entropy_from_eigenvalues<Real>(solver.eigenvalues());
}

template <typename Real>
Real von_neumann_entropy(const DensityMatrix<Real>& rho) {
  return von_neumann_entropy(rho.matrix());
}

/// Entropy of the reduced state of a pure state on `part`, from whichever of
/// the two Schmidt Gram matrices is smaller.
template <typename Real>
Real entanglement_entropy(const Ket<Real>& ket, const SiteSet& part) {
  require(!part.empty(), ErrorKind::InvalidInput, "entanglement_entropy needs a non-empty subsystem");
  part.check_within(ket.n_sites());
  const ComplexMatrix<Real> m = detail::split_amplitudes(ket, part);
  const ComplexMatrix<Real> gram = m.rows() <= m.cols() ? ComplexMatrix<Real>(m * m.adjoint())
                                                        : ComplexMatrix<Real>(m.adjoint() * m);
  return von_neumann_entropy(gram);
}

template <typename Real>
DensityMatrix<Real> tensor_product(const DensityMatrix<Real>& a, const DensityMatrix<Real>& b) {
  return DensityMatrix<Real>(Eigen::kroneckerProduct(a.matrix(), b.matrix()).eval());
}

struct DensityTolerances {
  double hermiticity = tolerance::kHermiticity;
  double trace = tolerance::kTrace;
  double min_eigenvalue = tolerance::kMinEigenvalue;
};

template <typename Real>
struct DensityReport {
  Real hermiticity_defect;
  Real trace_defect;
  Real min_eigenvalue;
  bool passed;
};

/// Measures how far a raw matrix is from a valid density matrix.
template <typename Derived>
DensityReport<RealOf<Derived>> validate_density_matrix(const Eigen::MatrixBase<Derived>& rho,
                                                       const DensityTolerances& tol = {}) {
  using Real = RealOf<Derived>;
  require(rho.rows() == rho.cols(), ErrorKind::InvalidInput, "density matrix must be square");
  sites_for_dimension(rho.rows());
  const ComplexMatrix<Real> m = rho.template cast<std::complex<Real>>();
  DensityReport<Real> report{};
  report.hermiticity_defect = (m - m.adjoint()).cwiseAbs().maxCoeff();
  report.trace_defect = std::abs(m.trace() - std::complex<Real>(1));
  const ComplexMatrix<Real> hermitian_part = (m + m.adjoint()) / Real(2);
  Eigen::SelfAdjointEigenSolver<ComplexMatrix<Real>> solver(hermitian_part, Eigen::EigenvaluesOnly);
  report.min_eigenvalue = solver.eigenvalues().minCoeff();
  report.passed = report.hermiticity_defect <= Real(tol.hermiticity) && report.trace_defect <= Real(tol.trace) &&
                  report.min_eigenvalue >= Real(tol.min_eigenvalue);
  return report;
}

/// Multiplies `v` by the phase that makes its largest-magnitude entry real and
/// positive (first such entry on ties).
template <typename Derived>
void fix_global_phase(Eigen::MatrixBase<Derived>& v) {
  using Real = RealOf<Derived>;
  Eigen::Index best = 0;
  Real best_abs(-1);
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    const Real a = std::abs(v(i));
    if (a > best_abs + Real(1e-12)) {
      best_abs = a;
      best = i;
    }
  }
  if (best_abs <= Real(0)) return;
  v *= std::conj(v(best)) / best_abs;
}

}  // namespace qcausal
