#pragma once

// Brute-force reference computations. These deliberately avoid the library's
// index tables and bit-level Hamiltonian assembly so they can check them.

#include <Eigen/Dense>
#include <unsupported/Eigen/KroneckerProduct>

#include <cmath>
#include <complex>
#include <vector>

namespace oracle {

using Matrix = Eigen::MatrixXcd;
using cd = std::complex<double>;

inline Matrix X() { Matrix m(2, 2); m << 0, 1, 1, 0; return m; }
inline Matrix Y() { Matrix m(2, 2); m << 0, cd(0, -1), cd(0, 1), 0; return m; }
inline Matrix Z() { Matrix m(2, 2); m << 1, 0, 0, -1; return m; }
inline Matrix I2() { return Matrix::Identity(2, 2); }

/// I (x) ... (x) op (x) ... (x) I by repeated Kronecker products.
inline Matrix kron_at(const Matrix& op, int site, int n) {
  Matrix out = Matrix::Identity(1, 1);
  for (int k = 0; k < n; ++k) {
    Matrix next = Eigen::kroneckerProduct(out, k == site ? op : I2()).eval();
    out = next;
  }
  return out;
}

inline Matrix tfim(int n, double J, double h) {
  const int dim = 1 << n;
  Matrix H = Matrix::Zero(dim, dim);
  for (int k = 0; k + 1 < n; ++k) H -= J * kron_at(Z(), k, n) * kron_at(Z(), k + 1, n);
  for (int k = 0; k < n; ++k) H -= h * kron_at(X(), k, n);
  return H;
}

inline Matrix xx(int n, double J, double h) {
  const int dim = 1 << n;
  Matrix H = Matrix::Zero(dim, dim);
  for (int k = 0; k + 1 < n; ++k)
    H += (J / 2) * (kron_at(X(), k, n) * kron_at(X(), k + 1, n) + kron_at(Y(), k, n) * kron_at(Y(), k + 1, n));
  for (int k = 0; k < n; ++k) H += h * kron_at(Z(), k, n);
  return H;
}

inline int bit_of(int index, int site, int n) { return (index >> (n - 1 - site)) & 1; }

/// Sum over all (i, j) whose traced-out bits agree.
inline Matrix partial_trace(const Matrix& rho, const std::vector<int>& keep, int n) {
  const int k = static_cast<int>(keep.size());
  Matrix out = Matrix::Zero(1 << k, 1 << k);
  const auto kept = [&](int index) {
    int r = 0;
    for (int s : keep) r = (r << 1) | bit_of(index, s, n);
    return r;
  };
  const auto traced_equal = [&](int i, int j) {
    for (int s = 0; s < n; ++s) {
      bool is_kept = false;
      for (int q : keep) is_kept |= (q == s);
      if (!is_kept && bit_of(i, s, n) != bit_of(j, s, n)) return false;
    }
    return true;
  };
  for (int i = 0; i < rho.rows(); ++i)
    for (int j = 0; j < rho.cols(); ++j)
      if (traced_equal(i, j)) out(kept(i), kept(j)) += rho(i, j);
  return out;
}

/// -Tr[rho log2 rho], with log2 rho rebuilt from spectral projectors.
inline double matrix_log_entropy(const Matrix& rho) {
  Eigen::SelfAdjointEigenSolver<Matrix> es(rho);
  const auto& V = es.eigenvectors();
  Matrix log_rho = Matrix::Zero(rho.rows(), rho.cols());
  for (int i = 0; i < rho.rows(); ++i) {
    const double lambda = es.eigenvalues()(i);
    if (lambda < 1e-12) continue;
    log_rho += std::log2(lambda) * (V.col(i) * V.col(i).adjoint());
  }
  return -(rho * log_rho).trace().real();
}

/// Probabilities and normalized complement states via explicit embedding.
struct BruteBranch {
  double p;
  Matrix state;
};

inline std::vector<BruteBranch> measure(const Matrix& rho, const std::vector<Matrix>& ops, int site, int n) {
  std::vector<int> rest;
  for (int s = 0; s < n; ++s)
    if (s != site) rest.push_back(s);
  std::vector<BruteBranch> out;
  for (const auto& M : ops) {
    const Matrix full = kron_at(M, site, n);
    const Matrix sigma = full * rho * full.adjoint();
    const double p = sigma.trace().real();
    out.push_back({p, p > 1e-12 ? Matrix(partial_trace(sigma, rest, n) / p) : Matrix()});
  }
  return out;
}

/// Classical CMI of a table over three variables with alphabet sizes
/// (na, nb, nc), indexed p[(a*nb + b)*nc + c], by direct enumeration of
/// sum p(a,b,c) log2[p(c) p(a,b,c) / (p(a,c) p(b,c))].
inline double classical_cmi(const std::vector<double>& p, int na, int nb, int nc) {
  std::vector<double> pc(nc, 0), pac(na * nc, 0), pbc(nb * nc, 0);
  for (int a = 0; a < na; ++a)
    for (int b = 0; b < nb; ++b)
      for (int c = 0; c < nc; ++c) {
        const double v = p[(a * nb + b) * nc + c];
        pc[c] += v;
        pac[a * nc + c] += v;
        pbc[b * nc + c] += v;
      }
  double total = 0;
  for (int a = 0; a < na; ++a)
    for (int b = 0; b < nb; ++b)
      for (int c = 0; c < nc; ++c) {
        const double v = p[(a * nb + b) * nc + c];
        if (v <= 0) continue;
        total += v * std::log2(pc[c] * v / (pac[a * nc + c] * pbc[b * nc + c]));
      }
  return total;
}

}  // namespace oracle
