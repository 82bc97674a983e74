#include "qcausal/bounds.hpp"

#include <cmath>
#include <numbers>

namespace qcausal {

LrEstimate lr_velocity(const ChainModel& model) {
  const double bond = std::abs(model.coupling);  // ||(J/2)(XX+YY)|| <= |J|, ||J ZZ|| = |J|
  LrEstimate est{};
  est.g = 2.0 * bond + std::abs(model.field);
  est.g_prop = 2.0 * bond;
  est.v_lr = 2.0 * std::numbers::e * est.g_prop;
  return est;
}

double xx_group_velocity(double coupling) { return 2.0 * std::abs(coupling); }

DispersionPoint dispersion(double k, double coupling) {
  require(std::isfinite(k) && k >= -std::numbers::pi && k <= std::numbers::pi, ErrorKind::InvalidInput,
          "quasi-momentum " + std::to_string(k) + " outside [-pi, pi]");
  return {k, 2.0 * coupling * std::cos(k), -2.0 * coupling * std::sin(k)};
}

double operator_norm(const ComplexMatrix<double>& m) {
  if (m.size() == 0) return 0.0;
  Eigen::BDCSVD<ComplexMatrix<double>> svd(m);
  return svd.singularValues()(0);
}

double commutator_front_norm(const Hamiltonian<double>& H, std::size_t site_a, const ComplexMatrix<double>& op_a,
                             std::size_t site_b, const ComplexMatrix<double>& op_b, double t) {
  const std::size_t n = H.n_sites();
  require(site_a != site_b, ErrorKind::InvalidInput, "observables must sit on distinct sites");
  require(site_a < n && site_b < n, ErrorKind::InvalidInput, "observable site out of range");
  const auto U = propagator(H, t).matrix;
  const ComplexMatrix<double> a = embed_operator(op_a, site_a, n);
  const ComplexMatrix<double> b = embed_operator(op_b, site_b, n);
  const ComplexMatrix<double> a_t = U.adjoint() * a * U;
  return operator_norm(a_t * b - b * a_t);
}

}  // namespace qcausal
