#pragma once

// Quantum instruments {M_x} on a subsystem, outcome probabilities
// p_x = Tr[(M_x (x) I) rho (M_x (x) I)^dagger] and post-measurement states.

#include <string>
#include <utility>
#include <vector>

#include "qcausal/qstate.hpp"

namespace qcausal {

/// Branches with probability below this are dropped before renormalizing.
inline constexpr double kProbabilityFloor = 1e-12;
inline constexpr double kCompletenessTolerance = 1e-10;

/// Measurement operators on `targets`; outcome x is the operator's position.
template <typename Real = double>
class Instrument {
 public:
  using Matrix = ComplexMatrix<Real>;

  Instrument(SiteSet targets, std::vector<Matrix> operators, std::string label)
      : targets_(std::move(targets)), operators_(std::move(operators)), label_(std::move(label)) {
    require(!targets_.empty(), ErrorKind::InvalidInput, "instrument needs at least one target site");
    require(!operators_.empty(), ErrorKind::InvalidInput, "instrument needs at least one operator");
  }

  const SiteSet& targets() const { return targets_; }
  const std::vector<Matrix>& operators() const { return operators_; }
  std::size_t outcomes() const { return operators_.size(); }
  const std::string& label() const { return label_; }

 private:
  SiteSet targets_;
  std::vector<Matrix> operators_;
  std::string label_;
};

/// {|0><0|, |1><1|} on one site.
template <typename Real = double>
Instrument<Real> projective_z_instrument(std::size_t site, std::size_t n) {
  require(site < n, ErrorKind::InvalidInput,
          "site " + std::to_string(site) + " out of range for " + std::to_string(n) + " sites");
  ComplexMatrix<Real> m0 = ComplexMatrix<Real>::Zero(2, 2);
  ComplexMatrix<Real> m1 = ComplexMatrix<Real>::Zero(2, 2);
  m0(0, 0) = 1;
  m1(1, 1) = 1;
  return Instrument<Real>(SiteSet{site}, {m0, m1}, "z-projective@" + std::to_string(site));
}

/// max |sum_x M_x^dagger M_x - I|.
template <typename Real>
Real validate_instrument(const Instrument<Real>& instr) {
  const Eigen::Index dim = dimension_for(instr.targets().size());
  ComplexMatrix<Real> sum = ComplexMatrix<Real>::Zero(dim, dim);
  for (const auto& m : instr.operators()) {
    require(m.rows() == dim && m.cols() == dim, ErrorKind::InvalidInput,
            "measurement operator dimension does not match target sites");
    sum += m.adjoint() * m;
  }
  return (sum - ComplexMatrix<Real>::Identity(dim, dim)).cwiseAbs().maxCoeff();
}

template <typename State>
struct Branch {
  std::size_t outcome;
  double probability;
  State state;
};

/// Outcome branches. `sites` lists the original chain labels of the sites the
/// branch states live on (site k of a branch state is sites[k]).
template <typename State>
struct BranchEnsemble {
  SiteSet sites;
  std::vector<Branch<State>> branches;
};

namespace detail {

template <typename Real>
void check_instrument(const Instrument<Real>& instr, std::size_t n) {
  instr.targets().check_within(n);
  const Real defect = validate_instrument(instr);
  require(defect <= Real(kCompletenessTolerance), ErrorKind::IncompleteInstrument,
          "completeness defect " + std::to_string(static_cast<double>(defect)) + " for " + instr.label());
}

template <typename State>
void drop_and_renormalize(std::vector<Branch<State>>& branches, double floor) {
  std::erase_if(branches, [&](const Branch<State>& b) { return b.probability < floor; });
  require(!branches.empty(), ErrorKind::DegenerateMeasurement, "every outcome has probability below the floor");
  double total = 0;
  for (const auto& b : branches) total += b.probability;
  for (auto& b : branches) b.probability /= total;
}

}  // namespace detail

/// Post-measurement states on the whole chain, (M_x rho M_x^dagger) / p_x.
template <typename Real>
BranchEnsemble<DensityMatrix<Real>> post_measurement_states(const DensityMatrix<Real>& rho,
                                                            const Instrument<Real>& instr,
                                                            double floor = kProbabilityFloor) {
  const std::size_t n = rho.n_sites();
  detail::check_instrument(instr, n);
  BranchEnsemble<DensityMatrix<Real>> out{SiteSet::all(n), {}};
  std::vector<std::pair<Real, ComplexMatrix<Real>>> raw;
  for (std::size_t x = 0; x < instr.outcomes(); ++x) {
    const auto& M = instr.operators()[x];
    const ComplexMatrix<Real> left = apply_on_sites(M, instr.targets(), rho.matrix());
    // M (M rho)^dagger = M rho M^dagger since rho is Hermitian.
    ComplexMatrix<Real> sigma = apply_on_sites(M, instr.targets(), left.adjoint());
    const Real p = sigma.trace().real();
    if (p < Real(floor)) continue;
    sigma /= p;
    sigma = (sigma + sigma.adjoint()).eval() / Real(2);
    out.branches.push_back({x, static_cast<double>(p), DensityMatrix<Real>(std::move(sigma))});
  }
  if (out.branches.empty()) fail(ErrorKind::DegenerateMeasurement, "every outcome has probability below the floor");
  detail::drop_and_renormalize(out.branches, floor);
  return out;
}

/// Branch probabilities and normalized states on the complement of the
/// instrument's target sites.
template <typename Real>
BranchEnsemble<DensityMatrix<Real>> apply_instrument(const DensityMatrix<Real>& rho, const Instrument<Real>& instr,
                                                     double floor = kProbabilityFloor) {
  const SiteSet rest = instr.targets().complement(rho.n_sites());
  require(!rest.empty(), ErrorKind::InvalidInput, "instrument targets every site; nothing is left to condition on");
  auto full = post_measurement_states(rho, instr, floor);
  BranchEnsemble<DensityMatrix<Real>> out{rest, {}};
  for (auto& b : full.branches) out.branches.push_back({b.outcome, b.probability, partial_trace(b.state, rest)});
  return out;
}

/// Pure-state version: branch kets M_x|psi>/sqrt(p_x) on the whole chain.
template <typename Real>
BranchEnsemble<Ket<Real>> post_measurement_states(const Ket<Real>& psi, const Instrument<Real>& instr,
                                                  double floor = kProbabilityFloor) {
  const std::size_t n = psi.n_sites();
  detail::check_instrument(instr, n);
  BranchEnsemble<Ket<Real>> out{SiteSet::all(n), {}};
  for (std::size_t x = 0; x < instr.outcomes(); ++x) {
    const ComplexVector<Real> v = apply_on_sites(instr.operators()[x], instr.targets(), psi.amplitudes());
    const Real p = v.squaredNorm();
    if (p < Real(floor)) continue;
    out.branches.push_back({x, static_cast<double>(p), Ket<Real>::normalized(v)});
  }
  if (out.branches.empty()) fail(ErrorKind::DegenerateMeasurement, "every outcome has probability below the floor");
  detail::drop_and_renormalize(out.branches, floor);
  return out;
}

}  // namespace qcausal
