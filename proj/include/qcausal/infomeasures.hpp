#pragma once

// Mutual information, symmetric conditional mutual information
//   I(A:B|C) = S(AC) + S(BC) - S(C) - S(ABC)
// and the instrument-mediated (asymmetric) form
//   I(A;B|C) = sum_x p_x [S(B)_x + S(C)_x - S(BC)_x],
// where x runs over outcomes of an instrument applied to A. All in bits.

#include <algorithm>
#include <string>

#include "qcausal/instrument.hpp"
#include "qcausal/qstate.hpp"

namespace qcausal {

/// Disjoint site sets; A and B non-empty.
struct Partition {
  SiteSet a;
  SiteSet b;
  SiteSet c;

  void validate(std::size_t n, bool allow_empty_c = false) const {
    require(!a.empty() && !b.empty(), ErrorKind::InvalidInput, "partition needs non-empty A and B");
    a.check_within(n);
    b.check_within(n);
    c.check_within(n);
    require(a.disjoint(b) && a.disjoint(c) && b.disjoint(c), ErrorKind::InvalidInput,
            "partition sets overlap: A=" + a.to_string() + " B=" + b.to_string() + " C=" + c.to_string());
    require(allow_empty_c || !c.empty(), ErrorKind::EmptyConditioner,
            "conditioning set C is empty (A=" + a.to_string() + ", B=" + b.to_string() + ")");
  }

  std::string to_string() const { return "A=" + a.to_string() + " B=" + b.to_string() + " C=" + c.to_string(); }
};

/// A = {site_a}, B = {site_b}, C = the sites strictly between them.
inline Partition chain_partition(std::size_t site_a, std::size_t site_b) {
  const std::size_t lo = std::min(site_a, site_b);
  const std::size_t hi = std::max(site_a, site_b);
  return Partition{SiteSet{site_a}, SiteSet{site_b}, SiteSet::range(lo + 1, hi)};
}

/// What to do when C is empty: conditional information on nothing is not
/// defined here, so it is either an error or, on request, reported as 0.
enum class EmptyConditioner { Reject, TreatAsZero };

inline constexpr double kNegativityTolerance = 1e-9;

template <typename Real>
struct QcmiValue {
  Real bits;
  bool clamped;  // a small negative rounding residue was set to 0
};

template <typename Real>
struct AsymmetricQcmi {
  Real bits;
  bool clamped;
  std::string instrument;
};

/// Values in (-1e-9, 0) become 0; anything more negative is an error.
template <typename Real>
QcmiValue<Real> clamp_information(Real raw, const std::string& what) {
  require(raw >= -Real(kNegativityTolerance), ErrorKind::NumericalInstability,
          what + " is negative (" + std::to_string(static_cast<double>(raw)) + " bits)");
  if (raw < Real(0)) return {Real(0), true};
  return {raw, false};
}

/// I(B:C) between two disjoint subsets of the state's sites.
template <typename Real>
Real mutual_information(const DensityMatrix<Real>& rho, const SiteSet& b, const SiteSet& c) {
  require(!b.empty() && !c.empty(), ErrorKind::InvalidInput, "mutual information needs two non-empty parts");
  require(b.disjoint(c), ErrorKind::InvalidInput, "mutual information parts overlap");
  const Real raw = von_neumann_entropy(partial_trace(rho, b)) + von_neumann_entropy(partial_trace(rho, c)) -
                   von_neumann_entropy(partial_trace(rho, b.united(c)));
  return clamp_information(raw, "mutual information").bits;
}

/// I(B:C) with B the first `split` sites and C the rest.
template <typename Real>
Real mutual_information(const DensityMatrix<Real>& rho, std::size_t split) {
  const std::size_t n = rho.n_sites();
  require(split >= 1 && split < n, ErrorKind::InvalidInput,
          "split " + std::to_string(split) + " leaves an empty part of a " + std::to_string(n) + "-site state");
  return mutual_information(rho, SiteSet::range(0, split), SiteSet::range(split, n));
}

/// I(B:C) of the reduced state of a pure state, via Schmidt spectra.
template <typename Real>
Real mutual_information(const Ket<Real>& psi, const SiteSet& b, const SiteSet& c) {
  require(!b.empty() && !c.empty(), ErrorKind::InvalidInput, "mutual information needs two non-empty parts");
  require(b.disjoint(c), ErrorKind::InvalidInput, "mutual information parts overlap");
  const Real raw =
      entanglement_entropy(psi, b) + entanglement_entropy(psi, c) - entanglement_entropy(psi, b.united(c));
  return clamp_information(raw, "mutual information").bits;
}

template <typename Real>
QcmiValue<Real> symmetric_qcmi(const DensityMatrix<Real>& rho, const Partition& p) {
  p.validate(rho.n_sites());
  const auto S = [&](const SiteSet& s) { return von_neumann_entropy(partial_trace(rho, s)); };
  const Real raw = S(p.a.united(p.c)) + S(p.b.united(p.c)) - S(p.c) - S(p.a.united(p.b).united(p.c));
  return clamp_information(raw, "symmetric QCMI");
}

namespace detail {

template <typename Real>
void check_asymmetric_inputs(std::size_t n, const Partition& p, const Instrument<Real>& instr) {
  p.validate(n, /*allow_empty_c=*/true);
  require(instr.targets() == p.a, ErrorKind::InvalidInput,
          "instrument " + instr.label() + " targets " + instr.targets().to_string() + " but A is " + p.a.to_string());
}

}  // namespace detail

/// sum_x p_x I(B:C) over the branches of `ensemble`; B and C use the
/// original chain labels.
template <typename Real>
Real branch_mutual_information(const BranchEnsemble<DensityMatrix<Real>>& ensemble, const SiteSet& b,
                               const SiteSet& c) {
  const SiteSet local_b = b.relabeled_within(ensemble.sites);
  const SiteSet local_c = c.relabeled_within(ensemble.sites);
  Real total(0);
  for (const auto& br : ensemble.branches)
    total += static_cast<Real>(br.probability) * mutual_information(br.state, local_b, local_c);
  return total;
}

template <typename Real>
Real branch_mutual_information(const BranchEnsemble<Ket<Real>>& ensemble, const SiteSet& b, const SiteSet& c) {
  Real total(0);
  for (const auto& br : ensemble.branches)
    total += static_cast<Real>(br.probability) * mutual_information(br.state, b, c);
  return total;
}

template <typename Real>
AsymmetricQcmi<Real> asymmetric_qcmi(const DensityMatrix<Real>& rho, const Partition& p,
                                     const Instrument<Real>& instr,
                                     EmptyConditioner policy = EmptyConditioner::Reject) {
  detail::check_asymmetric_inputs(rho.n_sites(), p, instr);
  if (p.c.empty()) {
    p.validate(rho.n_sites(), policy == EmptyConditioner::TreatAsZero);
    return {Real(0), false, instr.label()};
  }
  const auto ensemble = apply_instrument(rho, instr);
  const auto value = clamp_information(branch_mutual_information(ensemble, p.b, p.c), "asymmetric QCMI");
  return {value.bits, value.clamped, instr.label()};
}

template <typename Real>
AsymmetricQcmi<Real> asymmetric_qcmi(const Ket<Real>& psi, const Partition& p, const Instrument<Real>& instr,
                                     EmptyConditioner policy = EmptyConditioner::Reject) {
  detail::check_asymmetric_inputs(psi.n_sites(), p, instr);
  if (p.c.empty()) {
    p.validate(psi.n_sites(), policy == EmptyConditioner::TreatAsZero);
    return {Real(0), false, instr.label()};
  }
  const auto ensemble = post_measurement_states(psi, instr);
  const auto value = clamp_information(branch_mutual_information(ensemble, p.b, p.c), "asymmetric QCMI");
  return {value.bits, value.clamped, instr.label()};
}

}  // namespace qcausal
