#pragma once

// Classical conditional mutual information on discrete distributions, and
// the asymmetric time-series form
//   I(x_j ; x'_{j+tau} | x'_j, x'_{j-eta}, x'_{j-2 eta})
// estimated by equiquantal binning and plug-in frequencies.

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace qcausal::ccmi {

/// Probability table over the product of the variables' alphabets,
/// row-major with the first variable most significant.
class JointDistribution {
 public:
  JointDistribution(std::vector<std::string> names, std::vector<std::size_t> alphabet_sizes,
                    std::vector<double> probabilities);

  /// Empirical distribution of sample tuples; samples[v][i] is the symbol of
  /// variable v in sample i.
  static JointDistribution from_samples(std::vector<std::string> names, std::vector<std::size_t> alphabet_sizes,
                                        const std::vector<std::vector<std::uint32_t>>& samples);

  std::size_t variables() const { return sizes_.size(); }
  const std::vector<std::string>& names() const { return names_; }
  const std::vector<std::size_t>& alphabet_sizes() const { return sizes_; }
  const std::vector<double>& probabilities() const { return probs_; }

  /// Symbol of variable `v` in flat outcome index `outcome`.
  std::size_t symbol(std::size_t outcome, std::size_t v) const;

  /// Marginal table over `subset` (in the order given).
  std::vector<double> marginal(const std::vector<std::size_t>& subset) const;

 private:
  std::vector<std::string> names_;
  std::vector<std::size_t> sizes_;
  std::vector<std::size_t> strides_;
  std::vector<double> probs_;
};

using VariableSet = std::vector<std::size_t>;

/// H of the marginal on `subset`, in bits; 0 log 0 = 0.
double shannon_entropy(const JointDistribution& dist, const VariableSet& subset);

/// H(AC) + H(BC) - H(C) - H(ABC). Cross-checked against the
/// conditional-entropy form H(A|C) - H(A|BC); a disagreement above 1e-12
/// raises NumericalInstability. C may be empty.
double ccmi_symmetric(const JointDistribution& dist, const VariableSet& a, const VariableSet& b,
                      const VariableSet& c);

/// H(A|C) - H(A|BC), with each conditional entropy summed directly as
/// -sum p(a,c) log2 p(a|c).
double ccmi_conditional_form(const JointDistribution& dist, const VariableSet& a, const VariableSet& b,
                             const VariableSet& c);

/// Equiquantal bin index in [0, bins) for each sample: rank by (value,
/// position) and split the ranks into `bins` equal runs. An all-equal series
/// maps to the single bin 0.
std::vector<std::uint32_t> equiquantal_bins(std::span<const double> values, std::size_t bins);

struct SeriesEmbedding {
  std::vector<double> driver;    // x
  std::vector<double> response;  // x'
  std::size_t horizon = 1;       // tau
  std::size_t delay = 1;         // eta_0
  std::size_t bins = 4;          // Q

  /// Number of usable time indices j, len - tau - 2 eta.
  std::size_t embedded_samples() const;
  void validate() const;
};

/// The five embedded variables (x_j, x'_{j+tau}, x'_j, x'_{j-eta}, x'_{j-2eta})
/// binned independently, as a joint distribution named A, B, C0, C1, C2.
JointDistribution embed(const SeriesEmbedding& emb);

double ccmi_asymmetric_series(const SeriesEmbedding& emb);

struct SurrogateBaseline {
  double mean;
  double stddev;
  std::vector<double> values;
};

/// Values of ccmi_asymmetric_series with the driver randomly permuted,
/// `count` times from `seed`.
SurrogateBaseline shuffled_surrogates(const SeriesEmbedding& emb, std::size_t count, std::uint64_t seed);

}  // namespace qcausal::ccmi
