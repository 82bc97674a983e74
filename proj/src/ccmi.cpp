#include "qcausal/ccmi.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include "qcausal/error.hpp"

namespace qcausal::ccmi {

namespace {

constexpr double kSumTolerance = 1e-12;
constexpr double kFormAgreement = 1e-12;
// Largest joint table the series estimator will allocate.
constexpr double kMaxJointCells = 1 << 24;

double entropy_bits(const std::vector<double>& p) {
  double h = 0;
  for (double v : p)
    if (v > 0) h -= v * std::log2(v);
  return h;
}

VariableSet concat(const VariableSet& x, const VariableSet& y) {
  VariableSet out = x;
  out.insert(out.end(), y.begin(), y.end());
  return out;
}

void check_sets(const JointDistribution& dist, const VariableSet& a, const VariableSet& b, const VariableSet& c) {
  require(!a.empty() && !b.empty(), ErrorKind::InvalidInput, "A and B must be non-empty");
  std::vector<bool> seen(dist.variables(), false);
  for (const VariableSet* set : {&a, &b, &c}) {
    for (std::size_t v : *set) {
      require(v < dist.variables(), ErrorKind::InvalidInput, "variable index " + std::to_string(v) + " out of range");
      require(!seen[v], ErrorKind::InvalidInput, "variable sets overlap at index " + std::to_string(v));
      seen[v] = true;
    }
  }
}

double entropy_or_zero(const JointDistribution& dist, const VariableSet& subset) {
  return subset.empty() ? 0.0 : shannon_entropy(dist, subset);
}

// -sum p(x,c) log2 p(x|c), with x over `target` and c over `given`.
double conditional_entropy(const JointDistribution& dist, const VariableSet& target, const VariableSet& given) {
  const std::vector<double> joint = dist.marginal(concat(target, given));
  const std::vector<double> cond = given.empty() ? std::vector<double>{1.0} : dist.marginal(given);
  const std::size_t given_size = cond.size();
  double h = 0;
  for (std::size_t i = 0; i < joint.size(); ++i) {
    const double pj = joint[i];
    if (pj <= 0) continue;
    h -= pj * std::log2(pj / cond[i % given_size]);
  }
  return h;
}

}  // namespace

JointDistribution::JointDistribution(std::vector<std::string> names, std::vector<std::size_t> alphabet_sizes,
                                     std::vector<double> probabilities)
    : names_(std::move(names)), sizes_(std::move(alphabet_sizes)), probs_(std::move(probabilities)) {
  require(!sizes_.empty(), ErrorKind::InvalidInput, "distribution needs at least one variable");
  if (names_.empty())
    for (std::size_t v = 0; v < sizes_.size(); ++v) names_.push_back("X" + std::to_string(v));
  require(names_.size() == sizes_.size(), ErrorKind::InvalidInput, "one name per variable required");

  strides_.assign(sizes_.size(), 1);
  std::size_t cells = 1;
  for (std::size_t v = sizes_.size(); v-- > 0;) {
    require(sizes_[v] >= 1, ErrorKind::InvalidInput, "alphabet sizes must be positive");
    strides_[v] = cells;
    cells *= sizes_[v];
  }
  require(probs_.size() == cells, ErrorKind::InvalidInput,
          "probability table has " + std::to_string(probs_.size()) + " entries, expected " + std::to_string(cells));
  double total = 0;
  for (double p : probs_) {
    require(std::isfinite(p) && p >= 0, ErrorKind::InvalidInput, "probabilities must be finite and non-negative");
    total += p;
  }
  require(std::abs(total - 1.0) <= kSumTolerance, ErrorKind::InvalidInput,
          "probabilities sum to " + std::to_string(total));
}

JointDistribution JointDistribution::from_samples(std::vector<std::string> names,
                                                  std::vector<std::size_t> alphabet_sizes,
                                                  const std::vector<std::vector<std::uint32_t>>& samples) {
  require(!samples.empty() && samples.size() == alphabet_sizes.size(), ErrorKind::InvalidInput,
          "one sample column per variable");
  const std::size_t count = samples.front().size();
  require(count > 0, ErrorKind::InsufficientData, "no samples");
  std::size_t cells = 1;
  for (std::size_t s : alphabet_sizes) cells *= s;
  std::vector<double> counts(cells, 0.0);
  for (std::size_t i = 0; i < count; ++i) {
    std::size_t flat = 0;
    for (std::size_t v = 0; v < samples.size(); ++v) {
      require(samples[v].size() == count, ErrorKind::InvalidInput, "sample columns differ in length");
      require(samples[v][i] < alphabet_sizes[v], ErrorKind::InvalidInput, "symbol outside alphabet");
      flat = flat * alphabet_sizes[v] + samples[v][i];
    }
    counts[flat] += 1.0;
  }
  for (double& c : counts) c /= static_cast<double>(count);
  return JointDistribution(std::move(names), std::move(alphabet_sizes), std::move(counts));
}

std::size_t JointDistribution::symbol(std::size_t outcome, std::size_t v) const {
  return (outcome / strides_[v]) % sizes_[v];
}

std::vector<double> JointDistribution::marginal(const VariableSet& subset) const {
  std::size_t cells = 1;
  for (std::size_t v : subset) {
    require(v < sizes_.size(), ErrorKind::InvalidInput, "variable index " + std::to_string(v) + " out of range");
    cells *= sizes_[v];
  }
  std::vector<double> out(cells, 0.0);
  for (std::size_t i = 0; i < probs_.size(); ++i) {
    if (probs_[i] == 0) continue;
    std::size_t flat = 0;
    for (std::size_t v : subset) flat = flat * sizes_[v] + symbol(i, v);
    out[flat] += probs_[i];
  }
  return out;
}

double shannon_entropy(const JointDistribution& dist, const VariableSet& subset) {
  require(!subset.empty(), ErrorKind::InvalidInput, "entropy of an empty variable set");
  VariableSet sorted = subset;
  std::sort(sorted.begin(), sorted.end());
  require(std::adjacent_find(sorted.begin(), sorted.end()) == sorted.end(), ErrorKind::InvalidInput,
          "repeated variable in entropy subset");
  return entropy_bits(dist.marginal(subset));
}

double ccmi_conditional_form(const JointDistribution& dist, const VariableSet& a, const VariableSet& b,
                             const VariableSet& c) {
  check_sets(dist, a, b, c);
  return conditional_entropy(dist, a, c) - conditional_entropy(dist, a, concat(b, c));
}

double ccmi_symmetric(const JointDistribution& dist, const VariableSet& a, const VariableSet& b,
                      const VariableSet& c) {
  check_sets(dist, a, b, c);
  const double value = shannon_entropy(dist, concat(a, c)) + shannon_entropy(dist, concat(b, c)) -
                       entropy_or_zero(dist, c) - shannon_entropy(dist, concat(concat(a, b), c));
  const double conditional = ccmi_conditional_form(dist, a, b, c);
  require(std::abs(value - conditional) <= kFormAgreement, ErrorKind::NumericalInstability,
          "entropy-sum and conditional forms disagree by " + std::to_string(std::abs(value - conditional)));
  return value;
}

std::vector<std::uint32_t> equiquantal_bins(std::span<const double> values, std::size_t bins) {
  require(bins >= 2, ErrorKind::InvalidInput, "need at least two bins");
  require(!values.empty(), ErrorKind::InsufficientData, "cannot bin an empty series");
  const auto [lo, hi] = std::minmax_element(values.begin(), values.end());
  std::vector<std::uint32_t> out(values.size(), 0);
  if (*lo == *hi) return out;

  std::vector<std::size_t> order(values.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t i, std::size_t j) { return values[i] < values[j]; });
  for (std::size_t rank = 0; rank < order.size(); ++rank)
    out[order[rank]] = static_cast<std::uint32_t>(rank * bins / order.size());
  return out;
}

std::size_t SeriesEmbedding::embedded_samples() const {
  const std::size_t span = horizon + 2 * delay;
  return driver.size() > span ? driver.size() - span : 0;
}

void SeriesEmbedding::validate() const {
  require(horizon >= 1 && delay >= 1, ErrorKind::InvalidInput, "horizon and delay must be positive");
  require(bins >= 2, ErrorKind::InvalidInput, "need at least two bins");
  require(std::pow(static_cast<double>(bins), 5) <= kMaxJointCells, ErrorKind::InvalidInput,
          "bin count too large for a five-variable joint table");
  require(driver.size() == response.size(), ErrorKind::InvalidInput, "driver and response lengths differ");
  require(embedded_samples() >= 1, ErrorKind::InsufficientData,
          "series of length " + std::to_string(driver.size()) + " too short for horizon " + std::to_string(horizon) +
              " and delay " + std::to_string(delay));
  const auto finite = [](double v) { return std::isfinite(v); };
  require(std::all_of(driver.begin(), driver.end(), finite) && std::all_of(response.begin(), response.end(), finite),
          ErrorKind::InvalidInput, "series contain non-finite values");
  const auto [lo, hi] = std::minmax_element(response.begin(), response.end());
  require(*lo != *hi, ErrorKind::DegenerateSeries, "response series is constant; its quantile bins are undefined");
}

JointDistribution embed(const SeriesEmbedding& emb) {
  emb.validate();
  const std::size_t count = emb.embedded_samples();
  const std::size_t first = 2 * emb.delay;
  std::vector<std::vector<double>> columns(5, std::vector<double>(count));
  for (std::size_t i = 0; i < count; ++i) {
    const std::size_t j = first + i;
    columns[0][i] = emb.driver[j];
    columns[1][i] = emb.response[j + emb.horizon];
    columns[2][i] = emb.response[j];
    columns[3][i] = emb.response[j - emb.delay];
    columns[4][i] = emb.response[j - 2 * emb.delay];
  }
  std::vector<std::vector<std::uint32_t>> symbols;
  for (const auto& col : columns) symbols.push_back(equiquantal_bins(col, emb.bins));
  return JointDistribution::from_samples({"A", "B", "C0", "C1", "C2"}, std::vector<std::size_t>(5, emb.bins),
                                         symbols);
}

double ccmi_asymmetric_series(const SeriesEmbedding& emb) {
  return ccmi_symmetric(embed(emb), {0}, {1}, {2, 3, 4});
}

SurrogateBaseline shuffled_surrogates(const SeriesEmbedding& emb, std::size_t count, std::uint64_t seed) {
  require(count >= 2, ErrorKind::InvalidInput, "need at least two surrogates");
  emb.validate();
  std::mt19937_64 rng(seed);
  SeriesEmbedding shuffled = emb;
  SurrogateBaseline out{0.0, 0.0, {}};
  for (std::size_t s = 0; s < count; ++s) {
    shuffled.driver = emb.driver;
    std::shuffle(shuffled.driver.begin(), shuffled.driver.end(), rng);
    out.values.push_back(ccmi_asymmetric_series(shuffled));
  }
  out.mean = std::accumulate(out.values.begin(), out.values.end(), 0.0) / static_cast<double>(count);
  double ss = 0;
  for (double v : out.values) ss += (v - out.mean) * (v - out.mean);
  out.stddev = std::sqrt(ss / static_cast<double>(count - 1));
  return out;
}

}  // namespace qcausal::ccmi
