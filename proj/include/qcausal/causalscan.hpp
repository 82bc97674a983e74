#pragma once

// QCMI time series after a local intervention, threshold arrival times and
// the least-squares velocity fit t_arr(d) ~ m d + b, v_eff = 1/m.

#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "qcausal/infomeasures.hpp"
#include "qcausal/spinchain.hpp"

namespace qcausal {

/// Times k*dt for k = 0, 1, ... while k*dt <= t_max.
struct TimeGrid {
  double t_max = 5.0;
  double dt = 0.02;
  std::vector<double> times;

  static TimeGrid make(double t_max, double dt);
};

/// Measure-at-t: evolve the initial state to t, then apply the instrument.
/// Quench-at-zero: apply the instrument at t = 0 and evolve each branch.
enum class Protocol { MeasureAtT, QuenchAtZero };
enum class Crossing { FirstSample, Interpolate };

std::string to_string(Protocol p);
std::string to_string(Crossing c);
Protocol parse_protocol(const std::string& s);
Crossing parse_crossing(const std::string& s);

struct GroundInitial {};
struct BasisInitial {
  std::string bits;
};
using InitialState = std::variant<GroundInitial, BasisInitial>;

/// "ground" or "basis:<bits>".
InitialState parse_initial(const std::string& s);
std::string to_string(const InitialState& s);

struct ScanConfig {
  ChainModel model;
  InitialState initial = GroundInitial{};
  Protocol protocol = Protocol::MeasureAtT;
  TimeGrid grid = TimeGrid::make(5.0, 0.02);
  double threshold = 0.03;  // bits
  Crossing crossing = Crossing::Interpolate;
  std::size_t distance_min = 2;
  std::size_t distance_max = 0;  // 0: up to n_sites - 1
  EmptyConditioner empty_conditioner = EmptyConditioner::Reject;

  void validate() const;
  std::size_t last_distance() const { return distance_max == 0 ? model.n_sites - 1 : distance_max; }
};

struct QcmiSeries {
  Partition partition;
  std::string instrument;
  Protocol protocol = Protocol::MeasureAtT;
  std::vector<double> times;
  std::vector<double> bits;
};

/// The initial state a config describes, built for `H`.
Ket<double> initial_state(const ScanConfig& config, const Hamiltonian<double>& H);

/// Series for several partitions that share one intervention site; the
/// evolution and measurement branches are computed once per time point.
std::vector<QcmiSeries> qcmi_time_series(const Hamiltonian<double>& H, const Ket<double>& initial,
                                         std::size_t intervention_site, const std::vector<Partition>& partitions,
                                         Protocol protocol, const TimeGrid& grid,
                                         EmptyConditioner policy = EmptyConditioner::Reject);

QcmiSeries qcmi_time_series(const ScanConfig& config, const Partition& partition);

/// First time the series reaches `threshold`; nullopt if it never does.
std::optional<double> arrival_time(const QcmiSeries& series, double threshold, Crossing crossing);

struct ArrivalRow {
  std::size_t distance;
  std::optional<double> t_arr;
};

struct ArrivalTable {
  std::vector<ArrivalRow> rows;
};

struct ArrivalScan {
  ArrivalTable table;
  std::vector<QcmiSeries> series;  // one per row, same order
};

/// A = {0}, B = {d}, C = {1..d-1} for each distance in the configured range.
ArrivalScan arrival_scan_with_series(const ScanConfig& config);
ArrivalTable arrival_scan(const ScanConfig& config);

struct FitResult {
  double slope;
  double intercept;
  std::optional<double> v_eff;  // 1/slope, undefined unless slope > 0
  double residual_sum_squares;
  std::size_t points;
  std::string diagnostic;
};

/// Ordinary least squares of t_arr on d over rows with an arrival.
FitResult fit_velocity(const ArrivalTable& table);

}  // namespace qcausal
