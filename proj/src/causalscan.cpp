#include "qcausal/causalscan.hpp"

#include <cmath>

namespace qcausal {

TimeGrid TimeGrid::make(double t_max, double dt) {
  require(std::isfinite(t_max) && t_max > 0, ErrorKind::InvalidInput, "t_max must be positive and finite");
  require(std::isfinite(dt) && dt > 0, ErrorKind::InvalidInput, "dt must be positive and finite");
  TimeGrid grid{t_max, dt, {}};
  // Multiplying the step index keeps every time point free of accumulated rounding.
  const auto steps = static_cast<std::size_t>(std::floor(t_max / dt + 1e-9));
  grid.times.reserve(steps + 1);
  for (std::size_t k = 0; k <= steps; ++k) grid.times.push_back(static_cast<double>(k) * dt);
  return grid;
}

std::string to_string(Protocol p) { return p == Protocol::MeasureAtT ? "measure-at-t" : "quench-at-zero"; }

std::string to_string(Crossing c) { return c == Crossing::FirstSample ? "first-sample" : "interp"; }

Protocol parse_protocol(const std::string& s) {
  if (s == "measure-at-t") return Protocol::MeasureAtT;
  if (s == "quench-at-zero") return Protocol::QuenchAtZero;
  fail(ErrorKind::InvalidInput, "unknown protocol '" + s + "'");
}

Crossing parse_crossing(const std::string& s) {
  if (s == "first-sample") return Crossing::FirstSample;
  if (s == "interp") return Crossing::Interpolate;
  fail(ErrorKind::InvalidInput, "unknown crossing mode '" + s + "'");
}

InitialState parse_initial(const std::string& s) {
  if (s == "ground") return GroundInitial{};
  const std::string prefix = "basis:";
  if (s.rfind(prefix, 0) == 0) {
    std::string bits = s.substr(prefix.size());
    require(!bits.empty() && bits.find_first_not_of("01") == std::string::npos, ErrorKind::InvalidInput,
            "basis state must be a bitstring, got '" + bits + "'");
    return BasisInitial{bits};
  }
  fail(ErrorKind::InvalidInput, "initial state must be 'ground' or 'basis:<bits>', got '" + s + "'");
}

std::string to_string(const InitialState& s) {
  if (const auto* basis = std::get_if<BasisInitial>(&s)) return "basis:" + basis->bits;
  return "ground";
}

void ScanConfig::validate() const {
  model.validate();
  require(std::isfinite(threshold) && threshold > 0, ErrorKind::InvalidInput, "threshold must be positive");
  require(!grid.times.empty(), ErrorKind::InvalidInput, "time grid is empty");
  if (const auto* basis = std::get_if<BasisInitial>(&initial)) {
    require(basis->bits.size() == model.n_sites, ErrorKind::InvalidInput,
            "basis state has " + std::to_string(basis->bits.size()) + " bits for a " +
                std::to_string(model.n_sites) + "-site chain");
  }
  const std::size_t last = last_distance();
  require(distance_min >= 1 && distance_min <= last && last < model.n_sites, ErrorKind::InvalidInput,
          "distance range " + std::to_string(distance_min) + ":" + std::to_string(last) + " invalid for " +
              std::to_string(model.n_sites) + " sites");
}

Ket<double> initial_state(const ScanConfig& config, const Hamiltonian<double>& H) {
  if (const auto* basis = std::get_if<BasisInitial>(&config.initial)) {
    require(basis->bits.size() == H.n_sites(), ErrorKind::InvalidInput, "basis state length does not match chain");
    return basis_ket_from_string<double>(basis->bits);
  }
  return ground_state(H).ket;
}

std::vector<QcmiSeries> qcmi_time_series(const Hamiltonian<double>& H, const Ket<double>& initial,
                                         std::size_t intervention_site, const std::vector<Partition>& partitions,
                                         Protocol protocol, const TimeGrid& grid, EmptyConditioner policy) {
  const std::size_t n = H.n_sites();
  require(initial.n_sites() == n, ErrorKind::InvalidInput, "initial state does not match the chain");
  const auto instr = projective_z_instrument<double>(intervention_site, n);

  std::vector<QcmiSeries> out;
  std::vector<bool> active;
  for (const auto& p : partitions) {
    detail::check_asymmetric_inputs(n, p, instr);
    p.validate(n, policy == EmptyConditioner::TreatAsZero);
    out.push_back(QcmiSeries{p, instr.label(), protocol, grid.times, std::vector<double>(grid.times.size(), 0.0)});
    active.push_back(!p.c.empty());
  }

  const auto record = [&](std::size_t step, const BranchEnsemble<Ket<double>>& ensemble) {
    for (std::size_t i = 0; i < partitions.size(); ++i) {
      if (!active[i]) continue;
      const double raw = branch_mutual_information(ensemble, partitions[i].b, partitions[i].c);
      out[i].bits[step] = clamp_information(raw, "asymmetric QCMI").bits;
    }
  };

  if (protocol == Protocol::MeasureAtT) {
    const KetTrajectory<double> trajectory(H, initial);
    for (std::size_t step = 0; step < grid.times.size(); ++step)
      record(step, post_measurement_states(trajectory.at(grid.times[step]), instr));
  } else {
    const auto at_zero = post_measurement_states(initial, instr);
    std::vector<KetTrajectory<double>> trajectories;
    for (const auto& br : at_zero.branches) trajectories.emplace_back(H, br.state);
    for (std::size_t step = 0; step < grid.times.size(); ++step) {
      BranchEnsemble<Ket<double>> evolved{at_zero.sites, {}};
      for (std::size_t k = 0; k < trajectories.size(); ++k) {
        const auto& br = at_zero.branches[k];
        evolved.branches.push_back({br.outcome, br.probability, trajectories[k].at(grid.times[step])});
      }
      record(step, evolved);
    }
  }
  return out;
}

QcmiSeries qcmi_time_series(const ScanConfig& config, const Partition& partition) {
  config.validate();
  const Hamiltonian<double> H(config.model);
  require(partition.a.size() == 1, ErrorKind::InvalidInput, "the intervention acts on a single site");
  return qcmi_time_series(H, initial_state(config, H), partition.a[0], {partition}, config.protocol, config.grid,
                          config.empty_conditioner)
      .front();
}

std::optional<double> arrival_time(const QcmiSeries& series, double threshold, Crossing crossing) {
  require(std::isfinite(threshold) && threshold > 0, ErrorKind::InvalidInput, "threshold must be positive");
  for (std::size_t i = 0; i < series.bits.size(); ++i) {
    if (series.bits[i] < threshold) continue;
    if (crossing == Crossing::FirstSample || i == 0) return series.times[i];
    const double t0 = series.times[i - 1], t1 = series.times[i];
    const double v0 = series.bits[i - 1], v1 = series.bits[i];
    return t0 + (threshold - v0) / (v1 - v0) * (t1 - t0);
  }
  return std::nullopt;
}

ArrivalScan arrival_scan_with_series(const ScanConfig& config) {
  config.validate();
  const Hamiltonian<double> H(config.model);
  std::vector<Partition> partitions;
  for (std::size_t d = config.distance_min; d <= config.last_distance(); ++d)
    partitions.push_back(chain_partition(0, d));

  ArrivalScan scan;
  scan.series = qcmi_time_series(H, initial_state(config, H), 0, partitions, config.protocol, config.grid,
                                 config.empty_conditioner);
  for (const auto& s : scan.series)
    scan.table.rows.push_back({s.partition.b[0], arrival_time(s, config.threshold, config.crossing)});
  return scan;
}

ArrivalTable arrival_scan(const ScanConfig& config) { return arrival_scan_with_series(config).table; }

FitResult fit_velocity(const ArrivalTable& table) {
  std::vector<double> xs, ys;
  for (const auto& row : table.rows) {
    if (!row.t_arr) continue;
    xs.push_back(static_cast<double>(row.distance));
    ys.push_back(*row.t_arr);
  }
  require(xs.size() >= 2, ErrorKind::InsufficientData,
          "velocity fit needs at least two arrivals, have " + std::to_string(xs.size()));

  const auto count = static_cast<double>(xs.size());
  double mean_x = 0, mean_y = 0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    mean_x += xs[i];
    mean_y += ys[i];
  }
  mean_x /= count;
  mean_y /= count;
  double sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    sxx += (xs[i] - mean_x) * (xs[i] - mean_x);
    sxy += (xs[i] - mean_x) * (ys[i] - mean_y);
  }
  require(sxx > 0, ErrorKind::InsufficientData, "velocity fit needs at least two distinct distances");

  FitResult fit{};
  fit.slope = sxy / sxx;
  fit.intercept = mean_y - fit.slope * mean_x;
  fit.points = xs.size();
  for (std::size_t i = 0; i < xs.size(); ++i) {
    const double r = ys[i] - (fit.slope * xs[i] + fit.intercept);
    fit.residual_sum_squares += r * r;
  }
  if (fit.slope > 0) {
    fit.v_eff = 1.0 / fit.slope;
  } else {
    fit.diagnostic = "non-positive slope " + std::to_string(fit.slope) + ": v_eff undefined";
  }
  return fit;
}

}  // namespace qcausal
