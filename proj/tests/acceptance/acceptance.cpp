// Acceptance gate: one PASS/FAIL line per criterion, nonzero exit on any failure.

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iomanip>
#include <iostream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "oracles.hpp"
#include "qcausal/bounds.hpp"
#include "qcausal/causalscan.hpp"
#include "qcausal/ccmi.hpp"
#include "qcausal/infomeasures.hpp"
#include "random.hpp"

using namespace qcausal;
namespace fs = std::filesystem;

namespace {

struct Outcome {
  bool pass;
  std::string detail;
};

class Gate {
 public:
  void check(int id, const std::string& name, const std::function<Outcome()>& body) {
    Outcome r{false, ""};
    try {
      r = body();
    } catch (const std::exception& e) {
      r = {false, std::string("exception: ") + e.what()};
    }
    failures_ += r.pass ? 0 : 1;
    std::cout << (r.pass ? "[PASS] " : "[FAIL] ") << id << ". " << name << ": " << r.detail << std::endl;
  }
  int failures() const { return failures_; }

 private:
  int failures_ = 0;
};

std::string fmt(double v, int digits = 6) {
  std::ostringstream os;
  os << std::setprecision(digits) << v;
  return os.str();
}

bool near(double value, double target, double tol) { return std::abs(value - target) <= tol; }

std::vector<double> white_noise(std::mt19937_64& rng, std::size_t n) {
  std::normal_distribution<double> g;
  std::vector<double> out(n);
  for (auto& v : out) v = g(rng);
  return out;
}

std::vector<double> random_table(std::mt19937_64& rng, std::size_t cells) {
  std::uniform_real_distribution<double> u;
  std::vector<double> p(cells);
  double total = 0;
  for (auto& v : p) total += (v = u(rng));
  for (auto& v : p) v /= total;
  return p;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

Outcome ghz_example() {
  const auto rho = DensityMatrix<>::from_ket(ghz_state(3));
  const Partition p{SiteSet{0}, SiteSet{1}, SiteSet{2}};
  const auto instr = projective_z_instrument(0, 3);
  const double sym = symmetric_qcmi(rho, p).bits;
  const double asym = asymmetric_qcmi(rho, p, instr).bits;
  const auto ens = apply_instrument(rho, instr);
  const auto S = [&](const SiteSet& s) { return von_neumann_entropy(partial_trace(rho, s)); };
  const double s_abc = von_neumann_entropy(rho), s_c = S({2}), s_ac = S({0, 2}), s_bc = S({1, 2});

  bool ok = near(sym, 1.0, 1e-9) && near(asym, 0.0, 1e-9) && ens.branches.size() == 2;
  for (const auto& br : ens.branches) ok = ok && near(br.probability, 0.5, 1e-12);
  ok = ok && near(s_abc, 0.0, 1e-9) && near(s_c, 1.0, 1e-9) && near(s_ac, 1.0, 1e-9) && near(s_bc, 1.0, 1e-9);
  return {ok, "symmetric=" + fmt(sym, 12) + " asymmetric=" + fmt(asym, 12) + " p=" +
                  fmt(ens.branches.at(0).probability, 12) + "/" + fmt(ens.branches.at(1).probability, 12) +
                  " S(ABC)=" + fmt(s_abc, 12) + " S(C)=" + fmt(s_c, 12) + " S(AC)=" + fmt(s_ac, 12) +
                  " S(BC)=" + fmt(s_bc, 12)};
}

Outcome velocity_constants() {
  const auto lr = lr_velocity(ChainModel{ModelKind::Xx, 8, 1.0, 0.3});
  const double v0 = xx_group_velocity(1.0);
  std::ostringstream display;
  display << std::fixed << std::setprecision(4) << lr.v_lr;
  const bool ok = near(lr.v_lr, 10.87312731, 1e-6) && display.str() == "10.8731" && v0 == 2.0;
  return {ok, "v_LR=" + fmt(lr.v_lr, 12) + " (display " + display.str() + ") v0=" + fmt(v0, 17)};
}

Outcome xx_start() {
  ScanConfig config;
  config.model = ChainModel{ModelKind::Xx, 4, 1.0, 0.5};
  config.initial = BasisInitial{"1000"};
  config.grid = TimeGrid::make(5.0, 0.02);
  const auto s = qcmi_time_series(config, Partition{SiteSet{0}, SiteSet{3}, SiteSet{1, 2}});
  const double later = *std::max_element(s.bits.begin() + 1, s.bits.end());
  return {std::abs(s.bits.front()) <= 1e-10 && later >= 0.01,
          "I(t=0)=" + fmt(s.bits.front(), 3) + " max_(0,5]=" + fmt(later)};
}

Outcome fig3_reproduction() {
  ScanConfig config;
  config.model = ChainModel{ModelKind::Xx, 8, 1.0, 0.3};
  config.initial = BasisInitial{"10000000"};
  config.protocol = Protocol::MeasureAtT;
  config.grid = TimeGrid::make(5.0, 0.01);
  config.threshold = 0.03;
  config.crossing = Crossing::Interpolate;
  const auto table = arrival_scan(config);
  bool ordered = true;
  std::string arrivals;
  for (std::size_t i = 0; i < table.rows.size(); ++i) {
    const auto& row = table.rows[i];
    ordered = ordered && row.t_arr.has_value();
    if (i && row.t_arr && table.rows[i - 1].t_arr) ordered = ordered && *row.t_arr >= *table.rows[i - 1].t_arr;
    arrivals += (i ? "," : "") + (row.t_arr ? fmt(*row.t_arr, 4) : std::string("nan"));
  }
  const auto fit = fit_velocity(table);
  const double v = fit.v_eff.value_or(NAN);
  const double v0 = xx_group_velocity(1.0);
  const bool ok = fit.v_eff && v >= 1.8 && v <= 3.2 && v < 10.8731 && v <= 1.8 * v0 && v >= v0 / 1.8 && ordered;
  return {ok, "m=" + fmt(fit.slope) + " b=" + fmt(fit.intercept) + " v_eff=" + fmt(v) + " t_arr(d=2..7)=[" +
                  arrivals + "]"};
}

Outcome subadditivity() {
  testing::Random rng(2024);
  double worst_quantum = INFINITY;
  const Partition p{SiteSet{0}, SiteSet{1}, SiteSet{2}};
  for (int trial = 0; trial < 250; ++trial) {
    const auto rho = rng.density(3, 1 + trial % 8);
    const auto S = [&](const SiteSet& s) { return von_neumann_entropy(partial_trace(rho, s)); };
    // Raw value, before any clamping.
    const double raw = S({0, 2}) + S({1, 2}) - S({2}) - von_neumann_entropy(rho);
    worst_quantum = std::min(worst_quantum, raw);
    worst_quantum = std::min(worst_quantum, symmetric_qcmi(rho, p).bits);
  }
  std::mt19937_64 gen(2025);
  double worst_classical = INFINITY;
  for (int trial = 0; trial < 250; ++trial) {
    const ccmi::JointDistribution d({"A", "B", "C"}, {2, 2, 2}, random_table(gen, 8));
    worst_classical = std::min(worst_classical, ccmi::ccmi_symmetric(d, {0}, {1}, {2}));
  }
  return {worst_quantum >= -1e-9 && worst_classical >= -1e-12,
          "min quantum=" + fmt(worst_quantum, 3) + " over 250, min classical=" + fmt(worst_classical, 3) +
              " over 250"};
}

Outcome oracle_equivalences() {
  testing::Random rng(7);
  double trace_err = 0;
  for (int n = 1; n <= 4; ++n) {
    for (int rep = 0; rep < 3; ++rep) {
      const auto rho = rng.density(n);
      for (unsigned mask = 1; mask < (1u << n); ++mask) {
        std::vector<std::size_t> keep;
        std::vector<int> keep_int;
        for (int s = 0; s < n; ++s)
          if (mask & (1u << s)) {
            keep.push_back(static_cast<std::size_t>(s));
            keep_int.push_back(s);
          }
        const auto mine = partial_trace(rho, SiteSet(keep)).matrix();
        trace_err = std::max(trace_err, testing::max_abs(mine - oracle::partial_trace(rho.matrix(), keep_int, n)));
      }
    }
  }
  double entropy_err = 0;
  for (int trial = 0; trial < 100; ++trial) {
    const auto rho = rng.density(1 + trial % 4, 1 + trial % 5);
    entropy_err = std::max(entropy_err, std::abs(von_neumann_entropy(rho) - oracle::matrix_log_entropy(rho.matrix())));
  }
  std::mt19937_64 gen(8);
  double form_err = 0;
  for (int trial = 0; trial < 200; ++trial) {
    const ccmi::JointDistribution d({"A", "B", "C"}, {2, 3, 2}, random_table(gen, 12));
    form_err = std::max(form_err, std::abs(ccmi::ccmi_symmetric(d, {0}, {1}, {2}) -
                                           ccmi::ccmi_conditional_form(d, {0}, {1}, {2})));
  }
  return {trace_err <= 1e-12 && entropy_err <= 1e-8 && form_err <= 1e-12,
          "partial trace " + fmt(trace_err, 3) + ", entropy " + fmt(entropy_err, 3) + ", A1 vs A2 " +
              fmt(form_err, 3)};
}

Outcome dynamics_invariants() {
  testing::Random rng(9);
  const auto H = build_xx(6, 1.0, 0.3);
  const Eigen::Index dim = H.dimension();
  const Eigen::MatrixXcd I = Eigen::MatrixXcd::Identity(dim, dim);
  double unitarity = 0, group = 0;
  for (int trial = 0; trial < 40; ++trial) {
    const double t1 = 200 * rng.uniform() - 100, t2 = 200 * rng.uniform() - 100;
    const auto U1 = propagator(H, t1).matrix;
    unitarity = std::max(unitarity, testing::max_abs(U1 * U1.adjoint() - I));
    group = std::max(group, testing::max_abs(U1 * propagator(H, t2).matrix - propagator(H, t1 + t2).matrix));
  }
  Eigen::MatrixXcd Mz = Eigen::MatrixXcd::Zero(dim, dim);
  for (int s = 0; s < 6; ++s) Mz += oracle::kron_at(oracle::Z(), s, 6);
  const KetTrajectory<> traj(H, basis_ket_from_string("100000"));
  double magnet = testing::max_abs(H.matrix() * Mz - Mz * H.matrix());
  for (double t = 0; t <= 20; t += 0.5) {
    const Eigen::VectorXcd psi = traj.at(t).amplitudes();
    magnet = std::max(magnet, std::abs(psi.dot(Mz * psi) - std::complex<double>(4.0)));
  }
  const auto H8 = build_xx(8, 1.0, 0.3);
  double at_zero = 0, largest = 0;
  const std::vector<Eigen::MatrixXcd> paulis{oracle::X(), oracle::Y(), oracle::Z()};
  for (const auto& a : paulis)
    for (const auto& b : paulis) {
      at_zero = std::max(at_zero, commutator_front_norm(H8, 0, a, 5, b, 0.0));
      for (double t : {0.5, 2.0, 6.0}) largest = std::max(largest, commutator_front_norm(H8, 0, a, 5, b, t));
    }
  return {unitarity <= 1e-9 && group <= 1e-9 && magnet <= 1e-9 && at_zero == 0.0 && largest <= 2.0 + 1e-9,
          "unitarity " + fmt(unitarity, 3) + ", group law " + fmt(group, 3) + ", magnetization " + fmt(magnet, 3) +
              ", commutator(t=0)=" + fmt(at_zero) + ", max commutator=" + fmt(largest)};
}

Outcome determinism() {
  const fs::path dir = fs::temp_directory_path() / ("qcausal_accept_" + std::to_string(std::random_device{}()));
  fs::create_directories(dir);
  std::vector<std::string> csv, json;
  for (int run = 0; run < 2; ++run) {
    const fs::path out = dir / ("scan" + std::to_string(run) + ".csv");
    const std::string cmd = std::string("\"") + QCAUSAL_CLI_PATH +
                            "\" arrival-scan --model xx --n 8 --j 1 --h 0.3 --threshold 0.03 --dt 0.01 --out \"" +
                            out.string() + "\"";
    if (std::system(cmd.c_str()) != 0) {
      fs::remove_all(dir);
      return {false, "command failed: " + cmd};
    }
    csv.push_back(slurp(out));
    json.push_back(slurp(out.string() + ".json"));
  }
  fs::remove_all(dir);
  const bool ok = !csv[0].empty() && !json[0].empty() && csv[0] == csv[1] && json[0] == json[1];
  return {ok, "CSV " + std::to_string(csv[0].size()) + " bytes, JSON " + std::to_string(json[0].size()) +
                  " bytes, identical=" + (ok ? "yes" : "no")};
}

Outcome classical_baseline() {
  std::mt19937_64 gen(42);
  const std::size_t n = 10000;
  ccmi::SeriesEmbedding independent;
  independent.driver = white_noise(gen, n);
  independent.response = white_noise(gen, n);
  ccmi::SeriesEmbedding lagged = independent;
  lagged.response.assign(n, 0.0);
  for (std::size_t j = 1; j < n; ++j) lagged.response[j] = lagged.driver[j - 1];

  const std::size_t count = 30;
  const double coupled = ccmi::ccmi_asymmetric_series(lagged);
  const auto coupled_base = ccmi::shuffled_surrogates(lagged, count, 1);
  const double noise = ccmi::ccmi_asymmetric_series(independent);
  const auto noise_base = ccmi::shuffled_surrogates(independent, count, 2);
  const double z_coupled = (coupled - coupled_base.mean) / coupled_base.stddev;
  const double z_noise = (noise - noise_base.mean) / noise_base.stddev;
  return {z_coupled >= 5 && std::abs(z_noise) <= 2,
          "lagged " + fmt(coupled) + " bits (surrogates " + fmt(coupled_base.mean) + " +- " +
              fmt(coupled_base.stddev) + ", z=" + fmt(z_coupled, 4) + "); independent " + fmt(noise) +
              " bits (surrogates " + fmt(noise_base.mean) + " +- " + fmt(noise_base.stddev) + ", z=" +
              fmt(z_noise, 3) + ")"};
}

}  // namespace

int main() {
  Gate gate;
  gate.check(1, "GHZ worked example", ghz_example);
  gate.check(2, "velocity constants", velocity_constants);
  gate.check(3, "XX N=4 start and growth", xx_start);
  gate.check(4, "N=8 arrival-time velocity", fig3_reproduction);
  gate.check(5, "strong subadditivity", subadditivity);
  gate.check(6, "oracle equivalences", oracle_equivalences);
  gate.check(7, "dynamics invariants", dynamics_invariants);
  gate.check(8, "arrival-scan determinism", determinism);
  gate.check(9, "classical baseline", classical_baseline);
  std::cout << (gate.failures() == 0 ? "all criteria passed" : std::to_string(gate.failures()) + " failed")
            << std::endl;
  return gate.failures() == 0 ? 0 : 1;
}
