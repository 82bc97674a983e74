#include "qcausal/cli.hpp"

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include <charconv>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <memory>
#include <optional>
#include <sstream>

#include "qcausal/bounds.hpp"
#include "qcausal/causalscan.hpp"
#include "qcausal/ccmi.hpp"
#include "qcausal/infomeasures.hpp"

namespace qcausal::cli {

namespace {

// Usage problems that are not library errors (files, malformed flag values).
struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct Options {
  std::string model = "xx";
  std::size_t n = 4;
  double j = 1.0;
  double h = 0.0;
  std::string initial;  // empty: local excitation on site 0
  std::string protocol = "measure-at-t";
  double dt = 0.02;
  double t_max = 5.0;
  double threshold = 0.03;
  std::string crossing = "interp";
  std::size_t site_a = 0;
  std::optional<std::size_t> site_b;
  std::string distances;  // lo:hi, empty: 2:n-1
  std::string empty_c = "reject";
  std::string op_a = "z";
  std::string op_b = "z";
  std::string out;
  std::string summary;
  std::string config;
  std::uint64_t seed = 1;

  // ccmi
  std::string driver;
  std::string response;
  std::size_t tau = 1;
  std::size_t eta = 1;
  std::size_t bins = 4;
  std::size_t surrogates = 0;
};

// Shortest round-trip representation, used where a value must be re-read.
std::string exact(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

// 12 significant digits for data columns.
std::string sig12(double v) {
  std::ostringstream os;
  os << std::setprecision(12) << v;
  return os.str();
}

std::string fixed12(double v) {
  std::ostringstream os;
  os << std::fixed << std::setprecision(12) << v;
  return os.str();
}

ChainModel chain_model(const Options& o) {
  ModelKind kind;
  if (o.model == "tfim") kind = ModelKind::Tfim;
  else if (o.model == "xx") kind = ModelKind::Xx;
  else fail(ErrorKind::InvalidInput, "unknown model '" + o.model + "'");
  ChainModel m{kind, o.n, o.j, o.h};
  m.validate();
  return m;
}

std::string resolved_initial(const Options& o) {
  if (!o.initial.empty()) return o.initial;
  return "basis:1" + std::string(o.n > 0 ? o.n - 1 : 0, '0');
}

EmptyConditioner empty_policy(const Options& o) {
  if (o.empty_c == "reject") return EmptyConditioner::Reject;
  if (o.empty_c == "zero") return EmptyConditioner::TreatAsZero;
  fail(ErrorKind::InvalidInput, "--empty-c must be 'reject' or 'zero'");
}

std::pair<std::size_t, std::size_t> parse_distances(const Options& o) {
  if (o.distances.empty()) return {2, o.n - 1};
  const auto colon = o.distances.find(':');
  require(colon != std::string::npos, ErrorKind::InvalidInput, "--distances must look like lo:hi");
  try {
    std::size_t used = 0;
    const std::string lo_s = o.distances.substr(0, colon), hi_s = o.distances.substr(colon + 1);
    const auto lo = std::stoul(lo_s, &used);
    require(used == lo_s.size(), ErrorKind::InvalidInput, "bad --distances");
    const auto hi = std::stoul(hi_s, &used);
    require(used == hi_s.size(), ErrorKind::InvalidInput, "bad --distances");
    return {lo, hi};
  } catch (const std::logic_error&) {
    fail(ErrorKind::InvalidInput, "--distances must look like lo:hi, got '" + o.distances + "'");
  }
}

ComplexMatrix<double> pauli(const std::string& name) {
  if (name == "x") return pauli_x();
  if (name == "y") return pauli_y();
  if (name == "z") return pauli_z();
  fail(ErrorKind::InvalidInput, "observable must be x, y or z, got '" + name + "'");
}

ScanConfig scan_config(const Options& o) {
  ScanConfig c;
  c.model = chain_model(o);
  c.initial = parse_initial(resolved_initial(o));
  c.protocol = parse_protocol(o.protocol);
  c.grid = TimeGrid::make(o.t_max, o.dt);
  c.threshold = o.threshold;
  c.crossing = parse_crossing(o.crossing);
  c.empty_conditioner = empty_policy(o);
  const auto [lo, hi] = parse_distances(o);
  c.distance_min = lo;
  c.distance_max = hi;
  c.validate();
  return c;
}

std::string model_flags(const Options& o) {
  return "--model " + o.model + " --n " + std::to_string(o.n) + " --j " + exact(o.j) + " --h " + exact(o.h);
}

std::string scan_flags(const ScanConfig& c, const Options& o) {
  return model_flags(o) + " --initial " + to_string(c.initial) + " --protocol " + to_string(c.protocol) +
         " --dt " + exact(o.dt) + " --t-max " + exact(o.t_max) + " --empty-c " + o.empty_c;
}

// Writes to --out when given, otherwise to the command's stdout.
class Sink {
 public:
  Sink(const std::string& path, std::ostream& fallback) : stream_(&fallback) {
    if (path.empty()) return;
    file_ = std::make_unique<std::ofstream>(path, std::ios::binary);
    if (!*file_) throw UsageError("cannot open output file '" + path + "'");
    stream_ = file_.get();
  }
  std::ostream& operator*() { return *stream_; }

 private:
  std::unique_ptr<std::ofstream> file_;
  std::ostream* stream_;
};

std::vector<double> read_series(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw UsageError("cannot read series file '" + path + "'");
  std::vector<double> values;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos || line[first] == '#') continue;
    const auto last = line.find_last_not_of(" \t\r");
    double v = 0;
    const char* begin = line.data() + first;
    const char* end = line.data() + last + 1;
    const auto res = std::from_chars(begin, end, v);
    if (res.ec != std::errc() || res.ptr != end)
      throw UsageError(path + ":" + std::to_string(lineno) + ": not a number: '" + line + "'");
    values.push_back(v);
  }
  return values;
}

int cmd_ghz_demo(const Options& o, std::ostream& stdout_stream) {
  Sink sink(o.out, stdout_stream);
  std::ostream& os = *sink;
  const auto rho = DensityMatrix<>::from_ket(ghz_state(3));
  const Partition p{SiteSet{0}, SiteSet{1}, SiteSet{2}};
  const auto S = [&](const SiteSet& s) { return von_neumann_entropy(partial_trace(rho, s)); };
  const auto instr = projective_z_instrument<double>(0, 3);

  os << "# qcausal ghz-demo\n";
  os << "# state (|000> + |111>)/sqrt(2), A={0} B={1} C={2}, instrument " << instr.label() << "\n";
  os << "S(rho_ABC) = " << fixed12(von_neumann_entropy(rho)) << "\n";
  os << "S(rho_C) = " << fixed12(S({2})) << "\n";
  os << "S(rho_AC) = " << fixed12(S({0, 2})) << "\n";
  os << "S(rho_BC) = " << fixed12(S({1, 2})) << "\n";
  os << "symmetric I(A:B|C) = " << fixed12(symmetric_qcmi(rho, p).bits) << "\n";
  const auto ensemble = apply_instrument(rho, instr);
  for (const auto& br : ensemble.branches) {
    // Branch states live on sites {1,2}, relabeled {0,1}.
    os << "outcome " << br.outcome << ": p = " << fixed12(br.probability)
       << ", S(rho_B) = " << fixed12(von_neumann_entropy(partial_trace(br.state, {0})))
       << ", S(rho_C) = " << fixed12(von_neumann_entropy(partial_trace(br.state, {1})))
       << ", S(rho_BC) = " << fixed12(von_neumann_entropy(br.state))
       << ", I(B:C) = " << fixed12(mutual_information(br.state, 1)) << "\n";
  }
  os << "asymmetric I(A;B|C) = " << fixed12(asymmetric_qcmi(rho, p, instr).bits) << "\n";
  return kSuccess;
}

int cmd_timeseries(const Options& o, std::ostream& stdout_stream) {
  const ScanConfig config = scan_config(o);
  const std::size_t site_b = o.site_b.value_or(o.n - 1);
  const Partition partition = chain_partition(o.site_a, site_b);
  const QcmiSeries series = qcmi_time_series(config, partition);

  Sink sink(o.out, stdout_stream);
  std::ostream& os = *sink;
  os << "# qcausal timeseries " << scan_flags(config, o) << " --site-a " << o.site_a << " --site-b " << site_b
     << "\n";
  os << "# partition " << partition.to_string() << " instrument " << series.instrument << "\n";
  os << "t,qcmi_bits\n";
  for (std::size_t i = 0; i < series.times.size(); ++i)
    os << sig12(series.times[i]) << "," << sig12(series.bits[i]) << "\n";
  return kSuccess;
}

int cmd_arrival_scan(const Options& o, std::ostream& stdout_stream, std::ostream& err) {
  const ScanConfig config = scan_config(o);
  const ArrivalTable table = arrival_scan(config);
  const std::string distances = std::to_string(config.distance_min) + ":" + std::to_string(config.last_distance());
  const std::string flags = scan_flags(config, o) + " --threshold " + exact(config.threshold) + " --crossing " +
                            to_string(config.crossing) + " --distances " + distances;
  {
    Sink sink(o.out, stdout_stream);
    std::ostream& os = *sink;
    os << "# qcausal arrival-scan " << flags << "\n";
    os << "# A={0} B={d} C={1..d-1} instrument z-projective@0\n";
    os << "d,t_arr\n";
    for (const auto& row : table.rows) os << row.distance << "," << (row.t_arr ? sig12(*row.t_arr) : "nan") << "\n";
  }

  FitResult fit;
  try {
    fit = fit_velocity(table);
  } catch (const Error& e) {
    if (e.kind() != ErrorKind::InsufficientData) throw;
    err << "arrival-scan: " << e.what() << " (threshold " << exact(config.threshold) << " bits)\n";
    return kInsufficientData;
  }
  if (!fit.v_eff) err << "arrival-scan: " << fit.diagnostic << "\n";

  const LrEstimate lr = lr_velocity(config.model);
  nlohmann::ordered_json j;
  j["command"] = "arrival-scan";
  j["flags"] = flags;
  j["model"] = o.model;
  j["n"] = o.n;
  j["j"] = o.j;
  j["h"] = o.h;
  j["initial"] = to_string(config.initial);
  j["protocol"] = to_string(config.protocol);
  j["crossing"] = to_string(config.crossing);
  j["threshold"] = config.threshold;
  j["grid"] = exact(0.0) + ":" + exact(config.grid.dt) + ":" + exact(config.grid.t_max);
  j["dt"] = config.grid.dt;
  j["t_max"] = config.grid.t_max;
  j["distances"] = distances;
  j["points"] = fit.points;
  j["m"] = fit.slope;
  j["b"] = fit.intercept;
  j["v_eff"] = fit.v_eff ? nlohmann::ordered_json(*fit.v_eff) : nlohmann::ordered_json(nullptr);
  j["rss"] = fit.residual_sum_squares;
  j["v_lr"] = lr.v_lr;
  j["v0"] = xx_group_velocity(config.model.coupling);

  std::string summary_path = o.summary;
  if (summary_path.empty() && !o.out.empty()) summary_path = o.out + ".json";
  Sink sink(summary_path, stdout_stream);
  *sink << j.dump(2) << "\n";
  return kSuccess;
}

int cmd_bounds(const Options& o, std::ostream& stdout_stream) {
  const ChainModel model = chain_model(o);
  const LrEstimate lr = lr_velocity(model);
  std::ostringstream display;
  display << std::fixed << std::setprecision(4) << lr.v_lr;

  nlohmann::ordered_json j;
  j["command"] = "bounds";
  j["flags"] = model_flags(o);
  j["model"] = o.model;
  j["n"] = o.n;
  j["j"] = o.j;
  j["h"] = o.h;
  j["g"] = lr.g;
  j["g_prop"] = lr.g_prop;
  j["v_lr"] = lr.v_lr;
  j["v_lr_display"] = display.str();
  j["v0"] = xx_group_velocity(model.coupling);
  Sink sink(o.out, stdout_stream);
  *sink << j.dump(2) << "\n";
  return kSuccess;
}

int cmd_commutator_front(const Options& o, std::ostream& stdout_stream) {
  const ChainModel model = chain_model(o);
  const std::size_t site_b = o.site_b.value_or(o.n - 1);
  require(o.site_a < o.n && site_b < o.n && o.site_a != site_b, ErrorKind::InvalidInput,
          "--site-a and --site-b must be distinct sites of the chain");
  const auto op_a = pauli(o.op_a);
  const auto op_b = pauli(o.op_b);
  const TimeGrid grid = TimeGrid::make(o.t_max, o.dt);
  const Hamiltonian<double> H(model);

  Sink sink(o.out, stdout_stream);
  std::ostream& os = *sink;
  os << "# qcausal commutator-front " << model_flags(o) << " --dt " << exact(o.dt) << " --t-max " << exact(o.t_max)
     << " --site-a " << o.site_a << " --site-b " << site_b << " --op-a " << o.op_a << " --op-b " << o.op_b << "\n";
  os << "t,norm\n";
  for (double t : grid.times)
    os << sig12(t) << "," << sig12(commutator_front_norm(H, o.site_a, op_a, site_b, op_b, t)) << "\n";
  return kSuccess;
}

int cmd_ccmi(const Options& o, std::ostream& stdout_stream, std::ostream& err) {
  if (o.driver.empty() || o.response.empty()) throw UsageError("ccmi needs --driver and --response files");
  ccmi::SeriesEmbedding emb{read_series(o.driver), read_series(o.response), o.tau, o.eta, o.bins};
  try {
    const double value = ccmi::ccmi_asymmetric_series(emb);
    nlohmann::ordered_json j;
    j["command"] = "ccmi";
    j["driver"] = o.driver;
    j["response"] = o.response;
    j["tau"] = o.tau;
    j["eta"] = o.eta;
    j["bins"] = o.bins;
    j["samples"] = emb.embedded_samples();
    j["ccmi_bits"] = value;
    if (o.surrogates > 0) {
      const auto base = ccmi::shuffled_surrogates(emb, o.surrogates, o.seed);
      j["surrogates"] = o.surrogates;
      j["seed"] = o.seed;
      j["surrogate_mean"] = base.mean;
      j["surrogate_std"] = base.stddev;
      j["z_score"] = base.stddev > 0 ? nlohmann::ordered_json((value - base.mean) / base.stddev)
                                     : nlohmann::ordered_json(nullptr);
    }
    Sink sink(o.out, stdout_stream);
    *sink << j.dump(2) << "\n";
  } catch (const Error& e) {
    // Every data problem in this command, short series included, is exit 3.
    if (e.kind() == ErrorKind::InvalidInput) throw;
    err << "qcausal ccmi: " << e.what() << "\n";
    return kNumericalError;
  }
  return kSuccess;
}

void add_model_options(CLI::App* cmd, Options& o) {
  cmd->add_option("--model", o.model, "tfim or xx")->capture_default_str();
  cmd->add_option("--n", o.n, "number of sites")->capture_default_str();
  cmd->add_option("--j", o.j, "coupling J")->capture_default_str();
  cmd->add_option("--h", o.h, "field h")->capture_default_str();
}

void add_scan_options(CLI::App* cmd, Options& o) {
  cmd->add_option("--initial", o.initial, "ground or basis:<bits> (default: basis:10...0)");
  cmd->add_option("--protocol", o.protocol, "measure-at-t or quench-at-zero")->capture_default_str();
  cmd->add_option("--dt", o.dt, "time step")->capture_default_str();
  cmd->add_option("--t-max", o.t_max, "last time")->capture_default_str();
  cmd->add_option("--threshold", o.threshold, "arrival threshold in bits")->capture_default_str();
  cmd->add_option("--crossing", o.crossing, "first-sample or interp")->capture_default_str();
  cmd->add_option("--site-a", o.site_a, "intervention site")->capture_default_str();
  cmd->add_option("--site-b", o.site_b, "target site (default: last site)");
  cmd->add_option("--distances", o.distances, "distance range lo:hi (default 2:n-1)");
  cmd->add_option("--empty-c", o.empty_c, "reject or zero: handling of an empty conditioning set")
      ->capture_default_str();
}

void add_io_options(CLI::App* cmd, Options& o) {
  cmd->add_option("--out", o.out, "output file (default: stdout)");
  cmd->add_option("--config", o.config, "key = value file; command-line flags win");
  cmd->add_option("--seed", o.seed, "random seed")->capture_default_str();
}

// Appends `--key value` for every config-file entry whose flag is not
// already on the command line.
std::vector<std::string> merge_config(std::vector<std::string> args) {
  std::string path;
  for (std::size_t i = 0; i < args.size(); ++i) {
    if (args[i] == "--config" && i + 1 < args.size()) path = args[i + 1];
    else if (args[i].rfind("--config=", 0) == 0) path = args[i].substr(9);
  }
  if (path.empty()) return args;

  std::ifstream in(path);
  if (!in) throw UsageError("cannot read config file '" + path + "'");
  const auto trim = [](std::string s) {
    const auto a = s.find_first_not_of(" \t\r\"");
    const auto b = s.find_last_not_of(" \t\r\"");
    return a == std::string::npos ? std::string() : s.substr(a, b - a + 1);
  };
  std::string line;
  while (std::getline(in, line)) {
    const std::string content = trim(line);
    if (content.empty() || content[0] == '#' || content[0] == ';') continue;
    const auto eq = content.find('=');
    if (eq == std::string::npos) throw UsageError("config line without '=': " + line);
    std::string key = trim(content.substr(0, eq));
    const std::string value = trim(content.substr(eq + 1));
    if (key.rfind("--", 0) != 0) key = "--" + key;
    const bool given = std::any_of(args.begin(), args.end(), [&](const std::string& a) {
      return a == key || a.rfind(key + "=", 0) == 0;
    });
    if (!given) {
      args.push_back(key);
      args.push_back(value);
    }
  }
  return args;
}

int exit_code_for(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::InvalidInput:
    case ErrorKind::EmptyConditioner: return kUsageError;
    case ErrorKind::InsufficientData: return kInsufficientData;
    default: return kNumericalError;
  }
}

}  // namespace

int run(const std::vector<std::string>& raw_args, std::ostream& out, std::ostream& err) {
  Options o;
  CLI::App app{"Directional causal index (asymmetric QCMI) for exactly simulated spin chains", "qcausal"};
  app.set_help_flag("--help", "print help");
  app.require_subcommand(1);

  auto* ghz = app.add_subcommand("ghz-demo", "GHZ state: symmetric vs asymmetric QCMI");
  add_io_options(ghz, o);

  auto* ts = app.add_subcommand("timeseries", "asymmetric QCMI as a function of time (CSV)");
  auto* scan = app.add_subcommand("arrival-scan", "arrival times per distance and velocity fit (CSV + JSON)");
  auto* bnd = app.add_subcommand("bounds", "Lieb-Robinson and group velocities (JSON)");
  auto* comm = app.add_subcommand("commutator-front", "||[A(t),B]|| over time (CSV)");
  for (auto* cmd : {ts, scan, bnd, comm}) {
    add_model_options(cmd, o);
    add_scan_options(cmd, o);
    add_io_options(cmd, o);
  }
  scan->add_option("--summary", o.summary, "JSON summary file (default: <out>.json, or stdout)");
  comm->add_option("--op-a", o.op_a, "Pauli observable at site A: x, y or z")->capture_default_str();
  comm->add_option("--op-b", o.op_b, "Pauli observable at site B: x, y or z")->capture_default_str();

  auto* cc = app.add_subcommand("ccmi", "classical asymmetric CMI between two series (JSON)");
  cc->add_option("--driver", o.driver, "driver series x, one value per line");
  cc->add_option("--response", o.response, "response series x', one value per line");
  cc->add_option("--tau", o.tau, "horizon tau")->capture_default_str();
  cc->add_option("--eta", o.eta, "embedding delay eta_0")->capture_default_str();
  cc->add_option("--bins", o.bins, "equiquantal bins Q")->capture_default_str();
  cc->add_option("--surrogates", o.surrogates, "number of shuffled-driver surrogates (0: none)")
      ->capture_default_str();
  add_io_options(cc, o);

  try {
    std::vector<std::string> args = merge_config(raw_args);
    std::reverse(args.begin(), args.end());
    try {
      app.parse(args);
    } catch (const CLI::CallForHelp&) {
      out << app.help();
      return kSuccess;
    } catch (const CLI::ParseError& e) {
      err << "qcausal: " << e.what() << "\n";
      return kUsageError;
    }

    if (ghz->parsed()) return cmd_ghz_demo(o, out);
    if (ts->parsed()) return cmd_timeseries(o, out);
    if (scan->parsed()) return cmd_arrival_scan(o, out, err);
    if (bnd->parsed()) return cmd_bounds(o, out);
    if (comm->parsed()) return cmd_commutator_front(o, out);
    if (cc->parsed()) return cmd_ccmi(o, out, err);
  } catch (const UsageError& e) {
    err << "qcausal: " << e.what() << "\n";
    return kUsageError;
  } catch (const Error& e) {
    err << "qcausal: " << e.what() << "\n";
    return exit_code_for(e.kind());
  }
  return kUsageError;
}

}  // namespace qcausal::cli
