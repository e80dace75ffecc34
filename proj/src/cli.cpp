#include "oscswap/cli.hpp"

#include <CLI11.hpp>

#include <cmath>
#include <filesystem>
#include <map>
#include <ostream>
#include <sstream>

#include "oscswap/error.hpp"
#include "oscswap/tuner.hpp"
#include "oscswap/wavefunction.hpp"
#include "oscswap/wigner.hpp"

namespace oscswap::cli {

namespace {

using io::json;

std::string join(const std::string& dir, const std::string& name) {
  return (std::filesystem::path(dir) / name).string();
}

void emit_json(const RunConfig& c, const std::string& name, const json& result) {
  if (!c.want_json()) return;
  std::ostringstream os;
  io::write_json(os, io::envelope(c.subcommand, c.to_json(), result));
  io::write_file(join(c.out, name), os.str());
}

template <class Fill>
void emit_csv(const RunConfig& c, const std::string& name, Fill&& fill) {
  if (!c.want_csv()) return;
  std::ostringstream os;
  fill(os);
  io::write_file(join(c.out, name), os.str());
}

ProtocolSpec spec_of(const RunConfig& c, double lambda) {
  return build_spec(c.w1, c.w2, c.tf, lambda, c.gamma);
}

ProtocolFamily family_of(const RunConfig& c) { return {c.w1, c.w2, c.tf, c.gamma}; }

double required_lambda(const RunConfig& c) {
  if (!c.lambda) throw InvalidInput("--lambda is required for " + c.subcommand);
  return *c.lambda;
}

std::string label_text(const FockLabel& l) {
  return std::to_string(l.n) + "," + std::to_string(l.k);
}

// Central differences inside, second-order one-sided at the ends.
std::vector<double> derivative(const std::vector<double>& t, const std::vector<double>& f) {
  const std::size_t n = t.size();
  std::vector<double> d(n, 0.0);
  if (n < 3) return d;
  for (std::size_t i = 1; i + 1 < n; ++i) d[i] = (f[i + 1] - f[i - 1]) / (t[i + 1] - t[i - 1]);
  const double h0 = t[1] - t[0];
  const double h1 = t[n - 1] - t[n - 2];
  d[0] = (-3.0 * f[0] + 4.0 * f[1] - f[2]) / (2.0 * h0);
  d[n - 1] = (3.0 * f[n - 1] - 4.0 * f[n - 2] + f[n - 3]) / (2.0 * h1);
  return d;
}

// Semi-axis of the unit equipotential along a principal direction; for a
// negative curvature the conic is a hyperbola and the value is its real axis.
double semi_axis(double omega_sq) { return 1.0 / std::sqrt(std::abs(omega_sq)); }

SpatialGrid grid_for(const RunConfig& c, const ProtocolSpec& spec) {
  return auto_grid(spec, c.grid);
}

struct LabelRun {
  FockLabel label;
  double e0 = 0.0;
  double predicted = 0.0;
  std::optional<double> split;
  std::optional<double> wigner;
  std::vector<std::string> errors;
  std::optional<FinalAnalysis> analysis;
  std::vector<std::array<double, 3>> transient;  // t, <H>, level energy
};

LabelRun run_label(const RunConfig& c, const ProtocolSpec& spec, const TransferCoeffs& coeffs,
                   const FockLabel& label, bool transient) {
  LabelRun r;
  r.label = label;
  r.e0 = initial_energy(label, spec.w1, spec.w2);
  r.predicted = predicted_energy_increment(coeffs, label, spec.w1, spec.w2);
  try {
    const SpatialGrid grid = grid_for(c, spec);
    SplitOperatorOptions opt;
    opt.n_steps = c.split_steps();
    std::vector<std::pair<double, double>> energies;
    if (transient) {
      opt.record_every = std::max(1, opt.n_steps / std::max(1, c.record_points));
      opt.observer = [&](double t, const WavefunctionGrid& psi) {
        energies.emplace_back(t, energy_expectation(psi, potential_at(spec, t)));
      };
    }
    const WavefunctionGrid psi =
        split_operator_evolve(initial_state(label, spec.w1, spec.w2, grid),
                              PotentialSchedule::designed(spec), opt);
    r.analysis = analyze_final(psi, spec, std::max(c.cutoff, label.n + label.k));
    r.split = r.analysis->energy - r.e0;
    if (transient) {
      std::vector<double> times;
      for (const auto& e : energies) times.push_back(e.first);
      const ProtocolTable levels = tabulate_protocol_at(spec, times);
      for (std::size_t i = 0; i < energies.size(); ++i) {
        const auto level = levels.samples[i].level_energy(label.n, label.k);
        r.transient.push_back({energies[i].first, energies[i].second,
                               level ? *level : std::numeric_limits<double>::quiet_NaN()});
      }
    }
  } catch (const Error& e) {
    r.errors.push_back(std::string("split-operator: ") + e.what());
  }
  try {
    const int nodes = c.mesh_nodes > 0 ? c.mesh_nodes : mesh_nodes_for(label);
    const PhaseSpaceMesh mesh = PhaseSpaceMesh::gauss_hermite(spec.w1, spec.w2, nodes);
    r.wigner = wigner_final_energy(label, spec, mesh, c.steps) - r.e0;
  } catch (const Error& e) {
    r.errors.push_back(std::string("wigner: ") + e.what());
  }
  return r;
}

json optional_json(const std::optional<double>& v) { return v ? json(*v) : json(nullptr); }

double relative_gap(double a, double b) {
  return std::abs(a - b) / std::max(std::max(std::abs(a), std::abs(b)), 0.01);
}

json deviation(const std::optional<double>& a, const std::optional<double>& b) {
  if (!a || !b) return nullptr;
  return relative_gap(*a, *b);
}

}  // namespace

int RunConfig::split_steps() const {
  if (!dt) return 1 << 14;
  if (!(*dt > 0.0)) throw InvalidInput("--dt must be positive");
  return std::max(1, static_cast<int>(std::lround(tf / *dt)));
}

io::json RunConfig::to_json() const {
  json states_json = json::array();
  for (const auto& s : states) states_json.push_back(label_text(s));
  return {{"subcommand", subcommand},
          {"w1", w1},
          {"w2", w2},
          {"tf", tf},
          {"lambda", optional_json(lambda)},
          {"gamma", gamma},
          {"samples", samples},
          {"steps", steps},
          {"grid", grid},
          {"split_steps", split_steps()},
          {"cutoff", cutoff},
          {"snapshots", snapshots},
          {"mesh_nodes", mesh_nodes},
          {"record_points", record_points},
          {"lambda_window", lambda_window},
          {"scan_step", scan_step},
          {"tf_range", tf_range},
          {"states", states_json},
          {"format", format}};
}

std::vector<FockLabel> table_labels() {
  return {{0, 0}, {1, 1}, {1, 0}, {0, 1}, {2, 0}, {0, 2},
          {3, 0}, {0, 3}, {2, 1}, {1, 2}, {5, 2}, {2, 5}};
}

FockLabel parse_label(const std::string& text) {
  const auto comma = text.find(',');
  if (comma == std::string::npos) throw InvalidInput("state must be written n,k: " + text);
  try {
    std::size_t used_n = 0;
    std::size_t used_k = 0;
    const std::string ns = text.substr(0, comma);
    const std::string ks = text.substr(comma + 1);
    const int n = std::stoi(ns, &used_n);
    const int k = std::stoi(ks, &used_k);
    if (used_n != ns.size() || used_k != ks.size() || n < 0 || k < 0) throw std::invalid_argument("");
    return {n, k};
  } catch (const std::logic_error&) {
    throw InvalidInput("state must be two non-negative integers n,k: " + text);
  }
}

void cmd_design(const RunConfig& c, std::ostream& log) {
  const double lambda = required_lambda(c);
  const ProtocolSpec spec = spec_of(c, lambda);
  const ProtocolTable table = tabulate_protocol(spec, c.samples);

  std::vector<double> t, theta;
  for (const auto& s : table.samples) {
    t.push_back(s.t);
    theta.push_back(s.frame.theta);
  }
  const std::vector<double> theta_dot = derivative(t, theta);

  json curves = json::array();
  for (std::size_t i = 0; i < t.size(); ++i) {
    const auto& s = table.samples[i];
    curves.push_back({{"t", s.t},
                      {"theta", s.frame.theta},
                      {"theta_dot", theta_dot[i]},
                      {"M12", s.M.a12},
                      {"omega1_sq", s.frame.omega1_sq},
                      {"omega2_sq", s.frame.omega2_sq}});
  }

  std::vector<double> snap_times;
  const int snaps = std::max(2, c.snapshots);
  for (int i = 0; i < snaps; ++i) snap_times.push_back(spec.tf * i / (snaps - 1));
  const ProtocolTable snap = tabulate_protocol_at(spec, snap_times);
  json ellipses = json::array();
  for (const auto& s : snap.samples) {
    ellipses.push_back({{"t", s.t},
                        {"theta", s.frame.theta},
                        {"semi_axis_1", semi_axis(s.frame.omega1_sq)},
                        {"semi_axis_2", semi_axis(s.frame.omega2_sq)},
                        {"repeller", s.repeller()}});
  }

  emit_json(c, "protocol.json",
            {{"table", io::to_json(table)}, {"curves", curves}, {"ellipses", ellipses}});
  emit_csv(c, "protocol.csv", [&](std::ostream& os) { io::write_csv(os, table, c.to_json()); });
  emit_csv(c, "curves.csv", [&](std::ostream& os) {
    io::CsvWriter csv(os, c.to_json(), {"t", "theta", "theta_dot", "M12", "omega1_sq", "omega2_sq"});
    for (std::size_t i = 0; i < t.size(); ++i) {
      const auto& s = table.samples[i];
      csv.row({s.t, s.frame.theta, theta_dot[i], s.M.a12, s.frame.omega1_sq, s.frame.omega2_sq});
    }
  });
  emit_csv(c, "ellipses.csv", [&](std::ostream& os) {
    io::CsvWriter csv(os, c.to_json(), {"t", "theta", "semi_axis_1", "semi_axis_2", "repeller"});
    for (const auto& s : snap.samples)
      csv.row({s.t, s.frame.theta, semi_axis(s.frame.omega1_sq), semi_axis(s.frame.omega2_sq),
               s.repeller() ? 1.0 : 0.0});
  });
  log << "design: " << table.samples.size() << " samples, theta(tf) = "
      << io::format15(table.samples.back().frame.theta) << '\n';
}

void cmd_tune(const RunConfig& c, std::ostream& log) {
  if (c.lambda_window.size() != 2 || !(c.lambda_window[0] < c.lambda_window[1]))
    throw InvalidInput("--lambda-window needs lo < hi");
  const ProtocolFamily family = family_of(c);
  const double lo = c.lambda_window[0];
  const double hi = c.lambda_window[1];
  const double step = std::min(c.scan_step, (hi - lo) / 8.0);
  TunerOptions options;
  options.scan_steps = c.steps;

  const SweepCurve scan = scan_b(family, lo, hi, step, options);
  emit_csv(c, "scan_b.csv",
           [&](std::ostream& os) { io::write_csv(os, scan, "lambda", "b", c.to_json()); });

  json result = {{"scan", io::to_json(scan, "lambda", "b")}};
  if (c.tf_range.size() == 3) {
    const SweepCurve curve = lambda_min_vs_tf(family, c.tf_range[0], c.tf_range[1], c.tf_range[2],
                                              0.0, 100.0, c.scan_step, options);
    result["lambda_min_vs_tf"] = io::to_json(curve, "tf", "lambda_min");
    emit_csv(c, "lambda_min_vs_tf.csv", [&](std::ostream& os) {
      io::write_csv(os, curve, "tf", "lambda_min", c.to_json());
    });
  }

  const std::vector<PerfectLambda> zeros = find_perfect_lambdas(family, lo, hi, step, options);
  json zeros_json = json::array();
  for (const auto& z : zeros) zeros_json.push_back(io::to_json(z));
  result["zeros"] = zeros_json;
  if (zeros.empty()) {
    try {
      (void)find_perfect_lambda(family, lo, hi, step, options);
    } catch (const NoPerfectTransfer& e) {
      result["lambda_star"] = nullptr;
      result["best"] = {{"lambda", e.lambda_best()}, {"b", e.b_best()}};
      emit_json(c, "tune.json", result);
      throw;
    }
  }
  const PerfectLambda& best = zeros.front();
  result["lambda_star"] = io::to_json(best);
  emit_json(c, "tune.json", result);
  log << "tune: lambda* = " << io::format15(best.lambda_star) << ", b = "
      << io::format15(best.b_at_star) << '\n';
}

void cmd_table(const RunConfig& c, std::ostream& log) {
  const ProtocolSpec spec = spec_of(c, required_lambda(c));
  const TransferCoeffs coeffs = transfer_coefficients(spec, c.steps);
  const std::vector<FockLabel> labels = c.states.empty() ? table_labels() : c.states;

  std::vector<LabelRun> runs;
  json rows = json::array();
  bool failed = false;
  for (const auto& label : labels) {
    LabelRun r = run_label(c, spec, coeffs, label, false);
    failed = failed || !r.errors.empty();
    rows.push_back({{"state", label_text(label)},
                    {"E0", r.e0},
                    {"delta_predicted", r.predicted},
                    {"delta_split", optional_json(r.split)},
                    {"delta_wigner", optional_json(r.wigner)},
                    {"dev_split_predicted", deviation(r.split, r.predicted)},
                    {"dev_wigner_predicted", deviation(r.wigner, r.predicted)},
                    {"dev_split_wigner", deviation(r.split, r.wigner)},
                    {"errors", r.errors}});
    log << "table: " << label_text(label) << " E0 = " << io::format15(r.e0)
        << " delta = " << io::format15(r.predicted) << '\n';
    runs.push_back(std::move(r));
  }
  emit_json(c, "table.json", {{"coefficients", io::to_json(coeffs)}, {"rows", rows}});
  emit_csv(c, "table.csv", [&](std::ostream& os) {
    io::CsvWriter csv(os, c.to_json(),
                      {"n", "k", "E0", "delta_predicted", "delta_split", "delta_wigner"});
    const double nan = std::numeric_limits<double>::quiet_NaN();
    for (const auto& r : runs)
      csv.row({double(r.label.n), double(r.label.k), r.e0, r.predicted, r.split.value_or(nan),
               r.wigner.value_or(nan)});
  });
  if (failed) throw PropagationQuality("one or more table rows failed verification");
}

void cmd_verify(const RunConfig& c, std::ostream& log) {
  double lambda = 0.0;
  json tuned = nullptr;
  if (c.lambda) {
    lambda = *c.lambda;
  } else {
    if (c.lambda_window.size() != 2) throw InvalidInput("--lambda-window needs two values");
    TunerOptions options;
    options.scan_steps = c.steps;
    const PerfectLambda p = find_perfect_lambda(family_of(c), c.lambda_window[0],
                                                c.lambda_window[1], c.scan_step, options);
    lambda = p.lambda_star;
    tuned = io::to_json(p);
  }
  const ProtocolSpec spec = spec_of(c, lambda);
  const TransferCoeffs coeffs = transfer_coefficients(spec, c.steps);
  const std::vector<FockLabel> labels = c.states.empty() ? std::vector<FockLabel>{{1, 0}} : c.states;

  json reports = json::array();
  bool failed = false;
  for (const auto& label : labels) {
    const LabelRun r = run_label(c, spec, coeffs, label, true);
    failed = failed || !r.errors.empty();
    const FinalStatePrediction prediction = predicted_final_state(coeffs, label);
    const FockLabel swapped{label.k, label.n};
    json report = {{"state", label_text(label)},
                   {"E0", r.e0},
                   {"delta_predicted", r.predicted},
                   {"delta_split", optional_json(r.split)},
                   {"delta_wigner", optional_json(r.wigner)},
                   {"predicted_final_state", io::to_json(prediction)},
                   {"errors", r.errors}};
    if (r.analysis) {
      json pops = json::array();
      double tv = 0.0;
      for (const auto& [l, p] : r.analysis->populations) {
        pops.push_back({{"m", l.n}, {"l", l.k}, {"population", p}});
        const auto it = prediction.amplitudes.find(l);
        tv += std::abs(p - (it == prediction.amplitudes.end() ? 0.0 : std::norm(it->second)));
      }
      report["populations"] = pops;
      report["fidelity_swapped"] = r.analysis->populations.at(swapped);
      report["population_distance_to_prediction"] = 0.5 * tv;
      report["leakage"] = r.analysis->leakage;
      report["leakage_warning"] = r.analysis->leakage_warning;
      report["norm"] = r.analysis->norm;
      log << "verify: " << label_text(label) << " -> " << label_text(swapped)
          << " fidelity " << io::format15(r.analysis->populations.at(swapped)) << '\n';
    }
    reports.push_back(report);
    emit_csv(c, "transient_" + std::to_string(label.n) + "_" + std::to_string(label.k) + ".csv",
             [&](std::ostream& os) {
               io::CsvWriter csv(os, c.to_json(), {"t", "energy", "level_energy"});
               for (const auto& p : r.transient) csv.row({p[0], p[1], p[2]});
             });
  }
  emit_json(c, "verify.json", {{"lambda", lambda},
                               {"tuned", tuned},
                               {"coefficients", io::to_json(coeffs)},
                               {"states", reports}});
  if (failed) throw PropagationQuality("one or more states failed verification");
}

int run(int argc, const char* const* argv, std::ostream& log, std::ostream& err) {
  RunConfig c;
  std::vector<std::string> state_text;
  double lambda_value = 0.0;

  CLI::App app{"Inverse-engineered trap rotation with quantum-number swap"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(io::version()));

  auto common = [&](CLI::App* sub) {
    sub->add_option("--w1", c.w1, "Initial frequency along x")->capture_default_str();
    sub->add_option("--w2", c.w2, "Initial frequency along y")->capture_default_str();
    sub->add_option("--tf", c.tf, "Protocol duration")->capture_default_str();
    sub->add_option("--lambda", lambda_value, "Control parameter");
    sub->add_option("--gamma", c.gamma, "Final rotation angle")->capture_default_str();
    sub->add_option("--steps", c.steps, "RK4 steps for classical trajectories")->capture_default_str();
    sub->add_option("--out", c.out, "Output directory")->capture_default_str();
    sub->add_option("--format", c.format, "json, csv or both")
        ->check(CLI::IsMember({"json", "csv", "both"}))
        ->capture_default_str();
  };
  auto quantum = [&](CLI::App* sub) {
    sub->add_option("--grid", c.grid, "Grid points per axis")->capture_default_str();
    sub->add_option("--dt", c.dt, "Split-operator time step (default tf/2^14)");
    sub->add_option("--cutoff", c.cutoff, "Highest total quanta in the final analysis")
        ->capture_default_str();
    sub->add_option("--mesh-nodes", c.mesh_nodes, "Phase-space nodes per axis (0: automatic)")
        ->capture_default_str();
    sub->add_option("--state", state_text, "Initial state n,k (repeatable)");
  };

  CLI::App* design = app.add_subcommand("design", "Tabulate a designed protocol");
  common(design);
  design->add_option("--samples", c.samples, "Time samples")->capture_default_str();
  design->add_option("--snapshots", c.snapshots, "Equipotential snapshots")->capture_default_str();

  CLI::App* tune = app.add_subcommand("tune", "Search lambda for perfect transfer");
  common(tune);
  tune->add_option("--lambda-window", c.lambda_window, "Search window lo hi")->expected(2);
  tune->add_option("--scan-step", c.scan_step, "Scan spacing")->capture_default_str();
  tune->add_option("--tf-range", c.tf_range, "lambda_min(tf) sweep: lo hi step")->expected(3);

  CLI::App* table = app.add_subcommand("table", "Energy increments by three methods");
  common(table);
  quantum(table);

  CLI::App* verify = app.add_subcommand("verify", "Fidelity and energy verification");
  common(verify);
  quantum(verify);
  verify->add_option("--lambda-window", c.lambda_window, "Tuning window when --lambda is absent")
      ->expected(2);
  verify->add_option("--scan-step", c.scan_step, "Scan spacing")->capture_default_str();
  verify->add_option("--record-points", c.record_points, "Transient energy samples")
      ->capture_default_str();

  // Table I defaults.
  table->preparse_callback([&](std::size_t) {
    c.tf = 1.0;
    lambda_value = 20.0;
    c.lambda = 20.0;
  });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, log, err);
    return code == 0 ? kOk : kUsage;
  }

  for (CLI::App* sub : {design, tune, table, verify}) {
    if (!sub->parsed()) continue;
    c.subcommand = sub->get_name();
    if (sub->count("--lambda") > 0) c.lambda = lambda_value;
  }

  try {
    for (const auto& s : state_text) c.states.push_back(parse_label(s));
    std::filesystem::create_directories(c.out);
    if (c.subcommand == "design") cmd_design(c, log);
    if (c.subcommand == "tune") cmd_tune(c, log);
    if (c.subcommand == "table") cmd_table(c, log);
    if (c.subcommand == "verify") cmd_verify(c, log);
  } catch (const DesignSingularity& e) {
    err << "design error (lambda = " << io::format15(c.lambda.value_or(0.0))
        << ", t = " << io::format15(e.time()) << "): " << e.what() << '\n';
    return kDesign;
  } catch (const DesignViolation& e) {
    err << "design error (lambda = " << io::format15(c.lambda.value_or(0.0))
        << ", t = " << io::format15(e.time()) << "): " << e.what() << '\n';
    return kDesign;
  } catch (const NoPerfectTransfer& e) {
    err << "tuning error: " << e.what() << " (best lambda " << io::format15(e.lambda_best())
        << ", b " << io::format15(e.b_best()) << ")\n";
    return kTuning;
  } catch (const InvalidInput& e) {
    err << "usage error: " << e.what() << '\n';
    return kUsage;
  } catch (const RangeError& e) {
    err << "usage error: " << e.what() << '\n';
    return kUsage;
  } catch (const Error& e) {
    err << "verification error: " << e.what() << '\n';
    return kVerification;
  } catch (const std::filesystem::filesystem_error& e) {
    err << "output error: " << e.what() << '\n';
    return kUsage;
  }
  return kOk;
}

}  // namespace oscswap::cli
