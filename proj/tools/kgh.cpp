// Command-line front end: one subcommand per pipeline, one run directory per
// invocation. Exit 0 all checks pass, 1 a check failed, 2 bad configuration
// or usage, 3 runtime or numerical failure.

#include <fftw3.h>
#include <zlib.h>

#include <CLI11.hpp>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <json.hpp>
#include <limits>
#include <sstream>

#include "kgh/config.hpp"
#include "kgh/diagnostics.hpp"
#include "kgh/io.hpp"
#include "kgh/log.hpp"
#include "kgh/norms.hpp"
#include "kgh/scattering.hpp"
#include "kgh/spectral.hpp"

#ifndef KGH_VERSION
#define KGH_VERSION "dev"
#endif

namespace fs = std::filesystem;
using json = nlohmann::json;
using namespace kgh;

namespace {

constexpr int kSummarySchema = 1;
constexpr double kInf = std::numeric_limits<double>::infinity();

json num(double x) {
  if (std::isfinite(x)) return x;
  return format_double(x);
}

json vec(const std::vector<double>& v) {
  json a = json::array();
  for (double x : v) a.push_back(num(x));
  return a;
}

struct Run {
  RunConfig cfg;
  std::string command;
  fs::path dir;
  json summary;
  bool pass = true;
  bool quiet = false;

  bool csv() const { return std::count(cfg.output.formats.begin(), cfg.output.formats.end(), "csv") > 0; }
  bool json_out() const { return std::count(cfg.output.formats.begin(), cfg.output.formats.end(), "json") > 0; }

  void write(const std::string& name, const DiagnosticsSeries& s) {
    if (csv()) write_csv(s, dir / name);
  }

  // Records a verdict and prints one line.
  void verdict(const std::string& name, bool ok, const std::string& line) {
    summary["diagnostics"][name]["verdict"] = ok ? "pass" : "fail";
    pass = pass && ok;
    std::cout << name << ": " << line << " [" << (ok ? "pass" : "fail") << "]\n";
  }

  void info(const std::string& line) {
    if (!quiet) std::cout << line << '\n';
  }
};

std::string sci(double x) {
  char b[32];
  std::snprintf(b, sizeof b, "%.3g", x);
  return b;
}

// ---------------------------------------------------------------- simulate

Trajectory evolve(Run& run, const PhaseState& initial) {
  const auto& ic = run.cfg.integrator;
  const Grid grid = run.cfg.make_grid();
  const long steps = ic.step_count();
  const double frames = static_cast<double>(steps / std::max(1, ic.snapshot_stride) + 1);
  const double bytes = frames * 32.0 * static_cast<double>(grid.size());
  if (bytes > 4.0 * (1u << 30))
    throw ConfigError("integrator.snapshot_stride = " + std::to_string(ic.snapshot_stride) + " keeps " +
                      sci(bytes / (1u << 30)) + " GiB of snapshots in memory; raise the stride");

  IntegrateOptions opt;
  long frame = 0;
  const int stride = run.cfg.output.snapshot_stride;
  if (stride > 0) {
    opt.observer = [&](const PhaseState& s) {
      if (frame++ % stride != 0) return;
      char name[32];
      std::snprintf(name, sizeof name, "snap_%06ld.kgh", frame - 1);
      write_snapshot(s, run.dir / name);
    };
  }
  const auto t0 = std::chrono::steady_clock::now();
  Trajectory traj = integrate(initial, run.cfg.potential, ic, opt);
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();

  DiagnosticsSeries es;
  es.times = traj.energy_times;
  es.column("energy") = traj.energy_values;
  std::vector<double> drift;
  for (double e : traj.energy_values)
    drift.push_back(traj.initial_energy != 0.0 ? std::abs(e - traj.initial_energy) / std::abs(traj.initial_energy) : 0.0);
  es.column("relative_drift") = drift;
  es.column("mean_density") = traj.mean_density;
  run.write("energy.csv", es);

  const auto [lo, hi] = std::minmax_element(traj.energy_values.begin(), traj.energy_values.end());
  run.summary["energy"] = {{"initial", traj.initial_energy},
                           {"min", lo == traj.energy_values.end() ? traj.initial_energy : *lo},
                           {"max", hi == traj.energy_values.end() ? traj.initial_energy : *hi},
                           {"max_relative_drift", traj.max_relative_drift},
                           {"max_tail_fraction", traj.max_tail_fraction},
                           {"blowup_suspected", traj.blowup_suspected},
                           {"final_time", traj.final_time},
                           {"steps", traj.steps_taken},
                           {"seconds", secs}};
  run.info("evolved to t = " + sci(traj.final_time) + " in " + std::to_string(traj.steps_taken) + " steps (" +
           sci(secs) + " s)");
  if (traj.blowup_suspected) run.verdict("blowup", false, "free energy exceeded the blow-up threshold");
  return traj;
}

void check_energy(Run& run, const Trajectory& traj) {
  const double max = run.cfg.diagnostics.energy.max_drift;
  run.summary["diagnostics"]["energy"] = {{"max_relative_drift", traj.max_relative_drift}, {"threshold", max}};
  run.verdict("energy", traj.max_relative_drift < max,
              "relative energy drift " + sci(traj.max_relative_drift) + " < " + sci(max));
}

void check_causality(Run& run, const Trajectory& traj) {
  const auto& c = run.cfg.diagnostics.causality;
  const double R = c.radius.value_or(std::max(run.cfg.initial.support_radius(), run.cfg.velocity.support_radius()));
  const ConeReport rep = causality_residual(traj, R, c.pad);
  DiagnosticsSeries s;
  s.times = rep.times;
  s.column("outside_l2") = rep.outside_l2;
  s.column("relative") = rep.relative;
  s.column("mass_fraction") = rep.mass_fraction;
  run.write("causality.csv", s);
  run.summary["diagnostics"]["causality"] = {{"radius", R},
                                             {"pad", rep.pad},
                                             {"max_relative", rep.max_relative},
                                             {"max_mass_fraction", rep.max_mass_fraction},
                                             {"threshold", c.max_mass_fraction}};
  run.verdict("causality", rep.max_mass_fraction < c.max_mass_fraction,
              "mass fraction outside the cone " + sci(rep.max_mass_fraction) + " < " + sci(c.max_mass_fraction) +
                  " (norm ratio " + sci(rep.max_relative) + ")");
}

void check_morawetz(Run& run, const Trajectory& traj) {
  MorawetzConfig mc;
  mc.sigma = run.cfg.diagnostics.morawetz.sigma;
  mc.interval = {traj.t_begin(), traj.t_end()};
  const MorawetzReport rep = morawetz_check(traj, run.cfg.potential, mc);
  run.write("morawetz.csv", rep.series);
  run.summary["diagnostics"]["morawetz"] = {{"lhs", rep.lhs},
                                            {"rhs", rep.rhs},
                                            {"margin", rep.margin},
                                            {"sigma", rep.sigma},
                                            {"lhs_half_sigma", rep.lhs_half_sigma},
                                            {"min_integrand", rep.min_integrand}};
  run.verdict("morawetz", rep.pass, "lhs " + sci(rep.lhs) + " <= 4 sup|udot| sup|grad u| = " + sci(rep.rhs));
}

void check_decay(Run& run, const Trajectory& traj) {
  const auto& d = run.cfg.diagnostics.decay;
  bool ok = true;
  json per = json::object();
  for (double N : d.cutoffs) {
    const DecayScan scan = decay_scan(traj, d.r, N, run.cfg.potential);
    run.write("decay_N" + exponent_label(N) + ".csv", scan.series);
    per[exponent_label(N)] = {{"bound_holds", scan.bound_holds}, {"worst_slack", num(scan.worst_slack)}};
    ok = ok && scan.bound_holds;
  }
  run.summary["diagnostics"]["decay"] = {{"r", vec(d.r)}, {"cutoffs", per}};
  run.verdict("decay", ok, "high-frequency bound sqrt(E) N^(delta(r)-1) at every snapshot");
}

void check_perturbation(Run& run, const PhaseState& initial) {
  const auto& p = run.cfg.diagnostics.perturbation;
  std::vector<double> eps = p.eps;
  std::sort(eps.rbegin(), eps.rend());
  IntegratorConfig ic = run.cfg.integrator;
  DiagnosticsSeries s;
  std::vector<double> y, en, ratio;
  for (double e : eps) {
    const PerturbationReport rep =
        perturbation_experiment(initial, PhaseState::zero(initial.grid()), e, run.cfg.potential, ic);
    s.times.push_back(e);  // the "time" axis of this table is eps
    y.push_back(rep.y_norm);
    en.push_back(rep.energy_sup);
    ratio.push_back(rep.ratio);
  }
  s.column("y_norm") = y;
  s.column("energy_sup") = en;
  s.column("ratio") = ratio;
  run.write("perturbation.csv", s);
  bool ok = true;
  std::vector<double> halving;
  for (std::size_t i = 1; i < eps.size(); ++i) {
    const double expect = eps[i] / eps[i - 1];
    const double got = y[i - 1] > 0.0 ? y[i] / y[i - 1] : 0.0;
    halving.push_back(got);
    ok = ok && std::abs(got / expect - 1.0) <= p.linearity_tolerance;
  }
  run.summary["diagnostics"]["perturbation"] = {
      {"eps", vec(eps)}, {"y_norm", vec(y)}, {"step_ratios", vec(halving)}, {"tolerance", p.linearity_tolerance}};
  std::ostringstream line;
  line << "response ratios";
  for (double h : halving) line << ' ' << sci(h);
  line << " vs eps ratios within " << p.linearity_tolerance * 100 << "%";
  run.verdict("perturbation", ok, line.str());
}

WaveOperatorConfig wave_config(const ScatteringCheck& s) {
  WaveOperatorConfig w;
  w.schedule = s.schedule;
  w.tolerance = s.tolerance;
  w.eta0 = s.eta0;
  w.smallness_window = s.smallness_window;
  return w;
}

// Omega_+ of the configured data, then forward to T_max and pull back.
void check_wave_operator(Run& run, const PhaseState& data) {
  const auto& sc = run.cfg.diagnostics.scattering;
  const WaveOperatorResult w = wave_operator(data, run.cfg.potential, run.cfg.integrator, wave_config(sc));
  const double T = w.schedule_used.back();

  IntegratorConfig ic = run.cfg.integrator;
  ic.t_end = T;
  ic.adaptive = false;
  ic.keep_snapshots = false;
  ic.snapshot_stride = std::max(1, static_cast<int>(std::lround(1.0 / ic.dt)));
  const double scale = energy_space_norm(data);
  DiagnosticsSeries res;
  std::vector<double> abs_err, rel_err;
  std::optional<PhaseState> last;
  IntegrateOptions opt;
  opt.observer = [&](const PhaseState& s) {
    const double d = energy_space_distance(s, apply_free(data, s.time));
    res.times.push_back(s.time);
    abs_err.push_back(d);
    rel_err.push_back(scale > 0 ? d / scale : d);
    last = s;
  };
  const Trajectory fwd = integrate(w.state, run.cfg.potential, ic, opt);
  if (!last || std::abs(last->time - T) > 1e-9 * T)
    throw IntegrationFailure("forward leg did not reach T = " + format_double(T), fwd.final_time);
  PhaseState back = apply_free(*last, -last->time);
  back.time = 0.0;
  const double recovery = energy_space_distance(back, data);
  res.column("abs") = abs_err;
  res.column("rel") = rel_err;
  run.write("completeness.csv", res);

  const double identity = std::abs(w.energy - w.asymptotic_energy);
  run.summary["diagnostics"]["wave_operator"] = {{"schedule_used", vec(w.schedule_used)},
                                                 {"gaps", vec(w.gaps)},
                                                 {"converged", w.converged},
                                                 {"smallness", w.smallness},
                                                 {"recovery_error", recovery},
                                                 {"energy", w.energy},
                                                 {"asymptotic_energy", w.asymptotic_energy},
                                                 {"energy_identity_error", identity},
                                                 {"tolerance", sc.roundtrip_tolerance}};
  if (!w.gaps.empty())
    run.verdict("wave_operator_convergence", w.converged,
                "successive-T gap " + sci(w.gaps.back()) + " <= " + sci(sc.tolerance));
  run.verdict("wave_operator", recovery <= sc.roundtrip_tolerance && identity <= sc.roundtrip_tolerance,
              "recovery " + sci(recovery) + ", energy identity " + sci(identity) + " <= " +
                  sci(sc.roundtrip_tolerance));
}

void check_roundtrip(Run& run, const PhaseState& data) {
  const auto& sc = run.cfg.diagnostics.scattering;
  RoundtripConfig rc;
  rc.incoming = wave_config(sc);
  rc.t_out = sc.t_out;
  rc.extraction_times = sc.extraction_times;
  const RoundtripReport rep = scattering_roundtrip(data, run.cfg.potential, run.cfg.integrator, rc);
  if (run.cfg.output.snapshot_stride > 0) {
    write_snapshot(rep.interacting, run.dir / "omega_minus.kgh", SnapshotRole::wave_operator);
    write_snapshot(rep.outgoing.data, run.dir / "scattered.kgh", SnapshotRole::asymptotic);
  }
  DiagnosticsSeries gaps;
  for (std::size_t i = 1; i < rep.outgoing.times.size(); ++i) gaps.times.push_back(rep.outgoing.times[i]);
  gaps.column("gap") = rep.outgoing.gaps;
  run.write("extraction.csv", gaps);
  run.summary["diagnostics"]["scatter_roundtrip"] = {
      {"energy_in", rep.energy_in},
      {"energy_out", rep.energy_out},
      {"energy_defect", rep.energy_defect},
      {"incoming_converged", rep.incoming.converged},
      {"incoming_gaps", vec(rep.incoming.gaps)},
      {"extraction_times", vec(rep.outgoing.times)},
      {"extraction_gaps", vec(rep.outgoing.gaps)},
      {"not_yet_asymptotic", rep.outgoing.not_yet_asymptotic},
      {"scattered_distance", energy_space_distance(rep.outgoing.data, PhaseState(data.u, data.udot))}};
  run.verdict("scatter_roundtrip", rep.energy_defect <= sc.roundtrip_tolerance,
              "free energy in " + sci(rep.energy_in) + " out " + sci(rep.energy_out) + " (relative defect " +
                  sci(rep.energy_defect) + ")");
}

// ------------------------------------------------------- dispersive bench

void dispersive(Run& run) {
  const auto& d = run.cfg.diagnostics.dispersive;
  const Band band = d.band == "high" ? Band::high : Band::low;
  const double cutoff = d.cutoff > 0.0 ? d.cutoff : (band == Band::low ? 1.0 : 4.0);
  const int n = run.cfg.grid.n;
  const double loss = std::isinf(d.r) ? 0.5 : 0.5 - 1.0 / d.r;
  const double expected = d.expected_slope != 0.0 ? d.expected_slope : -(band == Band::low ? n : n - 1) * loss;

  std::vector<double> times;
  for (double t = d.fit_lo; t <= d.fit_hi + 1e-9; t += d.time_step) times.push_back(t);
  DispersiveSeries series;
  if (d.radial) {
    if (n != 3) throw ConfigError("radial dispersive bench is three-dimensional (grid.n = 3)");
    const int points = d.radial_points > 0 ? d.radial_points : (band == Band::low ? 8192 : 16384);
    RadialDatum datum;
    if (band == Band::low)
      datum = {[](double r) { return std::exp(-r * r / 4.0); }, [](double) { return 0.0; }};
    else
      datum = {[](double r) { return r == 0.0 ? 8.0 : std::sin(8.0 * r) / r * std::exp(-r * r / 4.0); },
               [](double) { return 0.0; }};
    series = radial_dispersive_bench(datum, band, cutoff, d.r, times, d.radial_extent, points, d.fit_lo, d.fit_hi);
  } else {
    series = free_dispersive_bench(build_initial_state(run.cfg), band, cutoff, d.r, times, d.fit_lo, d.fit_hi);
  }
  DiagnosticsSeries s;
  s.times = series.times;
  s.column("norm") = series.norms;
  run.write("dispersive.csv", s);
  run.summary["diagnostics"]["dispersive"] = {{"band", d.band},
                                              {"r", num(d.r)},
                                              {"cutoff", cutoff},
                                              {"mode", d.radial ? "radial" : "grid"},
                                              {"slope", num(series.slope)},
                                              {"expected", expected},
                                              {"tolerance", d.slope_tolerance},
                                              {"fit_window", {series.fit_lo, series.fit_hi}},
                                              {"fit_points", series.fit_points}};
  run.verdict("dispersive", std::abs(series.slope - expected) <= d.slope_tolerance,
              "log-log slope " + sci(series.slope) + " vs " + sci(expected) + " +- " + sci(d.slope_tolerance));
}

// ------------------------------------------------------------ driver

json versions() {
  return {{"kgh", KGH_VERSION},
          {"summary_schema", kSummarySchema},
          {"snapshot_format", kSnapshotVersion},
          {"fftw", std::string(fftw_version)},
          {"zlib", std::string(zlibVersion())},
          {"compiler", std::string(__VERSION__)}};
}

void finish(Run& run, int status, const std::string& error = "") {
  run.summary["pass"] = run.pass && status == 0;
  run.summary["exit_status"] = status;
  if (!error.empty()) run.summary["error"] = error;
  json w = json::array();
  for (const auto& m : drain_warnings()) w.push_back(m);
  run.summary["warnings"] = w;
  if (run.json_out() && !run.dir.empty()) {
    std::ofstream out(run.dir / "summary.json");
    out << run.summary.dump(2) << '\n';
  }
}

int execute(Run& run) {
  run.dir = make_run_directory(run.cfg.output.directory, run.command);
  run.summary = {{"command", run.command},
                 {"config_hash", run.cfg.hash()},
                 {"config", json::parse(config_to_json(run.cfg))},
                 {"config_text", run.cfg.source_text},
                 {"versions", versions()},
                 {"run_directory", run.dir.string()},
                 {"diagnostics", json::object()}};
  std::cout << "run directory " << run.dir.string() << '\n';
  const auto& dg = run.cfg.diagnostics;
  try {
    if (run.command == "dispersive-bench") {
      dispersive(run);
    } else if (run.command == "wave-operator") {
      check_wave_operator(run, build_initial_state(run.cfg));
    } else if (run.command == "scatter-roundtrip") {
      check_roundtrip(run, build_initial_state(run.cfg));
    } else {
      const PhaseState initial = build_initial_state(run.cfg);
      const Trajectory traj = evolve(run, initial);
      const bool all = run.command == "simulate";
      if (all && dg.energy.enabled) check_energy(run, traj);
      if ((all && dg.causality.enabled) || run.command == "causality-test") check_causality(run, traj);
      if ((all && dg.morawetz.enabled) || run.command == "morawetz") check_morawetz(run, traj);
      if ((all && dg.decay.enabled) || run.command == "decay-scan") check_decay(run, traj);
      if (all && dg.perturbation.enabled) check_perturbation(run, initial);
      if (all && dg.scattering.enabled) {
        check_wave_operator(run, initial);
        check_roundtrip(run, initial);
      }
    }
  } catch (const ConfigError& e) {
    finish(run, 2, e.what());
    throw;
  } catch (const RangeError& e) {
    finish(run, 2, e.what());
    throw;
  } catch (const std::exception& e) {
    finish(run, 3, e.what());
    throw;
  }
  const int status = run.pass ? 0 : 1;
  finish(run, status);
  std::cout << (run.pass ? "all checks passed" : "some checks failed") << '\n';
  return status;
}

int report(const std::string& where) {
  fs::path p = where;
  if (fs::is_directory(p)) p /= "summary.json";
  std::ifstream in(p);
  if (!in) throw ConfigError("no summary at " + p.string());
  json s;
  try {
    s = json::parse(in);
  } catch (const json::exception& e) {
    throw ConfigError("unreadable summary " + p.string() + ": " + e.what());
  }
  std::cout << s.value("command", "?") << " (config " << s.value("config_hash", "?") << ")\n";
  if (s.contains("energy"))
    std::cout << "  energy drift " << format_double(s["energy"].value("max_relative_drift", 0.0)) << '\n';
  for (const auto& [name, d] : s["diagnostics"].items())
    std::cout << "  " << name << ": " << d.value("verdict", "n/a") << '\n';
  if (s.contains("error")) std::cout << "  error: " << s["error"].get<std::string>() << '\n';
  const bool pass = s.value("pass", false);
  std::cout << (pass ? "pass" : "fail") << '\n';
  return pass ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Klein-Gordon-Hartree simulation and diagnostics"};
  app.require_subcommand(1);
  std::string config_path, output_dir, band, r_text;
  double cutoff = 0.0;
  bool quiet = false, measure = false;

  const std::vector<std::pair<std::string, std::string>> commands = {
      {"simulate", "evolve and run every enabled diagnostic"},
      {"wave-operator", "build Omega_+ of the initial data and check recovery"},
      {"scatter-roundtrip", "scattering map Omega_+^-1 Omega_- and its energy identity"},
      {"causality-test", "mass outside the light cone"},
      {"morawetz", "Morawetz inequality on the trajectory"},
      {"dispersive-bench", "free-flow decay slopes"},
      {"decay-scan", "high-frequency L^r bounds"}};
  for (const auto& [name, help] : commands) {
    auto* sub = app.add_subcommand(name, help);
    if (name == "dispersive-bench") {
      sub->add_option("--config", config_path, "run configuration (TOML)")->check(CLI::ExistingFile);
      sub->add_option("--band", band, "low or high")->check(CLI::IsMember({"low", "high"}));
      sub->add_option("--r", r_text, "Lebesgue exponent (number or inf)");
      sub->add_option("--cutoff", cutoff, "band cutoff N");
    } else {
      sub->add_option("--config", config_path, "run configuration (TOML)")->required()->check(CLI::ExistingFile);
    }
    sub->add_option("--output", output_dir, "base directory for the run directory");
    sub->add_flag("--quiet", quiet, "no warnings on stderr");
    sub->add_flag("--fast-fft", measure, "timed FFT planning (faster, not bitwise reproducible)");
  }
  std::string report_path;
  auto* rep = app.add_subcommand("report", "print the verdicts of a finished run");
  rep->add_option("run", report_path, "run directory or summary.json")->required();

  if (argc > 1 && argv[1][0] != '-' && std::string(argv[1]) != "report" &&
      std::none_of(commands.begin(), commands.end(), [&](const auto& c) { return c.first == argv[1]; })) {
    std::cerr << "unknown subcommand '" << argv[1] << "'\n\n" << app.help();
    return 2;
  }
  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << e.what() << "\n\n" << app.help();
    return 2;
  }

  try {
    if (rep->parsed()) return report(report_path);
    set_warnings_quiet(quiet);
    if (measure) set_fft_planner(FftPlanner::measure);
    Run run;
    run.quiet = quiet;
    run.command = app.get_subcommands().front()->get_name();
    run.cfg = config_path.empty() ? parse_config("") : load_config(config_path);
    if (!output_dir.empty()) run.cfg.output.directory = output_dir;
    if (!band.empty()) run.cfg.diagnostics.dispersive.band = band;
    if (!r_text.empty()) {
      try {
        run.cfg.diagnostics.dispersive.r = r_text == "inf" ? kInf : std::stod(r_text);
      } catch (const std::exception&) {
        throw ConfigError("--r: '" + r_text + "' is not a number or inf");
      }
      if (!(run.cfg.diagnostics.dispersive.r >= 2.0)) throw ConfigError("--r must be >= 2");
    }
    if (cutoff > 0.0) run.cfg.diagnostics.dispersive.cutoff = cutoff;
    return execute(run);
  } catch (const ConfigError& e) {
    std::cerr << "configuration error: " << e.what() << '\n';
    return 2;
  } catch (const RangeError& e) {
    std::cerr << "configuration error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "runtime failure: " << e.what() << '\n';
    return 3;
  }
}
