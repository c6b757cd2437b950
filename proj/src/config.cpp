#include "kgh/config.hpp"

#include <toml.hpp>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <json.hpp>
#include <set>
#include <sstream>

#include "kgh/error.hpp"
#include "kgh/io.hpp"

namespace kgh {

namespace {

// Collects problems instead of stopping at the first one.
class Reader {
 public:
  std::vector<std::string> errors;

  void error(const std::string& m) { errors.push_back(m); }

  // Flags keys of `t` that are not in `allowed`.
  void known(const toml::table& t, const std::string& where, std::initializer_list<std::string_view> allowed) {
    const std::set<std::string_view> ok(allowed);
    for (const auto& [k, v] : t)
      if (!ok.count(k.str())) error("unknown key '" + qualify(where, std::string(k.str())) + "'");
  }

  const toml::table* table(const toml::table& t, const std::string& where, std::string_view key) {
    const toml::node* n = t.get(key);
    if (!n) return nullptr;
    if (!n->is_table()) {
      error(qualify(where, std::string(key)) + ": expected a table");
      return nullptr;
    }
    return n->as_table();
  }

  void number(const toml::table& t, const std::string& where, std::string_view key, double& out) {
    const toml::node* n = t.get(key);
    if (!n) return;
    if (auto d = n->value<double>())
      out = *d;
    else
      error(qualify(where, std::string(key)) + ": expected a number");
  }

  void optional_number(const toml::table& t, const std::string& where, std::string_view key,
                       std::optional<double>& out) {
    if (!t.contains(key)) return;
    double d = 0.0;
    const std::size_t before = errors.size();
    number(t, where, key, d);
    if (errors.size() == before) out = d;
  }

  void integer(const toml::table& t, const std::string& where, std::string_view key, int& out) {
    const toml::node* n = t.get(key);
    if (!n) return;
    if (auto i = n->as_integer())
      out = static_cast<int>(i->get());
    else
      error(qualify(where, std::string(key)) + ": expected an integer");
  }

  void boolean(const toml::table& t, const std::string& where, std::string_view key, bool& out) {
    const toml::node* n = t.get(key);
    if (!n) return;
    if (auto b = n->as_boolean())
      out = b->get();
    else
      error(qualify(where, std::string(key)) + ": expected true or false");
  }

  void string(const toml::table& t, const std::string& where, std::string_view key, std::string& out) {
    const toml::node* n = t.get(key);
    if (!n) return;
    if (auto s = n->as_string())
      out = s->get();
    else
      error(qualify(where, std::string(key)) + ": expected a string");
  }

  void numbers(const toml::table& t, const std::string& where, std::string_view key, std::vector<double>& out) {
    const toml::node* n = t.get(key);
    if (!n) return;
    const auto* arr = n->as_array();
    if (!arr) {
      error(qualify(where, std::string(key)) + ": expected an array of numbers");
      return;
    }
    std::vector<double> v;
    for (const auto& e : *arr) {
      auto d = e.value<double>();
      if (!d) {
        error(qualify(where, std::string(key)) + ": expected an array of numbers");
        return;
      }
      v.push_back(*d);
    }
    out = std::move(v);
  }

  void strings(const toml::table& t, const std::string& where, std::string_view key, std::vector<std::string>& out) {
    const toml::node* n = t.get(key);
    if (!n) return;
    const auto* arr = n->as_array();
    std::vector<std::string> v;
    if (arr)
      for (const auto& e : *arr) {
        if (auto s = e.value<std::string>())
          v.push_back(*s);
        else
          arr = nullptr;
        if (!arr) break;
      }
    if (!arr) {
      error(qualify(where, std::string(key)) + ": expected an array of strings");
      return;
    }
    out = std::move(v);
  }

  static std::string qualify(const std::string& where, const std::string& key) {
    return where.empty() ? key : where + "." + key;
  }
};

void read_data(Reader& rd, const toml::table* t, const std::string& where, DataSpec& d, int n) {
  if (!t) return;
  rd.known(*t, where, {"kind", "width", "amplitude", "radius", "center", "path"});
  std::string kind = "zero";
  rd.string(*t, where, "kind", kind);
  if (kind == "zero")
    d.kind = DataKind::zero;
  else if (kind == "gaussian")
    d.kind = DataKind::gaussian;
  else if (kind == "bump")
    d.kind = DataKind::bump;
  else if (kind == "file")
    d.kind = DataKind::file;
  else
    rd.error(where + ".kind: '" + kind + "' is not one of zero, gaussian, bump, file");
  rd.number(*t, where, "width", d.width);
  rd.number(*t, where, "amplitude", d.amplitude);
  rd.number(*t, where, "radius", d.radius);
  std::vector<double> c;
  rd.numbers(*t, where, "center", c);
  if (!c.empty()) {
    if (static_cast<int>(c.size()) != n)
      rd.error(where + ".center: needs " + std::to_string(n) + " coordinates");
    else
      for (int i = 0; i < n; ++i) d.center[i] = c[i];
  }
  rd.string(*t, where, "path", d.path);
  if (d.kind == DataKind::gaussian && !(d.width > 0.0)) rd.error(where + ".width must be positive");
  if (d.kind == DataKind::bump && !(d.radius > 0.0)) rd.error(where + ".radius must be positive");
  if (d.kind == DataKind::file && d.path.empty()) rd.error(where + ".path is required for kind = \"file\"");
}

void read_potential(Reader& rd, const toml::table* t, const std::optional<Grid>& grid, int n, PotentialSpec& out) {
  out = PotentialSpec::zero(n);
  if (!t) return;
  const std::string w = "potential";
  rd.known(*t, w, {"kind", "gamma", "mode", "table", "p1", "p2", "alpha", "A_alpha", "a", "k0_policy",
                   "screening_mass", "truncation_radius"});
  std::string kind = "power_law", mode = "theorem";
  rd.string(*t, w, "kind", kind);
  rd.string(*t, w, "mode", mode);
  PotentialMode pm = PotentialMode::theorem;
  if (mode == "exploratory")
    pm = PotentialMode::exploratory;
  else if (mode != "theorem")
    rd.error("potential.mode: '" + mode + "' is not theorem or exploratory");

  if (kind == "none") {
    out = PotentialSpec::zero(n);
  } else if (kind == "power_law") {
    double gamma = std::nan("");
    rd.number(*t, w, "gamma", gamma);
    if (std::isnan(gamma)) {
      rd.error("potential.gamma is required for kind = \"power_law\"");
    } else {
      // range checks do not need the real grid; a broken grid is reported elsewhere
      try {
        out = make_power_potential(gamma, grid ? *grid : Grid(n, 1e6, 8), pm);
      } catch (const Error& e) {
        rd.error(std::string("potential.gamma: ") + e.what());
      }
    }
  } else if (kind == "radial_table") {
    std::vector<std::pair<double, double>> samples;
    const toml::node* node = t->get("table");
    const auto* arr = node ? node->as_array() : nullptr;
    bool ok = arr != nullptr;
    if (arr)
      for (const auto& row : *arr) {
        const auto* pair = row.as_array();
        if (!pair || pair->size() != 2 || !(*pair)[0].value<double>() || !(*pair)[1].value<double>()) {
          ok = false;
          break;
        }
        samples.emplace_back(*(*pair)[0].value<double>(), *(*pair)[1].value<double>());
      }
    if (!ok || samples.empty()) {
      rd.error("potential.table: expected [[r, v], ...] for kind = \"radial_table\"");
    } else {
      try {
        out = PotentialSpec::radial_table(n, std::move(samples), pm);
      } catch (const Error& e) {
        rd.error(std::string("potential.table: ") + e.what());
      }
    }
  } else {
    rd.error("potential.kind: '" + kind + "' is not one of none, power_law, radial_table");
  }

  rd.number(*t, w, "p1", out.p1);
  rd.number(*t, w, "p2", out.p2);
  rd.number(*t, w, "alpha", out.alpha);
  rd.number(*t, w, "A_alpha", out.A_alpha);
  rd.number(*t, w, "a", out.a);
  std::string k0 = to_string(out.k0_policy);
  rd.string(*t, w, "k0_policy", k0);
  if (k0 == "zero")
    out.k0_policy = K0Policy::zero;
  else if (k0 == "screened")
    out.k0_policy = K0Policy::screened;
  else
    rd.error("potential.k0_policy: '" + k0 + "' is not zero or screened");
  rd.number(*t, w, "screening_mass", out.screening_mass);
  rd.optional_number(*t, w, "truncation_radius", out.truncation_radius);
  if (out.alpha < 2.0) rd.error("potential.alpha must be >= 2");
  if (!(out.a > 0.0)) rd.error("potential.a must be positive");
  if (out.k0_policy == K0Policy::screened && !(out.screening_mass > 0.0))
    rd.error("potential.screening_mass must be positive");
  if (out.truncation_radius && !(*out.truncation_radius > 0.0)) rd.error("potential.truncation_radius must be positive");
}

void read_integrator(Reader& rd, const toml::table* t, IntegratorConfig& c) {
  if (!t) return;
  const std::string w = "integrator";
  rd.known(*t, w, {"scheme", "dt", "t_end", "snapshot_stride", "energy_stride", "blowup_factor", "blowup_threshold",
                   "adaptive", "adaptive_tolerance"});
  std::string scheme = to_string(c.scheme);
  rd.string(*t, w, "scheme", scheme);
  try {
    c.scheme = scheme_from_string(scheme);
  } catch (const ConfigError& e) {
    rd.error(std::string("integrator.scheme: ") + e.what());
  }
  rd.number(*t, w, "dt", c.dt);
  rd.number(*t, w, "t_end", c.t_end);
  rd.integer(*t, w, "snapshot_stride", c.snapshot_stride);
  rd.integer(*t, w, "energy_stride", c.energy_stride);
  rd.number(*t, w, "blowup_factor", c.blowup_factor);
  rd.optional_number(*t, w, "blowup_threshold", c.blowup_threshold);
  rd.boolean(*t, w, "adaptive", c.adaptive);
  rd.number(*t, w, "adaptive_tolerance", c.adaptive_tolerance);
}

void read_diagnostics(Reader& rd, const toml::table* t, DiagnosticsSection& d) {
  if (!t) return;
  const std::string w = "diagnostics";
  rd.known(*t, w, {"box_policy_factor", "energy", "causality", "morawetz", "decay", "scattering", "perturbation",
                   "dispersive"});
  rd.number(*t, w, "box_policy_factor", d.box_policy_factor);
  if (d.box_policy_factor < 2.0) rd.error("diagnostics.box_policy_factor must be >= 2 (the light cone must fit)");

  if (const auto* s = rd.table(*t, w, "energy")) {
    rd.known(*s, "diagnostics.energy", {"enabled", "max_drift"});
    rd.boolean(*s, "diagnostics.energy", "enabled", d.energy.enabled);
    rd.number(*s, "diagnostics.energy", "max_drift", d.energy.max_drift);
  }
  if (const auto* s = rd.table(*t, w, "causality")) {
    const std::string v = "diagnostics.causality";
    rd.known(*s, v, {"enabled", "radius", "pad", "max_mass_fraction"});
    d.causality.enabled = true;
    rd.boolean(*s, v, "enabled", d.causality.enabled);
    rd.optional_number(*s, v, "radius", d.causality.radius);
    rd.optional_number(*s, v, "pad", d.causality.pad);
    rd.number(*s, v, "max_mass_fraction", d.causality.max_mass_fraction);
  }
  if (const auto* s = rd.table(*t, w, "morawetz")) {
    const std::string v = "diagnostics.morawetz";
    rd.known(*s, v, {"enabled", "sigma"});
    d.morawetz.enabled = true;
    rd.boolean(*s, v, "enabled", d.morawetz.enabled);
    rd.optional_number(*s, v, "sigma", d.morawetz.sigma);
  }
  if (const auto* s = rd.table(*t, w, "decay")) {
    const std::string v = "diagnostics.decay";
    rd.known(*s, v, {"enabled", "r", "cutoffs"});
    d.decay.enabled = true;
    rd.boolean(*s, v, "enabled", d.decay.enabled);
    rd.numbers(*s, v, "r", d.decay.r);
    rd.numbers(*s, v, "cutoffs", d.decay.cutoffs);
  }
  if (const auto* s = rd.table(*t, w, "scattering")) {
    const std::string v = "diagnostics.scattering";
    rd.known(*s, v, {"enabled", "schedule", "tolerance", "eta0", "smallness_window", "t_out", "extraction_times",
                     "roundtrip_tolerance"});
    d.scattering.enabled = true;
    rd.boolean(*s, v, "enabled", d.scattering.enabled);
    rd.numbers(*s, v, "schedule", d.scattering.schedule);
    rd.number(*s, v, "tolerance", d.scattering.tolerance);
    rd.number(*s, v, "eta0", d.scattering.eta0);
    rd.number(*s, v, "smallness_window", d.scattering.smallness_window);
    rd.number(*s, v, "t_out", d.scattering.t_out);
    rd.numbers(*s, v, "extraction_times", d.scattering.extraction_times);
    rd.number(*s, v, "roundtrip_tolerance", d.scattering.roundtrip_tolerance);
    if (d.scattering.schedule.empty()) rd.error(v + ".schedule must not be empty");
  }
  if (const auto* s = rd.table(*t, w, "perturbation")) {
    const std::string v = "diagnostics.perturbation";
    rd.known(*s, v, {"enabled", "eps", "linearity_tolerance"});
    d.perturbation.enabled = true;
    rd.boolean(*s, v, "enabled", d.perturbation.enabled);
    rd.numbers(*s, v, "eps", d.perturbation.eps);
    rd.number(*s, v, "linearity_tolerance", d.perturbation.linearity_tolerance);
    if (d.perturbation.eps.size() < 2) rd.error(v + ".eps needs at least two values");
  }
  if (const auto* s = rd.table(*t, w, "dispersive")) {
    const std::string v = "diagnostics.dispersive";
    rd.known(*s, v, {"band", "r", "cutoff", "fit_lo", "fit_hi", "time_step", "radial", "radial_extent",
                     "radial_points", "expected_slope", "slope_tolerance"});
    auto& b = d.dispersive;
    rd.string(*s, v, "band", b.band);
    rd.number(*s, v, "r", b.r);
    rd.number(*s, v, "cutoff", b.cutoff);
    rd.number(*s, v, "fit_lo", b.fit_lo);
    rd.number(*s, v, "fit_hi", b.fit_hi);
    rd.number(*s, v, "time_step", b.time_step);
    rd.boolean(*s, v, "radial", b.radial);
    rd.number(*s, v, "radial_extent", b.radial_extent);
    rd.integer(*s, v, "radial_points", b.radial_points);
    rd.number(*s, v, "expected_slope", b.expected_slope);
    rd.number(*s, v, "slope_tolerance", b.slope_tolerance);
    if (b.band != "low" && b.band != "high") rd.error(v + ".band: '" + b.band + "' is not low or high");
    if (!(b.r >= 2.0)) rd.error(v + ".r must be >= 2");
  }
}

void read_output(Reader& rd, const toml::table* t, OutputSection& o) {
  if (!t) return;
  rd.known(*t, "output", {"directory", "snapshot_stride", "formats"});
  rd.string(*t, "output", "directory", o.directory);
  rd.integer(*t, "output", "snapshot_stride", o.snapshot_stride);
  rd.strings(*t, "output", "formats", o.formats);
  if (o.snapshot_stride < 0) rd.error("output.snapshot_stride must be >= 0 (0 disables snapshots)");
  for (const auto& f : o.formats)
    if (f != "csv" && f != "json") rd.error("output.formats: '" + f + "' is not csv or json");
}

// extent >= factor (R + horizon) for diagnostics that assume no wrap-around.
void box_policy(Reader& rd, const RunConfig& c) {
  const auto& d = c.diagnostics;
  const double R = std::max(c.initial.support_radius(), c.velocity.support_radius());
  auto check = [&](const std::string& what, double horizon) {
    const double need = d.box_policy_factor * (R + horizon);
    if (c.grid.extent < need) {
      std::ostringstream m;
      m << what << ": box-size policy needs extent >= " << d.box_policy_factor << " * (R + t) = "
        << d.box_policy_factor << " * (" << R << " + " << horizon << ") = " << need << ", got " << c.grid.extent;
      rd.error(m.str());
    }
  };
  if (d.causality.enabled) {
    for (const DataSpec* s : {&c.initial, &c.velocity})
      if (s->kind == DataKind::gaussian || s->kind == DataKind::file)
        rd.error("diagnostics.causality: data must be compactly supported (kind bump or zero)");
    check("diagnostics.causality", c.integrator.t_end);
  }
  if (d.scattering.enabled) {
    double horizon = d.scattering.t_out;
    if (!d.scattering.schedule.empty()) horizon = std::max(horizon, d.scattering.schedule.back());
    check("diagnostics.scattering", horizon);
  }
}

}  // namespace

double DataSpec::support_radius() const {
  switch (kind) {
    case DataKind::zero:
      return 0.0;
    case DataKind::bump:
      return radius;
    case DataKind::gaussian:
      return 3.0 * width;  // e^{-9}: outside lies below 1e-7 of the peak in mass
    case DataKind::file:
      return 0.0;
  }
  return 0.0;
}

Grid RunConfig::make_grid() const { return Grid(grid.n, grid.extent, grid.points); }

std::string RunConfig::hash() const {
  std::ostringstream s;
  s << std::hex << std::setw(8) << std::setfill('0') << crc32_of(source_text);
  return s.str();
}

RunConfig parse_config(const std::string& text, const std::string& source_path) {
  toml::table root;
  try {
    root = toml::parse(text, source_path);
  } catch (const toml::parse_error& e) {
    std::ostringstream m;
    m << "config syntax error at line " << e.source().begin.line << ": " << e.description();
    throw ConfigError(m.str());
  }

  Reader rd;
  RunConfig cfg;
  cfg.source_text = text;
  cfg.source_path = source_path;
  rd.known(root, "", {"grid", "potential", "integrator", "initial", "velocity", "diagnostics", "output"});

  if (const auto* g = rd.table(root, "", "grid")) {
    rd.known(*g, "grid", {"n", "extent", "points"});
    rd.integer(*g, "grid", "n", cfg.grid.n);
    rd.number(*g, "grid", "extent", cfg.grid.extent);
    rd.integer(*g, "grid", "points", cfg.grid.points);
  }
  std::optional<Grid> grid;
  try {
    grid.emplace(cfg.grid.n, cfg.grid.extent, cfg.grid.points);
  } catch (const Error& e) {
    rd.error(std::string("grid: ") + e.what());
  }
  const int n = cfg.grid.n >= 1 && cfg.grid.n <= 3 ? cfg.grid.n : 3;

  read_potential(rd, rd.table(root, "", "potential"), grid, n, cfg.potential);
  read_integrator(rd, rd.table(root, "", "integrator"), cfg.integrator);
  try {
    // without a valid grid, a huge coarse one keeps the step bound inert and
    // still reports the grid-independent problems
    cfg.integrator.validate(grid ? *grid : Grid(n, 1e6, 8));
  } catch (const ConfigError& e) {
    rd.error(e.what());
  }
  read_data(rd, rd.table(root, "", "initial"), "initial", cfg.initial, n);
  read_data(rd, rd.table(root, "", "velocity"), "velocity", cfg.velocity, n);
  read_diagnostics(rd, rd.table(root, "", "diagnostics"), cfg.diagnostics);
  read_output(rd, rd.table(root, "", "output"), cfg.output);
  box_policy(rd, cfg);

  if (!rd.errors.empty()) {
    std::ostringstream m;
    m << rd.errors.size() << " configuration error" << (rd.errors.size() > 1 ? "s" : "") << ":";
    for (const auto& e : rd.errors) m << "\n  - " << e;
    throw ConfigError(m.str());
  }
  return cfg;
}

RunConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read config file " + path);
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_config(buf.str(), path);
}

namespace {

nlohmann::json num(double x) {
  if (std::isfinite(x)) return x;
  return format_double(x);
}

nlohmann::json data_json(const DataSpec& d) {
  static const char* names[] = {"zero", "gaussian", "bump", "file"};
  nlohmann::json j{{"kind", names[static_cast<int>(d.kind)]}};
  if (d.kind == DataKind::gaussian) j.update({{"width", d.width}, {"amplitude", d.amplitude}});
  if (d.kind == DataKind::bump) j.update({{"radius", d.radius}, {"amplitude", d.amplitude}});
  if (d.kind == DataKind::gaussian || d.kind == DataKind::bump) j["center"] = d.center;
  if (d.kind == DataKind::file) j["path"] = d.path;
  return j;
}

}  // namespace

std::string config_to_json(const RunConfig& c) {
  using nlohmann::json;
  const auto& p = c.potential;
  json pot{{"kind", to_string(p.kind)}, {"mode", to_string(p.mode)}, {"gamma", p.gamma}, {"p1", num(p.p1)},
           {"p2", num(p.p2)}, {"alpha", p.alpha}, {"A_alpha", p.A_alpha}, {"a", p.a},
           {"k0_policy", to_string(p.k0_policy)}, {"screening_mass", p.screening_mass}};
  if (p.truncation_radius) pot["truncation_radius"] = *p.truncation_radius;
  if (p.kind == PotentialKind::radial_table) pot["table"] = p.table;
  const auto& i = c.integrator;
  json integ{{"scheme", to_string(i.scheme)}, {"dt", i.dt}, {"t_end", i.t_end},
             {"snapshot_stride", i.snapshot_stride}, {"energy_stride", i.energy_stride},
             {"blowup_factor", i.blowup_factor}, {"adaptive", i.adaptive},
             {"adaptive_tolerance", i.adaptive_tolerance}};
  if (i.blowup_threshold) integ["blowup_threshold"] = *i.blowup_threshold;
  const auto& d = c.diagnostics;
  json diag{{"box_policy_factor", d.box_policy_factor},
            {"energy", {{"enabled", d.energy.enabled}, {"max_drift", d.energy.max_drift}}},
            {"causality", {{"enabled", d.causality.enabled}, {"max_mass_fraction", d.causality.max_mass_fraction}}},
            {"morawetz", {{"enabled", d.morawetz.enabled}}},
            {"decay", {{"enabled", d.decay.enabled}, {"r", d.decay.r}, {"cutoffs", d.decay.cutoffs}}},
            {"scattering",
             {{"enabled", d.scattering.enabled}, {"schedule", d.scattering.schedule},
              {"tolerance", d.scattering.tolerance}, {"eta0", d.scattering.eta0}, {"t_out", d.scattering.t_out},
              {"roundtrip_tolerance", d.scattering.roundtrip_tolerance}}},
            {"perturbation", {{"enabled", d.perturbation.enabled}, {"eps", d.perturbation.eps}}},
            {"dispersive",
             {{"band", d.dispersive.band}, {"r", num(d.dispersive.r)}, {"cutoff", d.dispersive.cutoff},
              {"fit_lo", d.dispersive.fit_lo}, {"fit_hi", d.dispersive.fit_hi}, {"radial", d.dispersive.radial}}}};
  if (d.causality.radius) diag["causality"]["radius"] = *d.causality.radius;
  if (d.causality.pad) diag["causality"]["pad"] = *d.causality.pad;
  if (d.morawetz.sigma) diag["morawetz"]["sigma"] = *d.morawetz.sigma;
  json out{{"grid", {{"n", c.grid.n}, {"extent", c.grid.extent}, {"points", c.grid.points}}},
           {"potential", pot},
           {"integrator", integ},
           {"initial", data_json(c.initial)},
           {"velocity", data_json(c.velocity)},
           {"diagnostics", diag},
           {"output",
            {{"directory", c.output.directory},
             {"snapshot_stride", c.output.snapshot_stride},
             {"formats", c.output.formats}}}};
  return out.dump();
}

Field build_field(const DataSpec& spec, const Grid& grid, bool velocity) {
  Field f(grid);
  switch (spec.kind) {
    case DataKind::zero:
      return f;
    case DataKind::file: {
      const Snapshot s = read_snapshot(spec.path);
      if (s.state.grid() != grid) throw ConfigError("snapshot " + spec.path + " was written on a different grid");
      return velocity ? to_physical(s.state.udot) : to_physical(s.state.u);
    }
    case DataKind::gaussian:
    case DataKind::bump:
      break;
  }
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const auto idx = grid.unflatten(i);
    double r2 = 0.0;
    for (int a = 0; a < grid.dim(); ++a) {
      const double x = grid.coordinate(idx[a]) - spec.center[a];
      r2 += x * x;
    }
    if (spec.kind == DataKind::gaussian) {
      f[i] = spec.amplitude * std::exp(-r2 / (spec.width * spec.width));
    } else {
      const double q = 1.0 - r2 / (spec.radius * spec.radius);
      f[i] = q > 0.0 ? spec.amplitude * std::pow(q, 8) : 0.0;
    }
  }
  return f;
}

PhaseState build_initial_state(const RunConfig& cfg) {
  const Grid grid = cfg.make_grid();
  auto resolve = [&](DataSpec d) {
    if (d.kind == DataKind::file && !cfg.source_path.empty() && std::filesystem::path(d.path).is_relative())
      d.path = (std::filesystem::path(cfg.source_path).parent_path() / d.path).string();
    return d;
  };
  return PhaseState(build_field(resolve(cfg.initial), grid, false), build_field(resolve(cfg.velocity), grid, true), 0.0);
}

}  // namespace kgh
