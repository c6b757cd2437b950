#pragma once

#include <array>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "kgh/evolve.hpp"
#include "kgh/grid.hpp"
#include "kgh/potential.hpp"
#include "kgh/propagator.hpp"

namespace kgh {

struct GridSection {
  int n = 3;
  double extent = 16.0;
  int points = 64;
};

enum class DataKind { zero, gaussian, bump, file };

// amplitude * exp(-|x - c|^2 / width^2), amplitude * (1 - |x - c|^2 / radius^2)^8
// inside the ball, or a field read from a snapshot file.
struct DataSpec {
  DataKind kind = DataKind::zero;
  double width = 1.0;
  double amplitude = 0.0;
  double radius = 2.0;
  std::array<double, 3> center{0.0, 0.0, 0.0};
  std::string path;

  // Radius outside which the datum is negligible (bump: exact support).
  double support_radius() const;
};

struct EnergyCheck {
  bool enabled = true;
  double max_drift = 1e-5;
};

struct CausalityCheck {
  bool enabled = false;
  std::optional<double> radius;  // default: the bump radius
  std::optional<double> pad;     // default: two cells
  double max_mass_fraction = 1e-6;
};

struct MorawetzCheck {
  bool enabled = false;
  std::optional<double> sigma;
};

struct DecayCheck {
  bool enabled = false;
  std::vector<double> r{3.0, 4.0, 5.0};
  std::vector<double> cutoffs{2.0, 4.0, 8.0};
};

struct ScatteringCheck {
  bool enabled = false;
  std::vector<double> schedule{10.0, 20.0, 40.0, 80.0};
  double tolerance = 1e-4;
  double eta0 = 0.1;
  double smallness_window = 10.0;
  double t_out = 40.0;
  std::vector<double> extraction_times;  // default t_out / 4, t_out / 2, t_out
  double roundtrip_tolerance = 1e-3;
};

struct PerturbationCheck {
  bool enabled = false;
  std::vector<double> eps{1e-3, 5e-4, 2.5e-4};
  double linearity_tolerance = 0.2;
};

struct DispersiveCheck {
  std::string band = "low";
  double r = std::numeric_limits<double>::infinity();
  double cutoff = 0.0;  // 0: 1 for the low band, 4 for the high band
  double fit_lo = 5.0;
  double fit_hi = 40.0;
  double time_step = 1.0;
  bool radial = true;  // 1D reduction of radial data
  double radial_extent = 400.0;
  int radial_points = 0;  // 0: 8192 low, 16384 high
  double expected_slope = 0.0;  // 0: -n/2 (low) or -(n-1)/2 (high)
  double slope_tolerance = 0.2;
};

struct DiagnosticsSection {
  double box_policy_factor = 4.0;
  EnergyCheck energy;
  CausalityCheck causality;
  MorawetzCheck morawetz;
  DecayCheck decay;
  ScatteringCheck scattering;
  PerturbationCheck perturbation;
  DispersiveCheck dispersive;
};

struct OutputSection {
  std::string directory = "runs";
  int snapshot_stride = 0;  // 0: no snapshot files
  std::vector<std::string> formats{"csv", "json"};
};

struct RunConfig {
  GridSection grid;
  PotentialSpec potential;
  IntegratorConfig integrator;
  DataSpec initial;
  DataSpec velocity;
  DiagnosticsSection diagnostics;
  OutputSection output;

  std::string source_text;  // verbatim input, for hashing and echo
  std::string source_path;  // relative file paths resolve against its directory

  Grid make_grid() const;
  std::string hash() const;  // crc32 of the source text, hex
};

// Parses and validates. Every problem found is listed in one ConfigError.
RunConfig parse_config(const std::string& text, const std::string& source_path = "");
RunConfig load_config(const std::string& path);

// Resolved configuration as a JSON object (for run summaries).
std::string config_to_json(const RunConfig& cfg);

Field build_field(const DataSpec& spec, const Grid& grid, bool velocity);
PhaseState build_initial_state(const RunConfig& cfg);

}  // namespace kgh
