#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "kgh/evolve.hpp"
#include "kgh/field.hpp"
#include "kgh/potential.hpp"

namespace kgh {

// Named time series sharing one time axis, in insertion order.
struct DiagnosticsSeries {
  std::vector<double> times;
  std::vector<std::pair<std::string, std::vector<double>>> columns;

  std::vector<double>& column(const std::string& name);
  const std::vector<double>& column(const std::string& name) const;
  bool has(const std::string& name) const;
};

struct SpatialSplit {
  Field inside;   // |x| <= radius
  Field outside;  // |x| > radius
  double radius = 0.0;
  bool outside_empty = false;  // radius reaches the box boundary
};

// Sharp split about the box center at `radius` (default 2t).
SpatialSplit spatial_split(const Field& f, double t, std::optional<double> radius = std::nullopt);

struct ConeReport {
  std::vector<double> times;
  std::vector<double> outside_l2;     // ||u||_{L2(|x| > R + t + pad)}
  std::vector<double> relative;       // outside_l2 / ||u||_2
  std::vector<double> mass_fraction;  // relative^2
  double pad = 0.0;
  double max_relative = 0.0;
  double max_mass_fraction = 0.0;
};

// Time is measured from the first snapshot. pad defaults to two cells.
ConeReport causality_residual(const Trajectory& traj, double R, std::optional<double> pad = std::nullopt);

// Mass fraction of f outside the ball of radius R about the center.
double outside_mass_fraction(const Field& f, double R);

struct MorawetzConfig {
  std::optional<double> sigma;  // default two cells
  std::pair<double, double> interval{0.0, 0.0};
};

struct MorawetzReport {
  double lhs = 0.0;
  double rhs = 0.0;
  bool pass = false;
  double margin = 0.0;          // rhs - lhs
  double sigma = 0.0;
  double lhs_half_sigma = 0.0;  // same integral with sigma / 2
  double min_integrand = 0.0;   // smallest per-time space integral
  DiagnosticsSeries series;     // per-snapshot space integral
};

MorawetzReport morawetz_check(const Trajectory& traj, const PotentialSpec& spec, const MorawetzConfig& cfg);

struct WeightedMorawetz {
  double value = 0.0;
  // g(t) = ||u_<(t)||^{alpha+4}_{l^{alpha+4}(L2)} per snapshot
  DiagnosticsSeries series;
};

// int_{t1}^{t2} g(t) / (2t + a) dt with the split radius 2t and sigma-cubes.
WeightedMorawetz weighted_morawetz(const Trajectory& traj, double alpha, double a, double sigma,
                                   std::pair<double, double> interval);

struct QuietWindow {
  std::optional<double> t2;
  double bound = 0.0;  // e^{(2+a) M l / eps} (t1 + l + 1) - 1
  bool within_bound = false;
  std::vector<double> window_ends;
  std::vector<double> window_integrals;
};

// Smallest t2 >= t1 + l with int_{t2-l}^{t2} g <= eps, g the series' values.
QuietWindow find_quiet_window(const std::vector<double>& times, const std::vector<double>& g, double l, double eps,
                              double t1, double M, double a);

struct PerturbationReport {
  double forcing_eps = 0.0;
  double y_norm = 0.0;        // L4 B^{1/2}_{4,2} + L4 L4 of u - u~
  double energy_sup = 0.0;    // sup_t ||(u - u~)(t)||_{H1 x L2}
  double ratio = 0.0;         // y_norm / forcing_eps
  DiagnosticsSeries series;
};

// u from base + delta, u~ from base under the forcing e = forcing_eps * profile
// (profile normalized to unit L2; default: the normalized base.u).
PerturbationReport perturbation_experiment(const PhaseState& base, const PhaseState& delta, double forcing_eps,
                                           const PotentialSpec& spec, const IntegratorConfig& config,
                                           std::optional<Field> profile = std::nullopt);

struct DecayScan {
  DiagnosticsSeries series;  // per r: "L<r>", "high<r>", "low<r>", "bound<r>"
  double cutoff = 0.0;
  bool bound_holds = true;
  double worst_slack = 0.0;  // min over snapshots of bound - high
};

DecayScan decay_scan(const Trajectory& traj, const std::vector<double>& r_list, double N, const PotentialSpec& spec);

std::string exponent_label(double r);

}  // namespace kgh
