#pragma once

#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "kgh/field.hpp"
#include "kgh/potential.hpp"
#include "kgh/propagator.hpp"

namespace kgh {

struct Trajectory;

// delta(r) = n (1/2 - 1/r); r = infinity gives n/2. Every exponent check in
// this module goes through it.
double delta_exponent(int n, double r);

// Sobolev exponent 2* = 2n/(n-2) (infinity for n <= 2).
double sobolev_critical_exponent(int n);

double lebesgue_norm(const Field& f, double r);
// L^r norm of the pointwise Euclidean magnitude of a vector field.
double lebesgue_norm(std::span<const Field> components, double r);
double sobolev_norm(const Field& f, double s);

// (||P0 f||_r^2 + sum_j 2^{2js} ||Delta_j f||_r^2)^{1/2} over resolved bands.
double besov_norm(const Field& f, double s, double r);
double besov_norm(std::span<const Field> components, double s, double r);

// l^m over sigma-cubes of the local L^r norms. sigma must divide the extent
// and be a whole number of cells.
double birman_solomjak_norm(const Field& f, double m, double r, double sigma);

struct AdmissibleTriple {
  double theta = 0.0;
  double q = 2.0;
  double r = 2.0;
  double rho = 0.0;
};

struct AdmissibilityReport {
  double two_over_q = 0.0;
  double bound = 0.0;  // min((n-1+theta)(1/2-1/r), 1)
  double mu = 0.0;     // rho + (n+theta)(1/2-1/r) - 1/q
  bool inequality_holds = false;
  bool mu_allowed = false;  // mu in {0, 1/2, 1} (or equal to the declared mu)
  bool excluded_endpoint = false;
  bool valid = false;
  std::string reason;
};

AdmissibilityReport check_admissible(int n, const AdmissibleTriple& triple,
                                     std::optional<double> declared_mu = std::nullopt);

// Exponent sets the X^1 norm is evaluated on, at rho = -1/2.
std::vector<AdmissibleTriple> x1_exponent_set(int n);

struct EnergyBreakdown {
  double kinetic = 0.0;
  double gradient = 0.0;
  double mass = 0.0;
  double interaction = 0.0;
  double total = 0.0;
};

EnergyBreakdown energy(const PhaseState& state, const PotentialSpec& spec);
EnergyBreakdown energy(const PhaseState& state, HartreeOperator& hartree);

enum class Component { u, udot, gradient };

// L^q over the interval (trapezoid on the snapshot times) of the Besov norm
// B^rho_{r,2} of the chosen component.
double strichartz_norm(const Trajectory& traj, const AdmissibleTriple& triple, std::pair<double, double> interval,
                       Component component = Component::u);

// max over the exponent set of sum over {u, udot, grad u} of
// (L^inf L^2 + L^q B^{-1/2}_{r,2}).
double x1_norm(const Trajectory& traj, std::pair<double, double> interval);

// Helper shared by strichartz_norm and diagnostics: (int |g|^q dt)^{1/q} by
// the trapezoid rule; q = infinity gives the supremum.
double time_lebesgue_norm(const std::vector<double>& times, const std::vector<double>& values, double q);

}  // namespace kgh
