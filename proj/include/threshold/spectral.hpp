#pragma once

// Radial ODE engine: zero-energy shooting, decay exponents, the lowest Dirichlet
// eigenvalue on a ball and a numerical probe of criticality.

#include "threshold/catalog.hpp"

#include "json.hpp"

#include <cmath>
#include <optional>
#include <string>
#include <vector>

namespace threshold {

struct RadialSolution {
  std::vector<double> radii;
  std::vector<double> log_abs_u;
  std::vector<int> sign_u;
  std::vector<double> dlog_u;  // u'/u
  std::vector<double> nodes;   // radii where u changes sign (linear interpolation)
};

inline constexpr int kDefaultStepsPerDecade = 256;
/// Step-doubling estimate allowed per step, relative to |phi| + |phi_t|.
inline constexpr double kMaxLocalError = 1e-8;

/// Solves u'' + (d-1)/r u' = V u from (u0, du0) at r0 up to r1.
///
/// With t = ln r and u = r^{-(d-2)/2} phi the equation becomes
/// phi_tt = (r^2 V + (d-2)^2/4) phi, integrated by classical RK4 with a fixed
/// step of ln(10)/steps_per_decade and renormalized after each step.
RadialSolution shoot_zero_energy(const RadialPotential& V, int d, double r0, double r1, double u0,
                                 double du0, int steps_per_decade = kDefaultStepsPerDecade);

/// Samples a known function on the same log grid as the shooter, for comparisons and fits.
RadialSolution sample_solution(const RadialFunction& u, double r0, double r1,
                               int steps_per_decade = kDefaultStepsPerDecade);

/// p in u ~ r^{-p}: negated least-squares slope of log|u| against log r over the window.
double decay_exponent(const RadialSolution& sol, double r_lo, double r_hi);

struct EigenResult {
  double energy = 0.0;
  bool converged = false;
  int iterations = 0;
  double box_radius = 0.0;
};

/// Mesh nodes and the tridiagonal matrix of -v'' + [V + (d-1)(d-3)/(4 r^2)] v on
/// (0, box_radius) with a Dirichlet wall at box_radius.  d >= 2 uses v(0) = 0 on
/// r_i = i h; d = 1 uses a cell-centred mesh with v'(0) = 0.
struct ReducedOperator {
  std::vector<double> r;
  std::vector<double> diagonal;
  double off_diagonal = 0.0;
};
ReducedOperator reduced_operator(const RadialPotential& V, int d, double box_radius, int mesh);

/// Number of eigenvalues of the operator strictly below E (Sturm count).
int count_below(const ReducedOperator& op, double E);

/// Lowest eigenvalue by bisection on the Sturm count, to width 1e-10 max(1, |E|).
EigenResult lowest_eigenvalue(const RadialPotential& V, int d, double box_radius, int mesh);

enum class Criticality { critical_consistent, subcritical_consistent, inconclusive };
std::string to_string(Criticality c);

struct ProbeOptions {
  int steps_per_decade = 256;
  double r_init = 1e-6;
  /// ln of the box radii; log-radii let the probe reach boxes far beyond double range.
  std::vector<double> log_box_schedule{std::log(1e2), std::log(1e4), 100.0, 1000.0, 10000.0};
  /// Radii where the bump is not smooth; the march restarts its step there.
  std::vector<double> knots{0.9, 1.0};
};

struct ProbeOutcome {
  double lambda = 0.0;
  bool binds = false;                   // negative Dirichlet eigenvalue in some box
  bool determined = true;               // false when no node was found but u still heads to zero
  std::optional<double> log_node;       // ln r of the first node of the zero-energy solution
  std::optional<double> log_box;        // first scheduled box containing that node
};

struct CriticalityVerdict {
  Criticality verdict = Criticality::inconclusive;
  std::vector<double> lambda_grid;
  std::vector<bool> negative_eigenvalue_at;
  std::vector<ProbeOutcome> outcomes;
};

/// Decides, per lambda, whether V - lambda * bump has a negative Dirichlet
/// eigenvalue in one of the scheduled balls.  By Sturm oscillation that holds
/// iff the regular zero-energy solution has a node inside the ball.
CriticalityVerdict criticality_probe(const RadialPotential& V, int d, const RadialPotential& bump,
                                     const std::vector<double>& lambdas,
                                     const ProbeOptions& options = {});

nlohmann::json to_json(const RadialSolution& sol);
nlohmann::json to_json(const EigenResult& e);
nlohmann::json to_json(const CriticalityVerdict& v);
std::string to_csv(const RadialSolution& sol);
std::string to_csv(const CriticalityVerdict& v);

}  // namespace threshold
