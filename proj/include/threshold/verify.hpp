#pragma once

// Symbolic and numeric certification of zero-energy identities, and a sampled
// check of the comparison principle for positive super/subsolutions.

#include "threshold/catalog.hpp"
#include "threshold/logalg.hpp"

#include "json.hpp"

#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace threshold {

/// True iff Delta psi / psi - W is the zero log-polynomial.
bool certify_symbolic(const LogMonomial& psi, const LogPolynomial& W, int d);

struct ResidualReport {
  double max_relative_residual = 0.0;
  std::vector<double> grid;
  std::vector<std::pair<double, double>> per_point;  // (r, normalized residual)
};

/// Relative step of the fourth-order stencils used by numeric_residual.
inline constexpr double kStencilRelativeStep = 5e-4;
/// Below this magnitude psi is handled through its log-scale evaluator.
inline constexpr double kUnderflowGuard = 1e-100;

/// Pointwise |-(psi'' + (d-1)/r psi') + V psi| / (|V psi| + |psi''| + |(d-1)/r psi'|) on the grid.
ResidualReport numeric_residual(const RadialFunction& psi, const RadialPotential& V, int d,
                                const std::vector<double>& grid);

struct ConvergenceOrder {
  std::optional<double> order;  // empty when the differences sit at rounding level
  bool skipped = false;
  std::string note;
};

/// Observed order of the fourth-order psi'' stencil from three successive step halvings.
ConvergenceOrder fd_convergence_order(const RadialFunction& psi, double r);

struct ComparisonReport {
  double constant_C = 0.0;
  std::pair<double, double> annulus;
  std::optional<double> violated_at;
  std::vector<std::pair<double, double>> liminf_probe;  // (N, N^{-2} \int_{N<=|x|<=alpha N} v^2 dx)
};

struct ComparisonOptions {
  double tolerance = 1e-12;
  int annulus_samples = 257;
  int liminf_doublings = 10;
};

/// Fixes C = sup v/w over samples of R < r <= R + delta and checks v <= C w on the grid.
/// Throws PositivityError if w <= 0 anywhere on the grid or annulus.
ComparisonReport check_comparison(const RadialFunction& v, const RadialFunction& w, int d, double R,
                                  double delta, double alpha_ratio, const std::vector<double>& grid,
                                  const ComparisonOptions& options = {});

/// n log-spaced radii from lo to hi inclusive.
std::vector<double> log_grid(double lo, double hi, int n);

nlohmann::json to_json(const ResidualReport& report);
nlohmann::json to_json(const ComparisonReport& report);
std::string to_csv(const ResidualReport& report);
std::string to_csv(const ComparisonReport& report);

}  // namespace threshold
