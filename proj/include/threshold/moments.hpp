#pragma once

// Position moments <psi, |x|^ct psi> of radial functions.

#include "threshold/catalog.hpp"
#include "threshold/exact.hpp"
#include "threshold/logalg.hpp"

#include "json.hpp"

#include <optional>
#include <string>
#include <vector>

namespace threshold {

enum class MomentStatus { finite, infinite, boundary_inconclusive };

std::string to_string(MomentStatus s);

struct MomentVerdict {
  MomentStatus status = MomentStatus::infinite;
  std::optional<double> numeric_value;
  // Exponents of the radial integrand r^{ct+d-1} psi^2.
  Exact tail_a{0};
  std::vector<Exact> tail_b;
};

/// omega_{d-1} = 2 pi^{d/2} / Gamma(d/2), the area of the unit sphere in R^d.
double sphere_area(int d);

/// Exact finiteness over r > region_from; a value is attached when the tail
/// can be integrated (power decay, or a closed-form iterated-log tail).
MomentVerdict moment_symbolic(const LogMonomial& psi, const Exact& c_tilde, int d, double region_from);

struct NumericMoment {
  MomentStatus status = MomentStatus::finite;
  double value = 0.0;          // +inf when infinite, NaN when inconclusive
  double inner = 0.0;          // quadrature part on [inner_from, split_R]
  double fitted_slope = 0.0;   // log-log slope of the integrand on [split_R, 4 split_R]
  double fit_residual = 0.0;   // rms of the log-log fit
};

/// Fits within this distance of slope -1 are left to the symbolic path.
inline constexpr double kBoundarySlopeBand = 0.05;
inline constexpr double kMaxFitResidual = 0.1;

/// Quadrature on [inner_from, split_R] plus a fitted power-law tail.
/// Throws FitError when the tail is not close to a power law.
NumericMoment moment_numeric(const RadialFunction& psi, double c_tilde, int d, double split_R,
                             double inner_from);

/// Numeric moment of psi_alpha, with near-boundary fits resolved by the exact
/// tail r^{(2-d)/2-alpha}.  `deferred` reports whether that happened.
struct AlphaMoment {
  NumericMoment numeric;
  MomentStatus status = MomentStatus::finite;
  bool deferred = false;
  bool at_convention_boundary = false;  // ct == 2(alpha-1) exactly
};
AlphaMoment moment_alpha(const Exact& alpha, int d, const Exact& c_tilde, double split_R = 1e3);

/// -2 + sqrt((d-2)^2 + 4 a2), or nothing when the discriminant is negative.
std::optional<double> critical_moment(int d, double a2);

nlohmann::json to_json(const MomentVerdict& v);
nlohmann::json to_json(const NumericMoment& v);

}  // namespace threshold
