#pragma once

// Named threshold potentials and zero-energy states.
//
// Lower family  psi^l_{c,m} = r^{-(c+d)/2} prod_{j<=m} ln_j^{-1/2}     (c-th moment barely infinite)
// Upper family  psi^u_{c,m} = psi^l_{c,m} ln_m^{-eps/2}, or r^{-(c+d+eps)/2} for m = 0
//               (c-th moment barely finite)
// W_{c,m}, W^{c,m} are the potentials for which those states solve (-Delta + W) psi = 0
// outside the ball of radius e_m, and the two moment bounds are the thresholds
// deciding whether a ground state at zero energy can have a finite c-th moment.

#include "threshold/exact.hpp"
#include "threshold/logalg.hpp"

#include <functional>
#include <limits>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace threshold {

struct ThresholdStateSpec {
  Exact c{0};    // moment order, >= 0
  int m = 0;     // iterated-log depth
  int d = 3;     // dimension
  Exact eps{0};  // only used by the upper family, > 0 there

  /// Throws PreconditionError on c < 0, m < 0, d < 1, or (needs_eps and eps <= 0).
  void validate(bool needs_eps) const;
};

LogMonomial psi_lower(const ThresholdStateSpec& spec);
LogMonomial psi_upper(const ThresholdStateSpec& spec);
LogPolynomial w_lower(const ThresholdStateSpec& spec);
LogPolynomial w_upper(const ThresholdStateSpec& spec);

/// Right-hand side of the no-finite-moment criterion.
LogPolynomial bound_absence(const ThresholdStateSpec& spec);
/// bound_absence plus eps (c+2)/2 r^{-2} prod_{k<=m} ln_k^{-1}.
LogPolynomial bound_existence(const ThresholdStateSpec& spec);

/// sum_{k=1}^{m} prod_{j<=k} ln_j^{-1} (no power of r).
LogPolynomial log_ladder(int m);
/// prod_{j<=m} ln_j^{-1} times r^rpow, coefficient 1.
LogMonomial ladder_shape(int m, const Exact& rpow = -2);

// ---------------------------------------------------------------------------
// Potentials

struct SymbolicPotential {
  LogPolynomial poly;
  double valid_from = 0.0;
};

/// (4 alpha^2 - (d-2)^2) / (4 (1+r^2)) + (1 - (alpha+d/2)^2) / (1+r^2)^2
struct AlphaFamily {
  double alpha = 0.0;
  int d = 3;
};

/// Linear interpolation on a strictly increasing grid.
struct SampledPotential {
  std::vector<double> r;
  std::vector<double> v;
};

/// Arbitrary callable; identically zero for r >= support_end.
struct CallbackPotential {
  std::function<double(double)> fn;
  double support_end = std::numeric_limits<double>::infinity();
  std::string name = "callback";
};

class RadialPotential {
 public:
  using Form = std::variant<SymbolicPotential, AlphaFamily, SampledPotential, CallbackPotential>;

  explicit RadialPotential(Form form);

  static RadialPotential symbolic(LogPolynomial poly, double valid_from = 0.0);
  static RadialPotential alpha_family(double alpha, int d);
  static RadialPotential sampled(std::vector<double> r, std::vector<double> v);
  static RadialPotential callback(std::function<double(double)> fn,
                                  double support_end = std::numeric_limits<double>::infinity(),
                                  std::string name = "callback");
  static RadialPotential zero();

  const Form& form() const { return form_; }

  struct CompiledTerm {
    int sign;
    double log_abs_coeff;
    double rpow;
    std::vector<double> logpows;
  };

  double value(double r) const;
  /// r^2 V(r) at r = exp(log_r); stays finite for radii far beyond double range
  /// where the form allows it (symbolic, alpha family, compact callbacks).
  double r2_value_at_log(double log_r) const;
  /// Smallest radius where the potential may be evaluated.
  double valid_from() const;
  std::string describe() const;

 private:
  Form form_;
  std::vector<CompiledTerm> compiled_;  // symbolic form only
};

RadialPotential v_alpha(double alpha, int d);

/// A radial function usable by the numeric checks.  `value` runs in extended
/// precision so that finite-difference stencils keep their accuracy; `log_abs`
/// is optional and is used where the value itself underflows.
struct RadialFunction {
  std::function<long double(long double)> value;
  std::function<double(double)> log_abs;
  double valid_from = 0.0;
  std::string name;
};

RadialFunction as_radial_function(const LogMonomial& psi);
/// r -> (1+r^2)^{(2-d)/4 - alpha/2}
RadialFunction psi_alpha(double alpha, int d);
/// Leading power of psi_alpha at infinity: r^{(2-d)/2 - alpha}, coefficient 1.
LogMonomial psi_alpha_tail(const Exact& alpha, int d);

/// Expansion of V_{alpha,d} in powers of r^{-2} up to r^{-2 order}, order <= 4.
LogPolynomial alpha_tail_expansion(const Exact& alpha, int d, int order = 4);
LogPolynomial alpha_tail_expansion(double alpha, int d, int order = 4);

/// r^{-2} tail coefficient (4 alpha^2 - (d-2)^2)/4.
double alpha_inverse_square_coefficient(double alpha, int d);

/// Smoothed indicator of r < 1: one up to 0.9, cubic ramp to zero at 1.
RadialPotential default_bump();

// Registry used by the command line.
/// "w_lower", "w_upper", "bound_absence", "bound_existence", "v_alpha".
std::vector<std::string> potential_names();
/// The four symbolic names; nullopt for anything else.
std::optional<LogPolynomial> named_symbolic_potential(std::string_view name,
                                                      const ThresholdStateSpec& spec);
/// Any registry name; symbolic entries are valid from e_m. `alpha` is read by "v_alpha" only.
std::optional<RadialPotential> named_potential(std::string_view name, const ThresholdStateSpec& spec,
                                               double alpha = 0.0);

}  // namespace threshold
