#pragma once

// Decides from a symbolic tail whether the absence or the existence theorem
// for a zero-energy ground state with finite c-th moment applies.

#include "threshold/catalog.hpp"
#include "threshold/exact.hpp"
#include "threshold/logalg.hpp"

#include "json.hpp"

#include <optional>
#include <string>

namespace threshold {

inline constexpr int kDefaultMaxDepth = 4;

enum class Verdict { absence_applies, existence_applies, inconclusive };
std::string to_string(Verdict v);

struct TheoremVerdict {
  Verdict verdict = Verdict::inconclusive;
  std::optional<int> matched_m;
  std::optional<Exact> matched_eps;
  LogPolynomial witness;  // difference whose asymptotic sign decided
  std::string note;
};

/// First m <= m_max with bound_absence(c, m, d) - Vtail eventually >= 0.
TheoremVerdict decide_absence(const LogPolynomial& Vtail, const Exact& c, int d,
                              int m_max = kDefaultMaxDepth);

/// First m <= m_max where Vtail - bound_absence(c, m, d) has a positive dominant
/// term at least as large as r^{-2} prod_{k<=m} ln_k^{-1}.  Needs the caller to
/// assert that V is critical.
TheoremVerdict decide_existence(const LogPolynomial& Vtail, const Exact& c, int d,
                                int m_max = kDefaultMaxDepth, bool critical_asserted = false);

enum class BoundarySide {
  infinite_at_c_star,
  finite_at_c_star,
  log_corrections_decide,
  all_finite,    // tail decays slower than r^{-2} and is repulsive
  no_threshold,  // (d-2)^2 + 4 a2 < 0
};
std::string to_string(BoundarySide s);

struct MomentRange {
  std::optional<double> c_star;  // +inf for all_finite
  BoundarySide boundary_side = BoundarySide::infinite_at_c_star;
  /// Side at c_star after the log ladder comparison; empty when still tied at m_max.
  std::optional<BoundarySide> resolved_side;
  int depth = 0;  // ladder depth at which the comparison was settled
};

/// Critical moment of an r^{-2} tail and the side of the boundary c = c_star.
/// Throws NotInverseSquare when the dominant term is not of order r^{-2}.
MomentRange moment_range(const LogPolynomial& Vtail, int d, int m_max = kDefaultMaxDepth);

nlohmann::json to_json(const TheoremVerdict& v);
nlohmann::json to_json(const MomentRange& r);

}  // namespace threshold
