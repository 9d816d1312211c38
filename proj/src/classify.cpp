#include "threshold/classify.hpp"

#include "threshold/errors.hpp"
#include "threshold/moments.hpp"

#include <cmath>
#include <limits>

namespace threshold {

std::string to_string(Verdict v) {
  switch (v) {
    case Verdict::absence_applies:
      return "absence_applies";
    case Verdict::existence_applies:
      return "existence_applies";
    case Verdict::inconclusive:
      return "inconclusive";
  }
  return "?";
}

std::string to_string(BoundarySide s) {
  switch (s) {
    case BoundarySide::infinite_at_c_star:
      return "infinite_at_c_star";
    case BoundarySide::finite_at_c_star:
      return "finite_at_c_star";
    case BoundarySide::log_corrections_decide:
      return "log_corrections_decide";
    case BoundarySide::all_finite:
      return "all_finite";
    case BoundarySide::no_threshold:
      return "no_threshold";
  }
  return "?";
}

namespace {

ThresholdStateSpec spec_for(const Exact& c, int m, int d) {
  ThresholdStateSpec s{c, m, d, Exact(0)};
  s.validate(false);
  return s;
}

void check_depth(int m_max) {
  if (m_max < 0) {
    throw PreconditionError("m_max must be >= 0");
  }
}

}  // namespace

TheoremVerdict decide_absence(const LogPolynomial& Vtail, const Exact& c, int d, int m_max) {
  check_depth(m_max);
  TheoremVerdict out;
  for (int m = 0; m <= m_max; ++m) {
    const LogPolynomial diff = bound_absence(spec_for(c, m, d)) - Vtail;
    out.witness = diff;
    if (asymptotic_sign(diff) >= 0) {
      out.verdict = Verdict::absence_applies;
      out.matched_m = m;
      return out;
    }
  }
  out.note = "tail exceeds the bound at every depth up to " + std::to_string(m_max);
  return out;
}

TheoremVerdict decide_existence(const LogPolynomial& Vtail, const Exact& c, int d, int m_max,
                                bool critical_asserted) {
  check_depth(m_max);
  TheoremVerdict out;
  for (int m = 0; m <= m_max; ++m) {
    const LogPolynomial D = Vtail - bound_absence(spec_for(c, m, d));
    out.witness = D;
    if (D.is_zero()) {
      continue;
    }
    const LogMonomial& lead = D.terms().front();
    if (lead.coeff() <= 0) {
      continue;
    }
    const auto order = compare_dominance(lead, ladder_shape(m));
    if (order == std::strong_ordering::less) {
      continue;
    }
    Exact eps(1);
    if (order == std::strong_ordering::equal) {
      // Take the whole eps-term when the rest of D is eventually >= 0, else half of it.
      eps = 2 * lead.coeff() / (c + 2);
      const LogPolynomial rest = D - LogPolynomial(lead);
      if (asymptotic_sign(rest) < 0) {
        eps /= 2;
      }
    }
    if (!critical_asserted) {
      out.note = "bound holds at m = " + std::to_string(m) + " but criticality was not asserted";
      return out;
    }
    out.verdict = Verdict::existence_applies;
    out.matched_m = m;
    out.matched_eps = eps;
    return out;
  }
  out.note = "tail does not exceed the bound by an eps-term at any depth up to " +
             std::to_string(m_max);
  return out;
}

MomentRange moment_range(const LogPolynomial& Vtail, int d, int m_max) {
  check_depth(m_max);
  if (d < 1) {
    throw PreconditionError("d must be >= 1");
  }
  if (Vtail.is_zero()) {
    throw NotInverseSquare("tail is identically zero");
  }
  MomentRange out;
  const LogMonomial& lead = Vtail.terms().front();
  const LogMonomial pure(1, -2);
  if (lead.rpow() > -2) {
    if (lead.coeff() > 0) {
      out.c_star = std::numeric_limits<double>::infinity();
      out.boundary_side = BoundarySide::all_finite;
    } else {
      out.boundary_side = BoundarySide::no_threshold;
    }
    out.resolved_side = out.boundary_side;
    return out;
  }
  if (lead.rpow() < -2 || compare_dominance(lead, pure) == std::strong_ordering::greater) {
    throw NotInverseSquare("dominant term " + format(lead) + " is not of order r^(-2)");
  }

  const Exact a2 = Vtail.coefficient_of(pure);
  const Exact disc = Exact((d - 2) * (d - 2)) + 4 * a2;
  if (disc < 0) {
    out.boundary_side = BoundarySide::no_threshold;
    out.resolved_side = out.boundary_side;
    return out;
  }
  out.c_star = critical_moment(d, to_double(a2));

  // At c_star the bound is a2 r^{-2} + L sum_k r^{-2} prod_{j<=k} ln_j^{-1}, L = sqrt(disc)/2.
  LogPolynomial rest = Vtail - LogPolynomial(pure.with_coeff(a2));
  // Anything with an r^{-2} factor that reaches the comparison is a log correction.
  bool by_logs = false;
  for (int k = 1; k <= m_max && !out.resolved_side; ++k) {
    if (rest.is_zero()) {
      break;
    }
    out.depth = k;
    const LogMonomial& top = rest.terms().front();
    by_logs = by_logs || top.rpow() == -2;
    const auto order = compare_dominance(top, ladder_shape(k));
    if (order == std::strong_ordering::less) {
      out.resolved_side = BoundarySide::infinite_at_c_star;
    } else if (order == std::strong_ordering::greater) {
      out.resolved_side =
          top.coeff() > 0 ? BoundarySide::finite_at_c_star : BoundarySide::infinite_at_c_star;
    } else {
      // Same shape: compare the coefficient with L through squares.
      const Exact& a = top.coeff();
      const Exact lhs = 4 * a * a;
      if (a <= 0 || lhs < disc) {
        out.resolved_side = BoundarySide::infinite_at_c_star;
      } else if (lhs > disc) {
        out.resolved_side = BoundarySide::finite_at_c_star;
      } else {
        rest = rest - LogPolynomial(top);
      }
    }
  }
  if (!out.resolved_side) {
    // Ladder exhausted: what is left only settles the absence side.
    if (rest.is_zero() || rest.terms().front().coeff() < 0) {
      out.resolved_side = BoundarySide::infinite_at_c_star;
    }
  }
  if (!out.resolved_side || by_logs) {
    out.boundary_side = BoundarySide::log_corrections_decide;
  } else {
    out.boundary_side = *out.resolved_side;
  }
  return out;
}

nlohmann::json to_json(const TheoremVerdict& v) {
  nlohmann::json j;
  j["verdict"] = to_string(v.verdict);
  j["matched_m"] = v.matched_m ? nlohmann::json(*v.matched_m) : nlohmann::json(nullptr);
  j["matched_eps"] = v.matched_eps ? nlohmann::json(to_string(*v.matched_eps)) : nlohmann::json(nullptr);
  j["witness"] = format(v.witness);
  if (!v.note.empty()) {
    j["note"] = v.note;
  }
  return j;
}

nlohmann::json to_json(const MomentRange& r) {
  nlohmann::json j;
  if (r.c_star && std::isfinite(*r.c_star)) {
    j["c_star"] = *r.c_star;
  } else if (r.c_star) {
    j["c_star"] = "inf";
  } else {
    j["c_star"] = nullptr;
  }
  j["boundary_side"] = to_string(r.boundary_side);
  j["resolved_side"] = r.resolved_side ? nlohmann::json(to_string(*r.resolved_side)) : nlohmann::json(nullptr);
  j["depth"] = r.depth;
  return j;
}

}  // namespace threshold
