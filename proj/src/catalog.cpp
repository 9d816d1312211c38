#include "threshold/catalog.hpp"

#include "threshold/errors.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace threshold {

void ThresholdStateSpec::validate(bool needs_eps) const {
  if (c < 0) {
    throw PreconditionError("c must be >= 0");
  }
  if (m < 0) {
    throw PreconditionError("m must be >= 0");
  }
  if (d < 1) {
    throw PreconditionError("d must be >= 1");
  }
  if (needs_eps && eps <= 0) {
    throw PreconditionError("eps must be > 0");
  }
}

namespace {

Exact leading_coefficient(const ThresholdStateSpec& s) {
  // (d(4-d) + c^2 + 4c) / 4
  return (Exact(s.d * (4 - s.d)) + s.c * s.c + 4 * s.c) / 4;
}

const LogPolynomial& inverse_square() {
  static const LogPolynomial p(LogMonomial(1, -2));
  return p;
}

const LogPolynomial& one() {
  static const LogPolynomial p(LogMonomial(1, 0));
  return p;
}

// sum_{i=1}^{m} sum_{j=1}^{i} p_i p_j with p_k = prod_{l<=k} ln_l^{-1}
LogPolynomial double_ladder(int m) {
  std::vector<LogMonomial> terms;
  for (int i = 1; i <= m; ++i) {
    for (int j = 1; j <= i; ++j) {
      std::vector<Exact> pows(static_cast<std::size_t>(i), Exact(-1));
      for (int l = 0; l < j; ++l) {
        pows[static_cast<std::size_t>(l)] -= 1;
      }
      terms.emplace_back(1, 0, std::move(pows));
    }
  }
  return LogPolynomial(std::move(terms));
}

}  // namespace

LogPolynomial log_ladder(int m) {
  std::vector<LogMonomial> terms;
  for (int k = 1; k <= m; ++k) {
    terms.emplace_back(1, 0, std::vector<Exact>(static_cast<std::size_t>(k), Exact(-1)));
  }
  return LogPolynomial(std::move(terms));
}

LogMonomial ladder_shape(int m, const Exact& rpow) {
  return LogMonomial(1, rpow, std::vector<Exact>(static_cast<std::size_t>(std::max(m, 0)), Exact(-1)));
}

LogMonomial psi_lower(const ThresholdStateSpec& spec) {
  spec.validate(false);
  return LogMonomial(1, -(spec.c + spec.d) / 2,
                     std::vector<Exact>(static_cast<std::size_t>(spec.m), Exact(-1, 2)));
}

LogMonomial psi_upper(const ThresholdStateSpec& spec) {
  spec.validate(true);
  if (spec.m == 0) {
    return LogMonomial(1, -(spec.c + spec.d + spec.eps) / 2);
  }
  std::vector<Exact> pows(static_cast<std::size_t>(spec.m), Exact(-1, 2));
  pows.back() -= spec.eps / 2;
  return LogMonomial(1, -(spec.c + spec.d) / 2, std::move(pows));
}

LogPolynomial w_lower(const ThresholdStateSpec& spec) {
  spec.validate(false);
  const LogPolynomial S = log_ladder(spec.m);
  const LogPolynomial inner = scale(one(), leading_coefficient(spec)) +
                              scale(S, (spec.c + 2) / 2) + scale(S * S, Exact(1, 4)) +
                              scale(double_ladder(spec.m), Exact(1, 2));
  return inverse_square() * inner;
}

LogPolynomial w_upper(const ThresholdStateSpec& spec) {
  spec.validate(true);
  const Exact& c = spec.c;
  const Exact& eps = spec.eps;
  if (spec.m == 0) {
    const Exact k = leading_coefficient(spec) + eps * (2 * c + 4 + eps) / 4;
    return scale(inverse_square(), k);
  }
  const LogPolynomial S = log_ladder(spec.m);
  const LogPolynomial q(ladder_shape(spec.m, 0));
  const LogPolynomial shifted = S + scale(q, eps);
  const LogPolynomial inner = scale(one(), leading_coefficient(spec)) + scale(S, (c + 2) / 2) +
                              scale(q, (c * eps + 2 * eps) / 2) +
                              scale(shifted * shifted, Exact(1, 4)) +
                              scale(double_ladder(spec.m), Exact(1, 2)) + scale(q * S, eps / 2);
  return inverse_square() * inner;
}

LogPolynomial bound_absence(const ThresholdStateSpec& spec) {
  spec.validate(false);
  const LogPolynomial inner =
      scale(one(), leading_coefficient(spec)) + scale(log_ladder(spec.m), (spec.c + 2) / 2);
  return inverse_square() * inner;
}

LogPolynomial bound_existence(const ThresholdStateSpec& spec) {
  spec.validate(true);
  return bound_absence(spec) +
         LogPolynomial(ladder_shape(spec.m).with_coeff(spec.eps * (spec.c + 2) / 2));
}

// ---------------------------------------------------------------------------
// RadialPotential

RadialPotential::RadialPotential(Form form) : form_(std::move(form)) {
  if (const auto* s = std::get_if<SampledPotential>(&form_)) {
    if (s->r.size() != s->v.size() || s->r.size() < 2) {
      throw PreconditionError("sampled potential needs matching grids with >= 2 points");
    }
    for (std::size_t i = 1; i < s->r.size(); ++i) {
      if (!(s->r[i] > s->r[i - 1])) {
        throw PreconditionError("sampled potential grid must be strictly increasing");
      }
    }
  }
  if (auto* s = std::get_if<SymbolicPotential>(&form_)) {
    const int depth = s->poly.depth();
    if (depth < 4) {
      s->valid_from = std::max(s->valid_from, iter_exp(depth));
    }
    for (const auto& t : s->poly.terms()) {
      CompiledTerm ct;
      ct.sign = t.coeff().sign();
      ct.log_abs_coeff = std::log(std::fabs(to_double(t.coeff())));
      ct.rpow = to_double(t.rpow());
      for (const auto& b : t.logpows()) {
        ct.logpows.push_back(to_double(b));
      }
      compiled_.push_back(std::move(ct));
    }
  }
}

RadialPotential RadialPotential::symbolic(LogPolynomial poly, double valid_from) {
  return RadialPotential(SymbolicPotential{std::move(poly), valid_from});
}

RadialPotential RadialPotential::alpha_family(double alpha, int d) {
  if (d < 1) {
    throw PreconditionError("d must be >= 1");
  }
  return RadialPotential(AlphaFamily{alpha, d});
}

RadialPotential RadialPotential::sampled(std::vector<double> r, std::vector<double> v) {
  return RadialPotential(SampledPotential{std::move(r), std::move(v)});
}

RadialPotential RadialPotential::callback(std::function<double(double)> fn, double support_end,
                                          std::string name) {
  return RadialPotential(CallbackPotential{std::move(fn), support_end, std::move(name)});
}

RadialPotential RadialPotential::zero() {
  return callback([](double) { return 0.0; }, 0.0, "zero");
}

namespace {

double alpha_value(const AlphaFamily& a, double r) {
  const double A = alpha_inverse_square_coefficient(a.alpha, a.d);
  const double B = 1.0 - (a.alpha + a.d / 2.0) * (a.alpha + a.d / 2.0);
  const double s = 1.0 + r * r;
  return A / s + B / (s * s);
}

double sampled_value(const SampledPotential& s, double r) {
  if (r < s.r.front() || r > s.r.back()) {
    throw DomainError("radius outside sampled potential grid");
  }
  const auto it = std::upper_bound(s.r.begin(), s.r.end(), r);
  if (it == s.r.end()) {
    return s.v.back();
  }
  const auto i = static_cast<std::size_t>(it - s.r.begin());
  const double w = (r - s.r[i - 1]) / (s.r[i] - s.r[i - 1]);
  return (1.0 - w) * s.v[i - 1] + w * s.v[i];
}

}  // namespace

double RadialPotential::value(double r) const {
  return std::visit(
      [&](const auto& f) -> double {
        using T = std::decay_t<decltype(f)>;
        if constexpr (std::is_same_v<T, SymbolicPotential>) {
          if (r < f.valid_from) {
            throw DomainError("symbolic potential evaluated below its validity radius");
          }
          return r2_value_at_log(std::log(r)) / (r * r);
        } else if constexpr (std::is_same_v<T, AlphaFamily>) {
          return alpha_value(f, r);
        } else if constexpr (std::is_same_v<T, SampledPotential>) {
          return sampled_value(f, r);
        } else {
          return r >= f.support_end ? 0.0 : f.fn(r);
        }
      },
      form_);
}

double RadialPotential::r2_value_at_log(double log_r) const {
  return std::visit(
      [&](const auto& f) -> double {
        using T = std::decay_t<decltype(f)>;
        if constexpr (std::is_same_v<T, SymbolicPotential>) {
          if (f.valid_from > 0.0 && log_r < std::log(f.valid_from)) {
            throw DomainError("symbolic potential evaluated below its validity radius");
          }
          // Log-scale sum of the compiled terms, times r^2.
          double top = -std::numeric_limits<double>::infinity();
          std::vector<double> logs;
          std::vector<double> parts(compiled_.size());
          for (std::size_t i = 0; i < compiled_.size(); ++i) {
            const auto& t = compiled_[i];
            if (logs.size() < t.logpows.size()) {
              double l = log_r;
              logs.clear();
              for (std::size_t j = 0; j < t.logpows.size(); ++j) {
                if (j > 0) l = std::log(l);
                if (!(l > 0.0)) {
                  throw DomainError("iterated logarithm not positive in symbolic potential");
                }
                logs.push_back(l);
              }
            }
            double acc = t.log_abs_coeff + (t.rpow + 2.0) * log_r;
            for (std::size_t j = 0; j < t.logpows.size(); ++j) {
              acc += t.logpows[j] * std::log(logs[j]);
            }
            parts[i] = acc;
            top = std::max(top, acc);
          }
          if (compiled_.empty()) {
            return 0.0;
          }
          double sum = 0.0;
          for (std::size_t i = 0; i < compiled_.size(); ++i) {
            sum += compiled_[i].sign * std::exp(parts[i] - top);
          }
          return sum * std::exp(top);
        } else if constexpr (std::is_same_v<T, AlphaFamily>) {
          const double A = alpha_inverse_square_coefficient(f.alpha, f.d);
          const double B = 1.0 - (f.alpha + f.d / 2.0) * (f.alpha + f.d / 2.0);
          if (log_r > 0.0) {
            const double x = std::exp(-2.0 * log_r);  // 1/r^2
            return A / (1.0 + x) + B * x / ((1.0 + x) * (1.0 + x));
          }
          const double r2 = std::exp(2.0 * log_r);
          return r2 * alpha_value(f, std::exp(log_r));
        } else if constexpr (std::is_same_v<T, SampledPotential>) {
          const double r = std::exp(log_r);
          return r * r * sampled_value(f, r);
        } else {
          if (log_r >= std::log(f.support_end)) {
            return 0.0;
          }
          if (log_r > 700.0) {
            throw DomainError("callback potential without compact support evaluated beyond double range");
          }
          const double r = std::exp(log_r);
          return r * r * f.fn(r);
        }
      },
      form_);
}

double RadialPotential::valid_from() const {
  return std::visit(
      [](const auto& f) -> double {
        using T = std::decay_t<decltype(f)>;
        if constexpr (std::is_same_v<T, SymbolicPotential>) {
          return f.valid_from;
        } else if constexpr (std::is_same_v<T, SampledPotential>) {
          return f.r.front();
        } else {
          return 0.0;
        }
      },
      form_);
}

std::string RadialPotential::describe() const {
  return std::visit(
      [](const auto& f) -> std::string {
        using T = std::decay_t<decltype(f)>;
        std::ostringstream os;
        if constexpr (std::is_same_v<T, SymbolicPotential>) {
          os << "symbolic(" << format(f.poly) << ")";
        } else if constexpr (std::is_same_v<T, AlphaFamily>) {
          os << "v_alpha(alpha=" << f.alpha << ", d=" << f.d << ")";
        } else if constexpr (std::is_same_v<T, SampledPotential>) {
          os << "sampled(" << f.r.size() << " points)";
        } else {
          os << f.name;
        }
        return os.str();
      },
      form_);
}

RadialPotential v_alpha(double alpha, int d) { return RadialPotential::alpha_family(alpha, d); }

double alpha_inverse_square_coefficient(double alpha, int d) {
  return (4.0 * alpha * alpha - (d - 2.0) * (d - 2.0)) / 4.0;
}

RadialFunction as_radial_function(const LogMonomial& psi) {
  RadialFunction f;
  f.value = [psi](long double r) { return psi.eval_ld(r); };
  f.log_abs = [psi](double r) { return psi.eval_log_scale(r).log_abs; };
  f.valid_from = psi.depth() < 4 ? iter_exp(psi.depth()) * (1.0 + kDomainMargin) : HUGE_VAL;
  f.name = format(psi);
  return f;
}

RadialFunction psi_alpha(double alpha, int d) {
  const long double ex = (2.0L - d) / 4.0L - alpha / 2.0L;
  RadialFunction f;
  f.value = [ex](long double r) { return std::pow(1.0L + r * r, ex); };
  f.log_abs = [ex](double r) { return static_cast<double>(ex) * std::log1p(r * r); };
  f.valid_from = 0.0;
  std::ostringstream os;
  os << "psi_alpha(alpha=" << alpha << ", d=" << d << ")";
  f.name = os.str();
  return f;
}

LogMonomial psi_alpha_tail(const Exact& alpha, int d) {
  return LogMonomial(1, Exact(2 - d, 2) - alpha);
}

LogPolynomial alpha_tail_expansion(const Exact& alpha, int d, int order) {
  if (order < 1 || order > 4) {
    throw PreconditionError("alpha_tail_expansion supports order 1..4");
  }
  const Exact half_d(d, 2);
  const Exact A = (4 * alpha * alpha - Exact((d - 2) * (d - 2))) / 4;
  const Exact B = 1 - (alpha + half_d) * (alpha + half_d);
  // 1/(1+r^2)   = sum_{n>=1} (-1)^{n-1} r^{-2n}
  // 1/(1+r^2)^2 = sum_{n>=2} (-1)^n (n-1) r^{-2n}
  std::vector<LogMonomial> terms;
  for (int n = 1; n <= order; ++n) {
    const int s = (n % 2 == 1) ? 1 : -1;
    terms.emplace_back(A * s - B * s * (n - 1), Exact(-2 * n));
  }
  return LogPolynomial(std::move(terms));
}

LogPolynomial alpha_tail_expansion(double alpha, int d, int order) {
  return alpha_tail_expansion(from_double(alpha), d, order);
}

RadialPotential default_bump() {
  return RadialPotential::callback(
      [](double r) {
        if (r <= 0.9) {
          return 1.0;
        }
        if (r >= 1.0) {
          return 0.0;
        }
        const double s = (r - 0.9) / 0.1;
        return 1.0 - s * s * (3.0 - 2.0 * s);
      },
      1.0, "smoothed_step(r<1)");
}

std::vector<std::string> potential_names() {
  return {"w_lower", "w_upper", "bound_absence", "bound_existence", "v_alpha"};
}

std::optional<LogPolynomial> named_symbolic_potential(std::string_view name,
                                                      const ThresholdStateSpec& spec) {
  if (name == "w_lower") return w_lower(spec);
  if (name == "w_upper") return w_upper(spec);
  if (name == "bound_absence") return bound_absence(spec);
  if (name == "bound_existence") return bound_existence(spec);
  return std::nullopt;
}

std::optional<RadialPotential> named_potential(std::string_view name, const ThresholdStateSpec& spec,
                                               double alpha) {
  if (name == "v_alpha") {
    return v_alpha(alpha, spec.d);
  }
  if (auto p = named_symbolic_potential(name, spec)) {
    return RadialPotential::symbolic(*p, spec.m < 4 ? iter_exp(spec.m) : HUGE_VAL);
  }
  return std::nullopt;
}

}  // namespace threshold
