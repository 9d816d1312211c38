#pragma once

// Exact algebra of iterated-logarithm monomials
//
//     coeff * r^a * ln_1(r)^{b_1} * ... * ln_k(r)^{b_k},
//
// with ln_1 = ln and ln_{j+1} = ln(ln_j).  ln_k is positive exactly for
// r > e_k, where e_0 = 0 and e_{n+1} = exp(e_n).  The algebra is closed under
// addition, multiplication and d/dr, which is all that is needed to verify the
// threshold eigen-identities by exact equality.

#include "threshold/exact.hpp"

#include <compare>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace threshold {

/// Relative margin demanded above e_k before numeric evaluation.
inline constexpr double kDomainMargin = 1e-9;

/// e_n as a double. Throws OverflowDepth for n >= 4.
double iter_exp(int n);

/// ln_n(r) for r > e_n. Throws DomainError otherwise.
double iter_log(int n, double r);

/// Sign together with the natural log of the magnitude.
struct SignedLog {
  int sign = 0;          // -1, 0 or +1
  double log_abs = 0.0;  // meaningless when sign == 0

  double value() const;
};

class LogMonomial {
 public:
  LogMonomial() = default;
  LogMonomial(Exact coeff, Exact rpow, std::vector<Exact> logpows = {});

  const Exact& coeff() const { return coeff_; }
  const Exact& rpow() const { return rpow_; }
  const std::vector<Exact>& logpows() const { return logpows_; }

  /// Exponent of ln_j (1-based); zero beyond the stored depth.
  Exact logpow(std::size_t j) const;

  /// Number of iterated logarithms after trailing zeros are dropped.
  int depth() const { return static_cast<int>(logpows_.size()); }

  LogMonomial with_coeff(Exact c) const;

  double eval(double r) const;
  long double eval_ld(long double r) const;
  SignedLog eval_log_scale(double r) const;
  /// Same as eval_log_scale, but takes t = ln r so that radii beyond double range work.
  SignedLog eval_log_scale_at_log(double log_r) const;

  friend bool operator==(const LogMonomial&, const LogMonomial&) = default;

 private:
  Exact coeff_{0};
  Exact rpow_{0};
  std::vector<Exact> logpows_;
};

/// Compares the asymptotic size of two monomial shapes (coefficients ignored):
/// rpow first, then the log exponents lexicographically, zero-padded.
std::strong_ordering compare_dominance(const LogMonomial& a, const LogMonomial& b);

/// True if a and b differ only in their coefficient.
bool same_shape(const LogMonomial& a, const LogMonomial& b);

class LogPolynomial {
 public:
  LogPolynomial() = default;
  explicit LogPolynomial(std::vector<LogMonomial> terms);
  LogPolynomial(LogMonomial term);  // NOLINT(google-explicit-constructor)

  /// Terms in decreasing asymptotic dominance, like terms merged, no zero coefficients.
  const std::vector<LogMonomial>& terms() const { return terms_; }
  bool is_zero() const { return terms_.empty(); }
  int depth() const;

  /// Coefficient of the term with the given shape, zero if absent.
  Exact coefficient_of(const LogMonomial& shape) const;

  friend bool operator==(const LogPolynomial&, const LogPolynomial&) = default;

 private:
  std::vector<LogMonomial> terms_;
};

enum class EvalMode { direct, log_scale };

double eval(const LogPolynomial& p, double r);
SignedLog eval_log_scale(const LogPolynomial& p, double r);
SignedLog eval_log_scale_at_log(const LogPolynomial& p, double log_r);

LogPolynomial add(const LogPolynomial& p, const LogPolynomial& q);
LogPolynomial subtract(const LogPolynomial& p, const LogPolynomial& q);
LogPolynomial scale(const LogPolynomial& p, const Exact& s);
LogPolynomial mul(const LogPolynomial& p, const LogPolynomial& q);

inline LogPolynomial operator+(const LogPolynomial& p, const LogPolynomial& q) { return add(p, q); }
inline LogPolynomial operator-(const LogPolynomial& p, const LogPolynomial& q) { return subtract(p, q); }
inline LogPolynomial operator*(const LogPolynomial& p, const LogPolynomial& q) { return mul(p, q); }
inline LogPolynomial operator*(const Exact& s, const LogPolynomial& p) { return scale(p, s); }

LogPolynomial differentiate(const LogPolynomial& p);

/// psi'/psi as a log-polynomial: a/r + sum_j b_j / (r ln_1 ... ln_j).
LogPolynomial log_derivative(const LogMonomial& psi);

/// (psi'' + (d-1)/r psi') / psi, computed exactly.
LogPolynomial radial_laplacian_ratio(const LogMonomial& psi, int d);

/// Sign of the dominant term; 0 for the zero polynomial.
int asymptotic_sign(const LogPolynomial& p);

/// Bertrand criterion for \int^\infty r^a prod_j ln_j(r)^{b_j} dr.
bool integral_converges(const Exact& a, std::span<const Exact> b);

/// Textual form "coeff * r^(a) * log1^(b1) * log2^(b2) + ...", "0" for zero.
std::string format(const LogMonomial& m);
std::string format(const LogPolynomial& p);
LogPolynomial parse_log_polynomial(std::string_view text);

}  // namespace threshold
