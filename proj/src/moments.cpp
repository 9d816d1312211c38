#include "threshold/moments.hpp"

#include "threshold/errors.hpp"

#include <boost/math/quadrature/exp_sinh.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>

#include <cmath>
#include <limits>
#include <numbers>

namespace threshold {

std::string to_string(MomentStatus s) {
  switch (s) {
    case MomentStatus::finite:
      return "finite";
    case MomentStatus::infinite:
      return "infinite";
    case MomentStatus::boundary_inconclusive:
      return "boundary_inconclusive";
  }
  return "?";
}

double sphere_area(int d) {
  if (d < 1) {
    throw PreconditionError("d must be >= 1");
  }
  return 2.0 * std::pow(std::numbers::pi, d / 2.0) / std::tgamma(d / 2.0);
}

namespace {

using boost::math::quadrature::gauss_kronrod;

// prod_j ln_j(r)^{b_j} with t = ln r, i.e. t^{b_1} (ln t)^{b_2} ...
double log_factor(const std::vector<double>& b, double t) {
  double out = 1.0;
  double x = t;
  for (const double bj : b) {
    out *= std::pow(x, bj);
    x = std::log(x);
  }
  return out;
}

}  // namespace

MomentVerdict moment_symbolic(const LogMonomial& psi, const Exact& c_tilde, int d, double region_from) {
  if (c_tilde < 0) {
    throw PreconditionError("c_tilde must be >= 0");
  }
  if (d < 1) {
    throw PreconditionError("d must be >= 1");
  }
  const int depth = psi.depth();
  if (depth >= 4 || !(region_from > iter_exp(depth))) {
    throw DomainError("moment region must start beyond e_" + std::to_string(depth));
  }
  MomentVerdict out;
  out.tail_a = 2 * psi.rpow() + c_tilde + d - 1;
  for (const auto& b : psi.logpows()) {
    out.tail_b.push_back(2 * b);
  }
  const bool finite = integral_converges(out.tail_a, out.tail_b);
  out.status = finite ? MomentStatus::finite : MomentStatus::infinite;
  if (!finite || psi.coeff() == 0) {
    return out;
  }

  const double c2 = std::pow(to_double(psi.coeff()), 2);
  const double omega = sphere_area(d);
  std::vector<double> b;
  for (const auto& x : out.tail_b) {
    b.push_back(to_double(x));
  }
  if (out.tail_a < -1) {
    // t = ln r; the power factor is pulled out at the lower limit.
    const double t0 = std::log(region_from);
    const double s = to_double(out.tail_a) + 1.0;
    auto f = [&](double u) { return std::exp(s * u) * log_factor(b, t0 + u); };
    boost::math::quadrature::exp_sinh<double> integrator;
    double error = 0.0;
    double l1 = 0.0;
    const double I = integrator.integrate(f, 0.0, std::numeric_limits<double>::infinity(), 1e-12,
                                          &error, &l1);
    if (std::isfinite(I) && error <= 1e-8 * std::max(std::fabs(I), 1e-300)) {
      out.numeric_value = omega * c2 * std::exp(s * t0) * I;
    }
    return out;
  }
  // a = -1: closed form only when the last log exponent is the first one below -1.
  const std::size_t k = b.size();
  for (std::size_t j = 0; j + 1 < k; ++j) {
    if (out.tail_b[j] != -1) {
      return out;
    }
  }
  const double lk = iter_log(static_cast<int>(k), region_from);
  const double bk = b.back();
  out.numeric_value = omega * c2 * std::pow(lk, bk + 1.0) / (-bk - 1.0);
  return out;
}

NumericMoment moment_numeric(const RadialFunction& psi, double c_tilde, int d, double split_R,
                             double inner_from) {
  if (!(c_tilde >= 0.0)) {
    throw PreconditionError("c_tilde must be >= 0");
  }
  if (!(inner_from >= psi.valid_from) || !(split_R > inner_from) || !(inner_from >= 0.0)) {
    throw PreconditionError("moment_numeric needs valid_from <= inner_from < split_R");
  }
  const double p = c_tilde + d - 1;
  auto log_density = [&](double r) {
    const auto v = static_cast<double>(psi.value(r));
    if (psi.log_abs && std::fabs(v) < 1e-100) {
      return p * std::log(r) + 2.0 * psi.log_abs(r);
    }
    return p * std::log(r) + 2.0 * std::log(std::fabs(v));
  };
  auto density = [&](double r) {
    if (r <= 0.0) {
      return p == 0.0 ? std::pow(static_cast<double>(psi.value(0.0)), 2) : 0.0;
    }
    return std::exp(log_density(r));
  };

  NumericMoment out;
  double inner = 0.0;
  double lo = inner_from;
  if (lo < 1.0) {
    const double hi = std::min(1.0, split_R);
    inner += gauss_kronrod<double, 61>::integrate(density, lo, hi, 15, 1e-12);
    lo = hi;
  }
  if (split_R > lo) {
    auto in_t = [&](double t) {
      const double r = std::exp(t);
      return std::exp(log_density(r) + t);
    };
    inner += gauss_kronrod<double, 61>::integrate(in_t, std::log(lo), std::log(split_R), 15, 1e-12);
  }
  out.inner = inner;

  // Least squares of log density against log r on [split_R, 4 split_R].
  constexpr int n = 33;
  const double t0 = std::log(split_R);
  const double t1 = std::log(4.0 * split_R);
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  std::vector<double> xs(n), ys(n);
  for (int i = 0; i < n; ++i) {
    xs[i] = t0 + (t1 - t0) * i / (n - 1);
    ys[i] = log_density(std::exp(xs[i]));
    sx += xs[i];
    sy += ys[i];
    sxx += xs[i] * xs[i];
    sxy += xs[i] * ys[i];
  }
  const double slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
  const double icept = (sy - slope * sx) / n;
  double ss = 0.0;
  for (int i = 0; i < n; ++i) {
    const double e = ys[i] - (icept + slope * xs[i]);
    ss += e * e;
  }
  out.fitted_slope = slope;
  out.fit_residual = std::sqrt(ss / n);
  if (!std::isfinite(out.fit_residual) || out.fit_residual > kMaxFitResidual) {
    throw FitError("tail is not close to a power law (rms " + std::to_string(out.fit_residual) + ")");
  }

  const double omega = sphere_area(d);
  if (std::fabs(slope + 1.0) < kBoundarySlopeBand) {
    out.status = MomentStatus::boundary_inconclusive;
    out.value = std::numeric_limits<double>::quiet_NaN();
  } else if (slope >= -1.0) {
    out.status = MomentStatus::infinite;
    out.value = std::numeric_limits<double>::infinity();
  } else {
    out.status = MomentStatus::finite;
    const double at_split = std::exp(icept + slope * t0);
    out.value = omega * (inner + at_split * split_R / (-slope - 1.0));
  }
  return out;
}

AlphaMoment moment_alpha(const Exact& alpha, int d, const Exact& c_tilde, double split_R) {
  AlphaMoment out;
  out.numeric = moment_numeric(psi_alpha(to_double(alpha), d), to_double(c_tilde), d, split_R, 0.0);
  out.status = out.numeric.status;
  out.at_convention_boundary = c_tilde == 2 * (alpha - 1);
  if (out.status == MomentStatus::boundary_inconclusive) {
    out.status = moment_symbolic(psi_alpha_tail(alpha, d), c_tilde, d, 1.0).status;
    out.deferred = true;
  }
  return out;
}

std::optional<double> critical_moment(int d, double a2) {
  const double disc = (d - 2.0) * (d - 2.0) + 4.0 * a2;
  if (disc < 0.0) {
    return std::nullopt;
  }
  return -2.0 + std::sqrt(disc);
}

nlohmann::json to_json(const MomentVerdict& v) {
  nlohmann::json j;
  j["status"] = to_string(v.status);
  j["numeric_value"] = v.numeric_value ? nlohmann::json(*v.numeric_value) : nlohmann::json(nullptr);
  nlohmann::json b = nlohmann::json::array();
  for (const auto& x : v.tail_b) {
    b.push_back(to_string(x));
  }
  j["tail_exponents"] = {{"a", to_string(v.tail_a)}, {"b", b}};
  return j;
}

nlohmann::json to_json(const NumericMoment& v) {
  nlohmann::json j;
  j["status"] = to_string(v.status);
  j["value"] = std::isfinite(v.value) ? nlohmann::json(v.value) : nlohmann::json(nullptr);
  j["inner"] = v.inner;
  j["fitted_slope"] = v.fitted_slope;
  j["fit_residual"] = v.fit_residual;
  return j;
}

}  // namespace threshold
