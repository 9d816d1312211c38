#include "threshold/verify.hpp"

#include "threshold/errors.hpp"

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

namespace threshold {

bool certify_symbolic(const LogMonomial& psi, const LogPolynomial& W, int d) {
  return (radial_laplacian_ratio(psi, d) - W).is_zero();
}

std::vector<double> log_grid(double lo, double hi, int n) {
  if (!(lo > 0.0) || !(hi >= lo) || n < 1) {
    throw PreconditionError("log_grid needs 0 < lo <= hi and n >= 1");
  }
  std::vector<double> out(static_cast<std::size_t>(n));
  if (n == 1) {
    out[0] = lo;
    return out;
  }
  const double a = std::log(lo);
  const double b = std::log(hi);
  for (int i = 0; i < n; ++i) {
    out[static_cast<std::size_t>(i)] = std::exp(a + (b - a) * i / (n - 1));
  }
  out.front() = lo;
  out.back() = hi;
  return out;
}

namespace {

// Fourth-order central stencils; f holds samples at r-2h, r-h, r, r+h, r+2h.
struct Derivatives {
  long double first;
  long double second;
};

Derivatives stencil(const long double (&f)[5], long double h) {
  return {(f[0] - 8 * f[1] + 8 * f[3] - f[4]) / (12 * h),
          (-f[0] + 16 * f[1] - 30 * f[2] + 16 * f[3] - f[4]) / (12 * h * h)};
}

double surface_area(int d) {
  return 2.0 * std::pow(std::numbers::pi, d / 2.0) / std::tgamma(d / 2.0);
}

}  // namespace

ResidualReport numeric_residual(const RadialFunction& psi, const RadialPotential& V, int d,
                                const std::vector<double>& grid) {
  if (d < 1) {
    throw PreconditionError("d must be >= 1");
  }
  ResidualReport report;
  report.grid = grid;
  std::sort(report.grid.begin(), report.grid.end());
  for (const double r : report.grid) {
    // Below r = 1 the step stops shrinking (down to r/4) to keep rounding in check.
    const long double h = std::min<long double>(static_cast<long double>(std::max(r, 1.0)) * kStencilRelativeStep,
                                                static_cast<long double>(r) / 4);
    if (!(r - 2 * static_cast<double>(h) > psi.valid_from) || !(r > 0.0)) {
      throw DomainError("residual grid point " + std::to_string(r) +
                        " too close to the edge of the function's domain");
    }
    const long double center = psi.value(r);
    const double v = V.value(r);
    double residual = 0.0;
    if (std::fabs(static_cast<double>(center)) >= kUnderflowGuard || !psi.log_abs) {
      long double f[5];
      for (int k = -2; k <= 2; ++k) {
        f[k + 2] = k == 0 ? center : psi.value(static_cast<long double>(r) + k * h);
      }
      const auto [d1, d2] = stencil(f, h);
      const long double lap = d2 + (d - 1) * d1 / r;
      const long double res = -lap + v * center;
      // Term magnitudes rather than |Delta psi| alone: harmonic pairs have Delta psi = V psi = 0.
      const long double norm = std::fabs(v * center) + std::fabs(d2) + std::fabs((d - 1) * d1 / r);
      residual = static_cast<double>(std::fabs(res) / std::max(norm, 1e-300L));
    } else {
      // Work with psi(r + kh) / psi(r), which stays O(1) even when psi underflows.
      const double base = psi.log_abs(r);
      long double f[5];
      for (int k = -2; k <= 2; ++k) {
        f[k + 2] = k == 0 ? 1.0L
                          : std::exp(static_cast<long double>(
                                psi.log_abs(r + k * static_cast<double>(h)) - base));
      }
      const auto [d1, d2] = stencil(f, h);
      const long double lap = d2 + (d - 1) * d1 / r;
      const long double res = -lap + v;
      const long double norm = std::fabs(static_cast<long double>(v)) + std::fabs(d2) + std::fabs((d - 1) * d1 / r);
      residual = static_cast<double>(std::fabs(res) / std::max(norm, 1e-300L));
    }
    report.per_point.emplace_back(r, residual);
    report.max_relative_residual = std::max(report.max_relative_residual, residual);
  }
  return report;
}

ConvergenceOrder fd_convergence_order(const RadialFunction& psi, double r) {
  auto second = [&](long double h) {
    long double f[5];
    for (int k = -2; k <= 2; ++k) {
      f[k + 2] = psi.value(static_cast<long double>(r) + k * h);
    }
    return stencil(f, h).second;
  };
  const long double h0 = 0.05L * r;
  if (!(r - 2 * static_cast<double>(h0) > psi.valid_from)) {
    throw DomainError("stencil leaves the function's domain");
  }
  const long double a = second(h0);
  const long double b = second(h0 / 2);
  const long double c = second(h0 / 4);
  const long double e1 = std::fabs(a - b);
  const long double e2 = std::fabs(b - c);
  const long double scale = std::max({std::fabs(a), std::fabs(psi.value(r)) / (r * r), 1e-300L});
  ConvergenceOrder out;
  if (e2 <= 1e-15L * scale || e1 <= 1e-15L * scale) {
    out.skipped = true;
    out.note = "differences at rounding level; order not measurable";
    return out;
  }
  out.order = static_cast<double>(std::log2(e1 / e2));
  return out;
}

namespace {

struct Sample {
  double value;     // may underflow to zero
  double log_abs;   // NaN when unavailable
};

Sample sample(const RadialFunction& f, double r) {
  const auto v = static_cast<double>(f.value(r));
  double l = std::numeric_limits<double>::quiet_NaN();
  if (f.log_abs && v > 0.0 && v < kUnderflowGuard) {
    l = f.log_abs(r);
  } else if (v > 0.0) {
    l = std::log(v);
  }
  return {v, l};
}

}  // namespace

ComparisonReport check_comparison(const RadialFunction& v, const RadialFunction& w, int d, double R,
                                  double delta, double alpha_ratio, const std::vector<double>& grid,
                                  const ComparisonOptions& options) {
  if (!(delta > 0.0) || !(alpha_ratio > 1.0) || options.annulus_samples < 2) {
    throw PreconditionError("check_comparison needs delta > 0 and alpha_ratio > 1");
  }
  ComparisonReport report;
  report.annulus = {R, R + delta};

  double ratio = 0.0;
  for (int i = 1; i <= options.annulus_samples; ++i) {
    const double r = R + delta * i / options.annulus_samples;
    const double wv = static_cast<double>(w.value(r));
    if (!(wv > 0.0)) {
      throw PositivityError("w is not positive on the annulus at r = " + std::to_string(r));
    }
    ratio = std::max(ratio, static_cast<double>(v.value(r)) / wv);
  }
  report.constant_C = ratio;

  std::vector<double> sorted = grid;
  std::sort(sorted.begin(), sorted.end());
  const double log_c = std::log(report.constant_C);
  for (const double r : sorted) {
    if (!(r > R)) {
      continue;
    }
    const Sample sv = sample(v, r);
    const Sample sw = sample(w, r);
    if (!(sw.value > 0.0) && !(std::isfinite(sw.log_abs))) {
      throw PositivityError("w is not positive at r = " + std::to_string(r));
    }
    bool violated = false;
    if (sv.value <= 0.0 && !std::isfinite(sv.log_abs)) {
      violated = false;  // v <= 0 < C w
    } else if (sw.value >= kUnderflowGuard && sv.value >= kUnderflowGuard) {
      violated = sv.value > report.constant_C * sw.value * (1.0 + options.tolerance);
    } else {
      violated = sv.log_abs > log_c + sw.log_abs + std::log1p(options.tolerance);
    }
    if (violated) {
      report.violated_at = r;
      break;
    }
  }

  const double omega = surface_area(d);
  for (int k = 0; k <= options.liminf_doublings; ++k) {
    const double N = R * std::ldexp(1.0, k);
    auto integrand = [&](double t) {
      const double r = std::exp(t);
      const auto val = static_cast<double>(v.value(r));
      return val * val * std::exp(d * t);
    };
    const double integral = boost::math::quadrature::gauss_kronrod<double, 61>::integrate(
        integrand, std::log(N), std::log(alpha_ratio * N), 15, 1e-12);
    report.liminf_probe.emplace_back(N, omega * integral / (N * N));
  }
  return report;
}

nlohmann::json to_json(const ResidualReport& report) {
  nlohmann::json j;
  j["max_relative_residual"] = report.max_relative_residual;
  j["grid"] = report.grid;
  nlohmann::json pts = nlohmann::json::array();
  for (const auto& [r, res] : report.per_point) {
    pts.push_back({{"r", r}, {"residual", res}});
  }
  j["per_point"] = std::move(pts);
  return j;
}

nlohmann::json to_json(const ComparisonReport& report) {
  nlohmann::json j;
  j["constant_C"] = report.constant_C;
  j["annulus"] = {report.annulus.first, report.annulus.second};
  j["violated_at"] = report.violated_at ? nlohmann::json(*report.violated_at) : nlohmann::json(nullptr);
  nlohmann::json probe = nlohmann::json::array();
  for (const auto& [N, val] : report.liminf_probe) {
    probe.push_back({{"N", N}, {"value", val}});
  }
  j["liminf_probe"] = std::move(probe);
  return j;
}

std::string to_csv(const ResidualReport& report) {
  std::ostringstream os;
  os.precision(17);
  os << "r,residual\n";
  for (const auto& [r, res] : report.per_point) {
    os << r << ',' << res << '\n';
  }
  return os.str();
}

std::string to_csv(const ComparisonReport& report) {
  std::ostringstream os;
  os.precision(17);
  os << "N,liminf_value\n";
  for (const auto& [N, val] : report.liminf_probe) {
    os << N << ',' << val << '\n';
  }
  return os.str();
}

}  // namespace threshold
