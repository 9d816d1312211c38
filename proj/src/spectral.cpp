#include "threshold/spectral.hpp"

#include "threshold/errors.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <numbers>
#include <sstream>
#include <stdexcept>

namespace threshold {

namespace {

constexpr double kLn10 = std::numbers::ln10;
constexpr double kLn2 = std::numbers::ln2;

struct State {
  double phi;
  double dphi;
};

// One classical RK4 step of phi'' = q(t) phi.
State rk4(const std::function<double(double)>& q, double t, State y, double h) {
  const double qa = q(t);
  const double qm = q(t + 0.5 * h);
  const double qb = q(t + h);
  const double k1p = y.dphi, k1d = qa * y.phi;
  const double k2p = y.dphi + 0.5 * h * k1d, k2d = qm * (y.phi + 0.5 * h * k1p);
  const double k3p = y.dphi + 0.5 * h * k2d, k3d = qm * (y.phi + 0.5 * h * k2p);
  const double k4p = y.dphi + h * k3d, k4d = qb * (y.phi + h * k3p);
  return {y.phi + h / 6.0 * (k1p + 2 * k2p + 2 * k3p + k4p),
          y.dphi + h / 6.0 * (k1d + 2 * k2d + 2 * k3d + k4d)};
}

// March in t with power-of-two renormalization after every step.
class Marcher {
 public:
  Marcher(std::function<double(double)> q, double t0, State y0, double log_scale0)
      : q_(std::move(q)), t_(t0), y_(y0), log_scale0_(log_scale0) {
    renormalize();
  }

  double t() const { return t_; }
  const State& state() const { return y_; }
  double log_scale() const { return log_scale0_ + static_cast<double>(exp2_) * kLn2; }

  /// Advances by h; returns the crossing parameter in (0, 1] if phi changed sign.
  std::optional<double> step(double h) {
    const State full = rk4(q_, t_, y_, h);
    const State half = rk4(q_, t_ + 0.5 * h, rk4(q_, t_, y_, 0.5 * h), 0.5 * h);
    const double norm = std::fabs(full.phi) + std::fabs(full.dphi);
    const double err =
        std::max(std::fabs(full.phi - half.phi), std::fabs(full.dphi - half.dphi)) / 15.0;
    if (!std::isfinite(norm) || err > kMaxLocalError * norm) {
      std::ostringstream os;
      os << "local error " << err / norm << " exceeds " << kMaxLocalError << " at ln r = " << t_;
      throw StepError(os.str());
    }
    std::optional<double> crossing;
    if ((y_.phi > 0.0 && full.phi <= 0.0) || (y_.phi < 0.0 && full.phi >= 0.0)) {
      crossing = y_.phi / (y_.phi - full.phi);
    }
    y_ = full;
    t_ += h;
    renormalize();
    return crossing;
  }

 private:
  void renormalize() {
    int e = 0;
    std::frexp(std::fabs(y_.phi) + std::fabs(y_.dphi), &e);
    y_.phi = std::ldexp(y_.phi, -e);
    y_.dphi = std::ldexp(y_.dphi, -e);
    exp2_ += e;
  }

  std::function<double(double)> q_;
  double t_;
  State y_;
  double log_scale0_;
  long exp2_ = 0;
};

void check_dimension(int d) {
  if (d < 1) {
    throw PreconditionError("d must be >= 1");
  }
}

int step_count(double t0, double t1, int steps_per_decade) {
  if (steps_per_decade < 1) {
    throw PreconditionError("steps_per_decade must be >= 1");
  }
  const double nominal = kLn10 / steps_per_decade;
  return std::max(1, static_cast<int>(std::ceil((t1 - t0) / nominal - 1e-9)));
}

}  // namespace

RadialSolution shoot_zero_energy(const RadialPotential& V, int d, double r0, double r1, double u0,
                                 double du0, int steps_per_decade) {
  check_dimension(d);
  if (!(r0 > 0.0) || !(r1 > r0)) {
    throw PreconditionError("shooting needs 0 < r0 < r1");
  }
  if (!(r0 > V.valid_from())) {
    throw DomainError("r0 must lie beyond the potential's validity radius");
  }
  if (u0 == 0.0 && du0 == 0.0) {
    throw PreconditionError("initial data must not vanish");
  }
  const double k = (d - 2) / 2.0;
  auto q = [&V, k](double t) { return V.r2_value_at_log(t) + k * k; };
  const double t0 = std::log(r0);
  const double t1 = std::log(r1);
  const int n = step_count(t0, t1, steps_per_decade);
  const double h = (t1 - t0) / n;

  Marcher m(q, t0, {u0, k * u0 + r0 * du0}, k * t0);
  RadialSolution sol;
  auto record = [&](double t) {
    const State& y = m.state();
    const double r = std::exp(t);
    sol.radii.push_back(r);
    sol.log_abs_u.push_back(std::log(std::fabs(y.phi)) + m.log_scale() - k * t);
    sol.sign_u.push_back(y.phi > 0.0 ? 1 : (y.phi < 0.0 ? -1 : 0));
    sol.dlog_u.push_back((y.dphi / y.phi - k) / r);
  };
  record(t0);
  for (int i = 1; i <= n; ++i) {
    const double t = i == n ? t1 : t0 + i * h;
    const double before = m.t();
    if (auto c = m.step(t - before)) {
      sol.nodes.push_back(std::exp(before + *c * (t - before)));
    }
    record(t);
  }
  return sol;
}

RadialSolution sample_solution(const RadialFunction& u, double r0, double r1, int steps_per_decade) {
  if (!(r0 > u.valid_from) || !(r1 > r0)) {
    throw PreconditionError("sampling needs valid_from < r0 < r1");
  }
  const double t0 = std::log(r0);
  const double t1 = std::log(r1);
  const int n = step_count(t0, t1, steps_per_decade);
  RadialSolution sol;
  int prev_sign = 0;
  double prev_r = 0.0;
  long double prev_v = 0.0L;
  for (int i = 0; i <= n; ++i) {
    const double r = i == n ? r1 : std::exp(t0 + (t1 - t0) * i / n);
    const long double v = u.value(r);
    const long double hh = static_cast<long double>(r) * 1e-4L;
    const long double d1 = (u.value(r - 2 * hh) - 8 * u.value(r - hh) + 8 * u.value(r + hh) -
                            u.value(r + 2 * hh)) /
                           (12 * hh);
    const int s = v > 0 ? 1 : (v < 0 ? -1 : 0);
    double la = std::log(std::fabs(static_cast<double>(v)));
    if (u.log_abs && std::fabs(static_cast<double>(v)) < 1e-100) {
      la = u.log_abs(r);
    }
    sol.radii.push_back(r);
    sol.log_abs_u.push_back(la);
    sol.sign_u.push_back(s);
    sol.dlog_u.push_back(static_cast<double>(d1 / v));
    if (i > 0 && s != prev_sign && prev_sign != 0) {
      sol.nodes.push_back(prev_r + (r - prev_r) * static_cast<double>(prev_v / (prev_v - v)));
    }
    prev_sign = s;
    prev_r = r;
    prev_v = v;
  }
  return sol;
}

double decay_exponent(const RadialSolution& sol, double r_lo, double r_hi) {
  for (const double z : sol.nodes) {
    if (z >= r_lo && z <= r_hi) {
      throw NodeInWindow("u changes sign at r = " + std::to_string(z) + " inside the fit window");
    }
  }
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  int n = 0;
  int sign = 0;
  for (std::size_t i = 0; i < sol.radii.size(); ++i) {
    const double r = sol.radii[i];
    if (r < r_lo || r > r_hi) {
      continue;
    }
    if (sign != 0 && sol.sign_u[i] != sign) {
      throw NodeInWindow("u changes sign inside the fit window");
    }
    sign = sol.sign_u[i];
    const double x = std::log(r);
    const double y = sol.log_abs_u[i];
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
    ++n;
  }
  if (n < 2) {
    throw PreconditionError("fit window holds fewer than two samples");
  }
  return -(n * sxy - sx * sy) / (n * sxx - sx * sx);
}

ReducedOperator reduced_operator(const RadialPotential& V, int d, double box_radius, int mesh) {
  check_dimension(d);
  if (!(box_radius > 0.0) || mesh < 2) {
    throw PreconditionError("eigenvalue box needs radius > 0 and mesh >= 2");
  }
  ReducedOperator op;
  const double h = d == 1 ? box_radius / (mesh + 0.5) : box_radius / (mesh + 1);
  const double h2 = h * h;
  const double centrifugal = (d - 1) * (d - 3) / 4.0;
  op.off_diagonal = -1.0 / h2;
  op.r.resize(static_cast<std::size_t>(mesh));
  op.diagonal.resize(static_cast<std::size_t>(mesh));
  for (int i = 0; i < mesh; ++i) {
    const double r = d == 1 ? (i + 0.5) * h : (i + 1) * h;
    const double Q = V.value(r) + centrifugal / (r * r);
    op.r[static_cast<std::size_t>(i)] = r;
    op.diagonal[static_cast<std::size_t>(i)] = 2.0 / h2 + Q;
  }
  if (d == 1) {
    op.diagonal[0] -= 1.0 / h2;  // mirror node v_0 = v_1
  }
  return op;
}

int count_below(const ReducedOperator& op, double E) {
  const double b2 = op.off_diagonal * op.off_diagonal;
  const double tiny = std::numeric_limits<double>::min() / std::numeric_limits<double>::epsilon();
  int count = 0;
  double p = 1.0;
  for (std::size_t i = 0; i < op.diagonal.size(); ++i) {
    p = (op.diagonal[i] - E) - (i == 0 ? 0.0 : b2 / p);
    if (p == 0.0) {
      p = -tiny;
    }
    if (p < 0.0) {
      ++count;
    }
  }
  return count;
}

EigenResult lowest_eigenvalue(const RadialPotential& V, int d, double box_radius, int mesh) {
  const ReducedOperator op = reduced_operator(V, d, box_radius, mesh);
  const double spread = 2.0 * std::fabs(op.off_diagonal);
  double lo = *std::min_element(op.diagonal.begin(), op.diagonal.end()) - spread;
  double hi = *std::max_element(op.diagonal.begin(), op.diagonal.end()) + spread;
  if (!std::isfinite(lo) || !std::isfinite(hi)) {
    throw NoBracket("potential is not finite on the mesh");
  }
  int count_lo = count_below(op, lo);
  int count_hi = count_below(op, hi);
  if (count_lo != 0 || count_hi < 1) {
    throw NoBracket("Gershgorin interval does not bracket the lowest eigenvalue");
  }
  EigenResult out;
  out.box_radius = box_radius;
  constexpr int kMaxIterations = 400;
  while (out.iterations < kMaxIterations) {
    const double mid = 0.5 * (lo + hi);
    if (hi - lo < 1e-10 * std::max(1.0, std::fabs(mid))) {
      out.converged = true;
      break;
    }
    const int c = count_below(op, mid);
    if (c < count_lo || c > count_hi) {
      throw std::logic_error("Sturm count not monotone in E near " + std::to_string(mid));
    }
    if (c >= 1) {
      hi = mid;
      count_hi = c;
    } else {
      lo = mid;
      count_lo = c;
    }
    ++out.iterations;
  }
  out.energy = 0.5 * (lo + hi);
  return out;
}

std::string to_string(Criticality c) {
  switch (c) {
    case Criticality::critical_consistent:
      return "critical_consistent";
    case Criticality::subcritical_consistent:
      return "subcritical_consistent";
    case Criticality::inconclusive:
      return "inconclusive";
  }
  return "?";
}

CriticalityVerdict criticality_probe(const RadialPotential& V, int d, const RadialPotential& bump,
                                     const std::vector<double>& lambdas, const ProbeOptions& options) {
  check_dimension(d);
  if (lambdas.empty()) {
    throw PreconditionError("lambda grid is empty");
  }
  for (std::size_t i = 0; i < lambdas.size(); ++i) {
    if (!(lambdas[i] > 0.0) || (i > 0 && !(lambdas[i] < lambdas[i - 1]))) {
      throw PreconditionError("lambdas must be positive and strictly decreasing");
    }
  }
  const auto& boxes = options.log_box_schedule;
  if (boxes.empty() || !std::is_sorted(boxes.begin(), boxes.end())) {
    throw PreconditionError("box schedule must be non-empty and increasing");
  }
  if (const auto* cb = std::get_if<CallbackPotential>(&bump.form()); cb && !std::isfinite(cb->support_end)) {
    throw PreconditionError("bump must be compactly supported");
  }
  const double t0 = std::log(options.r_init);
  const double t_end = boxes.back();
  if (!(t_end > t0) || !(options.r_init > V.valid_from())) {
    throw PreconditionError("probe start must lie inside the potential's domain and below the boxes");
  }
  const double k = (d - 2) / 2.0;
  std::vector<double> segments{t0};
  for (const double knot : options.knots) {
    if (knot > options.r_init && std::log(knot) < t_end) {
      segments.push_back(std::log(knot));
    }
  }
  segments.push_back(t_end);
  std::sort(segments.begin(), segments.end());

  CriticalityVerdict out;
  out.lambda_grid = lambdas;
  for (const double lambda : lambdas) {
    auto q = [&, lambda](double t) {
      return V.r2_value_at_log(t) - lambda * bump.r2_value_at_log(t) + k * k;
    };
    // Regular branch: u = 1 + (V(0) - lambda bump(0)) r^2 / (2d) near the origin.
    const double r0 = options.r_init;
    const double w0 = V.value(r0) - lambda * bump.value(r0);
    Marcher m(q, t0, {1.0, k + r0 * (w0 * r0 / d)}, k * t0);
    ProbeOutcome o;
    o.lambda = lambda;
    for (std::size_t s = 0; s + 1 < segments.size() && !o.log_node; ++s) {
      const double a = segments[s];
      const double b = segments[s + 1];
      const int n = step_count(a, b, options.steps_per_decade);
      for (int i = 1; i <= n; ++i) {
        const double t = i == n ? b : a + (b - a) * i / n;
        const double before = m.t();
        if (auto c = m.step(t - before)) {
          o.log_node = before + *c * (t - before);
          break;
        }
      }
    }
    if (o.log_node) {
      const auto it = std::upper_bound(boxes.begin(), boxes.end(), *o.log_node);
      o.binds = it != boxes.end();
      if (o.binds) {
        o.log_box = *it;
      }
    } else {
      o.determined = m.state().phi * m.state().dphi >= 0.0;
    }
    out.negative_eigenvalue_at.push_back(o.binds);
    out.outcomes.push_back(o);
  }
  const bool all_bind = std::all_of(out.outcomes.begin(), out.outcomes.end(),
                                    [](const ProbeOutcome& o) { return o.binds; });
  const ProbeOutcome& smallest = out.outcomes.back();
  if (all_bind) {
    out.verdict = Criticality::critical_consistent;
  } else if (!smallest.binds && smallest.determined) {
    out.verdict = Criticality::subcritical_consistent;
  } else {
    out.verdict = Criticality::inconclusive;
  }
  return out;
}

nlohmann::json to_json(const RadialSolution& sol) {
  nlohmann::json j;
  j["radii"] = sol.radii;
  j["log_abs_u"] = sol.log_abs_u;
  j["sign_u"] = sol.sign_u;
  j["dlog_u"] = sol.dlog_u;
  j["nodes"] = sol.nodes;
  return j;
}

nlohmann::json to_json(const EigenResult& e) {
  return {{"energy", e.energy},
          {"converged", e.converged},
          {"iterations", e.iterations},
          {"box_radius", e.box_radius}};
}

nlohmann::json to_json(const CriticalityVerdict& v) {
  nlohmann::json j;
  j["verdict"] = to_string(v.verdict);
  j["lambda_grid"] = v.lambda_grid;
  j["negative_eigenvalue_at"] = v.negative_eigenvalue_at;
  nlohmann::json rows = nlohmann::json::array();
  for (const auto& o : v.outcomes) {
    rows.push_back({{"lambda", o.lambda},
                    {"binds", o.binds},
                    {"determined", o.determined},
                    {"log_node", o.log_node ? nlohmann::json(*o.log_node) : nlohmann::json(nullptr)},
                    {"log_box", o.log_box ? nlohmann::json(*o.log_box) : nlohmann::json(nullptr)}});
  }
  j["outcomes"] = std::move(rows);
  return j;
}

std::string to_csv(const RadialSolution& sol) {
  std::ostringstream os;
  os.precision(17);
  os << "r,log_abs_u,sign_u,dlog_u\n";
  for (std::size_t i = 0; i < sol.radii.size(); ++i) {
    os << sol.radii[i] << ',' << sol.log_abs_u[i] << ',' << sol.sign_u[i] << ',' << sol.dlog_u[i]
       << '\n';
  }
  return os.str();
}

std::string to_csv(const CriticalityVerdict& v) {
  std::ostringstream os;
  os.precision(17);
  os << "lambda,binds,determined,log_node\n";
  for (const auto& o : v.outcomes) {
    os << o.lambda << ',' << (o.binds ? 1 : 0) << ',' << (o.determined ? 1 : 0) << ',';
    if (o.log_node) {
      os << *o.log_node;
    }
    os << '\n';
  }
  return os.str();
}

}  // namespace threshold
