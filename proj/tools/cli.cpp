#include "cli.hpp"

#include "threshold/catalog.hpp"
#include "threshold/classify.hpp"
#include "threshold/errors.hpp"
#include "threshold/logalg.hpp"
#include "threshold/moments.hpp"
#include "threshold/spectral.hpp"
#include "threshold/verify.hpp"

#include "CLI11.hpp"
#include "json.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <list>
#include <map>
#include <sstream>

namespace threshold::cli {

using nlohmann::json;

namespace {

struct Common {
  std::string format;
  std::string output;
  std::string config;
  long seed = 0;
};

struct Report {
  std::string text;
  int code = kExitOk;
};

std::string num(double x) {
  std::ostringstream os;
  os.precision(15);
  os << x;
  return os.str();
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string cur;
  std::istringstream is(s);
  while (std::getline(is, cur, sep)) {
    out.push_back(cur);
  }
  return out;
}

std::vector<double> parse_doubles(const std::string& s) {
  std::vector<double> out;
  for (const auto& part : split(s, ',')) {
    std::size_t used = 0;
    double v = 0.0;
    try {
      v = std::stod(part, &used);
    } catch (const std::exception&) {
      throw PreconditionError("not a number: '" + part + "'");
    }
    if (used != part.size()) {
      throw PreconditionError("not a number: '" + part + "'");
    }
    out.push_back(v);
  }
  if (out.empty()) {
    throw PreconditionError("empty number list");
  }
  return out;
}

std::string dump(const json& j) { return j.dump(2) + "\n"; }

Common& add_common(CLI::App* sub, std::list<Common>& commons, const std::string& default_format) {
  Common& common = commons.emplace_back();
  common.format = default_format;
  sub->add_option("--format", common.format, "json or csv")
      ->check(CLI::IsMember({"json", "csv"}))
      ->capture_default_str();
  sub->add_option("--output", common.output, "write the report to this file instead of stdout");
  sub->add_option("--config", common.config, "flat key=value file; flags given on the command line win");
  sub->add_option("--seed", common.seed, "seed for randomized steps (all current commands are deterministic)");
  return common;
}

// ---------------------------------------------------------------------------
// certify

struct CertifyArgs {
  std::string family = "lower";
  std::string c = "0";
  int m = 0;
  int d = 3;
  std::string eps;
  int points = 200;
};

Report cmd_certify(const CertifyArgs& a, const Common& common) {
  const bool upper = a.family == "upper";
  ThresholdStateSpec spec{parse_exact(a.c), a.m, a.d, a.eps.empty() ? Exact(0) : parse_exact(a.eps)};
  spec.validate(upper);
  const LogMonomial psi = upper ? psi_upper(spec) : psi_lower(spec);
  const LogPolynomial W = upper ? w_upper(spec) : w_lower(spec);
  const bool exact = certify_symbolic(psi, W, spec.d);

  json j;
  j["command"] = "certify";
  j["family"] = a.family;
  j["c"] = to_string(spec.c);
  j["m"] = spec.m;
  j["d"] = spec.d;
  j["eps"] = upper ? json(to_string(spec.eps)) : json(nullptr);
  j["psi"] = format(psi);
  j["W"] = format(W);
  j["exact"] = exact;

  std::optional<ResidualReport> numeric;
  if (spec.m < 4 && a.points >= 2) {
    const double e_m = iter_exp(spec.m);
    const double lo = 10.0 * std::max(1.0, e_m);
    const double hi = 100.0 * lo;
    numeric = numeric_residual(as_radial_function(psi), RadialPotential::symbolic(W, e_m), spec.d,
                               log_grid(lo, hi, a.points));
    j["numeric"] = {{"window", {lo, hi}}, {"max_relative_residual", numeric->max_relative_residual}};
  } else {
    j["numeric"] = nullptr;
  }

  Report r;
  r.code = exact ? kExitOk : kExitCheckFailed;
  if (common.format == "csv") {
    r.text = numeric ? to_csv(*numeric) : "r,residual\n";
  } else {
    r.text = dump(j);
  }
  return r;
}

// ---------------------------------------------------------------------------
// moments

struct MomentsArgs {
  std::string alpha;
  std::string family;
  std::string c = "0";
  int m = 0;
  int d = 3;
  std::string eps;
  std::string ctilde;
  double split = 1e3;
};

Report cmd_moments(const MomentsArgs& a, const Common& common) {
  if (a.alpha.empty() == a.family.empty()) {
    throw PreconditionError("give exactly one of --alpha or --family");
  }
  if (a.d < 1) {
    throw PreconditionError("d must be >= 1");
  }
  const std::vector<Exact> grid = expand_grid(a.ctilde);
  for (const auto& ct : grid) {
    if (ct < 0) {
      throw PreconditionError("c_tilde must be >= 0");
    }
  }

  json rows = json::array();
  std::ostringstream csv;
  csv << "alpha,d,c_tilde,status,value,note\n";
  auto emit = [&](const std::string& alpha, const Exact& ct, MomentStatus status,
                  std::optional<double> value, const std::string& note) {
    rows.push_back({{"alpha", alpha.empty() ? json(nullptr) : json(alpha)},
                    {"d", a.d},
                    {"c_tilde", to_double(ct)},
                    {"status", to_string(status)},
                    {"value", value ? json(*value) : json(nullptr)},
                    {"note", note}});
    csv << alpha << ',' << a.d << ',' << num(to_double(ct)) << ',' << to_string(status) << ','
        << (value ? num(*value) : std::string()) << ',' << note << '\n';
  };

  if (!a.alpha.empty()) {
    const Exact alpha = parse_exact(a.alpha);
    for (const auto& ct : grid) {
      const AlphaMoment mo = moment_alpha(alpha, a.d, ct, a.split);
      std::string note;
      if (mo.deferred) note = "symbolic_tail";
      if (mo.at_convention_boundary) note += note.empty() ? "equality_convention" : ";equality_convention";
      std::optional<double> value;
      if (mo.status == MomentStatus::finite && std::isfinite(mo.numeric.value)) {
        value = mo.numeric.value;
      }
      emit(num(to_double(alpha)), ct, mo.status, value, note);
    }
  } else {
    const bool upper = a.family == "upper";
    if (!upper && a.family != "lower") {
      throw PreconditionError("family must be lower or upper");
    }
    ThresholdStateSpec spec{parse_exact(a.c), a.m, a.d, a.eps.empty() ? Exact(0) : parse_exact(a.eps)};
    spec.validate(upper);
    if (spec.m >= 4) {
      throw PreconditionError("m must be <= 3 for moment sweeps");
    }
    const LogMonomial psi = upper ? psi_upper(spec) : psi_lower(spec);
    const double region = iter_exp(spec.m) + 1.0;
    for (const auto& ct : grid) {
      const MomentVerdict v = moment_symbolic(psi, ct, a.d, region);
      emit("", ct, v.status, v.numeric_value, ct == spec.c ? "c_tilde_equals_c" : "");
    }
  }

  Report r;
  if (common.format == "json") {
    r.text = dump({{"command", "moments"}, {"rows", rows}});
  } else {
    r.text = csv.str();
  }
  return r;
}

// ---------------------------------------------------------------------------
// classify

struct ClassifyArgs {
  std::string tail;
  std::string c = "0";
  int d = 3;
  int m_max = kDefaultMaxDepth;
  bool assert_critical = false;
};

Report cmd_classify(const ClassifyArgs& a, const Common& common) {
  const LogPolynomial tail = parse_log_polynomial(a.tail);
  const Exact c = parse_exact(a.c);
  if (c < 0) {
    throw PreconditionError("c must be >= 0");
  }
  if (a.d < 1 || a.m_max < 0) {
    throw PreconditionError("d must be >= 1 and m-max >= 0");
  }
  const TheoremVerdict absence = decide_absence(tail, c, a.d, a.m_max);
  const TheoremVerdict existence = decide_existence(tail, c, a.d, a.m_max, a.assert_critical);
  const TheoremVerdict& chosen =
      absence.verdict == Verdict::absence_applies ? absence
      : existence.verdict == Verdict::existence_applies ? existence
                                                        : absence;
  json j = to_json(chosen);
  j["command"] = "classify";
  j["tail"] = format(tail);
  j["c"] = to_string(c);
  j["d"] = a.d;
  j["critical_asserted"] = a.assert_critical;
  j["absence"] = to_json(absence);
  j["existence"] = to_json(existence);
  try {
    j["moment_range"] = to_json(moment_range(tail, a.d, a.m_max));
  } catch (const NotInverseSquare& e) {
    j["moment_range"] = {{"error", e.what()}};
  }

  Report r;
  if (common.format == "csv") {
    std::ostringstream os;
    os << "verdict,matched_m,matched_eps,witness\n"
       << to_string(chosen.verdict) << ','
       << (chosen.matched_m ? std::to_string(*chosen.matched_m) : std::string()) << ','
       << (chosen.matched_eps ? to_string(*chosen.matched_eps) : std::string()) << ",\""
       << format(chosen.witness) << "\"\n";
    r.text = os.str();
  } else {
    r.text = dump(j);
  }
  return r;
}

// ---------------------------------------------------------------------------
// shoot

struct ShootArgs {
  std::string alpha = "2";
  int d = 3;
  double from = 1.0;
  double to = 100.0;
  int steps_per_decade = kDefaultStepsPerDecade;
  double tolerance = 1e-6;
};

Report cmd_shoot(const ShootArgs& a, const Common& common) {
  if (a.d < 1 || !(a.from > 0.0) || !(a.to > a.from)) {
    throw PreconditionError("shoot needs d >= 1 and 0 < from < to");
  }
  const double alpha = to_double(parse_exact(a.alpha));
  const RadialFunction psi = psi_alpha(alpha, a.d);
  // Exact data: psi = (1+r^2)^e, psi' = 2 e r (1+r^2)^{e-1}.
  const long double e = (2.0L - a.d) / 4.0L - alpha / 2.0L;
  const long double r0 = a.from;
  const auto u0 = static_cast<double>(std::pow(1.0L + r0 * r0, e));
  const auto du0 = static_cast<double>(2.0L * e * r0 * std::pow(1.0L + r0 * r0, e - 1.0L));
  const RadialSolution sol =
      shoot_zero_energy(v_alpha(alpha, a.d), a.d, a.from, a.to, u0, du0, a.steps_per_decade);

  double worst = 0.0;
  std::ostringstream csv;
  csv.precision(17);
  csv << "r,log_abs_u,log_abs_exact,relative_deviation\n";
  for (std::size_t i = 0; i < sol.radii.size(); ++i) {
    const double exact = psi.log_abs(sol.radii[i]);
    const double dev = sol.sign_u[i] > 0 ? std::fabs(std::expm1(sol.log_abs_u[i] - exact)) : HUGE_VAL;
    worst = std::max(worst, dev);
    csv << sol.radii[i] << ',' << sol.log_abs_u[i] << ',' << exact << ',' << dev << '\n';
  }
  const bool passed = worst < a.tolerance;

  json j;
  j["command"] = "shoot";
  j["alpha"] = alpha;
  j["d"] = a.d;
  j["from"] = a.from;
  j["to"] = a.to;
  j["steps_per_decade"] = a.steps_per_decade;
  j["points"] = sol.radii.size();
  j["max_relative_deviation"] = worst;
  j["tolerance"] = a.tolerance;
  j["passed"] = passed;
  if (a.to / 10.0 >= a.from) {
    try {
      j["decay_exponent"] = decay_exponent(sol, a.to / 10.0, a.to);
    } catch (const NodeInWindow& ex) {
      j["decay_exponent"] = nullptr;
    }
    j["expected_decay_exponent"] = (a.d - 2) / 2.0 + alpha;
  }

  Report r;
  r.code = passed ? kExitOk : kExitCheckFailed;
  r.text = common.format == "csv" ? csv.str() : dump(j);
  return r;
}

// ---------------------------------------------------------------------------
// probe

struct ProbeArgs {
  std::string potential = "v_alpha";
  std::string alpha = "1";
  int d = 3;
  std::string lambdas = "1,0.1,0.01,0.001";
  std::string boxes;
  int steps_per_decade = 256;
};

Report cmd_probe(const ProbeArgs& a, const Common& common) {
  if (a.d < 1) {
    throw PreconditionError("d must be >= 1");
  }
  if (a.potential != "v_alpha" && a.potential != "zero") {
    throw PreconditionError("potential must be v_alpha or zero");
  }
  const double alpha = to_double(parse_exact(a.alpha));
  const RadialPotential V = a.potential == "zero" ? RadialPotential::zero() : v_alpha(alpha, a.d);
  ProbeOptions opts;
  opts.steps_per_decade = a.steps_per_decade;
  if (!a.boxes.empty()) {
    opts.log_box_schedule = parse_doubles(a.boxes);
  }
  const CriticalityVerdict v = criticality_probe(V, a.d, default_bump(), parse_doubles(a.lambdas), opts);

  json j = to_json(v);
  j["command"] = "probe";
  j["potential"] = V.describe();
  j["d"] = a.d;
  j["log_box_schedule"] = opts.log_box_schedule;
  Report r;
  r.text = common.format == "csv" ? to_csv(v) : dump(j);
  return r;
}

// ---------------------------------------------------------------------------
// example-alpha

struct ExampleArgs {
  std::string alphas = "-1,0,1,2,3";
  int d = 3;
};

Report cmd_example_alpha(const ExampleArgs& a, const Common& common) {
  if (a.d < 1) {
    throw PreconditionError("d must be >= 1");
  }
  json rows = json::array();
  std::ostringstream csv;
  csv << "alpha,d,a2,residual,l2_status,l2_expected,c_star,moment_flip,probe,probe_expected,"
         "classify_consistent,ok\n";
  bool all_ok = true;
  for (const auto& text : split(a.alphas, ',')) {
    const Exact alpha = parse_exact(text);
    const double al = to_double(alpha);
    const double a2 = alpha_inverse_square_coefficient(al, a.d);

    const double residual =
        numeric_residual(psi_alpha(al, a.d), v_alpha(al, a.d), a.d, log_grid(0.5, 50.0, 200))
            .max_relative_residual;
    const MomentStatus l2 = moment_alpha(alpha, a.d, Exact(0)).status;
    const MomentStatus l2_expected = alpha > 1 ? MomentStatus::finite : MomentStatus::infinite;
    const std::optional<double> c_star = critical_moment(a.d, a2);

    std::optional<double> flip;
    bool classify_ok = true;
    if (alpha > 1) {
      const Exact threshold = 2 * (alpha - 1);
      for (Exact ct = 0; ct <= threshold + 1; ct += Exact(1, 10)) {
        if (moment_alpha(alpha, a.d, ct).status != MomentStatus::finite) {
          flip = to_double(ct);
          break;
        }
      }
      const LogPolynomial tail = alpha_tail_expansion(alpha, a.d);
      for (Exact c = 0; c <= threshold + 1; c += Exact(1, 10)) {
        const bool want_absence = c >= threshold;
        const bool got = want_absence
                             ? decide_absence(tail, c, a.d).verdict == Verdict::absence_applies
                             : decide_existence(tail, c, a.d, kDefaultMaxDepth, true).verdict ==
                                   Verdict::existence_applies;
        classify_ok = classify_ok && got;
      }
    }

    const CriticalityVerdict probe =
        criticality_probe(v_alpha(al, a.d), a.d, default_bump(), {1.0, 0.1, 0.01, 0.001});
    const Criticality probe_expected =
        alpha >= 0 ? Criticality::critical_consistent : Criticality::subcritical_consistent;

    bool ok = residual < 1e-8 && l2 == l2_expected && probe.verdict == probe_expected && classify_ok;
    if (alpha > 1) {
      ok = ok && flip && c_star && std::fabs(*flip - *c_star) <= 0.1 + 1e-12;
    }
    all_ok = all_ok && ok;

    rows.push_back({{"alpha", al},
                    {"d", a.d},
                    {"a2", a2},
                    {"residual", residual},
                    {"l2_status", to_string(l2)},
                    {"l2_expected", to_string(l2_expected)},
                    {"c_star", c_star ? json(*c_star) : json(nullptr)},
                    {"moment_flip", flip ? json(*flip) : json(nullptr)},
                    {"probe", to_string(probe.verdict)},
                    {"probe_expected", to_string(probe_expected)},
                    {"classify_consistent", classify_ok},
                    {"ok", ok}});
    csv << num(al) << ',' << a.d << ',' << num(a2) << ',' << num(residual) << ',' << to_string(l2)
        << ',' << to_string(l2_expected) << ',' << (c_star ? num(*c_star) : std::string()) << ','
        << (flip ? num(*flip) : std::string()) << ',' << to_string(probe.verdict) << ','
        << to_string(probe_expected) << ',' << (classify_ok ? "true" : "false") << ','
        << (ok ? "true" : "false") << '\n';
  }
  Report r;
  r.code = all_ok ? kExitOk : kExitCheckFailed;
  r.text = common.format == "csv" ? csv.str() : dump({{"command", "example-alpha"}, {"rows", rows}});
  return r;
}

// ---------------------------------------------------------------------------
// config file and output

std::string option_name(const std::string& arg) {
  if (arg.rfind("--", 0) != 0) {
    return {};
  }
  return arg.substr(2, arg.find('=') == std::string::npos ? std::string::npos : arg.find('=') - 2);
}

std::vector<std::string> merge_config(const std::vector<std::string>& args) {
  std::string path;
  for (std::size_t i = 0; i < args.size(); ++i) {
    if (args[i] == "--config" && i + 1 < args.size()) {
      path = args[i + 1];
    } else if (args[i].rfind("--config=", 0) == 0) {
      path = args[i].substr(9);
    }
  }
  if (path.empty()) {
    return args;
  }
  std::ifstream in(path);
  if (!in) {
    throw PreconditionError("cannot read config file " + path);
  }
  std::vector<std::string> given;
  for (const auto& arg : args) {
    if (auto name = option_name(arg); !name.empty()) {
      given.push_back(name);
    }
  }
  std::vector<std::string> extra;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto first = line.find_first_not_of(" \t");
    if (first == std::string::npos || line[first] == '#') {
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw PreconditionError(path + ":" + std::to_string(lineno) + ": expected key=value");
    }
    auto trim = [](std::string s) {
      const auto b = s.find_first_not_of(" \t\r");
      const auto e = s.find_last_not_of(" \t\r");
      return b == std::string::npos ? std::string() : s.substr(b, e - b + 1);
    };
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (key == "config" || std::find(given.begin(), given.end(), key) != given.end()) {
      continue;
    }
    if (value == "true") {
      extra.push_back("--" + key);
    } else if (value != "false") {
      extra.push_back("--" + key);
      extra.push_back(value);
    }
  }
  // Options belong to the subcommand, so they go right after it.
  std::vector<std::string> merged;
  bool inserted = false;
  for (const auto& arg : args) {
    merged.push_back(arg);
    if (!inserted && arg.rfind("-", 0) != 0) {
      merged.insert(merged.end(), extra.begin(), extra.end());
      inserted = true;
    }
  }
  return merged;
}

void write_atomically(const std::string& path, const std::string& text) {
  const std::filesystem::path target(path);
  std::filesystem::path tmp = target;
  tmp += ".partial";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) {
      throw PreconditionError("cannot open " + path + " for writing");
    }
    out << text;
    if (!out) {
      std::filesystem::remove(tmp);
      throw PreconditionError("failed writing " + path);
    }
  }
  std::filesystem::rename(tmp, target);
}

}  // namespace

std::vector<Exact> expand_grid(const std::string& spec) {
  std::vector<Exact> out;
  if (spec.find(':') != std::string::npos) {
    const auto parts = split(spec, ':');
    if (parts.size() != 3) {
      throw PreconditionError("grid must be start:stop:step");
    }
    const Exact start = parse_exact(parts[0]);
    const Exact stop = parse_exact(parts[1]);
    const Exact step = parse_exact(parts[2]);
    if (step <= 0) {
      throw PreconditionError("grid step must be > 0");
    }
    for (Exact v = start; v < stop; v += step) {
      out.push_back(v);
    }
  } else {
    for (const auto& part : split(spec, ',')) {
      out.push_back(parse_exact(part));
    }
  }
  if (out.empty()) {
    throw PreconditionError("grid '" + spec + "' is empty");
  }
  return out;
}

int run_cli(const std::vector<std::string>& raw_args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Zero-energy threshold states: certification, moments, classification, spectra"};
  app.require_subcommand(1);
  app.footer(
      "Rational flags (c, eps, alpha, c_tilde) accept p/q or decimals; decimals are\n"
      "replaced by the nearest fraction with denominator <= 1000000.\n"
      "Exit codes: 0 success, 1 check failed, 2 usage or precondition error.");

  // One set of common options per subcommand so that defaults stay separate.
  std::list<Common> commons;
  const Common* active = nullptr;
  std::function<Report()> action;

  CertifyArgs certify;
  auto* c1 = app.add_subcommand("certify", "check Delta psi = W psi for a catalog state, exactly and numerically");
  c1->add_option("--family", certify.family)->check(CLI::IsMember({"lower", "upper"}))->capture_default_str();
  c1->add_option("--c", certify.c)->capture_default_str();
  c1->add_option("--m", certify.m)->capture_default_str();
  c1->add_option("--d", certify.d)->capture_default_str();
  c1->add_option("--eps", certify.eps, "required for the upper family");
  c1->add_option("--points", certify.points, "grid points of the numeric residual")->capture_default_str();
  auto& common1 = add_common(c1, commons, "json");
  c1->callback([&] {
    active = &common1;
    action = [&] { return cmd_certify(certify, common1); };
  });

  MomentsArgs moments;
  auto* c2 = app.add_subcommand("moments", "moment finiteness sweep over c_tilde");
  c2->add_option("--alpha", moments.alpha, "psi_alpha of the alpha family");
  c2->add_option("--family", moments.family, "lower or upper catalog state");
  c2->add_option("--c", moments.c)->capture_default_str();
  c2->add_option("--m", moments.m)->capture_default_str();
  c2->add_option("--d", moments.d)->capture_default_str();
  c2->add_option("--eps", moments.eps);
  c2->add_option("--ctilde", moments.ctilde, "start:stop:step (stop excluded), a,b,c, or one value")
      ->required();
  c2->add_option("--split", moments.split, "start of the fitted tail window")->capture_default_str();
  auto& common2 = add_common(c2, commons, "csv");
  c2->callback([&] {
    active = &common2;
    action = [&] { return cmd_moments(moments, common2); };
  });

  ClassifyArgs classify;
  auto* c3 = app.add_subcommand("classify", "apply the absence/existence criteria to a symbolic tail");
  c3->add_option("--tail", classify.tail, "e.g. \"3/4 * r^(-2) + r^(-2) * log1^(-1)\"")->required();
  c3->add_option("--c", classify.c)->capture_default_str();
  c3->add_option("--d", classify.d)->capture_default_str();
  c3->add_option("--m-max", classify.m_max)->capture_default_str();
  c3->add_flag("--assert-critical", classify.assert_critical, "the caller vouches that V is critical");
  auto& common3 = add_common(c3, commons, "json");
  c3->callback([&] {
    active = &common3;
    action = [&] { return cmd_classify(classify, common3); };
  });

  ShootArgs shoot;
  auto* c4 = app.add_subcommand("shoot", "integrate the zero-energy equation for V_alpha and compare with psi_alpha");
  c4->add_option("--alpha", shoot.alpha)->capture_default_str();
  c4->add_option("--d", shoot.d)->capture_default_str();
  c4->add_option("--from", shoot.from)->capture_default_str();
  c4->add_option("--to", shoot.to)->capture_default_str();
  c4->add_option("--steps-per-decade", shoot.steps_per_decade)->capture_default_str();
  c4->add_option("--tolerance", shoot.tolerance)->capture_default_str();
  auto& common4 = add_common(c4, commons, "json");
  c4->callback([&] {
    active = &common4;
    action = [&] { return cmd_shoot(shoot, common4); };
  });

  ProbeArgs probe;
  auto* c5 = app.add_subcommand("probe", "test whether small attractive bumps bind");
  c5->add_option("--potential", probe.potential)->check(CLI::IsMember({"v_alpha", "zero"}))->capture_default_str();
  c5->add_option("--alpha", probe.alpha)->capture_default_str();
  c5->add_option("--d", probe.d)->capture_default_str();
  c5->add_option("--lambdas", probe.lambdas, "strictly decreasing, comma separated")->capture_default_str();
  c5->add_option("--boxes", probe.boxes, "ln of the box radii, comma separated");
  c5->add_option("--steps-per-decade", probe.steps_per_decade)->capture_default_str();
  auto& common5 = add_common(c5, commons, "json");
  c5->callback([&] {
    active = &common5;
    action = [&] { return cmd_probe(probe, common5); };
  });

  ExampleArgs example;
  auto* c6 = app.add_subcommand("example-alpha", "reproduce the V_alpha lemma and print a summary table");
  c6->add_option("--alphas", example.alphas)->capture_default_str();
  c6->add_option("--d", example.d)->capture_default_str();
  auto& common6 = add_common(c6, commons, "csv");
  c6->callback([&] {
    active = &common6;
    action = [&] { return cmd_example_alpha(example, common6); };
  });

  try {
    std::vector<std::string> args = merge_config(raw_args);
    std::reverse(args.begin(), args.end());
    try {
      app.parse(args);
    } catch (const CLI::ParseError& e) {
      const int code = app.exit(e, out, err);
      return code == 0 ? kExitOk : kExitUsage;
    }
    const Report report = action();
    if (active->output.empty()) {
      out << report.text;
    } else {
      write_atomically(active->output, report.text);
    }
    return report.code;
  } catch (const std::invalid_argument& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::domain_error& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::overflow_error& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const NotInverseSquare& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::exception& e) {
    err << "check failed: " << e.what() << '\n';
    return kExitCheckFailed;
  }
}

}  // namespace threshold::cli
