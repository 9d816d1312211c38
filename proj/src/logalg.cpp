#include "threshold/logalg.hpp"

#include "threshold/errors.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <limits>
#include <sstream>

namespace threshold {

namespace {

void trim_trailing_zeros(std::vector<Exact>& v) {
  while (!v.empty() && v.back() == 0) {
    v.pop_back();
  }
}

std::string fmt_double(double x) {
  std::ostringstream os;
  os.precision(17);
  os << x;
  return os.str();
}

void check_domain(int depth, double r) {
  if (depth >= 4) {
    throw DomainError("depth " + std::to_string(depth) +
                      " needs r > e_" + std::to_string(depth) + ", beyond double range");
  }
  const double floor = iter_exp(depth) * (1.0 + kDomainMargin);
  if (!(r > floor) || !(r > 0.0)) {
    throw DomainError("r = " + fmt_double(r) + " is not above e_" + std::to_string(depth) +
                      " (with margin)");
  }
}

// ln_1..ln_depth given t = ln r; throws when any of them is not positive.
std::vector<double> iterated_logs_from_log(int depth, double log_r) {
  std::vector<double> out;
  out.reserve(static_cast<std::size_t>(depth));
  double l = log_r;
  for (int j = 1; j <= depth; ++j) {
    if (j > 1) {
      l = std::log(l);
    }
    if (!(l > 0.0)) {
      throw DomainError("ln_" + std::to_string(j) + " is not positive at ln r = " +
                        fmt_double(log_r));
    }
    out.push_back(l);
  }
  return out;
}

}  // namespace

double iter_exp(int n) {
  if (n < 0) {
    throw PreconditionError("iter_exp needs n >= 0");
  }
  if (n >= 4) {
    throw OverflowDepth("e_" + std::to_string(n) + " exceeds double range");
  }
  double e = 0.0;
  for (int i = 0; i < n; ++i) {
    e = std::exp(e);
  }
  return e;
}

double iter_log(int n, double r) {
  if (n < 1) {
    throw PreconditionError("iter_log needs n >= 1");
  }
  if (n >= 4 || !(r > iter_exp(n))) {
    throw DomainError("ln_" + std::to_string(n) + " requires r > e_" + std::to_string(n));
  }
  double l = r;
  for (int i = 0; i < n; ++i) {
    l = std::log(l);
  }
  if (!(l > 0.0)) {
    throw DomainError("ln_" + std::to_string(n) + " rounded to a non-positive value");
  }
  return l;
}

double SignedLog::value() const { return sign == 0 ? 0.0 : sign * std::exp(log_abs); }

// ---------------------------------------------------------------------------
// LogMonomial

LogMonomial::LogMonomial(Exact coeff, Exact rpow, std::vector<Exact> logpows)
    : coeff_(std::move(coeff)), rpow_(std::move(rpow)), logpows_(std::move(logpows)) {
  trim_trailing_zeros(logpows_);
}

Exact LogMonomial::logpow(std::size_t j) const {
  return (j >= 1 && j <= logpows_.size()) ? logpows_[j - 1] : Exact(0);
}

LogMonomial LogMonomial::with_coeff(Exact c) const {
  LogMonomial out = *this;
  out.coeff_ = std::move(c);
  return out;
}

double LogMonomial::eval(double r) const {
  check_domain(depth(), r);
  double v = to_double(coeff_) * std::pow(r, to_double(rpow_));
  double l = r;
  for (const auto& b : logpows_) {
    l = std::log(l);
    v *= std::pow(l, to_double(b));
  }
  return v;
}

long double LogMonomial::eval_ld(long double r) const {
  check_domain(depth(), static_cast<double>(r));
  long double v = to_long_double(coeff_) * std::pow(r, to_long_double(rpow_));
  long double l = r;
  for (const auto& b : logpows_) {
    l = std::log(l);
    v *= std::pow(l, to_long_double(b));
  }
  return v;
}

SignedLog LogMonomial::eval_log_scale(double r) const {
  check_domain(depth(), r);
  return eval_log_scale_at_log(std::log(r));
}

SignedLog LogMonomial::eval_log_scale_at_log(double log_r) const {
  if (depth() >= 5) {
    throw DomainError("depth >= 5 needs ln r > e_4, beyond double range");
  }
  const int s = coeff_.sign();
  if (s == 0) {
    return {};
  }
  const auto logs = iterated_logs_from_log(depth(), log_r);
  double acc = std::log(std::fabs(to_double(coeff_))) + to_double(rpow_) * log_r;
  for (std::size_t j = 0; j < logs.size(); ++j) {
    acc += to_double(logpows_[j]) * std::log(logs[j]);
  }
  return {s, acc};
}

std::strong_ordering compare_dominance(const LogMonomial& a, const LogMonomial& b) {
  if (a.rpow() != b.rpow()) {
    return a.rpow() < b.rpow() ? std::strong_ordering::less : std::strong_ordering::greater;
  }
  const auto depth = static_cast<std::size_t>(std::max(a.depth(), b.depth()));
  for (std::size_t j = 1; j <= depth; ++j) {
    const Exact x = a.logpow(j);
    const Exact y = b.logpow(j);
    if (x != y) {
      return x < y ? std::strong_ordering::less : std::strong_ordering::greater;
    }
  }
  return std::strong_ordering::equal;
}

bool same_shape(const LogMonomial& a, const LogMonomial& b) {
  return a.rpow() == b.rpow() && a.logpows() == b.logpows();
}

// ---------------------------------------------------------------------------
// LogPolynomial

LogPolynomial::LogPolynomial(std::vector<LogMonomial> terms) {
  std::stable_sort(terms.begin(), terms.end(), [](const LogMonomial& x, const LogMonomial& y) {
    return compare_dominance(x, y) == std::strong_ordering::greater;
  });
  for (auto& t : terms) {
    if (!terms_.empty() && same_shape(terms_.back(), t)) {
      terms_.back() = terms_.back().with_coeff(terms_.back().coeff() + t.coeff());
      if (terms_.back().coeff() == 0) {
        terms_.pop_back();
      }
    } else if (t.coeff() != 0) {
      terms_.push_back(std::move(t));
    }
  }
}

LogPolynomial::LogPolynomial(LogMonomial term) : LogPolynomial(std::vector<LogMonomial>{std::move(term)}) {}

int LogPolynomial::depth() const {
  int d = 0;
  for (const auto& t : terms_) {
    d = std::max(d, t.depth());
  }
  return d;
}

Exact LogPolynomial::coefficient_of(const LogMonomial& shape) const {
  for (const auto& t : terms_) {
    if (same_shape(t, shape)) {
      return t.coeff();
    }
  }
  return 0;
}

double eval(const LogPolynomial& p, double r) {
  check_domain(p.depth(), r);
  double sum = 0.0;
  for (const auto& t : p.terms()) {
    sum += t.eval(r);
  }
  return sum;
}

namespace {

SignedLog combine(const std::vector<SignedLog>& parts) {
  double top = -std::numeric_limits<double>::infinity();
  for (const auto& s : parts) {
    if (s.sign != 0) {
      top = std::max(top, s.log_abs);
    }
  }
  if (!std::isfinite(top)) {
    return {};
  }
  double sum = 0.0;
  for (const auto& s : parts) {
    if (s.sign != 0) {
      sum += s.sign * std::exp(s.log_abs - top);
    }
  }
  if (sum == 0.0) {
    return {};
  }
  return {sum > 0 ? 1 : -1, top + std::log(std::fabs(sum))};
}

}  // namespace

SignedLog eval_log_scale(const LogPolynomial& p, double r) {
  check_domain(p.depth(), r);
  return eval_log_scale_at_log(p, std::log(r));
}

SignedLog eval_log_scale_at_log(const LogPolynomial& p, double log_r) {
  std::vector<SignedLog> parts;
  parts.reserve(p.terms().size());
  for (const auto& t : p.terms()) {
    parts.push_back(t.eval_log_scale_at_log(log_r));
  }
  return combine(parts);
}

LogPolynomial add(const LogPolynomial& p, const LogPolynomial& q) {
  std::vector<LogMonomial> all = p.terms();
  all.insert(all.end(), q.terms().begin(), q.terms().end());
  return LogPolynomial(std::move(all));
}

LogPolynomial scale(const LogPolynomial& p, const Exact& s) {
  std::vector<LogMonomial> out;
  out.reserve(p.terms().size());
  for (const auto& t : p.terms()) {
    out.push_back(t.with_coeff(t.coeff() * s));
  }
  return LogPolynomial(std::move(out));
}

LogPolynomial subtract(const LogPolynomial& p, const LogPolynomial& q) { return add(p, scale(q, -1)); }

LogPolynomial mul(const LogPolynomial& p, const LogPolynomial& q) {
  std::vector<LogMonomial> out;
  out.reserve(p.terms().size() * q.terms().size());
  for (const auto& x : p.terms()) {
    for (const auto& y : q.terms()) {
      const auto depth = static_cast<std::size_t>(std::max(x.depth(), y.depth()));
      std::vector<Exact> pows(depth);
      for (std::size_t j = 1; j <= depth; ++j) {
        pows[j - 1] = x.logpow(j) + y.logpow(j);
      }
      out.emplace_back(x.coeff() * y.coeff(), x.rpow() + y.rpow(), std::move(pows));
    }
  }
  return LogPolynomial(std::move(out));
}

LogPolynomial differentiate(const LogPolynomial& p) {
  // d/dr ln_j = 1 / (r ln_1 ... ln_{j-1}), so differentiating ln_j^{b_j} lowers
  // the exponents of ln_1..ln_j by one and r's exponent by one.
  std::vector<LogMonomial> out;
  for (const auto& t : p.terms()) {
    const Exact new_rpow = t.rpow() - 1;
    if (t.rpow() != 0) {
      out.emplace_back(t.coeff() * t.rpow(), new_rpow, t.logpows());
    }
    for (std::size_t j = 1; j <= t.logpows().size(); ++j) {
      const Exact& b = t.logpows()[j - 1];
      if (b == 0) {
        continue;
      }
      std::vector<Exact> pows = t.logpows();
      for (std::size_t i = 0; i < j; ++i) {
        pows[i] -= 1;
      }
      out.emplace_back(t.coeff() * b, new_rpow, std::move(pows));
    }
  }
  return LogPolynomial(std::move(out));
}

LogPolynomial log_derivative(const LogMonomial& psi) {
  std::vector<LogMonomial> out;
  out.emplace_back(psi.rpow(), Exact(-1));
  for (std::size_t j = 1; j <= psi.logpows().size(); ++j) {
    out.emplace_back(psi.logpows()[j - 1], Exact(-1), std::vector<Exact>(j, Exact(-1)));
  }
  return LogPolynomial(std::move(out));
}

LogPolynomial radial_laplacian_ratio(const LogMonomial& psi, int d) {
  if (psi.coeff() == 0) {
    throw PreconditionError("radial_laplacian_ratio needs a nonzero monomial");
  }
  // With L = psi'/psi: psi''/psi = L' + L^2.
  const LogPolynomial L = log_derivative(psi);
  const LogPolynomial inv_r(LogMonomial(1, -1));
  return differentiate(L) + L * L + scale(inv_r * L, Exact(d - 1));
}

int asymptotic_sign(const LogPolynomial& p) { return p.is_zero() ? 0 : p.terms().front().coeff().sign(); }

bool integral_converges(const Exact& a, std::span<const Exact> b) {
  if (a != -1) {
    return a < -1;
  }
  // Entries beyond b are zero, i.e. above -1, so an all-(-1) prefix diverges.
  for (const auto& bj : b) {
    if (bj != -1) {
      return bj < -1;
    }
  }
  return false;
}

// ---------------------------------------------------------------------------
// Text format

std::string format(const LogMonomial& m) {
  std::string out = to_string(m.coeff()) + " * r^(" + to_string(m.rpow()) + ")";
  for (std::size_t j = 1; j <= m.logpows().size(); ++j) {
    const Exact& b = m.logpows()[j - 1];
    if (b != 0) {
      out += " * log" + std::to_string(j) + "^(" + to_string(b) + ")";
    }
  }
  return out;
}

std::string format(const LogPolynomial& p) {
  if (p.is_zero()) {
    return "0";
  }
  std::string out;
  for (const auto& t : p.terms()) {
    if (!out.empty()) {
      out += " + ";
    }
    out += format(t);
  }
  return out;
}

namespace {

class Parser {
 public:
  explicit Parser(std::string_view text) : text_(text) {}

  LogPolynomial parse() {
    std::vector<LogMonomial> terms;
    skip_ws();
    if (at_end()) {
      fail("empty expression");
    }
    bool negate = false;
    if (peek() == '+' || peek() == '-') {
      negate = get() == '-';
    }
    terms.push_back(term(negate));
    while (true) {
      skip_ws();
      if (at_end()) {
        break;
      }
      const char op = get();
      if (op != '+' && op != '-') {
        fail(std::string("expected '+' or '-', found '") + op + "'");
      }
      skip_ws();
      bool neg = op == '-';
      // Allow "a + -b" as written by format().
      if (!at_end() && (peek() == '-' || peek() == '+')) {
        if (get() == '-') {
          neg = !neg;
        }
      }
      terms.push_back(term(neg));
    }
    return LogPolynomial(std::move(terms));
  }

 private:
  LogMonomial term(bool negate) {
    Exact coeff = negate ? -1 : 1;
    Exact rpow = 0;
    std::vector<Exact> pows;
    factor(coeff, rpow, pows);
    while (true) {
      skip_ws();
      if (at_end() || peek() != '*') {
        break;
      }
      get();
      factor(coeff, rpow, pows);
    }
    return LogMonomial(coeff, rpow, pows);
  }

  void factor(Exact& coeff, Exact& rpow, std::vector<Exact>& pows) {
    skip_ws();
    if (at_end()) {
      fail("expected a factor");
    }
    const char c = peek();
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') {
      coeff *= number();
      return;
    }
    if (c == '(') {
      get();
      skip_ws();
      bool neg = false;
      if (!at_end() && (peek() == '-' || peek() == '+')) {
        neg = get() == '-';
      }
      Exact v = number();
      skip_ws();
      expect(')');
      coeff *= neg ? Exact(-v) : v;
      return;
    }
    if (consume_word("log") || consume_word("ln")) {
      const std::size_t start = pos_;
      while (!at_end() && std::isdigit(static_cast<unsigned char>(peek()))) {
        get();
      }
      if (pos_ == start) {
        fail("expected iterated-log index after 'log'");
      }
      const int j = std::stoi(std::string(text_.substr(start, pos_ - start)));
      if (j < 1 || j > 64) {
        fail("log index out of range");
      }
      if (pows.size() < static_cast<std::size_t>(j)) {
        pows.resize(static_cast<std::size_t>(j));
      }
      pows[static_cast<std::size_t>(j) - 1] += exponent();
      return;
    }
    if (c == 'r') {
      get();
      rpow += exponent();
      return;
    }
    fail(std::string("unexpected character '") + c + "'");
  }

  Exact exponent() {
    skip_ws();
    if (at_end() || peek() != '^') {
      return 1;
    }
    get();
    skip_ws();
    const bool paren = !at_end() && peek() == '(';
    if (paren) {
      get();
      skip_ws();
    }
    bool neg = false;
    if (!at_end() && (peek() == '-' || peek() == '+')) {
      neg = get() == '-';
      skip_ws();
    }
    Exact v = number();
    if (paren) {
      skip_ws();
      expect(')');
    }
    return neg ? Exact(-v) : v;
  }

  Exact number() {
    const std::size_t start = pos_;
    while (!at_end() && (std::isdigit(static_cast<unsigned char>(peek())) || peek() == '.')) {
      get();
    }
    if (!at_end() && peek() == '/') {
      get();
      while (!at_end() && std::isdigit(static_cast<unsigned char>(peek()))) {
        get();
      }
    }
    if (pos_ == start) {
      fail("expected a number");
    }
    try {
      return parse_exact(text_.substr(start, pos_ - start));
    } catch (const ParseError& e) {
      fail(e.what());
    }
  }

  bool consume_word(std::string_view w) {
    if (text_.substr(pos_, w.size()) == w) {
      pos_ += w.size();
      return true;
    }
    return false;
  }

  void expect(char c) {
    if (at_end() || peek() != c) {
      fail(std::string("expected '") + c + "'");
    }
    get();
  }

  void skip_ws() {
    while (!at_end() && std::isspace(static_cast<unsigned char>(peek()))) {
      ++pos_;
    }
  }
  bool at_end() const { return pos_ >= text_.size(); }
  char peek() const { return text_[pos_]; }
  char get() { return text_[pos_++]; }

  [[noreturn]] void fail(const std::string& msg) const {
    throw ParseError("parse error at column " + std::to_string(pos_ + 1) + ": " + msg + " in '" +
                     std::string(text_) + "'");
  }

  std::string_view text_;
  std::size_t pos_ = 0;
};

}  // namespace

LogPolynomial parse_log_polynomial(std::string_view text) {
  std::string_view trimmed = text;
  while (!trimmed.empty() && std::isspace(static_cast<unsigned char>(trimmed.front()))) trimmed.remove_prefix(1);
  while (!trimmed.empty() && std::isspace(static_cast<unsigned char>(trimmed.back()))) trimmed.remove_suffix(1);
  if (trimmed == "0") {
    return {};
  }
  return Parser(text).parse();
}

}  // namespace threshold
