#include "threshold/exact.hpp"

#include "threshold/errors.hpp"

#include <charconv>
#include <cmath>
#include <string>

namespace threshold {

namespace bmp = boost::multiprecision;

double to_double(const Exact& x) { return x.convert_to<double>(); }

long double to_long_double(const Exact& x) {
  // Long double conversion goes through numerator/denominator separately; both
  // are small for every fraction this library produces.
  return bmp::numerator(x).convert_to<long double>() /
         bmp::denominator(x).convert_to<long double>();
}

int sign(const Exact& x) { return x.sign(); }

Exact from_double(double x, long max_den) {
  if (!std::isfinite(x)) {
    throw PreconditionError("cannot convert non-finite value to a fraction");
  }
  const bool negative = x < 0;
  double rest = std::fabs(x);

  // Convergents h/k of the continued fraction of |x|.
  bmp::cpp_int h_prev = 1, h = static_cast<long long>(std::floor(rest));
  bmp::cpp_int k_prev = 0, k = 1;
  double frac = rest - std::floor(rest);
  for (int iter = 0; iter < 64 && frac > 1e-15; ++iter) {
    rest = 1.0 / frac;
    const auto a = static_cast<long long>(std::floor(rest));
    frac = rest - std::floor(rest);
    bmp::cpp_int h_next = a * h + h_prev;
    bmp::cpp_int k_next = a * k + k_prev;
    if (k_next > max_den) {
      break;
    }
    h_prev = h;
    h = h_next;
    k_prev = k;
    k = k_next;
  }
  Exact out(h, k);
  return negative ? Exact(-out) : out;
}

namespace {

bmp::cpp_int parse_integer(std::string_view digits, std::string_view whole) {
  if (digits.empty()) {
    throw ParseError("expected digits in number '" + std::string(whole) + "'");
  }
  for (char ch : digits) {
    if (ch < '0' || ch > '9') {
      throw ParseError("invalid character in number '" + std::string(whole) + "'");
    }
  }
  return bmp::cpp_int(std::string(digits));
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t')) s.remove_suffix(1);
  return s;
}

}  // namespace

Exact parse_exact(std::string_view text) {
  std::string_view s = trim(text);
  bool negative = false;
  if (!s.empty() && (s.front() == '-' || s.front() == '+')) {
    negative = s.front() == '-';
    s.remove_prefix(1);
  }
  if (s.empty()) {
    throw ParseError("empty number");
  }
  Exact value;
  if (const auto slash = s.find('/'); slash != std::string_view::npos) {
    const auto num = parse_integer(trim(s.substr(0, slash)), text);
    const auto den = parse_integer(trim(s.substr(slash + 1)), text);
    if (den == 0) {
      throw ParseError("zero denominator in '" + std::string(text) + "'");
    }
    value = Exact(num, den);
  } else if (s.find_first_of(".eE") != std::string_view::npos) {
    double d = 0;
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), d);
    if (ec != std::errc{} || ptr != s.data() + s.size()) {
      throw ParseError("invalid decimal '" + std::string(text) + "'");
    }
    value = from_double(d);
  } else {
    value = Exact(parse_integer(s, text));
  }
  return negative ? Exact(-value) : value;
}

std::string to_string(const Exact& x) {
  const auto& den = bmp::denominator(x);
  if (den == 1) {
    return bmp::numerator(x).str();
  }
  return bmp::numerator(x).str() + "/" + den.str();
}

std::optional<Exact> exact_sqrt(const Exact& x) {
  if (x < 0) {
    return std::nullopt;
  }
  const bmp::cpp_int num = bmp::numerator(x);
  const bmp::cpp_int den = bmp::denominator(x);
  const bmp::cpp_int rn = bmp::sqrt(num);
  const bmp::cpp_int rd = bmp::sqrt(den);
  if (rn * rn != num || rd * rd != den) {
    return std::nullopt;
  }
  return Exact(rn, rd);
}

}  // namespace threshold
