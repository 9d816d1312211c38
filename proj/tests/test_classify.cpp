#include "doctest.h"

#include "threshold/catalog.hpp"
#include "threshold/classify.hpp"
#include "threshold/errors.hpp"

#include <random>

using namespace threshold;

namespace {

ThresholdStateSpec spec(Exact c, int m, int d, Exact eps = 0) {
  ThresholdStateSpec s;
  s.c = c;
  s.m = m;
  s.d = d;
  s.eps = eps;
  return s;
}

std::mt19937 rng(424242);

Exact pick(int lo, int hi, int den) {
  return Exact(std::uniform_int_distribution<int>(lo, hi)(rng), den);
}

// Inverse-square tails with a few iterated-log corrections and a faster term.
LogPolynomial random_tail() {
  std::vector<LogMonomial> terms{LogMonomial(pick(-4, 40, 4), -2)};
  const int extra = std::uniform_int_distribution<int>(0, 3)(rng);
  for (int i = 0; i < extra; ++i) {
    const int depth = std::uniform_int_distribution<int>(1, 3)(rng);
    std::vector<Exact> b(static_cast<std::size_t>(depth), Exact(-1));
    b.back() = pick(-12, -8, 10);
    terms.emplace_back(pick(-6, 6, 2), -2, b);
  }
  terms.emplace_back(pick(-20, 20, 1), -4);
  return LogPolynomial(terms);
}

}  // namespace

TEST_CASE("absence examples") {
  const auto a = decide_absence(LogPolynomial(LogMonomial(Exact(3, 4), -2)), 0, 3);
  CHECK(a.verdict == Verdict::absence_applies);
  CHECK(a.matched_m == 0);
  CHECK(a.witness.is_zero());

  const auto tail = alpha_tail_expansion(Exact(2), 3);
  const auto b = decide_absence(tail, 2, 3);
  CHECK(b.verdict == Verdict::absence_applies);
  CHECK(b.matched_m == 0);
  // r^{-2} parts cancel; the r^{-4} correction of the tail is -15.
  REQUIRE(!b.witness.terms().empty());
  CHECK(b.witness.terms().front() == LogMonomial(15, -4));

  const LogPolynomial v({LogMonomial(Exact(15, 4), -2), LogMonomial(1, -2, {Exact(-1)})});
  const auto c = decide_absence(v, 2, 3);
  CHECK(c.verdict == Verdict::absence_applies);
  CHECK(c.matched_m == 1);
  CHECK(decide_absence(v, 2, 3, 0).verdict == Verdict::inconclusive);
  const LogPolynomial w({LogMonomial(Exact(15, 4), -2), LogMonomial(3, -2, {Exact(-1)})});
  CHECK(decide_absence(w, 2, 3).verdict == Verdict::inconclusive);
}

TEST_CASE("existence examples") {
  const auto a = decide_existence(LogPolynomial(LogMonomial(Exact(7, 4), -2)), 0, 3, 4, true);
  CHECK(a.verdict == Verdict::existence_applies);
  CHECK(a.matched_m == 0);
  CHECK(a.matched_eps == Exact(1));

  const LogPolynomial v(LogMonomial(Exact(15, 4), -2));
  const auto b = decide_existence(v, Exact(19, 10), 3, 4, true);
  CHECK(b.verdict == Verdict::existence_applies);
  REQUIRE(b.matched_eps.has_value());
  CHECK(*b.matched_eps > 0);
  // D = (15/4 - 1421/400) r^{-2} = 79/400 r^{-2}, strictly above every eps shape.
  CHECK(b.witness == LogPolynomial(LogMonomial(Exact(79, 400), -2)));

  const auto c = decide_existence(LogPolynomial(LogMonomial(Exact(1, 2), -2)), 0, 3, 4, true);
  CHECK(c.verdict == Verdict::inconclusive);
  CHECK(asymptotic_sign(c.witness) == -1);

  const auto d = decide_existence(LogPolynomial(LogMonomial(Exact(7, 4), -2)), 0, 3);
  CHECK(d.verdict == Verdict::inconclusive);
  CHECK_FALSE(d.note.empty());
}

TEST_CASE("moment range examples") {
  const auto a = moment_range(alpha_tail_expansion(Exact(2), 3), 3);
  REQUIRE(a.c_star.has_value());
  CHECK(*a.c_star == doctest::Approx(2.0).epsilon(1e-15));
  CHECK(a.boundary_side == BoundarySide::infinite_at_c_star);

  const auto b = moment_range(LogPolynomial(LogMonomial(Exact(3, 4), -2)), 3);
  CHECK(*b.c_star == doctest::Approx(0.0));

  const LogPolynomial ladder({LogMonomial(Exact(15, 4), -2), LogMonomial(2, -2, {Exact(-1)}),
                              LogMonomial(1, -2, {Exact(-1), Exact(-11, 10)})});
  const auto c = moment_range(ladder, 3);
  CHECK(*c.c_star == doctest::Approx(2.0));
  CHECK(c.boundary_side == BoundarySide::log_corrections_decide);
  REQUIRE(c.resolved_side.has_value());
  CHECK(*c.resolved_side == BoundarySide::infinite_at_c_star);
  CHECK(c.depth == 2);

  // Above the ladder at depth 1: the existence side wins at c_star.
  const LogPolynomial over({LogMonomial(Exact(15, 4), -2), LogMonomial(3, -2, {Exact(-1)})});
  const auto e = moment_range(over, 3);
  CHECK(e.boundary_side == BoundarySide::log_corrections_decide);
  CHECK(e.resolved_side == BoundarySide::finite_at_c_star);

  CHECK_THROWS_AS(moment_range(LogPolynomial(LogMonomial(1, -3)), 3), NotInverseSquare);
  CHECK_THROWS_AS(moment_range(LogPolynomial(LogMonomial(1, -2, {Exact(1)})), 3), NotInverseSquare);
  const auto slow = moment_range(LogPolynomial(LogMonomial(1, -1)), 3);
  CHECK(slow.boundary_side == BoundarySide::all_finite);
  CHECK(moment_range(LogPolynomial(LogMonomial(-1, -1)), 3).boundary_side == BoundarySide::no_threshold);
  CHECK(moment_range(LogPolynomial(LogMonomial(-1, -2)), 3).boundary_side == BoundarySide::no_threshold);
}

TEST_CASE("soundness against the named families") {
  for (int d = 1; d <= 5; ++d) {
    for (const Exact c : {Exact(0), Exact(1, 2), Exact(2)}) {
      for (int m = 0; m <= 3; ++m) {
        const auto a = decide_absence(bound_absence(spec(c, m, d)), c, d);
        CHECK(a.verdict == Verdict::absence_applies);
        CHECK(a.matched_m == m);
        for (const Exact eps : {Exact(1, 10), Exact(1, 2), Exact(1)}) {
          const auto e = decide_existence(w_upper(spec(c, m, d, eps)), c, d, 4, true);
          CAPTURE(d);
          CAPTURE(m);
          CHECK(e.verdict == Verdict::existence_applies);
          CHECK(e.matched_m == m);
          REQUIRE(e.matched_eps.has_value());
          CHECK(*e.matched_eps >= eps / 2);
          CHECK(asymptotic_sign(w_upper(spec(c, m, d, eps)) -
                                bound_existence(spec(c, *e.matched_m, d, *e.matched_eps))) >= 0);
        }
      }
    }
  }
}

TEST_CASE("alpha family: existence below the critical moment, absence from it on") {
  for (const Exact alpha : {Exact(3, 2), Exact(2), Exact(3)}) {
    const auto tail = alpha_tail_expansion(alpha, 3);
    const Exact c_star = 2 * (alpha - 1);
    for (Exact c = 0; c < c_star; c += Exact(1, 10)) {
      CHECK(decide_existence(tail, c, 3, 4, true).verdict == Verdict::existence_applies);
      CHECK(decide_absence(tail, c, 3).verdict == Verdict::inconclusive);
    }
    for (Exact c = c_star; c <= c_star + 1; c += Exact(1, 10)) {
      CHECK(decide_absence(tail, c, 3).verdict == Verdict::absence_applies);
      CHECK(decide_existence(tail, c, 3, 4, true).verdict == Verdict::inconclusive);
    }
  }
}

TEST_CASE("property: the two theorems never both apply") {
  for (int i = 0; i < 300; ++i) {
    const auto tail = random_tail();
    const Exact c = pick(0, 40, 10);
    const bool absence = decide_absence(tail, c, 3).verdict == Verdict::absence_applies;
    const bool existence = decide_existence(tail, c, 3, 4, true).verdict == Verdict::existence_applies;
    CAPTURE(format(tail));
    CHECK_FALSE((absence && existence));
  }
}

TEST_CASE("property: absence persists for larger moment orders") {
  for (int i = 0; i < 100; ++i) {
    const auto tail = random_tail();
    bool seen = false;
    for (Exact c = 0; c <= 5; c += Exact(1, 4)) {
      const bool applies = decide_absence(tail, c, 3).verdict == Verdict::absence_applies;
      if (seen) {
        CAPTURE(format(tail));
        CHECK(applies);
      }
      seen = seen || applies;
    }
  }
}

TEST_CASE("property: moment range agrees with the decision procedures") {
  for (int i = 0; i < 100; ++i) {
    const auto tail = random_tail();
    const auto range = moment_range(tail, 3);
    if (!range.c_star || range.boundary_side == BoundarySide::all_finite) {
      continue;
    }
    const double cs = *range.c_star;
    // Strictly below the threshold the r^{-2} level already decides.
    for (Exact c = 0; to_double(c) < cs - 1e-9; c += Exact(1, 4)) {
      CHECK(decide_existence(tail, c, 3, 4, true).verdict == Verdict::existence_applies);
    }
    for (Exact c = 0; c <= 6; c += Exact(1, 4)) {
      if (to_double(c) > cs + 1e-9) {
        CHECK(decide_absence(tail, c, 3).verdict == Verdict::absence_applies);
      }
    }
  }
}

TEST_CASE("verdict serialization") {
  const auto j = to_json(decide_absence(LogPolynomial(LogMonomial(Exact(3, 4), -2)), 0, 3));
  CHECK(j["verdict"] == "absence_applies");
  CHECK(j["matched_m"] == 0);
  CHECK(j["witness"] == "0");
  const auto k = to_json(moment_range(alpha_tail_expansion(Exact(2), 3), 3));
  CHECK(k["boundary_side"] == "infinite_at_c_star");
}
