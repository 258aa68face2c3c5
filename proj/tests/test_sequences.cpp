#include <doctest.h>

#include <cmath>
#include <limits>

#include "carleson_frames/errors.hpp"
#include "carleson_frames/sequences.hpp"
#include "oracles.hpp"

using namespace cframes;

TEST_CASE("geometric sequence values") {
  const auto s = LambdaSequence::geometric(2.0);
  CHECK(s.at(1) == Complex(0.5, 0.0));
  CHECK(s.at(3) == Complex(0.875, 0.0));
  CHECK(s.gap(3) == 0.125);
  CHECK_FALSE(s.length().has_value());
  // Far out the value rounds to 1 but the gap stays exact.
  CHECK(s.at(60).real() == 1.0);
  CHECK(s.gap(60) == std::ldexp(1.0, -60));
  CHECK_THROWS_AS(LambdaSequence::geometric(1.0), InvalidArgument);
  CHECK_THROWS_AS(s.point(0), IndexOutOfRange);
}

TEST_CASE("geometric gap ratio equals 1/alpha to machine precision") {
  for (double alpha : {1.01, 1.5, 2.0, 3.7, 4.0}) {
    const auto s = LambdaSequence::geometric(alpha);
    for (std::size_t k = 1; k < 400; ++k) {
      const double r = s.gap(k + 1) / s.gap(k);
      if (s.gap(k + 1) < std::numeric_limits<double>::min()) break;
      CHECK(std::abs(r - 1.0 / alpha) <= 4 * std::numeric_limits<double>::epsilon());
    }
  }
}

TEST_CASE("power sequence") {
  const auto g = LambdaSequence::geometric(2.0);
  CHECK(LambdaSequence::power_of(g, 2).at(1) == Complex(0.25, 0.0));
  const auto one = LambdaSequence::power_of(g, 1);
  for (std::size_t k = 1; k <= 80; ++k) {
    CHECK(one.at(k) == g.at(k));
    CHECK(one.gap(k) == g.gap(k));
  }
  // gap of lambda^3 is 1 - (1 - 2^-k)^3 = 3e - 3e^2 + e^3
  const auto cube = LambdaSequence::power_of(g, 3);
  for (std::size_t k : {1u, 5u, 30u, 70u}) {
    const long double e = std::ldexp(1.0L, -static_cast<int>(k));
    const long double expect = 3 * e - 3 * e * e + e * e * e;
    CHECK(std::abs(cube.gap(k) - static_cast<double>(expect)) <= 4 * ulp(static_cast<double>(expect)));
  }
  CHECK_THROWS_AS(LambdaSequence::power_of(g, 0), InvalidArgument);
  CHECK(LambdaSequence::power_of(g, 4).flags().real_positive);
}

TEST_CASE("explicit list and disc membership") {
  const auto s = LambdaSequence::explicit_list({0.5, Complex(0.0, 0.3), -0.2});
  CHECK(s.length() == 3u);
  CHECK(s.at(2) == Complex(0.0, 0.3));
  CHECK_THROWS_AS(s.at(4), IndexOutOfRange);
  const auto bad = LambdaSequence::explicit_list({0.5, 1.0});
  CHECK_THROWS_AS(bad.at(2), InvariantViolation);
  CHECK_THROWS_AS(LambdaSequence::explicit_list({}), EmptySequence);
}

TEST_CASE("two-point augmentation") {
  const auto g = LambdaSequence::geometric(2.0);
  const auto s = LambdaSequence::two_point_augmented(0.3, g);
  CHECK(s.at(1) == Complex(0.3, 0.0));
  CHECK(s.at(2) == Complex(-0.3, 0.0));
  CHECK(s.at(3) == Complex(0.5, 0.0));
  CHECK_FALSE(s.flags().real_positive);
  CHECK_FALSE(s.flags().strictly_increasing_moduli);
  CHECK_THROWS_AS(LambdaSequence::two_point_augmented(0.75, g), InvariantViolation);
  CHECK_THROWS_AS(LambdaSequence::two_point_augmented(1.0, g), InvalidArgument);
}

TEST_CASE("drop prefix") {
  const auto g = LambdaSequence::geometric(2.0);
  const auto tail = LambdaSequence::drop_prefix(g, 3);
  CHECK(tail.at(1) == g.at(4));
  CHECK(tail.gap(2) == g.gap(5));
  CHECK(tail.flags().strictly_increasing_moduli);
  const auto twice = LambdaSequence::drop_prefix(tail, 2);
  CHECK(twice.at(1) == g.at(6));

  const auto aug = LambdaSequence::two_point_augmented(0.3, g);
  CHECK(LambdaSequence::drop_prefix(aug, 2).kind() == LambdaSequence::Kind::Geometric);
  CHECK(LambdaSequence::drop_prefix(aug, 1).at(1) == Complex(-0.3, 0.0));

  const auto list = LambdaSequence::explicit_list({0.1, 0.2, 0.3});
  CHECK(LambdaSequence::drop_prefix(list, 2).length() == 1u);
  CHECK_THROWS_AS(LambdaSequence::drop_prefix(list, 3), EmptySequence);
}

TEST_CASE("gap tail sums") {
  const auto g = LambdaSequence::geometric(2.0);
  CHECK(*g.gap_tail_sum(0) == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(*g.gap_tail_sum(10) == doctest::Approx(std::ldexp(1.0, -10)).epsilon(1e-15));
  const auto list = LambdaSequence::explicit_list({0.5, 0.75, 0.875});
  CHECK(*list.gap_tail_sum(1) == doctest::Approx(0.375));
  const auto sq = LambdaSequence::power_of(g, 2);
  // bound must dominate the actual partial sum
  double partial = 0.0;
  for (std::size_t k = 6; k <= 200; ++k) partial += sq.gap(k);
  CHECK(*sq.gap_tail_sum(5) >= partial);
}

TEST_CASE("validate") {
  const auto g = validate(LambdaSequence::geometric(2.0), 50);
  CHECK(g.all_passed());
  CHECK(g.flags.real_positive);
  CHECK(g.flags.strictly_increasing_moduli);
  CHECK(g.checked == 50);

  const auto dup = validate(LambdaSequence::explicit_list({0.5, 0.5}), 2);
  CHECK_FALSE(dup.distinct);
  CHECK_FALSE(dup.failures.empty());

  const auto aug = validate(LambdaSequence::two_point_augmented(0.3, LambdaSequence::geometric(2.0)), 10);
  CHECK_FALSE(aug.monotone_moduli);
  CHECK(aug.distinct);

  const auto out = validate(LambdaSequence::explicit_list({0.5, 1.5}), 5);
  CHECK(out.checked == 2);
  CHECK_FALSE(out.in_disc);

  // repeated calls agree
  const auto again = validate(LambdaSequence::explicit_list({0.5, 0.5}), 2);
  CHECK(again.failures == dup.failures);
}

TEST_CASE("weights") {
  const auto c = Weights::constant(1.0);
  CHECK(c.at(7) == Complex(1.0, 0.0));
  CHECK(c.c1() == 1.0);
  CHECK(c.c2() == 1.0);
  const auto e = Weights::explicit_list({1.0, 2.0}, 1.0, 2.0);
  CHECK(e.at(2) == Complex(2.0, 0.0));
  CHECK_THROWS_AS(e.at(3), IndexOutOfRange);
  const auto bad = Weights::explicit_list({1.0, 3.0}, 1.0, 2.0);
  CHECK_THROWS_AS(bad.at(2), BoundViolation);
  CHECK_THROWS_AS(Weights::constant(0.0), InvalidArgument);
  CHECK_THROWS_AS(Weights::explicit_list({1.0}, 2.0, 1.0), InvalidArgument);
}

TEST_CASE("property: random explicit lists keep structural flags consistent with a scan") {
  oracle::Gen gen(7);
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t n = gen.index(1, 30);
    std::vector<Complex> values;
    const bool real = trial % 2 == 0;
    for (std::size_t i = 0; i < n; ++i) {
      values.push_back(real ? Complex(gen.uniform(0.01, 0.99), 0.0) : gen.disc_point(0.99));
    }
    if (trial % 4 == 0) std::sort(values.begin(), values.end(), [](Complex a, Complex b) { return a.real() < b.real(); });
    const auto seq = LambdaSequence::explicit_list(values);
    const auto report = validate(seq, n);
    bool inc = true;
    bool pos = true;
    for (std::size_t i = 0; i < n; ++i) {
      pos = pos && values[i].imag() == 0.0 && values[i].real() > 0.0;
      if (i) inc = inc && std::abs(values[i - 1]) < std::abs(values[i]);
    }
    CHECK(seq.flags().real_positive == pos);
    CHECK(seq.flags().strictly_increasing_moduli == inc);
    CHECK(report.in_disc);
    for (std::size_t k = 1; k <= n; ++k) {
      const DiscPoint p = seq.point(k);
      CHECK(std::abs(p.modulus() - std::abs(values[k - 1])) <= 4 * ulp(1.0));
    }
  }
}
