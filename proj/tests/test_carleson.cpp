#include <doctest.h>

#include <cmath>

#include "carleson_frames/carleson.hpp"
#include "carleson_frames/errors.hpp"
#include "oracles.hpp"

using namespace cframes;

namespace {

std::vector<oracle::CLD> geometric_points(long double alpha, std::size_t count) {
  std::vector<oracle::CLD> z;
  for (std::size_t k = 1; k <= count; ++k) z.emplace_back(1.0L - std::pow(alpha, -static_cast<long double>(k)), 0.0L);
  return z;
}

}  // namespace

TEST_CASE("geometric sequences are certified with c = 1/alpha") {
  for (double alpha : {1.5, 2.0, 4.0}) {
    const auto r = carleson_inf_estimate(LambdaSequence::geometric(alpha), 30, 200);
    CHECK(r.verdict == Verdict::CertifiedHolds);
    REQUIRE(r.certified_c.has_value());
    CHECK(*r.certified_c == 1.0 / alpha);
    REQUIRE(r.ratio_sup.has_value());
    CHECK(*r.ratio_sup <= *r.certified_c + 4 * ulp(*r.certified_c));
    CHECK(r.inf_estimate > 0.0);
  }
  CHECK(*ratio_test(LambdaSequence::geometric(2.0), 100).certified_c == 0.5);
  CHECK(ratio_test(LambdaSequence::geometric(2.0), 100).ratio_sup == 0.5);
}

TEST_CASE("products match the extended-precision definition") {
  for (long double alpha : {1.5L, 2.0L}) {
    const auto seq = LambdaSequence::geometric(static_cast<double>(alpha));
    const auto z = geometric_points(alpha, 60);
    for (std::size_t n = 1; n <= 30; ++n) {
      const ProductEntry p = carleson_product(seq, n, 60);
      const auto ref = static_cast<double>(oracle::carleson_product(z, n - 1));
      CHECK(std::abs(p.value - ref) <= 1e-10 * ref);
    }
  }
}

TEST_CASE("tail error brackets the longer product") {
  const auto seq = LambdaSequence::geometric(2.0);
  const auto z = geometric_points(2.0L, 62);
  for (std::size_t n = 1; n <= 20; ++n) {
    const ProductEntry p = carleson_product(seq, n, 30);
    const auto longer = static_cast<double>(oracle::carleson_product(z, n - 1));
    CHECK(p.tail_error >= 0.0);
    CHECK(longer <= p.value * (1 + 1e-12));
    CHECK(longer >= p.value - p.tail_error - 1e-12);
    CHECK(p.value <= 1.0 + p.tail_error);
  }
}

TEST_CASE("squared two-point sequence fails with an exact zero") {
  const auto mu = LambdaSequence::geometric(2.0);
  for (double q : {0.1, 0.3, 0.7}) {
    const auto seq = LambdaSequence::power_of(LambdaSequence::two_point_augmented(q, mu), 2);
    const auto r = carleson_inf_estimate(seq, 30, 200);
    CHECK(r.verdict == Verdict::CertifiedFails);
    CHECK(r.products[0].value == 0.0);
    CHECK(r.products[1].value == 0.0);
    CHECK(r.inf_estimate == 0.0);
  }
}

TEST_CASE("two-point sequence itself: inconclusive directly, certified through its tail") {
  const auto seq = LambdaSequence::two_point_augmented(0.3, LambdaSequence::geometric(2.0));
  const auto direct = carleson_inf_estimate(seq, 20, 100);
  CHECK(direct.verdict == Verdict::Inconclusive);
  CHECK(direct.inf_estimate > 0.0);

  const auto dropped = drop_prefix_check(seq, 2, 20, 100);
  CHECK(dropped.verdict == Verdict::CertifiedHolds);
  CHECK(dropped.dropped == 2);
  REQUIRE(dropped.dropped_products.size() == 2);
  CHECK(dropped.dropped_products[0].value > 0.0);
}

TEST_CASE("repeated explicit point fails; distinct finite list is exact") {
  const auto dup = LambdaSequence::explicit_list({0.2, 0.5, 0.2});
  CHECK(carleson_inf_estimate(dup, 3, 3).verdict == Verdict::CertifiedFails);

  const auto dropped = drop_prefix_check(LambdaSequence::explicit_list({0.5, 0.5, 0.7, 0.8}), 1, 2, 3);
  CHECK(dropped.verdict == Verdict::CertifiedFails);

  const auto list = LambdaSequence::explicit_list({0.1, Complex(0.0, 0.4), -0.6});
  const auto r = carleson_inf_estimate(list, 3, 3);
  for (const auto& p : r.products) CHECK(p.tail_error == 0.0);
}

TEST_CASE("powers of a certified sequence stay certified") {
  for (std::uint64_t n : {2u, 3u, 5u}) {
    const auto seq = power_sequence(LambdaSequence::geometric(2.0), n);
    const auto c = ratio_certificate(seq);
    REQUIRE(c.has_value());
    CHECK(*c < 1.0);
    // every computed ratio is covered
    const auto rt = ratio_test(seq, 500);
    CHECK(rt.ratio_sup <= *c);
    CHECK(carleson_inf_estimate(seq, 20, 200).verdict == Verdict::CertifiedHolds);
  }
  CHECK(*ratio_certificate(LambdaSequence::drop_prefix(LambdaSequence::geometric(4.0), 5)) == 0.25);
}

TEST_CASE("limit modulus screen") {
  const auto g = limit_modulus_check(LambdaSequence::geometric(2.0), 50);
  CHECK(g.passes);
  CHECK(g.trailing.size() == 5);
  CHECK(g.trailing.back().k == 50);

  const auto slow = limit_modulus_check(LambdaSequence::geometric(1.01), 200);
  CHECK(slow.final_gap == doctest::Approx(std::pow(1.01, -200.0)).epsilon(1e-12));
  CHECK_FALSE(slow.passes);

  const auto stuck = limit_modulus_check(LambdaSequence::explicit_list({0.1, 0.2, 0.3}), 10);
  CHECK_FALSE(stuck.passes);
  CHECK(stuck.k_max == 3);
}

TEST_CASE("argument checks") {
  const auto g = LambdaSequence::geometric(2.0);
  CHECK_THROWS_AS(carleson_product(g, 0, 10), InvalidArgument);
  CHECK_THROWS_AS(carleson_product(g, 11, 10), InvalidArgument);
  CHECK_THROWS_AS(carleson_inf_estimate(g, 20, 10), InvalidArgument);
}

TEST_CASE("property: random finite lists agree with the definition") {
  oracle::Gen gen(23);
  for (int trial = 0; trial < 100; ++trial) {
    const std::size_t n = gen.index(2, 25);
    std::vector<Complex> values;
    std::vector<oracle::CLD> z;
    for (std::size_t i = 0; i < n; ++i) {
      const Complex v = gen.disc_point(0.95);
      values.push_back(v);
      z.emplace_back(v.real(), v.imag());
    }
    const auto seq = LambdaSequence::explicit_list(values);
    const auto r = carleson_inf_estimate(seq, n, n);
    double lo = 2.0;
    for (std::size_t i = 0; i < n; ++i) {
      const auto ref = static_cast<double>(oracle::carleson_product(z, i));
      CHECK(std::abs(r.products[i].value - ref) <= 1e-12 * std::max(ref, 1e-300) + 1e-300);
      CHECK(r.products[i].value >= 0.0);
      CHECK(r.products[i].value <= 1.0);
      lo = std::min(lo, r.products[i].value);
    }
    CHECK(r.inf_estimate == lo);
  }
}
