#include <doctest.h>

#include <cmath>
#include <cstdlib>

#include "carleson_frames/errors.hpp"
#include "carleson_frames/weaving.hpp"
#include "oracles.hpp"

using namespace cframes;

namespace {

OrbitSystem geometric_system() { return OrbitSystem(LambdaSequence::geometric(2.0), Weights::constant(1.0)); }

struct Coordinates {
  std::vector<oracle::LD> lambda;
  std::vector<oracle::LD> c2;
};

// lambda_n = 1 - 2^-n, |c_n|^2 = 1 - lambda_n^2, both exact in long double for n <= 63
Coordinates geometric_coordinates(std::size_t m) {
  Coordinates c;
  for (std::size_t n = 1; n <= m; ++n) {
    const oracle::LD l = 1.0L - std::ldexp(1.0L, -static_cast<int>(n));
    c.lambda.push_back(l);
    c.c2.push_back(1.0L - l * l);
  }
  return c;
}

std::vector<std::uint64_t> xorshift_block(std::uint64_t n, std::uint64_t seed, std::size_t len) {
  std::uint64_t x = seed ^ 0x9E3779B97F4A7C15ULL;
  if (x == 0) x = 0x9E3779B97F4A7C15ULL;
  std::vector<std::uint64_t> out;
  for (std::size_t i = 0; i < len; ++i) {
    x ^= x >> 12;
    x ^= x << 25;
    x ^= x >> 27;
    out.push_back(((x * 0x2545F4914F6CDD1DULL) >> 32) % n);
  }
  return out;
}

}  // namespace

TEST_CASE("patterns") {
  const auto c = WeavePattern::constant(3, 2);
  CHECK(c.at(0) == 2);
  CHECK(c.at(12345) == 2);
  const auto p = WeavePattern::periodic(3, {0, 1, 2, 1});
  CHECK(p.at(5) == 1);
  CHECK(p.at(6) == 2);
  const auto e = WeavePattern::explicit_list(2, {1, 0, 1});
  CHECK(e.at(1) == 0);
  CHECK(e.at(2) == 1);
  CHECK(e.at(100) == 1);
  CHECK_THROWS_AS(WeavePattern::constant(2, 2), InvalidArgument);
  CHECK_THROWS_AS(WeavePattern::periodic(2, {}), InvalidArgument);
  CHECK_THROWS_AS(WeavePattern::seeded(0, 1), InvalidArgument);

  for (std::uint64_t n : {1u, 2u, 3u, 7u}) {
    const auto s = WeavePattern::seeded(n, 42, 300);
    CHECK(s.values() == xorshift_block(n, 42, 300));
    for (std::size_t k = 0; k < 1000; ++k) CHECK(s.at(k) < n);
    CHECK(s.at(300) == s.at(0));
  }
  CHECK(WeavePattern::seeded(5, 0x9E3779B97F4A7C15ULL, 8).values() == xorshift_block(5, 0x9E3779B97F4A7C15ULL, 8));
}

TEST_CASE("identity pattern has zero defect") {
  const auto sys = geometric_system();
  for (std::size_t j : {0u, 1u, 7u, 500u}) {
    const auto d = tail_defect(sys, WeavePattern::constant(2, 0), j, 40);
    CHECK(d.value == 0.0);
    CHECK(d.truncation_bound == 0.0);
  }
}

TEST_CASE("constant offset defect: pinned and bounded") {
  const auto sys = geometric_system();
  const auto d2 = tail_defect(sys, WeavePattern::constant(2, 1), 0, 40);
  CHECK(std::abs(d2.value - 0.2515972940750283) <= 1e-15);
  CHECK(d2.closed_form);
  CHECK(d2.value <= 5.0 / 3.0);
  const auto d3 = tail_defect(sys, WeavePattern::constant(3, 1), 0, 40);
  CHECK(std::abs(d3.value - 0.23231518416888269) <= 1e-15);

  const auto j0 = d2.value;
  const auto j5 = tail_defect(sys, WeavePattern::constant(2, 1), 5, 40).value;
  const auto j10 = tail_defect(sys, WeavePattern::constant(2, 1), 10, 40).value;
  CHECK(j10 < j5);
  CHECK(j5 < j0);
}

TEST_CASE("closed form agrees with the brute-force double sum") {
  const auto sys = geometric_system();
  const auto coords = geometric_coordinates(40);
  for (std::uint64_t n : {2u, 3u}) {
    for (std::size_t j : {0u, 4u, 30u}) {
      const auto d = tail_defect(sys, WeavePattern::constant(n, 1), j, 40);
      const auto ref = oracle::defect_bruteforce(coords.lambda, coords.c2, n, [](std::size_t) { return 1u; }, j, 1000000);
      CHECK(std::abs(d.value - static_cast<double>(ref)) <= d.truncation_bound + 1e-12);
    }
  }
}

TEST_CASE("summed patterns agree with the periodic closed form") {
  const auto sys = geometric_system();
  const auto coords = geometric_coordinates(40);
  for (std::uint64_t n : {2u, 3u}) {
    const auto seeded = WeavePattern::seeded(n, 42);
    const auto periodic = WeavePattern::periodic(n, {n - 1, 0, 1 % n});
    const std::size_t grid[] = {0, 3, 50, 700};
    const auto seeded_curve = tail_defect_curve(sys, seeded, grid, 40);
    const auto periodic_curve = tail_defect_curve(sys, periodic, grid, 40);
    for (std::size_t i = 0; i < 4; ++i) {
      const auto ref = oracle::defect_periodic(coords.lambda, coords.c2, n, seeded.values(), grid[i]);
      CHECK_FALSE(seeded_curve[i].closed_form);
      CHECK(std::abs(seeded_curve[i].value - static_cast<double>(ref)) <= seeded_curve[i].truncation_bound + 1e-13);
      const auto pref = oracle::defect_periodic(coords.lambda, coords.c2, n, periodic.values(), grid[i]);
      CHECK(std::abs(periodic_curve[i].value - static_cast<double>(pref)) <= periodic_curve[i].truncation_bound + 1e-13);
    }
  }
}

TEST_CASE("explicit pattern ending in zero is a finite sum") {
  const auto sys = geometric_system();
  const auto coords = geometric_coordinates(30);
  const std::vector<std::uint64_t> offsets = {1, 0, 1, 1, 0};
  const auto d = tail_defect(sys, WeavePattern::explicit_list(2, offsets), 0, 30);
  const auto ref = oracle::defect_bruteforce(coords.lambda, coords.c2, 2, [&](std::size_t k) { return offsets[std::min<std::size_t>(k, 4)]; }, 0, 5);
  CHECK(std::abs(d.value - static_cast<double>(ref)) <= 1e-15);
}

TEST_CASE("curve evaluation matches single evaluations") {
  const auto sys = geometric_system();
  const auto pattern = WeavePattern::seeded(3, 7, 64);
  const std::size_t grid[] = {20, 0, 5, 5, 1000};
  const auto curve = tail_defect_curve(sys, pattern, grid, 30);
  for (std::size_t i = 0; i < 5; ++i) {
    const auto single = tail_defect(sys, pattern, grid[i], 30);
    CHECK(curve[i].J == grid[i]);
    CHECK(curve[i].value == single.value);
    CHECK(curve[i].truncation_bound == single.truncation_bound);
  }
}

TEST_CASE("property: defect is nonincreasing in J and under the universal bound") {
  oracle::Gen gen(99);
  for (int trial = 0; trial < 12; ++trial) {
    const double alpha = gen.uniform(1.5, 4.0);
    const std::uint64_t n = gen.index(1, 4);
    std::vector<Complex> w;
    for (int i = 0; i < 30; ++i) w.push_back(gen.uniform(0.5, 1.5));
    const OrbitSystem sys(LambdaSequence::geometric(alpha), Weights::explicit_list(w, 0.5, 1.5));
    const WeavePattern pattern = trial % 2 ? WeavePattern::seeded(n, gen.index(0, 1000), 32)
                                           : WeavePattern::constant(n, gen.index(0, n - 1));
    std::vector<std::size_t> grid = {0, 1, 2, 3, 5, 8, 13, 40, 200};
    const auto curve = tail_defect_curve(sys, pattern, grid, 30);
    const double ub = defect_upper_bound(sys, 30);
    CHECK(curve[0].value <= ub + curve[0].truncation_bound);
    for (std::size_t i = 1; i < curve.size(); ++i) CHECK(curve[i].value <= curve[i - 1].value);
    CHECK(curve.back().value <= curve.front().value * 1e-2 + 1e-15);
  }
}

TEST_CASE("universal defect bound") {
  const auto sys = geometric_system();
  double norm = 0.0;
  for (const Complex& c : phi_coefficients(sys, 40)) norm += std::norm(c);
  CHECK(defect_upper_bound(sys, 40) == doctest::Approx(norm).epsilon(1e-15));
  CHECK(std::abs(defect_upper_bound(sys, 40) - 5.0 / 3.0) <= 1e-10);
  const OrbitSystem wide(LambdaSequence::geometric(2.0), Weights::explicit_list(std::vector<Complex>(40, 1.0), 1.0, 2.0));
  CHECK(defect_upper_bound(wide, 40) == doctest::Approx(4.0 * norm).epsilon(1e-15));
}

TEST_CASE("woven operator") {
  const auto sys = geometric_system();
  for (std::uint64_t n : {2u, 3u}) {
    const auto base = frame_operator_matrix(sys, {n, 0, 0}, 20).dense();
    CHECK((woven_frame_operator(sys, WeavePattern::constant(n, 0), 7, 20).dense() - base).cwiseAbs().maxCoeff() <= 1e-13);
    const auto shifted = frame_operator_matrix(sys, {n, 1, 0}, 20).dense();
    CHECK((woven_frame_operator(sys, WeavePattern::constant(n, 1), 0, 20).dense() - shifted).cwiseAbs().maxCoeff() <= 1e-13);
  }
  // direct summation over k for a small coordinate block
  const std::size_t m = 6;
  for (const auto& pattern : {WeavePattern::seeded(3, 5, 16), WeavePattern::explicit_list(2, {1, 1, 0, 1})}) {
    for (std::size_t j : {0u, 2u, 9u}) {
      const auto woven = woven_frame_operator(sys, pattern, j, m);
      Eigen::MatrixXcd ref = Eigen::MatrixXcd::Zero(m, m);
      for (std::size_t k = 0; k < 4000; ++k) {
        const std::uint64_t p = pattern.N() * k + (k < j ? 0 : pattern.at(k));
        Eigen::VectorXcd f(m);
        for (std::size_t r = 0; r < m; ++r) f(static_cast<Eigen::Index>(r)) = orbit_coefficient(sys, r + 1, p);
        ref += f * f.adjoint();
      }
      CHECK((woven.dense() - ref).cwiseAbs().maxCoeff() <= 1e-12);
    }
  }
}

TEST_CASE("weaving index") {
  const auto sys = geometric_system();
  const double a1 = frame_bounds(sys, {2, 0, 0}, 40).A_est;
  const auto same = find_weaving_index(sys, WeavePattern::constant(2, 0), a1, 0.5, 40);
  CHECK(same.J == 0);
  CHECK(same.defect_at_J == 0.0);
  CHECK(same.predicted_lower_bound == doctest::Approx(a1).epsilon(1e-15));

  const std::pair<std::uint64_t, std::size_t> pinned[] = {{2, 84}, {3, 57}};
  for (const auto& [n, expect] : pinned) {
    const double a = frame_bounds(sys, {n, 0, 0}, 40).A_est;
    const auto r = find_weaving_index(sys, WeavePattern::constant(n, 1), a, 0.5, 40);
    CHECK(r.J == expect);
    CHECK(r.defect_at_J < 0.5 * a);
    CHECK(r.curve.size() == r.J + 1);
    CHECK(r.curve[r.J - 1].upper() >= 0.5 * a);
    CHECK(r.predicted_lower_bound == doctest::Approx(std::pow(std::sqrt(a) - std::sqrt(r.defect_at_J), 2)));
    CHECK(r.verification_passed);
    CHECK(r.verified_bounds.A_est >= r.predicted_lower_bound - 1e-8);
  }

  try {
    WeaveOptions opts;
    opts.j_max = 5;
    (void)find_weaving_index(sys, WeavePattern::constant(2, 1), a1, 0.5, 40, opts);
    FAIL("expected WeavingIndexNotFound");
  } catch (const WeavingIndexNotFound& e) {
    CHECK(e.curve().size() == 6);
  }
  CHECK_THROWS_AS(find_weaving_index(sys, WeavePattern::constant(2, 1), a1, 0.0, 40), InvalidArgument);
  CHECK_THROWS_AS(find_weaving_index(sys, WeavePattern::constant(2, 1), -1.0, 0.5, 40), InvalidArgument);
}

TEST_CASE("defect needs a real increasing sequence") {
  const OrbitSystem aug(LambdaSequence::two_point_augmented(0.3, LambdaSequence::geometric(2.0)), Weights::constant(1.0));
  CHECK_THROWS_AS(tail_defect(aug, WeavePattern::constant(2, 1), 0, 10), HypothesisViolation);
  const OrbitSystem complex_list(LambdaSequence::explicit_list({Complex(0.0, 0.1), 0.5}), Weights::constant(1.0));
  CHECK_THROWS_AS(tail_defect(complex_list, WeavePattern::constant(2, 1), 0, 2), HypothesisViolation);
}

TEST_CASE("thread count does not change results") {
  const auto sys = geometric_system();
  const auto pattern = WeavePattern::seeded(2, 42);
  const std::size_t grid[] = {0, 10, 100};
  setenv("CARLESON_FRAMES_THREADS", "1", 1);
  const auto serial = tail_defect_curve(sys, pattern, grid, 40);
  setenv("CARLESON_FRAMES_THREADS", "4", 1);
  const auto threaded = tail_defect_curve(sys, pattern, grid, 40);
  unsetenv("CARLESON_FRAMES_THREADS");
  for (std::size_t i = 0; i < 3; ++i) {
    CHECK(serial[i].value == threaded[i].value);
    CHECK(serial[i].truncation_bound == threaded[i].truncation_bound);
  }
}
