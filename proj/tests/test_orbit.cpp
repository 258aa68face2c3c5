#include <doctest.h>

#include <cmath>

#include "carleson_frames/errors.hpp"
#include "carleson_frames/carleson.hpp"
#include "carleson_frames/orbit.hpp"
#include "oracles.hpp"

using namespace cframes;

namespace {

OrbitSystem geometric_system() { return OrbitSystem(LambdaSequence::geometric(2.0), Weights::constant(1.0)); }

double max_abs_diff(const HermitianMatrix& a, const HermitianMatrix& b) {
  return (a.dense() - b.dense()).cwiseAbs().maxCoeff();
}

std::vector<SubsampleScheme> scheme_grid(std::initializer_list<std::uint64_t> ns, std::initializer_list<std::uint64_t> ks,
                                         bool all_offsets) {
  std::vector<SubsampleScheme> out;
  for (std::uint64_t n : ns) {
    for (std::uint64_t j = 0; j < (all_offsets ? n : std::min<std::uint64_t>(n, 2)); ++j) {
      for (std::uint64_t k : ks) out.push_back({n, j, k});
    }
  }
  return out;
}

}  // namespace

TEST_CASE("generator coefficients") {
  const auto sys = geometric_system();
  const auto one = phi_coefficients(sys, 1);
  CHECK(one[0].real() == doctest::Approx(std::sqrt(0.75)).epsilon(1e-15));
  const auto two = phi_coefficients(sys, 2);
  CHECK(two[1].real() == doctest::Approx(0.6614378277661477).epsilon(1e-15));

  double norm = 0.0;
  for (const Complex& c : phi_coefficients(sys, 40)) norm += std::norm(c);
  CHECK(std::abs(norm - 5.0 / 3.0) <= 1e-10);
}

TEST_CASE("orbit coefficients") {
  const auto sys = geometric_system();
  CHECK(orbit_coefficient(sys, 1, 0) == phi_coefficients(sys, 1)[0]);
  CHECK(orbit_coefficient(sys, 1, 2).real() == doctest::Approx(0.25 * std::sqrt(0.75)).epsilon(1e-15));
  CHECK(orbit_coefficient(sys, 2, 3).real() == doctest::Approx(std::pow(0.75, 3) * std::sqrt(1 - 0.75 * 0.75)).epsilon(1e-14));
}

TEST_CASE("frame operator entries") {
  const auto sys = geometric_system();
  const auto s = frame_operator_matrix(sys, {1, 0, 0}, 40);
  for (std::size_t n = 0; n < 40; ++n) CHECK(s(n, n) == Complex(1.0, 0.0));
  CHECK(std::abs(s(0, 1).real() - 0.8660254037844386 * 0.6614378277661477 / 0.625) <= 1e-10);

  // diagonal is |m_n|^2 for any weights
  const OrbitSystem weighted(LambdaSequence::geometric(3.0), Weights::explicit_list({1.0, Complex(0.0, 2.0), 1.5}, 1.0, 2.0));
  const auto w = frame_operator_matrix(weighted, {1, 0, 0}, 3);
  CHECK(w(1, 1).real() == doctest::Approx(4.0).epsilon(1e-15));
  CHECK(w(2, 2).real() == doctest::Approx(2.25).epsilon(1e-15));

  const OrbitSystem basis(LambdaSequence::explicit_list({0.0}), Weights::constant(1.0));
  const auto b = frame_bounds(basis, {1, 0, 0}, 1);
  CHECK(b.A_est == 1.0);
  CHECK(b.B_est == 1.0);
}

TEST_CASE("closed form agrees with brute-force summation") {
  const auto sys = geometric_system();
  for (const auto& scheme : scheme_grid({1, 2, 3, 5}, {0, 2, 3}, true)) {
    const auto closed = frame_operator_matrix(sys, scheme, 20);
    const auto brute = frame_operator_bruteforce(sys, scheme, 20, 512);
    for (std::size_t a = 0; a < 20; ++a) {
      for (std::size_t b = 0; b < 20; ++b) {
        const double dev = std::abs(closed(a, b) - brute.matrix(a, b));
        CHECK(dev <= brute.entry_tail_bound(static_cast<Eigen::Index>(a), static_cast<Eigen::Index>(b)) + 1e-12);
      }
    }
  }
  // fast coordinates converge well within 256 terms
  const auto closed = frame_operator_matrix(sys, {2, 1, 0}, 4);
  const auto brute = frame_operator_bruteforce(sys, {2, 1, 0}, 4, 256);
  CHECK(max_abs_diff(closed, brute.matrix) < 1e-10);
}

TEST_CASE("single brute-force term is the rank-one generator") {
  const auto sys = geometric_system();
  const auto one = frame_operator_bruteforce(sys, {1, 0, 0}, 6, 1);
  const auto c = phi_coefficients(sys, 6);
  for (std::size_t a = 0; a < 6; ++a)
    for (std::size_t b = 0; b < 6; ++b) CHECK(std::abs(one.matrix(a, b) - c[a] * std::conj(c[b])) <= 1e-15);
}

TEST_CASE("offsets partition the full orbit") {
  const auto sys = geometric_system();
  const auto full = frame_operator_matrix(sys, {1, 0, 0}, 20);
  for (std::uint64_t n : {2u, 3u, 4u}) {
    Eigen::MatrixXcd sum = Eigen::MatrixXcd::Zero(20, 20);
    for (std::uint64_t j = 0; j < n; ++j) sum += frame_operator_matrix(sys, {n, j, 0}, 20).dense();
    CHECK((sum - full.dense()).cwiseAbs().maxCoeff() <= 1e-12);
  }
}

TEST_CASE("starting later conjugates by a diagonal") {
  const auto sys = geometric_system();
  for (std::uint64_t n : {1u, 2u, 3u}) {
    for (std::uint64_t k : {1u, 3u}) {
      const auto base = frame_operator_matrix(sys, {n, 0, 0}, 15).dense();
      const auto later = frame_operator_matrix(sys, {n, 0, k}, 15);
      for (Eigen::Index a = 0; a < 15; ++a) {
        for (Eigen::Index b = 0; b < 15; ++b) {
          const Complex da = complex_pow(sys.lambdas().at(static_cast<std::size_t>(a) + 1), n * k);
          const Complex db = complex_pow(sys.lambdas().at(static_cast<std::size_t>(b) + 1), n * k);
          const Complex expect = da * base(a, b) * std::conj(db);
          CHECK(std::abs(later(static_cast<std::size_t>(a), static_cast<std::size_t>(b)) - expect) <= 1e-14);
        }
      }
    }
  }
}

TEST_CASE("subsampled scheme equals the powered system with adjusted weights") {
  const auto sys = geometric_system();
  for (std::uint64_t n : {2u, 3u}) {
    const auto tilde = retilde_weights(sys, n, 20);
    const OrbitSystem powered(power_sequence(sys.lambdas(), n), Weights::explicit_list(tilde.weights, tilde.lower, tilde.upper));
    const auto lhs = frame_operator_matrix(sys, {n, 0, 0}, 20);
    const auto rhs = frame_operator_matrix(powered, {1, 0, 0}, 20);
    CHECK(max_abs_diff(lhs, rhs) <= 1e-12);
  }
}

TEST_CASE("pinned frame bounds") {
  const auto sys = geometric_system();
  const auto e1 = frame_bounds(sys, {1, 0, 0}, 40);
  CHECK(std::abs(e1.A_est - 2.5623096045062615e-05) <= 1e-13);
  CHECK(std::abs(e1.B_est - 8.636872214227692) <= 1e-12);
  const auto e2 = frame_bounds(sys, {2, 0, 0}, 40);
  CHECK(std::abs(e2.A_est - 1.2810610413714164e-05) <= 1e-13);
  CHECK(std::abs(e2.B_est - 4.344189318856528) <= 1e-12);
  CHECK(std::abs(frame_bounds(sys, {1, 0, 0}, 10).A_est - 9.794544382155786e-05) <= 1e-13);
  CHECK(std::abs(frame_bounds(sys, {1, 0, 0}, 20).A_est - 3.353106023164294e-05) <= 1e-13);

  const auto e3 = frame_bounds(sys, {3, 0, 0}, 40);
  CHECK(e3.A_est > 0.0);
  CHECK(e3.B_est <= e1.B_est + 1e-12);
}

TEST_CASE("interlacing across truncations") {
  const auto sys = geometric_system();
  for (const auto& scheme : scheme_grid({1, 2, 3}, {0, 2}, false)) {
    double prev_a = INFINITY;
    double prev_b = 0.0;
    for (std::size_t m : {10u, 20u, 40u, 80u}) {
      const auto e = frame_bounds(sys, scheme, m);
      CHECK(e.A_est <= prev_a + 1e-10);
      CHECK(e.B_est >= prev_b - 1e-10);
      prev_a = e.A_est;
      prev_b = e.B_est;
    }
  }
}

TEST_CASE("adjusted weights") {
  const auto sys = geometric_system();
  const auto same = retilde_weights(sys, 1, 50);
  for (const Complex& w : same.weights) CHECK(w == Complex(1.0, 0.0));
  const auto two = retilde_weights(sys, 2, 200);
  CHECK(two.weights[0].real() == doctest::Approx(std::sqrt(0.8)).epsilon(1e-15));
  for (std::uint64_t n : {2u, 3u, 5u}) {
    const auto r = retilde_weights(sys, n, 200);
    CHECK(r.bound_check);
    CHECK(r.identity_check);
    CHECK(r.max_identity_ulps <= 4.0);
    CHECK(r.lower == doctest::Approx(1.0 / std::sqrt(2.0 * static_cast<double>(n))));
  }
}

TEST_CASE("property: random complex systems give Hermitian PSD operators matching brute force") {
  oracle::Gen gen(41);
  for (int trial = 0; trial < 40; ++trial) {
    const std::size_t m = gen.index(2, 12);
    std::vector<Complex> lambda;
    std::vector<Complex> weights;
    for (std::size_t i = 0; i < m; ++i) {
      lambda.push_back(gen.disc_point(0.8));
      weights.push_back(std::polar(gen.uniform(0.5, 2.0), gen.uniform(0.0, 6.28)));
    }
    const OrbitSystem sys(LambdaSequence::explicit_list(lambda), Weights::explicit_list(weights, 0.5, 2.0));
    const SubsampleScheme scheme{gen.index(1, 4), 0, gen.index(0, 3)};
    const SubsampleScheme shifted{scheme.N, gen.index(0, scheme.N - 1), scheme.K};
    const auto s = frame_operator_matrix(sys, shifted, m);
    const auto brute = frame_operator_bruteforce(sys, shifted, m, 400);
    for (std::size_t a = 0; a < m; ++a)
      for (std::size_t b = 0; b < m; ++b) {
        CHECK(s(a, b) == std::conj(s(b, a)));
        CHECK(std::abs(s(a, b) - brute.matrix(a, b)) <= brute.entry_tail_bound(static_cast<Eigen::Index>(a), static_cast<Eigen::Index>(b)) + 1e-12);
      }
    const auto e = extremal_eigenvalues(s);
    CHECK(e.lambda_min >= -1e-10 * e.norm);
  }
}

TEST_CASE("invalid systems and schemes") {
  const auto sys = geometric_system();
  CHECK_THROWS_AS(frame_operator_matrix(sys, {0, 0, 0}, 5), InvalidArgument);
  CHECK_THROWS_AS(frame_operator_matrix(sys, {2, 2, 0}, 5), InvalidArgument);
  const OrbitSystem dup(LambdaSequence::explicit_list({0.5, 0.5}), Weights::constant(1.0));
  CHECK_THROWS_AS(frame_operator_matrix(dup, {1, 0, 0}, 2), InvariantViolation);
  const OrbitSystem short_list(LambdaSequence::explicit_list({0.5, 0.6}), Weights::constant(1.0));
  CHECK_THROWS_AS(frame_bounds(short_list, {1, 0, 0}, 3), IndexOutOfRange);
  const OrbitSystem short_weights(LambdaSequence::geometric(2.0), Weights::explicit_list({1.0}, 1.0, 1.0));
  CHECK_THROWS_AS(phi_coefficients(short_weights, 2), IndexOutOfRange);
}
