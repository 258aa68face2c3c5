#include "carleson_frames/orbit.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "carleson_frames/errors.hpp"
#include "pair_geometry.hpp"

namespace cframes {

void OrbitSystem::require_valid(std::size_t m) const {
  if (m == 0) throw InvalidArgument("truncation dimension must be positive");
  if (const auto len = lambdas_.length(); len && m > *len) {
    std::ostringstream msg;
    msg << "truncation " << m << " exceeds the " << *len << " available eigenvalues";
    throw IndexOutOfRange(msg.str());
  }
  const ValidationReport report = validate(lambdas_, m);
  if (!report.in_disc || !report.distinct) {
    std::string msg = "invalid orbit system";
    if (!report.failures.empty()) msg += ": " + report.failures.front();
    throw InvariantViolation(msg);
  }
  for (std::size_t n = 1; n <= m; ++n) (void)weights_.at(n);
}

Complex OrbitSystem::generator_coefficient(std::size_t n) const {
  return weights_.at(n) * std::sqrt(lambdas_.point(n).one_minus_modulus_sq());
}

void SubsampleScheme::check() const {
  if (N == 0) throw InvalidArgument("subsample factor N must be positive");
  if (j >= N) throw InvalidArgument("offset j must lie in [0, N)");
}

std::vector<Complex> phi_coefficients(const OrbitSystem& sys, std::size_t m) {
  sys.require_valid(m);
  std::vector<Complex> c(m);
  for (std::size_t n = 1; n <= m; ++n) c[n - 1] = sys.generator_coefficient(n);
  return c;
}

Complex orbit_coefficient(const OrbitSystem& sys, std::size_t n, std::uint64_t p) {
  return sys.generator_coefficient(n) * complex_pow(sys.lambdas().at(n), p);
}

HermitianMatrix frame_operator_matrix(const OrbitSystem& sys, const SubsampleScheme& scheme,
                                      std::size_t m) {
  scheme.check();
  sys.require_valid(m);
  std::vector<DiscPoint> points(m);
  std::vector<Complex> c(m);
  for (std::size_t n = 0; n < m; ++n) {
    points[n] = sys.lambdas().point(n + 1);
    c[n] = sys.generator_coefficient(n + 1);
  }
  const std::uint64_t p0 = scheme.first_exponent();
  return HermitianMatrix::assemble(m, [&](std::size_t a, std::size_t b) {
    if (a == b) {
      // |m|^2 eta (1 - eta)^{p0} / (1 - (1 - eta)^N), eta = 1 - |lambda|^2
      const double eta = points[a].one_minus_modulus_sq();
      const double denominator = one_minus_pow(eta, scheme.N);
      if (denominator == 0.0) throw SingularDenominator("1 - |lambda|^{2N} vanishes");
      return Complex(std::norm(sys.weights().at(a + 1)) * eta * pow_from_gap(eta, p0) / denominator, 0.0);
    }
    const detail::PairProduct w = detail::pair_product(points[a], points[b]);
    const Complex denominator = detail::one_minus_power(w, scheme.N);
    if (denominator == Complex(0.0, 0.0)) {
      std::ostringstream msg;
      msg << "1 - (lambda_" << a + 1 << " conj(lambda_" << b + 1 << "))^" << scheme.N << " vanishes";
      throw SingularDenominator(msg.str());
    }
    return c[a] * std::conj(c[b]) * complex_pow(w.value, p0) / denominator;
  });
}

BruteForceFrameOperator frame_operator_bruteforce(const OrbitSystem& sys, const SubsampleScheme& scheme,
                                                  std::size_t m, std::size_t terms) {
  scheme.check();
  sys.require_valid(m);
  if (terms == 0) throw InvalidArgument("brute-force summation needs at least one term");

  const auto dim = static_cast<Eigen::Index>(m);
  Eigen::MatrixXcd vectors(dim, static_cast<Eigen::Index>(terms));
  for (std::size_t t = 0; t < terms; ++t) {
    const std::uint64_t p = scheme.N * (scheme.K + t) + scheme.j;
    for (std::size_t n = 0; n < m; ++n) {
      vectors(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(t)) = orbit_coefficient(sys, n + 1, p);
    }
  }

  BruteForceFrameOperator out;
  out.terms = terms;
  out.matrix = HermitianMatrix::assemble(m, [&](std::size_t a, std::size_t b) {
    Complex sum(0.0, 0.0);
    for (std::size_t t = 0; t < terms; ++t) {
      const auto ti = static_cast<Eigen::Index>(t);
      sum += vectors(static_cast<Eigen::Index>(a), ti) * std::conj(vectors(static_cast<Eigen::Index>(b), ti));
    }
    return sum;
  });

  out.entry_tail_bound.resize(dim, dim);
  const std::uint64_t p_next = scheme.N * (scheme.K + terms) + scheme.j;
  for (std::size_t a = 0; a < m; ++a) {
    const DiscPoint pa = sys.lambdas().point(a + 1);
    const double ca = std::abs(sys.generator_coefficient(a + 1));
    for (std::size_t b = 0; b < m; ++b) {
      const DiscPoint pb = sys.lambdas().point(b + 1);
      const double cb = std::abs(sys.generator_coefficient(b + 1));
      const detail::PairProduct w = detail::pair_product(pa, pb);
      const double bound = ca * cb * detail::modulus_power(w, p_next) / one_minus_pow(w.gap, scheme.N);
      out.entry_tail_bound(static_cast<Eigen::Index>(a), static_cast<Eigen::Index>(b)) = bound;
      out.tail_bound = std::max(out.tail_bound, bound);
    }
  }
  return out;
}

FrameBoundEstimate frame_bounds(const OrbitSystem& sys, const SubsampleScheme& scheme, std::size_t m,
                                double tol) {
  const HermitianMatrix s = frame_operator_matrix(sys, scheme, m);
  const EigenEstimate eig = extremal_eigenvalues(s, tol);
  FrameBoundEstimate out;
  out.A_est = eig.lambda_min;
  out.B_est = eig.lambda_max;
  out.M = m;
  out.eig_residual = eig.residual;
  out.tol = tol;
  out.scheme = scheme;
  return out;
}

RetildeWeights retilde_weights(const OrbitSystem& sys, std::uint64_t n, std::size_t count) {
  if (n == 0) throw InvalidArgument("power N must be positive");
  sys.require_valid(count);
  RetildeWeights out;
  out.lower = sys.weights().c1() / std::sqrt(2.0 * static_cast<double>(n));
  out.upper = sys.weights().c2();
  out.bound_check = true;
  out.identity_check = true;
  out.weights.reserve(count);

  for (std::size_t k = 1; k <= count; ++k) {
    const Complex m = sys.weights().at(k);
    const double eta = sys.lambdas().point(k).one_minus_modulus_sq();  // 1 - |lambda|^2
    const double eta_n = one_minus_pow(eta, n);                         // 1 - |lambda|^{2N}
    // eta / eta_n -> 1/N as |lambda| -> 1.
    const double ratio = eta > 0.0 ? eta / eta_n : 1.0 / static_cast<double>(n);
    const Complex tilde = m * std::sqrt(ratio);
    out.weights.push_back(tilde);

    const double modulus = std::abs(tilde);
    if (modulus < out.lower || modulus > out.upper) out.bound_check = false;

    const Complex c = m * std::sqrt(eta);
    const double unit = ulp(std::abs(c));
    const double deviation = std::abs(tilde * std::sqrt(eta_n) - c);
    const double in_ulps = unit > 0.0 ? deviation / unit : 0.0;
    out.max_identity_ulps = std::max(out.max_identity_ulps, in_ulps);
    if (in_ulps > 4.0) out.identity_check = false;
  }
  return out;
}

}  // namespace cframes
