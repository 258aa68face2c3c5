#include "carleson_frames/numerics.hpp"

#include <cmath>
#include <limits>
#include <sstream>

#include "carleson_frames/errors.hpp"

namespace cframes {

void NeumaierSum::add(double term) noexcept {
  const double t = sum_ + term;
  if (std::abs(sum_) >= std::abs(term)) {
    compensation_ += (sum_ - t) + term;
  } else {
    compensation_ += (term - t) + sum_;
  }
  sum_ = t;
}

double compensated_sum(std::span<const double> terms) noexcept {
  NeumaierSum acc;
  for (double t : terms) acc.add(t);
  return acc.value();
}

namespace {

struct WideComplex {
  long double re;
  long double im;
};

// Plain schoolbook product; the inputs are finite, so the Annex G
// infinity recovery done by operator* is not needed.
WideComplex multiply(const WideComplex& a, const WideComplex& b) noexcept {
  return {a.re * b.re - a.im * b.im, a.re * b.im + a.im * b.re};
}

}  // namespace

Complex complex_pow(Complex z, std::uint64_t p) noexcept {
  WideComplex base{z.real(), z.imag()};
  WideComplex result{1.0L, 0.0L};
  while (p != 0) {
    if (p & 1U) result = multiply(result, base);
    p >>= 1U;
    if (p != 0) base = multiply(base, base);
  }
  return {static_cast<double>(result.re), static_cast<double>(result.im)};
}

double one_minus_pow(double eta, std::uint64_t p) noexcept {
  if (p == 0 || eta == 0.0) return 0.0;
  if (p == 1) return eta;
  if (eta >= 1.0) return 1.0;
  return -std::expm1(static_cast<double>(p) * std::log1p(-eta));
}

double pow_from_gap(double eta, std::uint64_t p) noexcept {
  if (p == 0) return 1.0;
  if (eta >= 1.0) return 0.0;
  if (p == 1) return 1.0 - eta;
  return std::exp(static_cast<double>(p) * std::log1p(-eta));
}

double ulp(double x) noexcept {
  const double a = std::abs(x);
  return std::nextafter(a, std::numeric_limits<double>::infinity()) - a;
}

HermitianMatrix::HermitianMatrix(Eigen::MatrixXcd entries) : entries_(std::move(entries)) {
  if (entries_.rows() != entries_.cols()) {
    throw NonHermitian("matrix is not square");
  }
  const Eigen::Index dim = entries_.rows();
  for (Eigen::Index n = 0; n < dim; ++n) {
    const Complex d = entries_(n, n);
    if (std::abs(d.imag()) > 4.0 * ulp(std::abs(d))) {
      std::ostringstream msg;
      msg << "diagonal entry (" << n << "," << n << ") has imaginary part " << d.imag();
      throw NonHermitian(msg.str());
    }
    for (Eigen::Index m = 0; m < n; ++m) {
      const Complex upper = entries_(m, n);
      const Complex lower = entries_(n, m);
      const double scale = std::max(std::abs(upper), std::abs(lower));
      if (std::abs(upper - std::conj(lower)) > 4.0 * ulp(scale)) {
        std::ostringstream msg;
        msg << "entries (" << m << "," << n << ") and (" << n << "," << m
            << ") are not conjugate";
        throw NonHermitian(msg.str());
      }
    }
  }
}

EigenEstimate extremal_eigenvalues(const HermitianMatrix& s, double tol) {
  if (s.dim() == 0) throw InvalidArgument("extremal_eigenvalues: empty matrix");
  if (!(tol > 0.0)) throw InvalidArgument("extremal_eigenvalues: tol must be positive");

  const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> solver(s.dense());
  if (solver.info() != Eigen::Success) {
    throw NonConvergence("Hermitian eigensolver did not converge");
  }
  const auto& values = solver.eigenvalues();
  const Eigen::Index last = values.size() - 1;

  EigenEstimate out;
  out.lambda_min = values(0);
  out.lambda_max = values(last);
  out.v_min = solver.eigenvectors().col(0);
  out.v_max = solver.eigenvectors().col(last);
  out.norm = std::max(std::abs(out.lambda_min), std::abs(out.lambda_max));

  if (out.norm > 0.0) {
    const auto& a = s.dense();
    const double r_min = (a * out.v_min - out.lambda_min * out.v_min).norm();
    const double r_max = (a * out.v_max - out.lambda_max * out.v_max).norm();
    out.residual = std::max(r_min, r_max) / out.norm;
  }
  if (!(out.residual <= tol)) {
    std::ostringstream msg;
    msg << "eigen residual " << out.residual << " exceeds tolerance " << tol;
    throw NonConvergence(msg.str());
  }
  return out;
}

}  // namespace cframes
