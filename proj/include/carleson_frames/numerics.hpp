#pragma once

#include <complex>
#include <cstddef>
#include <cstdint>
#include <span>

#include <Eigen/Dense>

namespace cframes {

using Complex = std::complex<double>;

/// Neumaier (improved Kahan-Babuska) running sum. Deterministic for a fixed
/// order of additions.
class NeumaierSum {
 public:
  void add(double term) noexcept;
  double value() const noexcept { return sum_ + compensation_; }

 private:
  double sum_ = 0.0;
  double compensation_ = 0.0;
};

double compensated_sum(std::span<const double> terms) noexcept;

/// z^p by binary exponentiation. The squaring chain runs in extended
/// precision and is rounded once at the end. complex_pow(z, 0) == 1.
Complex complex_pow(Complex z, std::uint64_t p) noexcept;

/// 1 - (1 - eta)^p for eta in [0, 1], accurate when eta is tiny.
/// Returns eta itself (bit-exact) for p == 1.
double one_minus_pow(double eta, std::uint64_t p) noexcept;

/// (1 - eta)^p for eta in [0, 1], without forming 1 - eta.
double pow_from_gap(double eta, std::uint64_t p) noexcept;

/// Distance to the next representable double above |x|.
double ulp(double x) noexcept;

/// Dense Hermitian matrix, column-major. Instances are immutable once built.
class HermitianMatrix {
 public:
  HermitianMatrix() = default;

  /// Takes ownership of `entries` after checking that it is square and
  /// Hermitian within 4 ulps per entry pair. Throws NonHermitian otherwise.
  explicit HermitianMatrix(Eigen::MatrixXcd entries);

  /// Fills the upper triangle from `entry(m, n)` (m <= n, zero-based) and
  /// mirrors it; the diagonal is forced real.
  template <class EntryFn>
  static HermitianMatrix assemble(std::size_t dim, EntryFn&& entry) {
    Eigen::MatrixXcd a(static_cast<Eigen::Index>(dim), static_cast<Eigen::Index>(dim));
    for (std::size_t n = 0; n < dim; ++n) {
      for (std::size_t m = 0; m <= n; ++m) {
        const Complex v = entry(m, n);
        const auto mi = static_cast<Eigen::Index>(m);
        const auto ni = static_cast<Eigen::Index>(n);
        if (m == n) {
          a(mi, ni) = Complex(v.real(), 0.0);
        } else {
          a(mi, ni) = v;
          a(ni, mi) = std::conj(v);
        }
      }
    }
    return HermitianMatrix(std::move(a), Trusted{});
  }

  std::size_t dim() const noexcept { return static_cast<std::size_t>(entries_.rows()); }
  Complex operator()(std::size_t m, std::size_t n) const {
    return entries_(static_cast<Eigen::Index>(m), static_cast<Eigen::Index>(n));
  }
  const Eigen::MatrixXcd& dense() const noexcept { return entries_; }

 private:
  struct Trusted {};
  HermitianMatrix(Eigen::MatrixXcd entries, Trusted) : entries_(std::move(entries)) {}

  Eigen::MatrixXcd entries_;
};

struct EigenEstimate {
  double lambda_min = 0.0;
  double lambda_max = 0.0;
  /// max over both extremal pairs of ||S v - lambda v|| / ||S||.
  double residual = 0.0;
  /// Spectral norm of S (max |eigenvalue|).
  double norm = 0.0;
  Eigen::VectorXcd v_min;
  Eigen::VectorXcd v_max;
};

/// Extremal eigenpairs with a residual certificate. Throws NonConvergence
/// when the solver fails or the certified residual exceeds `tol`.
EigenEstimate extremal_eigenvalues(const HermitianMatrix& s, double tol = 1e-10);

}  // namespace cframes
