#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include <Eigen/Dense>

#include "carleson_frames/numerics.hpp"
#include "carleson_frames/sequences.hpp"

namespace cframes {

/// Diagonal operator T e_n = lambda_n e_n with generator
///   phi = sum_n m_n sqrt(1 - |lambda_n|^2) e_n.
/// The Hilbert space is modelled by its first M coordinates; every
/// operation takes M explicitly.
class OrbitSystem {
 public:
  OrbitSystem(LambdaSequence lambdas, Weights weights)
      : lambdas_(std::move(lambdas)), weights_(std::move(weights)) {}

  const LambdaSequence& lambdas() const noexcept { return lambdas_; }
  const Weights& weights() const noexcept { return weights_; }

  /// Throws IndexOutOfRange / InvariantViolation / BoundViolation unless
  /// lambda_1..lambda_M are distinct points of the open disc and m_1..m_M
  /// respect the weight envelope.
  void require_valid(std::size_t m) const;

  /// c_n = m_n sqrt(1 - |lambda_n|^2), n >= 1.
  Complex generator_coefficient(std::size_t n) const;

 private:
  LambdaSequence lambdas_;
  Weights weights_;
};

/// Selects {T^{Nk + j} phi}_{k >= K}.
struct SubsampleScheme {
  std::uint64_t N = 1;
  std::uint64_t j = 0;
  std::uint64_t K = 0;

  void check() const;
  std::uint64_t first_exponent() const noexcept { return j + N * K; }
  bool operator==(const SubsampleScheme&) const = default;
};

/// Extremal eigenvalues of the M x M truncated frame operator. By
/// interlacing A_est can only decrease and B_est only increase with M:
/// A_est over-estimates the true lower frame bound, B_est under-estimates
/// the upper one.
struct FrameBoundEstimate {
  double A_est = 0.0;
  double B_est = 0.0;
  std::size_t M = 0;
  double eig_residual = 0.0;
  double tol = 0.0;
  SubsampleScheme scheme;
};

std::vector<Complex> phi_coefficients(const OrbitSystem& sys, std::size_t m);

/// <T^p phi, e_n> = m_n lambda_n^p sqrt(1 - |lambda_n|^2).
Complex orbit_coefficient(const OrbitSystem& sys, std::size_t n, std::uint64_t p);

/// Closed-form frame operator of the subfamily, restricted to M coordinates:
///   S(m, n) = c_m conj(c_n) w^{j + NK} / (1 - w^N),  w = lambda_m conj(lambda_n).
HermitianMatrix frame_operator_matrix(const OrbitSystem& sys, const SubsampleScheme& scheme,
                                      std::size_t m);

struct BruteForceFrameOperator {
  HermitianMatrix matrix;
  /// Per-entry bound on the omitted geometric tail.
  Eigen::MatrixXd entry_tail_bound;
  double tail_bound = 0.0;
  std::size_t terms = 0;
};

/// Sum of the first `terms` rank-one contributions of the subfamily. Exists
/// as an independent check on frame_operator_matrix.
BruteForceFrameOperator frame_operator_bruteforce(const OrbitSystem& sys, const SubsampleScheme& scheme,
                                                  std::size_t m, std::size_t terms);

FrameBoundEstimate frame_bounds(const OrbitSystem& sys, const SubsampleScheme& scheme, std::size_t m,
                                double tol = 1e-10);

/// Weights that express the same generator over the powered sequence:
///   m~_k = m_k sqrt((1 - |lambda_k|^2) / (1 - |lambda_k^N|^2)),
/// so that m~_k sqrt(1 - |lambda_k^N|^2) = c_k.
struct RetildeWeights {
  std::vector<Complex> weights;
  double lower = 0.0;  ///< C1 (2N)^{-1/2}
  double upper = 0.0;  ///< C2
  bool bound_check = false;
  bool identity_check = false;
  double max_identity_ulps = 0.0;
};

RetildeWeights retilde_weights(const OrbitSystem& sys, std::uint64_t n, std::size_t count);

}  // namespace cframes
