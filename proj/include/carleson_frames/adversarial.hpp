#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "carleson_frames/orbit.hpp"

namespace cframes {

/// Coordinates of a frame {f_k}_{k >= 0} in an orthonormal basis {e_j}_{j >= 1}.
/// Frame indices start at 0 for every oracle.
class FrameOracle {
 public:
  virtual ~FrameOracle() = default;

  /// <e_j, f_k>
  virtual Complex coefficient(std::size_t j, std::uint64_t k) const = 0;
  /// sum_{k >= K} |<e_j, f_k>|^2, exact or an upper bound; nonincreasing in K.
  virtual double tail_energy(std::size_t j, std::uint64_t k) const = 0;
  /// Number of basis vectors, when finite.
  virtual std::optional<std::size_t> dimension() const { return std::nullopt; }
  virtual std::string describe() const = 0;
};

/// f_k = T^k phi: <e_n, f_k> = m_n lambda_n^k sqrt(1 - |lambda_n|^2) and
/// tail_energy(n, K) = |m_n|^2 |lambda_n|^{2K} (geometric series, exact).
class OrbitFrameOracle final : public FrameOracle {
 public:
  explicit OrbitFrameOracle(OrbitSystem sys) : sys_(std::move(sys)) {}

  Complex coefficient(std::size_t j, std::uint64_t k) const override;
  double tail_energy(std::size_t j, std::uint64_t k) const override;
  std::optional<std::size_t> dimension() const override { return sys_.lambdas().length(); }
  std::string describe() const override;

  const OrbitSystem& system() const noexcept { return sys_; }

 private:
  OrbitSystem sys_;
};

/// f_k = e_{k+1}.
class OrthonormalBasisOracle final : public FrameOracle {
 public:
  Complex coefficient(std::size_t j, std::uint64_t k) const override;
  double tail_energy(std::size_t j, std::uint64_t k) const override;
  std::string describe() const override { return "orthonormal_basis"; }
};

/// Finite prefix of the inductive construction. Level l = 0..L uses the
/// witness e_{j_l} (j_0 = 1) and certifies
///   step_bounds[l] = sum_{i <= l} |<e_{j_l}, f_{N_i}>|^2 + tail_energy(j_l, N_{l+1}) <= 2^{-l},
/// an upper bound for the lower frame bound of {f_{N_1}, ..., f_{N_l}} together
/// with {f_k}_{k >= N_{l+1}}, hence of any subfamily containing the picks.
struct AdversarialCertificate {
  std::string oracle;
  std::size_t levels = 0;        ///< L
  std::size_t search_budget = 0;
  std::vector<std::uint64_t> picked_indices;  ///< N_1 < ... < N_{L+1}
  std::vector<std::size_t> witnesses;         ///< j_0 = 1 < j_1 < ... < j_L
  std::vector<double> coefficient_sums;       ///< per level
  std::vector<double> tails;                  ///< tail_energy(j_l, N_{l+1})
  std::vector<double> step_bounds;            ///< coefficient_sums + tails
  std::vector<double> thresholds;             ///< 2^{-l}
};

/// Picks, at every step, the smallest qualifying witness and the smallest
/// qualifying frame index. Each search inspects at most `search_budget`
/// candidates; SearchBudgetExhausted otherwise.
AdversarialCertificate build_adversarial_subsequence(const FrameOracle& oracle, std::size_t levels,
                                                     std::size_t search_budget = 1000000);

/// step_bounds recomputed from the oracle for the stored picks and witnesses.
std::vector<double> recompute_step_bounds(const FrameOracle& oracle, const AdversarialCertificate& cert);

/// lambda_min of sum_{k in indices} f_k f_k^* over e_1..e_M.
double estimate_subsequence_lower_bound(const FrameOracle& oracle, std::span<const std::uint64_t> indices,
                                        std::size_t m, double tol = 1e-10);

}  // namespace cframes
