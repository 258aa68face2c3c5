#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "carleson_frames/sequences.hpp"

namespace cframes {

enum class Verdict { CertifiedHolds, CertifiedFails, Inconclusive };

std::string_view to_string(Verdict v) noexcept;

/// Truncated Blaschke-type product
///   P_n = prod_{k <= k_trunc, k != n} |lambda_k - lambda_n| / |1 - conj(lambda_k) lambda_n|
/// and an absolute bound on how far the omitted factors can pull it down:
/// the untruncated product lies in [value - tail_error, value].
struct ProductEntry {
  std::size_t n = 0;
  double value = 0.0;
  double tail_error = 0.0;
};

struct CarlesonOptions {
  double fail_threshold = 1e-12;
};

struct RatioTest {
  /// max over consecutive pairs k < k_max of (1 - |lambda_{k+1}|) / (1 - |lambda_k|).
  double ratio_sup = 0.0;
  std::size_t argmax = 0;
  std::size_t k_max = 0;
  bool moduli_increasing = false;
  /// Set only when an analytic bound for every k is available.
  std::optional<double> certified_c;
};

struct CarlesonReport {
  std::string sequence;
  std::vector<ProductEntry> products;
  /// min of the computed P_n; evidence only, never a certificate.
  double inf_estimate = 0.0;
  std::optional<double> ratio_sup;
  std::optional<double> certified_c;
  Verdict verdict = Verdict::Inconclusive;
  std::string reason;

  std::size_t n_max = 0;
  std::size_t k_trunc = 0;
  double fail_threshold = 0.0;

  /// Populated by drop_prefix_check: the removed indices and their finite
  /// products against the full sequence.
  std::size_t dropped = 0;
  std::vector<ProductEntry> dropped_products;
};

ProductEntry carleson_product(const LambdaSequence& seq, std::size_t n, std::size_t k_trunc);

CarlesonReport carleson_inf_estimate(const LambdaSequence& seq, std::size_t n_max,
                                     std::size_t k_trunc, const CarlesonOptions& options = {});

RatioTest ratio_test(const LambdaSequence& seq, std::size_t k_max);

/// A constant c < 1 bounding the consecutive gap ratio for every k, when
/// it can be established in closed form:
///  - geometric(alpha): exactly 1/alpha;
///  - power_of(base, N): from a certificate c of base, via
///      r_N(k) = r_1(k) * S(|lambda_{k+1}|) / S(|lambda_k|),  S(x) = 1 + x + ... + x^{N-1},
///    bounding the second factor by N / S(|lambda_{K0+1}|) past a window
///    k <= K0 whose ratios are evaluated directly;
///  - a dropped prefix inherits the certificate of its base.
std::optional<double> ratio_certificate(const LambdaSequence& seq);

/// Runs carleson_inf_estimate on {lambda_k}_{k > n_drop}. A certified
/// verdict for the tail carries over to the full sequence (removing a
/// finite prefix does not affect the condition), unless a dropped index
/// repeats a point.
CarlesonReport drop_prefix_check(const LambdaSequence& seq, std::size_t n_drop, std::size_t n_max,
                                 std::size_t k_trunc, const CarlesonOptions& options = {});

struct TrailingModulus {
  std::size_t k = 0;
  double modulus = 0.0;
  double gap = 0.0;
};

/// Necessary-condition screen: Carleson sequences have |lambda_k| -> 1.
struct LimitModulusCheck {
  bool passes = false;
  double final_gap = 1.0;
  double threshold = 0.0;
  std::size_t k_max = 0;
  std::vector<TrailingModulus> trailing;
};

LimitModulusCheck limit_modulus_check(const LambdaSequence& seq, std::size_t k_max,
                                      double evidence_threshold = 1e-3);

/// {lambda_k^N}; convenience alias for LambdaSequence::power_of.
inline LambdaSequence power_sequence(const LambdaSequence& seq, std::uint64_t n) {
  return LambdaSequence::power_of(seq, n);
}

}  // namespace cframes
