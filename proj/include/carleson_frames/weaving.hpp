#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "carleson_frames/errors.hpp"
#include "carleson_frames/orbit.hpp"

namespace cframes {

/// Offset choice k -> j_k in {0, ..., N-1}, k >= 0. Every kind is eventually
/// periodic: j_k = j_{s + (k - s) mod P} for k >= s = period_start(),
/// P = period().
///
///  - constant(j): j_k = j.
///  - periodic(list): j_k = list[k mod len].
///  - explicit_list(list): j_k = list[k]; the last entry repeats past the end.
///  - seeded(seed, length): a block of `length` values from xorshift64*,
///    repeated. State starts at seed ^ 0x9E3779B97F4A7C15 (or that constant
///    itself when the xor is zero); each step does x ^= x >> 12,
///    x ^= x << 25, x ^= x >> 27 and emits ((x * 0x2545F4914F6CDD1D) >> 32) mod N.
class WeavePattern {
 public:
  enum class Kind { Constant, Periodic, Explicit, Seeded };

  static WeavePattern constant(std::uint64_t n, std::uint64_t j);
  static WeavePattern periodic(std::uint64_t n, std::vector<std::uint64_t> offsets);
  static WeavePattern explicit_list(std::uint64_t n, std::vector<std::uint64_t> offsets);
  static WeavePattern seeded(std::uint64_t n, std::uint64_t seed, std::size_t length = 256);

  Kind kind() const noexcept { return kind_; }
  std::uint64_t N() const noexcept { return n_; }
  std::uint64_t at(std::size_t k) const noexcept {
    if (k < start_) return values_[k];
    return values_[start_ + (k - start_) % period_];
  }
  std::size_t period_start() const noexcept { return start_; }
  std::size_t period() const noexcept { return period_; }
  std::uint64_t max_offset() const noexcept { return max_; }
  /// Constant, periodic and explicit: the list as given. Seeded: the block.
  const std::vector<std::uint64_t>& values() const noexcept { return values_; }
  std::uint64_t seed() const noexcept { return seed_; }

  std::string describe() const;

 private:
  WeavePattern(Kind kind, std::uint64_t n, std::vector<std::uint64_t> values, std::size_t start,
               std::size_t period, std::uint64_t seed);

  Kind kind_;
  std::uint64_t n_;
  std::vector<std::uint64_t> values_;
  std::size_t start_;
  std::size_t period_;
  std::uint64_t max_ = 0;
  std::uint64_t seed_ = 0;
};

struct WeaveOptions {
  std::size_t j_max = 10000;
  /// Absolute budget for the k-truncation of non-constant patterns,
  /// split evenly over the M coordinates.
  double sum_tol = 1e-14;
  double eig_tol = 1e-10;
};

/// D(J) = sum_{k >= J} || T^{Nk} phi - T^{Nk + j_k} phi ||^2 over the first M
/// coordinates, and a bound on what the truncation leaves out: the omitted
/// k-tail plus every coordinate n > M. The full defect lies in
/// [value, value + truncation_bound].
struct TailDefect {
  std::size_t J = 0;
  double value = 0.0;
  double truncation_bound = 0.0;
  bool closed_form = false;

  double upper() const noexcept { return value + truncation_bound; }
};

TailDefect tail_defect(const OrbitSystem& sys, const WeavePattern& pattern, std::size_t j_start,
                       std::size_t m, const WeaveOptions& options = {});

/// tail_defect at every J of `starts`, sharing the per-coordinate work.
std::vector<TailDefect> tail_defect_curve(const OrbitSystem& sys, const WeavePattern& pattern,
                                          std::span<const std::size_t> starts, std::size_t m,
                                          const WeaveOptions& options = {});

/// (C2 / C1)^2 ||phi_M||^2.
double defect_upper_bound(const OrbitSystem& sys, std::size_t m);

/// (sqrt(A) - sqrt(D))^2 when D < A, else 0.
double perturbation_lower_bound(double a, double defect);

/// Frame operator over M coordinates of the woven family
///   {T^{Nk} phi}_{k < J}  union  {T^{Nk + j_k} phi}_{k >= J},
/// in closed form using eventual periodicity of the pattern.
HermitianMatrix woven_frame_operator(const OrbitSystem& sys, const WeavePattern& pattern,
                                     std::size_t j_start, std::size_t m);

struct WeavingResult {
  std::size_t J = 0;
  /// value + truncation_bound at J; the quantity compared against safety * A.
  double defect_at_J = 0.0;
  double defect_value = 0.0;
  double truncation_bound = 0.0;
  double A_est_used = 0.0;
  double safety = 0.0;
  double predicted_lower_bound = 0.0;
  FrameBoundEstimate verified_bounds;
  /// verified A_est >= predicted_lower_bound - eig_residual * ||S||.
  bool verification_passed = false;
  std::size_t M = 0;
  std::vector<TailDefect> curve;
};

class WeavingIndexNotFound : public Error {
 public:
  WeavingIndexNotFound(const std::string& what, std::vector<TailDefect> curve)
      : Error(what), curve_(std::move(curve)) {}
  const std::vector<TailDefect>& curve() const noexcept { return curve_; }

 private:
  std::vector<TailDefect> curve_;
};

/// Smallest J <= j_max with tail_defect(J).upper() < safety * A_est, then a
/// direct eigenvalue check of the woven family at that J. The returned
/// curve covers J = 0..J.
WeavingResult find_weaving_index(const OrbitSystem& sys, const WeavePattern& pattern, double a_est,
                                 double safety, std::size_t m, const WeaveOptions& options = {});

}  // namespace cframes
