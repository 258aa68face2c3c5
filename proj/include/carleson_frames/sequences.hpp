#pragma once

#include <complex>
#include <cstddef>
#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "carleson_frames/numerics.hpp"

namespace cframes {

/// A point of the open unit disc together with its distance to the circle,
/// gap = 1 - |value|. The gap is carried separately because generators such
/// as 1 - alpha^{-k} round to 1.0 long before the gap underflows, and every
/// downstream formula (1 - |lambda|^2, Blaschke factors, geometric series)
/// is evaluated from the gap.
struct DiscPoint {
  Complex value;
  double gap = 1.0;

  bool is_real() const noexcept { return value.imag() == 0.0; }
  double modulus() const noexcept { return 1.0 - gap; }
  /// 1 - |value|^2
  double one_minus_modulus_sq() const noexcept { return gap * (2.0 - gap); }
};

struct SequenceFlags {
  bool real_positive = false;
  bool strictly_increasing_moduli = false;
};

/// Lazily evaluated eigenvalue sequence lambda_1, lambda_2, ... (indices
/// start at 1). Cheap to copy; every instance is immutable.
class LambdaSequence {
 public:
  enum class Kind { Geometric, Explicit, TwoPointAugmented, PowerOf, Shifted };

  /// lambda_k = 1 - alpha^{-k}, alpha > 1.
  static LambdaSequence geometric(double alpha);
  /// Finite list; every entry must satisfy |lambda| < 1.
  static LambdaSequence explicit_list(std::vector<Complex> values);
  /// {q, -q, base_1, base_2, ...}; q in (0, 1) and q, -q not in base.
  static LambdaSequence two_point_augmented(double q, LambdaSequence base);
  /// lambda_k = base_k^power.
  static LambdaSequence power_of(LambdaSequence base, std::uint64_t power);
  /// {lambda_k}_{k > count}, re-indexed from 1. Explicit lists are sliced,
  /// and a two-point augmentation dropped past its prefix collapses to its
  /// base. Throws EmptySequence when nothing would remain.
  static LambdaSequence drop_prefix(const LambdaSequence& seq, std::size_t count);

  Kind kind() const noexcept;

  /// lambda_k. Throws IndexOutOfRange past a finite end and
  /// InvariantViolation for an explicit entry outside the open disc.
  Complex at(std::size_t k) const { return point(k).value; }
  double gap(std::size_t k) const { return point(k).gap; }
  DiscPoint point(std::size_t k) const;

  /// Number of terms, or nullopt for unbounded generators.
  std::optional<std::size_t> length() const;
  bool evaluable(std::size_t k) const;

  /// Structural flags, computed once per sequence (thread-safe). Exact for
  /// generator kinds; explicit lists are scanned in full.
  SequenceFlags flags() const;

  /// Upper bound on sum_{k > after} (1 - |lambda_k|), when one is known in
  /// closed form (exact for finite lists).
  std::optional<double> gap_tail_sum(std::size_t after) const;

  double alpha() const;
  const std::vector<Complex>& values() const;
  double q() const;
  const LambdaSequence& base() const;
  std::uint64_t power() const;
  std::size_t offset() const;

  std::string describe() const;

  struct Node;

 private:
  explicit LambdaSequence(std::shared_ptr<const Node> node) : node_(std::move(node)) {}
  const Node& node() const { return *node_; }

  std::shared_ptr<const Node> node_;
};

/// Weight sequence m_1, m_2, ... with certified envelope C1 <= |m_k| <= C2.
class Weights {
 public:
  enum class Kind { Constant, Explicit };

  static Weights constant(Complex value);
  static Weights explicit_list(std::vector<Complex> values, double c1, double c2);

  Kind kind() const noexcept { return kind_; }
  /// m_k for k >= 1. Throws IndexOutOfRange or BoundViolation.
  Complex at(std::size_t k) const;
  std::optional<std::size_t> length() const;
  double c1() const noexcept { return c1_; }
  double c2() const noexcept { return c2_; }
  const std::vector<Complex>& values() const noexcept { return values_; }

  std::string describe() const;

 private:
  Weights(Kind kind, std::vector<Complex> values, double c1, double c2)
      : kind_(kind), values_(std::move(values)), c1_(c1), c2_(c2) {}

  Kind kind_;
  std::vector<Complex> values_;
  double c1_;
  double c2_;
};

struct ValidationReport {
  std::size_t checked = 0;
  bool in_disc = true;
  bool distinct = true;
  bool monotone_moduli = true;
  bool real_positive = true;
  std::vector<std::string> failures;
  SequenceFlags flags;

  bool all_passed() const noexcept {
    return in_disc && distinct && monotone_moduli && real_positive;
  }
};

/// Checks indices 1..n_max (clipped to a finite length). Never throws for
/// sequence defects; they are listed in `failures`.
ValidationReport validate(const LambdaSequence& seq, std::size_t n_max);

}  // namespace cframes
