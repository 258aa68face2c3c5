#pragma once

#include <cstdint>

#include "carleson_frames/numerics.hpp"
#include "carleson_frames/sequences.hpp"

namespace cframes::detail {

/// w = a * conj(b) with gap = 1 - |w| = ga + gb - ga gb, exact in the gaps.
struct PairProduct {
  Complex value;
  double gap = 1.0;
  bool real = false;
};

inline PairProduct pair_product(const DiscPoint& a, const DiscPoint& b) {
  return {a.value * std::conj(b.value), a.gap + b.gap - a.gap * b.gap, a.is_real() && b.is_real()};
}

/// |w|^p
inline double modulus_power(const PairProduct& w, std::uint64_t p) { return pow_from_gap(w.gap, p); }

/// 1 - w^p. Real products go through the gap so that w close to 1 does not
/// cancel; complex products fall back to direct evaluation.
inline Complex one_minus_power(const PairProduct& w, std::uint64_t p) {
  if (w.real) {
    if (w.value.real() >= 0.0 || p % 2 == 0) return {one_minus_pow(w.gap, p), 0.0};
    return {1.0 + pow_from_gap(w.gap, p), 0.0};
  }
  return 1.0 - complex_pow(w.value, p);
}

}  // namespace cframes::detail
