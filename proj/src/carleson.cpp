#include "carleson_frames/carleson.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "carleson_frames/errors.hpp"
#include "carleson_frames/parallel.hpp"

namespace cframes {

namespace {

constexpr std::size_t kCertificateWindowCap = 1'000'000;

double sign_of(const DiscPoint& p) {
  const double re = p.value.real();
  return re > 0.0 ? 1.0 : (re < 0.0 ? -1.0 : 0.0);
}

// |1 - conj(a) b|, evaluated from the gaps when both points are real so
// that points rounding to 1.0 keep their separation.
double blaschke_denominator(const DiscPoint& a, const DiscPoint& b) {
  if (a.is_real() && b.is_real()) {
    const double s = sign_of(a) * sign_of(b);
    if (s > 0.0) return a.gap + b.gap - a.gap * b.gap;
    if (s < 0.0) return 1.0 + a.modulus() * b.modulus();
    return 1.0;
  }
  return std::abs(1.0 - std::conj(a.value) * b.value);
}

double point_distance(const DiscPoint& a, const DiscPoint& b) {
  if (a.is_real() && b.is_real()) {
    const double s = sign_of(a) * sign_of(b);
    if (s > 0.0) return std::abs(a.gap - b.gap);
    return a.modulus() + b.modulus();
  }
  return std::abs(a.value - b.value);
}

bool same_point(const DiscPoint& a, const DiscPoint& b) {
  return a.value == b.value && a.gap == b.gap;
}

// log of one factor |a - b| / |1 - conj(a) b|, using the pseudo-hyperbolic
// identity 1 - f^2 = (1 - |a|^2)(1 - |b|^2) / |1 - conj(a) b|^2 when the
// factor is close to 1.
double log_factor(const DiscPoint& a, const DiscPoint& b) {
  const double d = blaschke_denominator(a, b);
  const double one_minus_f2 = a.one_minus_modulus_sq() * b.one_minus_modulus_sq() / (d * d);
  if (one_minus_f2 <= 0.5) return 0.5 * std::log1p(-one_minus_f2);
  return std::log(point_distance(a, b) / d);
}

std::size_t clip(const LambdaSequence& seq, std::size_t k) {
  if (const auto len = seq.length()) return std::min(k, *len);
  return k;
}

}  // namespace

std::string_view to_string(Verdict v) noexcept {
  switch (v) {
    case Verdict::CertifiedHolds:
      return "CertifiedHolds";
    case Verdict::CertifiedFails:
      return "CertifiedFails";
    case Verdict::Inconclusive:
      return "Inconclusive";
  }
  return "Inconclusive";
}

ProductEntry carleson_product(const LambdaSequence& seq, std::size_t n, std::size_t k_trunc) {
  if (n == 0 || n > k_trunc) throw InvalidArgument("carleson_product needs 1 <= n <= k_trunc");
  const std::size_t k_last = clip(seq, k_trunc);
  const DiscPoint pn = seq.point(n);

  ProductEntry entry{n, 0.0, 0.0};
  NeumaierSum log_sum;
  for (std::size_t k = 1; k <= k_last; ++k) {
    if (k == n) continue;
    const DiscPoint pk = seq.point(k);
    if (same_point(pk, pn)) return entry;  // repeated point: exact zero
    log_sum.add(log_factor(pk, pn));
  }
  entry.value = std::exp(log_sum.value());

  const auto len = seq.length();
  if (len && k_trunc >= *len) {
    entry.tail_error = 0.0;
    return entry;
  }
  // Real-positive increasing: for k > k_trunc >= n,
  //   1 - f_k <= (1 - |lambda_k|)(1 + |lambda_n|) / (1 - |lambda_n|),
  // and prod(1 - a_k) >= 1 - sum a_k.
  const SequenceFlags flags = seq.flags();
  const auto tail_gaps = (flags.real_positive && flags.strictly_increasing_moduli)
                             ? seq.gap_tail_sum(k_trunc)
                             : std::nullopt;
  if (tail_gaps && pn.gap > 0.0) {
    const double deficit = *tail_gaps * (2.0 - pn.gap) / pn.gap;
    entry.tail_error = entry.value * std::min(1.0, deficit);
  } else {
    entry.tail_error = std::numeric_limits<double>::infinity();
  }
  return entry;
}

RatioTest ratio_test(const LambdaSequence& seq, std::size_t k_max) {
  RatioTest out;
  out.k_max = clip(seq, k_max);
  out.moduli_increasing = seq.flags().strictly_increasing_moduli;
  double previous = out.k_max >= 1 ? seq.gap(1) : 0.0;
  for (std::size_t k = 1; k < out.k_max; ++k) {
    const double next = seq.gap(k + 1);
    const double r = next / previous;
    if (k == 1 || r > out.ratio_sup) {
      out.ratio_sup = r;
      out.argmax = k;
    }
    previous = next;
  }
  if (out.moduli_increasing) out.certified_c = ratio_certificate(seq);
  return out;
}

std::optional<double> ratio_certificate(const LambdaSequence& seq) {
  if (!seq.flags().strictly_increasing_moduli) return std::nullopt;
  switch (seq.kind()) {
    case LambdaSequence::Kind::Geometric:
      return 1.0 / seq.alpha();
    case LambdaSequence::Kind::Shifted:
      return ratio_certificate(seq.base());
    case LambdaSequence::Kind::PowerOf: {
      const LambdaSequence& base = seq.base();
      const std::uint64_t power = seq.power();
      const auto c = ratio_certificate(base);
      if (power == 1 || !c) return c;
      if (!(*c < 1.0)) return std::nullopt;

      const double n = static_cast<double>(power);
      const double target = 0.5 * (1.0 + *c);
      std::size_t window = 0;
      double tail_c = std::numeric_limits<double>::infinity();
      for (; window < kCertificateWindowCap; ++window) {
        const double g = base.gap(window + 1);
        if (!(g > 0.0)) return std::nullopt;
        const double s = one_minus_pow(g, power) / g;  // S(|lambda_{window+1}|)
        tail_c = *c * n / s;
        if (tail_c <= target) break;
      }
      if (window == kCertificateWindowCap) return std::nullopt;

      double bound = tail_c;
      for (std::size_t k = 1; k <= window; ++k) {
        bound = std::max(bound, seq.gap(k + 1) / seq.gap(k));
      }
      if (!(bound < 1.0)) return std::nullopt;
      return bound;
    }
    default:
      return std::nullopt;
  }
}

CarlesonReport carleson_inf_estimate(const LambdaSequence& seq, std::size_t n_max,
                                     std::size_t k_trunc, const CarlesonOptions& options) {
  if (n_max == 0 || n_max > k_trunc) {
    throw InvalidArgument("carleson_inf_estimate needs 1 <= n_max <= k_trunc");
  }
  CarlesonReport report;
  report.sequence = seq.describe();
  report.n_max = clip(seq, n_max);
  report.k_trunc = k_trunc;
  report.fail_threshold = options.fail_threshold;

  report.products.resize(report.n_max);
  parallel_for(report.n_max, [&](std::size_t i) {
    report.products[i] = carleson_product(seq, i + 1, k_trunc);
  });

  report.inf_estimate = std::numeric_limits<double>::infinity();
  for (const auto& e : report.products) report.inf_estimate = std::min(report.inf_estimate, e.value);

  const SequenceFlags flags = seq.flags();
  if (flags.strictly_increasing_moduli) {
    const RatioTest rt = ratio_test(seq, k_trunc);
    report.ratio_sup = rt.ratio_sup;
    report.certified_c = rt.certified_c;
  }

  std::ostringstream reason;
  const auto zero = std::find_if(report.products.begin(), report.products.end(),
                                 [](const ProductEntry& e) { return e.value == 0.0; });
  const auto tiny = std::find_if(report.products.begin(), report.products.end(), [&](const ProductEntry& e) {
    return std::isfinite(e.tail_error) && e.value + e.tail_error < options.fail_threshold;
  });
  if (zero != report.products.end()) {
    report.verdict = Verdict::CertifiedFails;
    reason << "repeated point: P_" << zero->n << " = 0 exactly";
  } else if (tiny != report.products.end()) {
    report.verdict = Verdict::CertifiedFails;
    reason << "P_" << tiny->n << " + tail_error < " << options.fail_threshold;
  } else if (flags.real_positive && flags.strictly_increasing_moduli && report.certified_c &&
             *report.certified_c < 1.0) {
    report.verdict = Verdict::CertifiedHolds;
    reason << "gap ratio bounded by c = " << *report.certified_c << " < 1 for every k";
  } else {
    report.verdict = Verdict::Inconclusive;
    if (!flags.strictly_increasing_moduli) {
      reason << "moduli not strictly increasing; no ratio certificate applies";
    } else if (!flags.real_positive) {
      reason << "sequence not real-positive; ratio route not applied";
    } else {
      reason << "no all-k ratio certificate; finite ratio_sup is evidence only";
    }
  }
  report.reason = reason.str();
  return report;
}

CarlesonReport drop_prefix_check(const LambdaSequence& seq, std::size_t n_drop, std::size_t n_max,
                                 std::size_t k_trunc, const CarlesonOptions& options) {
  const LambdaSequence tail = LambdaSequence::drop_prefix(seq, n_drop);
  CarlesonReport report = carleson_inf_estimate(tail, n_max, k_trunc, options);
  report.sequence = seq.describe();
  report.dropped = n_drop;

  const std::size_t full_trunc = k_trunc + n_drop;
  report.dropped_products.resize(n_drop);
  parallel_for(n_drop, [&](std::size_t i) {
    report.dropped_products[i] = carleson_product(seq, i + 1, full_trunc);
  });

  const auto zero = std::find_if(report.dropped_products.begin(), report.dropped_products.end(),
                                 [](const ProductEntry& e) { return e.value == 0.0; });
  if (zero != report.dropped_products.end()) {
    std::ostringstream reason;
    reason << "repeated point in the dropped prefix: P_" << zero->n << " = 0 exactly";
    report.verdict = Verdict::CertifiedFails;
    report.reason = reason.str();
  } else if (report.verdict == Verdict::CertifiedHolds) {
    std::ostringstream reason;
    reason << "tail after " << n_drop << " terms: " << report.reason
           << "; holds for the full sequence";
    report.reason = reason.str();
  }
  return report;
}

LimitModulusCheck limit_modulus_check(const LambdaSequence& seq, std::size_t k_max,
                                      double evidence_threshold) {
  LimitModulusCheck out;
  out.k_max = clip(seq, k_max);
  out.threshold = evidence_threshold;
  if (out.k_max == 0) throw InvalidArgument("limit_modulus_check needs k_max >= 1");
  out.final_gap = seq.gap(out.k_max);
  out.passes = out.final_gap < evidence_threshold;
  const std::size_t first = out.k_max > 5 ? out.k_max - 4 : 1;
  for (std::size_t k = first; k <= out.k_max; ++k) {
    const DiscPoint p = seq.point(k);
    out.trailing.push_back({k, std::abs(p.value), p.gap});
  }
  return out;
}

}  // namespace cframes
