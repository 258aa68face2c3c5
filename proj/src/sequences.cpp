#include "carleson_frames/sequences.hpp"

#include <algorithm>
#include <cmath>
#include <mutex>
#include <numeric>
#include <sstream>
#include <tuple>

#include "carleson_frames/errors.hpp"

namespace cframes {

struct LambdaSequence::Node {
  Kind kind = Kind::Geometric;
  double alpha = 0.0;
  double q = 0.0;
  std::vector<Complex> values;
  std::optional<LambdaSequence> base;
  std::uint64_t power = 1;
  std::size_t offset = 0;

  mutable std::once_flag flags_once;
  mutable SequenceFlags flags;
};

namespace {

constexpr std::size_t kCollisionScanCap = 1'000'000;
constexpr std::size_t kUnorderedScanCap = 10'000;

std::string format_complex(Complex z) {
  std::ostringstream os;
  os.precision(17);
  if (z.imag() == 0.0) {
    os << z.real();
  } else {
    os << "(" << z.real() << (z.imag() < 0 ? "-" : "+") << std::abs(z.imag()) << "i)";
  }
  return os.str();
}

SequenceFlags scan_flags(const std::vector<Complex>& values) {
  SequenceFlags f{true, true};
  for (std::size_t i = 0; i < values.size(); ++i) {
    const Complex v = values[i];
    if (!(v.imag() == 0.0 && v.real() > 0.0)) f.real_positive = false;
    if (i > 0 && !(std::abs(values[i - 1]) < std::abs(v))) f.strictly_increasing_moduli = false;
  }
  return f;
}

}  // namespace

LambdaSequence LambdaSequence::geometric(double alpha) {
  if (!(alpha > 1.0) || !std::isfinite(alpha)) {
    throw InvalidArgument("geometric sequence needs a finite alpha > 1");
  }
  auto node = std::make_shared<Node>();
  node->kind = Kind::Geometric;
  node->alpha = alpha;
  return LambdaSequence(std::move(node));
}

LambdaSequence LambdaSequence::explicit_list(std::vector<Complex> values) {
  if (values.empty()) throw EmptySequence("explicit sequence has no entries");
  for (const Complex& v : values) {
    if (!std::isfinite(v.real()) || !std::isfinite(v.imag())) {
      throw InvalidArgument("explicit sequence entries must be finite");
    }
  }
  auto node = std::make_shared<Node>();
  node->kind = Kind::Explicit;
  node->values = std::move(values);
  return LambdaSequence(std::move(node));
}

LambdaSequence LambdaSequence::two_point_augmented(double q, LambdaSequence base) {
  if (!(q > 0.0 && q < 1.0)) throw InvalidArgument("two-point augmentation needs q in (0, 1)");

  const Complex plus(q, 0.0);
  const Complex minus(-q, 0.0);
  const auto collides = [&](std::size_t k) {
    const Complex v = base.at(k);
    return v == plus || v == minus;
  };
  std::size_t scan = 0;
  if (const auto len = base.length()) {
    scan = *len;
  } else if (base.flags().strictly_increasing_moduli) {
    // Moduli increase, so only indices with |base_k| <= q can collide.
    while (scan < kCollisionScanCap && base.gap(scan + 1) >= 1.0 - q) ++scan;
  } else {
    scan = kUnorderedScanCap;
  }
  for (std::size_t k = 1; k <= scan; ++k) {
    if (collides(k)) {
      std::ostringstream msg;
      msg << "q = " << q << " coincides with +-base_" << k;
      throw InvariantViolation(msg.str());
    }
  }

  auto node = std::make_shared<Node>();
  node->kind = Kind::TwoPointAugmented;
  node->q = q;
  node->base = std::move(base);
  return LambdaSequence(std::move(node));
}

LambdaSequence LambdaSequence::power_of(LambdaSequence base, std::uint64_t power) {
  if (power == 0) throw InvalidArgument("power must be a positive integer");
  auto node = std::make_shared<Node>();
  node->kind = Kind::PowerOf;
  node->power = power;
  node->base = std::move(base);
  return LambdaSequence(std::move(node));
}

LambdaSequence LambdaSequence::drop_prefix(const LambdaSequence& seq, std::size_t count) {
  if (count == 0) return seq;
  if (const auto len = seq.length(); len && count >= *len) {
    throw EmptySequence("dropping the prefix leaves no terms");
  }
  const Node& n = seq.node();
  switch (n.kind) {
    case Kind::Explicit:
      return explicit_list(std::vector<Complex>(n.values.begin() + static_cast<std::ptrdiff_t>(count),
                                                n.values.end()));
    case Kind::TwoPointAugmented:
      if (count >= 2) return drop_prefix(*n.base, count - 2);
      break;
    case Kind::Shifted:
      return drop_prefix(*n.base, n.offset + count);
    default:
      break;
  }
  auto node = std::make_shared<Node>();
  node->kind = Kind::Shifted;
  node->offset = count;
  node->base = seq;
  return LambdaSequence(std::move(node));
}

LambdaSequence::Kind LambdaSequence::kind() const noexcept { return node_->kind; }

DiscPoint LambdaSequence::point(std::size_t k) const {
  if (k == 0) throw IndexOutOfRange("sequence indices start at 1");
  const Node& n = node();
  switch (n.kind) {
    case Kind::Geometric: {
      const double gap = std::pow(n.alpha, -static_cast<double>(k));
      return {Complex(1.0 - gap, 0.0), gap};
    }
    case Kind::Explicit: {
      if (k > n.values.size()) {
        std::ostringstream msg;
        msg << "index " << k << " past the end of an explicit list of length " << n.values.size();
        throw IndexOutOfRange(msg.str());
      }
      const Complex v = n.values[k - 1];
      const double modulus = std::abs(v);
      if (!(modulus < 1.0)) {
        std::ostringstream msg;
        msg << "lambda_" << k << " = " << format_complex(v) << " is not inside the unit disc";
        throw InvariantViolation(msg.str());
      }
      return {v, 1.0 - modulus};
    }
    case Kind::TwoPointAugmented:
      if (k == 1) return {Complex(n.q, 0.0), 1.0 - n.q};
      if (k == 2) return {Complex(-n.q, 0.0), 1.0 - n.q};
      return n.base->point(k - 2);
    case Kind::PowerOf: {
      const DiscPoint p = n.base->point(k);
      if (n.power == 1) return p;
      return {complex_pow(p.value, n.power), one_minus_pow(p.gap, n.power)};
    }
    case Kind::Shifted:
      return n.base->point(k + n.offset);
  }
  throw InvalidArgument("unknown sequence kind");
}

std::optional<std::size_t> LambdaSequence::length() const {
  const Node& n = node();
  switch (n.kind) {
    case Kind::Geometric:
      return std::nullopt;
    case Kind::Explicit:
      return n.values.size();
    case Kind::TwoPointAugmented:
      if (auto len = n.base->length()) return *len + 2;
      return std::nullopt;
    case Kind::PowerOf:
      return n.base->length();
    case Kind::Shifted:
      if (auto len = n.base->length()) return *len - n.offset;
      return std::nullopt;
  }
  return std::nullopt;
}

bool LambdaSequence::evaluable(std::size_t k) const {
  if (k == 0) return false;
  const auto len = length();
  return !len || k <= *len;
}

SequenceFlags LambdaSequence::flags() const {
  const Node& n = node();
  std::call_once(n.flags_once, [&] {
    switch (n.kind) {
      case Kind::Geometric:
        n.flags = {true, true};
        break;
      case Kind::Explicit:
        n.flags = scan_flags(n.values);
        break;
      case Kind::TwoPointAugmented:
        n.flags = {false, false};
        break;
      case Kind::PowerOf:
        // Positive reals stay positive and |.|^N preserves strict order.
        n.flags = n.base->flags();
        break;
      case Kind::Shifted: {
        const LambdaSequence& b = *n.base;
        if (b.kind() == Kind::TwoPointAugmented) {
          // Only offset 1 survives drop_prefix: {-q, mu_1, mu_2, ...}.
          const LambdaSequence& mu = b.base();
          n.flags = {false, mu.flags().strictly_increasing_moduli && mu.gap(1) < 1.0 - b.q()};
        } else {
          n.flags = b.flags();
        }
        break;
      }
    }
  });
  return n.flags;
}

std::optional<double> LambdaSequence::gap_tail_sum(std::size_t after) const {
  const Node& n = node();
  switch (n.kind) {
    case Kind::Geometric:
      return std::pow(n.alpha, -static_cast<double>(after)) / (n.alpha - 1.0);
    case Kind::Explicit: {
      NeumaierSum acc;
      for (std::size_t i = after; i < n.values.size(); ++i) acc.add(1.0 - std::abs(n.values[i]));
      return acc.value();
    }
    case Kind::TwoPointAugmented: {
      if (after >= 2) return n.base->gap_tail_sum(after - 2);
      const auto rest = n.base->gap_tail_sum(0);
      if (!rest) return std::nullopt;
      return *rest + static_cast<double>(2 - after) * (1.0 - n.q);
    }
    case Kind::PowerOf: {
      // 1 - x^N <= N (1 - x) on [0, 1].
      const auto b = n.base->gap_tail_sum(after);
      if (!b) return std::nullopt;
      return static_cast<double>(n.power) * *b;
    }
    case Kind::Shifted:
      return n.base->gap_tail_sum(after + n.offset);
  }
  return std::nullopt;
}

double LambdaSequence::alpha() const {
  if (kind() != Kind::Geometric) throw InvalidArgument("alpha() on a non-geometric sequence");
  return node().alpha;
}

const std::vector<Complex>& LambdaSequence::values() const {
  if (kind() != Kind::Explicit) throw InvalidArgument("values() on a non-explicit sequence");
  return node().values;
}

double LambdaSequence::q() const {
  if (kind() != Kind::TwoPointAugmented) throw InvalidArgument("q() on a non-augmented sequence");
  return node().q;
}

const LambdaSequence& LambdaSequence::base() const {
  if (!node().base) throw InvalidArgument("base() on a sequence without a base");
  return *node().base;
}

std::uint64_t LambdaSequence::power() const {
  if (kind() != Kind::PowerOf) throw InvalidArgument("power() on a non-power sequence");
  return node().power;
}

std::size_t LambdaSequence::offset() const {
  if (kind() != Kind::Shifted) throw InvalidArgument("offset() on a non-shifted sequence");
  return node().offset;
}

std::string LambdaSequence::describe() const {
  const Node& n = node();
  std::ostringstream os;
  os.precision(17);
  switch (n.kind) {
    case Kind::Geometric:
      os << "geometric(alpha=" << n.alpha << ")";
      break;
    case Kind::Explicit:
      os << "explicit[" << n.values.size() << "]";
      break;
    case Kind::TwoPointAugmented:
      os << "two_point(q=" << n.q << ", " << n.base->describe() << ")";
      break;
    case Kind::PowerOf:
      os << "power(" << n.power << ", " << n.base->describe() << ")";
      break;
    case Kind::Shifted:
      os << "drop(" << n.offset << ", " << n.base->describe() << ")";
      break;
  }
  return os.str();
}

Weights Weights::constant(Complex value) {
  const double modulus = std::abs(value);
  if (!(modulus > 0.0) || !std::isfinite(modulus)) {
    throw InvalidArgument("constant weight must be finite and nonzero");
  }
  return Weights(Kind::Constant, {value}, modulus, modulus);
}

Weights Weights::explicit_list(std::vector<Complex> values, double c1, double c2) {
  if (values.empty()) throw EmptySequence("explicit weight list has no entries");
  if (!(c1 > 0.0 && c1 <= c2 && std::isfinite(c2))) {
    throw InvalidArgument("weight envelope needs 0 < C1 <= C2 < inf");
  }
  return Weights(Kind::Explicit, std::move(values), c1, c2);
}

Complex Weights::at(std::size_t k) const {
  if (k == 0) throw IndexOutOfRange("weight indices start at 1");
  if (kind_ == Kind::Constant) return values_.front();
  if (k > values_.size()) {
    std::ostringstream msg;
    msg << "weight index " << k << " past the end of a list of length " << values_.size();
    throw IndexOutOfRange(msg.str());
  }
  const Complex m = values_[k - 1];
  const double modulus = std::abs(m);
  if (modulus < c1_ || modulus > c2_) {
    std::ostringstream msg;
    msg << "|m_" << k << "| = " << modulus << " outside [" << c1_ << ", " << c2_ << "]";
    throw BoundViolation(msg.str());
  }
  return m;
}

std::optional<std::size_t> Weights::length() const {
  if (kind_ == Kind::Constant) return std::nullopt;
  return values_.size();
}

std::string Weights::describe() const {
  std::ostringstream os;
  os.precision(17);
  if (kind_ == Kind::Constant) {
    os << "constant(" << format_complex(values_.front()) << ")";
  } else {
    os << "explicit[" << values_.size() << "](C1=" << c1_ << ", C2=" << c2_ << ")";
  }
  return os.str();
}

ValidationReport validate(const LambdaSequence& seq, std::size_t n_max) {
  constexpr std::size_t kMaxMessages = 8;
  ValidationReport report;
  std::size_t n = n_max;
  if (const auto len = seq.length()) n = std::min(n, *len);
  report.checked = n;
  report.flags = seq.flags();

  std::vector<std::optional<DiscPoint>> points(n);
  std::size_t disc_msgs = 0;
  for (std::size_t k = 1; k <= n; ++k) {
    try {
      points[k - 1] = seq.point(k);
    } catch (const InvariantViolation& e) {
      report.in_disc = false;
      if (disc_msgs++ < kMaxMessages) report.failures.emplace_back(e.what());
    }
  }

  // Distinctness: sort by (re, im, gap) and compare neighbours.
  std::vector<std::size_t> order;
  order.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    if (points[i]) order.push_back(i);
  }
  const auto key = [&](std::size_t i) {
    const DiscPoint& p = *points[i];
    return std::make_tuple(p.value.real(), p.value.imag(), p.gap);
  };
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return key(a) < key(b) || (key(a) == key(b) && a < b);
  });
  std::size_t distinct_msgs = 0;
  for (std::size_t i = 1; i < order.size(); ++i) {
    if (key(order[i - 1]) == key(order[i])) {
      report.distinct = false;
      if (distinct_msgs++ < kMaxMessages) {
        std::ostringstream msg;
        msg << "lambda_" << order[i - 1] + 1 << " == lambda_" << order[i] + 1;
        report.failures.push_back(msg.str());
      }
    }
  }

  std::size_t monotone_msgs = 0;
  std::size_t positive_msgs = 0;
  for (std::size_t i = 0; i < n; ++i) {
    if (!points[i]) continue;
    const DiscPoint& p = *points[i];
    if (!(p.is_real() && p.value.real() > 0.0)) {
      report.real_positive = false;
      if (positive_msgs++ < kMaxMessages) {
        std::ostringstream msg;
        msg << "lambda_" << i + 1 << " = " << format_complex(p.value) << " is not real-positive";
        report.failures.push_back(msg.str());
      }
    }
    if (i + 1 < n && points[i + 1] && !(points[i + 1]->gap < p.gap)) {
      report.monotone_moduli = false;
      if (monotone_msgs++ < kMaxMessages) {
        std::ostringstream msg;
        msg << "|lambda_" << i + 1 << "| >= |lambda_" << i + 2 << "|";
        report.failures.push_back(msg.str());
      }
    }
  }
  return report;
}

}  // namespace cframes
