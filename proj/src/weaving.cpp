#include "carleson_frames/weaving.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "carleson_frames/parallel.hpp"
#include "pair_geometry.hpp"

namespace cframes {

namespace {

constexpr std::uint64_t kSeedMix = 0x9E3779B97F4A7C15ULL;
constexpr std::uint64_t kXorshiftMul = 0x2545F4914F6CDD1DULL;

void check_offsets(std::uint64_t n, const std::vector<std::uint64_t>& offsets) {
  if (n == 0) throw InvalidArgument("pattern factor N must be positive");
  if (offsets.empty()) throw InvalidArgument("pattern offset list is empty");
  for (std::uint64_t j : offsets) {
    if (j >= n) {
      std::ostringstream msg;
      msg << "pattern offset " << j << " outside [0, " << n << ")";
      throw InvalidArgument(msg.str());
    }
  }
}

std::string join(const std::vector<std::uint64_t>& v) {
  std::ostringstream out;
  for (std::size_t i = 0; i < v.size(); ++i) out << (i ? "," : "") << v[i];
  return out.str();
}

}  // namespace

WeavePattern::WeavePattern(Kind kind, std::uint64_t n, std::vector<std::uint64_t> values, std::size_t start,
                           std::size_t period, std::uint64_t seed)
    : kind_(kind), n_(n), values_(std::move(values)), start_(start), period_(period), seed_(seed) {
  check_offsets(n_, values_);
  max_ = *std::max_element(values_.begin(), values_.end());
}

WeavePattern WeavePattern::constant(std::uint64_t n, std::uint64_t j) {
  return WeavePattern(Kind::Constant, n, {j}, 0, 1, 0);
}

WeavePattern WeavePattern::periodic(std::uint64_t n, std::vector<std::uint64_t> offsets) {
  const std::size_t len = offsets.size();
  return WeavePattern(Kind::Periodic, n, std::move(offsets), 0, std::max<std::size_t>(len, 1), 0);
}

WeavePattern WeavePattern::explicit_list(std::uint64_t n, std::vector<std::uint64_t> offsets) {
  const std::size_t len = offsets.size();
  return WeavePattern(Kind::Explicit, n, std::move(offsets), len == 0 ? 0 : len - 1, 1, 0);
}

WeavePattern WeavePattern::seeded(std::uint64_t n, std::uint64_t seed, std::size_t length) {
  if (n == 0) throw InvalidArgument("pattern factor N must be positive");
  if (length == 0) throw InvalidArgument("seeded pattern length must be positive");
  std::uint64_t x = seed ^ kSeedMix;
  if (x == 0) x = kSeedMix;
  std::vector<std::uint64_t> block(length);
  for (auto& j : block) {
    x ^= x >> 12;
    x ^= x << 25;
    x ^= x >> 27;
    j = ((x * kXorshiftMul) >> 32) % n;
  }
  return WeavePattern(Kind::Seeded, n, std::move(block), 0, length, seed);
}

std::string WeavePattern::describe() const {
  std::ostringstream out;
  switch (kind_) {
    case Kind::Constant: out << "constant(N=" << n_ << ", j=" << values_[0] << ")"; break;
    case Kind::Periodic: out << "periodic(N=" << n_ << ", [" << join(values_) << "])"; break;
    case Kind::Explicit: out << "explicit(N=" << n_ << ", [" << join(values_) << "])"; break;
    case Kind::Seeded:
      out << "seeded(N=" << n_ << ", seed=" << seed_ << ", length=" << values_.size() << ")";
      break;
  }
  return out.str();
}

namespace {

void require_hypothesis(const OrbitSystem& sys) {
  const SequenceFlags f = sys.lambdas().flags();
  if (!f.real_positive || !f.strictly_increasing_moduli) {
    throw HypothesisViolation("defect sums need a real-positive sequence with strictly increasing moduli, got " +
                              sys.lambdas().describe());
  }
}

struct Coordinate {
  double c2 = 0.0;            // |c_n|^2
  double gap = 1.0;
  double one_minus_2n = 1.0;  // 1 - lambda^{2N}
  double head = 0.0;          // c2 (1 - lambda^N)^2 / (1 - lambda^{2N})
  std::vector<double> drop;   // (1 - lambda^j)^2, j < N
};

Coordinate coordinate(const OrbitSystem& sys, std::size_t n, std::uint64_t big_n) {
  Coordinate c;
  c.gap = sys.lambdas().gap(n);
  c.c2 = std::norm(sys.generator_coefficient(n));
  c.one_minus_2n = one_minus_pow(c.gap, 2 * big_n);
  if (c.one_minus_2n == 0.0) throw SingularDenominator("1 - lambda^{2N} vanishes");
  const double worst = one_minus_pow(c.gap, big_n);
  c.head = c.c2 * worst * worst / c.one_minus_2n;
  c.drop.resize(big_n);
  for (std::uint64_t j = 0; j < big_n; ++j) {
    const double d = one_minus_pow(c.gap, j);
    c.drop[j] = d * d;
  }
  return c;
}

// First k at which the worst-case k-tail head * lambda^{2Nk} is within tol.
std::size_t cut_point(const Coordinate& c, std::uint64_t big_n, double tol) {
  if (c.head <= tol) return 0;
  if (c.gap >= 1.0) return 1;
  const double per_step = 2.0 * static_cast<double>(big_n) * std::log1p(-c.gap);
  const double guess = std::ceil(std::log(tol / c.head) / per_step);
  if (!(guess < 4e9)) throw NonConvergence("defect summation would need more than 4e9 terms");
  auto k = static_cast<std::size_t>(std::max(guess, 0.0));
  while (c.head * pow_from_gap(c.gap, 2 * big_n * k) > tol) ++k;
  return k;
}

// Contribution of every coordinate n > M, using (1 - lambda^{j_k})^2 / (1 - lambda^{2N})
// <= 1 - lambda^{jmax} <= jmax * gap and |c_n|^2 <= 2 C2^2 gap.
double outer_tail(const OrbitSystem& sys, const WeavePattern& pattern, std::size_t m) {
  const std::uint64_t jmax = pattern.max_offset();
  if (jmax == 0) return 0.0;
  const auto len = sys.lambdas().length();
  if (len && m >= *len) return 0.0;
  const auto gaps = sys.lambdas().gap_tail_sum(m);
  if (!gaps) return std::numeric_limits<double>::infinity();
  const double c2 = sys.weights().c2();
  return 2.0 * c2 * c2 * static_cast<double>(jmax) * sys.lambdas().gap(m + 1) * *gaps;
}

}  // namespace

std::vector<TailDefect> tail_defect_curve(const OrbitSystem& sys, const WeavePattern& pattern,
                                          std::span<const std::size_t> starts, std::size_t m,
                                          const WeaveOptions& options) {
  require_hypothesis(sys);
  sys.require_valid(m);
  if (!(options.sum_tol > 0.0)) throw InvalidArgument("summation tolerance must be positive");
  if (starts.empty()) return {};

  std::vector<std::size_t> grid(starts.begin(), starts.end());
  std::sort(grid.begin(), grid.end());
  grid.erase(std::unique(grid.begin(), grid.end()), grid.end());

  const std::uint64_t big_n = pattern.N();
  const bool closed = pattern.kind() == WeavePattern::Kind::Constant;
  const double tol_n = options.sum_tol / static_cast<double>(m);
  const std::size_t cols = grid.size();
  std::vector<double> values(m * cols, 0.0);
  std::vector<double> bounds(m * cols, 0.0);

  parallel_for(m, [&](std::size_t i) {
    const Coordinate c = coordinate(sys, i + 1, big_n);
    double* val = values.data() + i * cols;
    double* bnd = bounds.data() + i * cols;
    if (closed) {
      const double d = c.drop[pattern.at(0)];
      for (std::size_t g = 0; g < cols; ++g) {
        val[g] = d == 0.0 ? 0.0 : c.c2 * d * pow_from_gap(c.gap, 2 * big_n * grid[g]) / c.one_minus_2n;
      }
      return;
    }
    const std::size_t cut = cut_point(c, big_n, tol_n);
    const double bound_at_cut = c.head * pow_from_gap(c.gap, 2 * big_n * cut);
    std::size_t below = 0;  // grid points strictly before the cut
    for (std::size_t g = 0; g < cols; ++g) {
      if (grid[g] >= cut) {
        bnd[g] = c.head * pow_from_gap(c.gap, 2 * big_n * grid[g]);
      } else {
        bnd[g] = bound_at_cut;
        below = g + 1;
      }
    }
    if (below == 0) return;
    NeumaierSum suffix;
    std::size_t g = below;
    for (std::size_t k = cut; k-- > grid[0];) {
      const double d = c.drop[pattern.at(k)];
      if (d != 0.0) suffix.add(c.c2 * d * pow_from_gap(c.gap, 2 * big_n * k));
      while (g > 0 && grid[g - 1] == k) val[--g] = suffix.value();
    }
  });

  const double outer = outer_tail(sys, pattern, m);
  std::vector<TailDefect> sorted(cols);
  for (std::size_t g = 0; g < cols; ++g) {
    NeumaierSum v;
    NeumaierSum b;
    for (std::size_t i = 0; i < m; ++i) {
      v.add(values[i * cols + g]);
      b.add(bounds[i * cols + g]);
    }
    b.add(outer);
    sorted[g] = TailDefect{grid[g], v.value(), b.value(), closed};
  }

  std::vector<TailDefect> out;
  out.reserve(starts.size());
  for (std::size_t j : starts) {
    const auto it = std::lower_bound(grid.begin(), grid.end(), j);
    out.push_back(sorted[static_cast<std::size_t>(it - grid.begin())]);
  }
  return out;
}

TailDefect tail_defect(const OrbitSystem& sys, const WeavePattern& pattern, std::size_t j_start,
                       std::size_t m, const WeaveOptions& options) {
  const std::size_t one[] = {j_start};
  return tail_defect_curve(sys, pattern, one, m, options).front();
}

double defect_upper_bound(const OrbitSystem& sys, std::size_t m) {
  const std::vector<Complex> c = phi_coefficients(sys, m);
  NeumaierSum norm;
  for (const Complex& v : c) norm.add(std::norm(v));
  const double ratio = sys.weights().c2() / sys.weights().c1();
  return ratio * ratio * norm.value();
}

double perturbation_lower_bound(double a, double defect) {
  if (!(defect < a)) return 0.0;
  const double d = std::sqrt(a) - std::sqrt(std::max(defect, 0.0));
  return d * d;
}

HermitianMatrix woven_frame_operator(const OrbitSystem& sys, const WeavePattern& pattern,
                                     std::size_t j_start, std::size_t m) {
  sys.require_valid(m);
  const std::uint64_t big_n = pattern.N();
  const std::size_t period = pattern.period();
  const std::size_t steady = std::max(j_start, pattern.period_start());

  std::vector<DiscPoint> points(m);
  std::vector<Complex> c(m);
  for (std::size_t n = 0; n < m; ++n) {
    points[n] = sys.lambdas().point(n + 1);
    c[n] = sys.generator_coefficient(n + 1);
  }

  return HermitianMatrix::assemble(m, [&](std::size_t a, std::size_t b) {
    const detail::PairProduct w = detail::pair_product(points[a], points[b]);
    const Complex step = detail::one_minus_power(w, big_n);
    const Complex cycle = detail::one_minus_power(w, big_n * period);
    if (step == Complex(0.0, 0.0) || cycle == Complex(0.0, 0.0)) {
      throw SingularDenominator("geometric ratio of the woven family reaches 1");
    }
    // k < J from the unshifted family
    Complex total = detail::one_minus_power(w, big_n * j_start) / step;
    for (std::size_t k = j_start; k < steady; ++k) total += complex_pow(w.value, big_n * k + pattern.at(k));
    Complex block(0.0, 0.0);
    for (std::size_t r = 0; r < period; ++r) {
      const std::size_t k = steady + r;
      block += complex_pow(w.value, big_n * k + pattern.at(k));
    }
    total += block / cycle;
    return c[a] * std::conj(c[b]) * total;
  });
}

WeavingResult find_weaving_index(const OrbitSystem& sys, const WeavePattern& pattern, double a_est,
                                 double safety, std::size_t m, const WeaveOptions& options) {
  if (!(a_est > 0.0) || !std::isfinite(a_est)) throw InvalidArgument("A_est must be positive and finite");
  if (!(safety > 0.0 && safety <= 1.0)) throw InvalidArgument("safety must lie in (0, 1]");

  std::vector<std::size_t> grid(options.j_max + 1);
  for (std::size_t j = 0; j < grid.size(); ++j) grid[j] = j;
  std::vector<TailDefect> curve = tail_defect_curve(sys, pattern, grid, m, options);

  const double target = safety * a_est;
  const auto hit = std::find_if(curve.begin(), curve.end(), [&](const TailDefect& d) { return d.upper() < target; });
  if (hit == curve.end()) {
    std::ostringstream msg;
    msg << "no J <= " << options.j_max << " brings the defect below " << target;
    throw WeavingIndexNotFound(msg.str(), std::move(curve));
  }

  WeavingResult out;
  out.J = hit->J;
  out.defect_value = hit->value;
  out.truncation_bound = hit->truncation_bound;
  out.defect_at_J = hit->upper();
  out.A_est_used = a_est;
  out.safety = safety;
  out.M = m;
  out.predicted_lower_bound = perturbation_lower_bound(a_est, out.defect_at_J);
  curve.resize(out.J + 1);
  out.curve = std::move(curve);

  const HermitianMatrix woven = woven_frame_operator(sys, pattern, out.J, m);
  const EigenEstimate eig = extremal_eigenvalues(woven, options.eig_tol);
  out.verified_bounds.A_est = eig.lambda_min;
  out.verified_bounds.B_est = eig.lambda_max;
  out.verified_bounds.M = m;
  out.verified_bounds.eig_residual = eig.residual;
  out.verified_bounds.tol = options.eig_tol;
  out.verified_bounds.scheme = SubsampleScheme{pattern.N(), 0, 0};
  out.verification_passed = eig.lambda_min >= out.predicted_lower_bound - eig.residual * eig.norm;
  return out;
}

}  // namespace cframes
