#include "carleson_frames/adversarial.hpp"

#include <cmath>
#include <sstream>

#include "carleson_frames/errors.hpp"

namespace cframes {

Complex OrbitFrameOracle::coefficient(std::size_t j, std::uint64_t k) const {
  return orbit_coefficient(sys_, j, k);
}

double OrbitFrameOracle::tail_energy(std::size_t j, std::uint64_t k) const {
  return std::norm(sys_.weights().at(j)) * pow_from_gap(sys_.lambdas().gap(j), 2 * k);
}

std::string OrbitFrameOracle::describe() const {
  return "orbit(" + sys_.lambdas().describe() + ", " + sys_.weights().describe() + ")";
}

Complex OrthonormalBasisOracle::coefficient(std::size_t j, std::uint64_t k) const {
  if (j == 0) throw IndexOutOfRange("basis indices start at 1");
  return j == k + 1 ? Complex(1.0, 0.0) : Complex(0.0, 0.0);
}

double OrthonormalBasisOracle::tail_energy(std::size_t j, std::uint64_t k) const {
  if (j == 0) throw IndexOutOfRange("basis indices start at 1");
  return j >= k + 1 ? 1.0 : 0.0;
}

namespace {

double coefficient_sum(const FrameOracle& oracle, std::size_t j, const std::vector<std::uint64_t>& picks) {
  NeumaierSum s;
  for (std::uint64_t k : picks) s.add(std::norm(oracle.coefficient(j, k)));
  return s.value();
}

[[noreturn]] void exhausted(const char* what, std::size_t level, std::size_t budget) {
  std::ostringstream msg;
  msg << "no qualifying " << what << " at level " << level << " within " << budget << " candidates";
  throw SearchBudgetExhausted(msg.str());
}

// Smallest N >= first with tail_energy(j, N) <= threshold; tails are
// nonincreasing in N, so gallop then bisect.
std::uint64_t smallest_frame_index(const FrameOracle& oracle, std::size_t j, std::uint64_t first,
                                   double threshold, std::size_t budget, std::size_t level) {
  if (oracle.tail_energy(j, first) <= threshold) return first;
  std::uint64_t bad = first;
  std::uint64_t step = 1;
  const std::uint64_t last = first + budget - 1;
  for (;;) {
    if (bad == last) exhausted("frame index", level, budget);
    const std::uint64_t probe = std::min<std::uint64_t>(bad + step, last);
    if (oracle.tail_energy(j, probe) <= threshold) {
      std::uint64_t good = probe;
      while (good - bad > 1) {
        const std::uint64_t mid = bad + (good - bad) / 2;
        if (oracle.tail_energy(j, mid) <= threshold) good = mid; else bad = mid;
      }
      return good;
    }
    bad = probe;
    step *= 2;
  }
}

std::size_t smallest_witness(const FrameOracle& oracle, std::size_t after, const std::vector<std::uint64_t>& picks,
                             double threshold, std::size_t budget, std::size_t level) {
  const auto dim = oracle.dimension();
  for (std::size_t i = 1; i <= budget; ++i) {
    const std::size_t j = after + i;
    if (dim && j > *dim) break;
    if (coefficient_sum(oracle, j, picks) <= threshold) return j;
  }
  exhausted("witness", level, budget);
}

}  // namespace

AdversarialCertificate build_adversarial_subsequence(const FrameOracle& oracle, std::size_t levels,
                                                     std::size_t search_budget) {
  if (levels == 0) throw InvalidArgument("number of levels must be positive");
  if (search_budget == 0) throw InvalidArgument("search budget must be positive");

  AdversarialCertificate cert;
  cert.oracle = oracle.describe();
  cert.levels = levels;
  cert.search_budget = search_budget;

  cert.witnesses.push_back(1);
  cert.picked_indices.push_back(smallest_frame_index(oracle, 1, 0, 1.0, search_budget, 0));

  for (std::size_t level = 0; level <= levels; ++level) {
    const double threshold = std::ldexp(1.0, -static_cast<int>(level));
    const double half = threshold / 2;
    std::size_t j = 1;
    if (level > 0) {
      j = smallest_witness(oracle, cert.witnesses.back(), cert.picked_indices, half, search_budget, level);
      cert.witnesses.push_back(j);
      const std::uint64_t next =
          smallest_frame_index(oracle, j, cert.picked_indices.back() + 1, half, search_budget, level);
      cert.picked_indices.push_back(next);
    }
    // Level l sums over N_1..N_l and takes the tail from N_{l+1}.
    const std::vector<std::uint64_t> head(cert.picked_indices.begin(), cert.picked_indices.end() - 1);
    const double sum = coefficient_sum(oracle, j, head);
    const double tail = oracle.tail_energy(j, cert.picked_indices.back());
    NeumaierSum bound;
    bound.add(sum);
    bound.add(tail);
    cert.coefficient_sums.push_back(sum);
    cert.tails.push_back(tail);
    cert.step_bounds.push_back(bound.value());
    cert.thresholds.push_back(threshold);
  }
  return cert;
}

std::vector<double> recompute_step_bounds(const FrameOracle& oracle, const AdversarialCertificate& cert) {
  std::vector<double> out;
  for (std::size_t level = 0; level < cert.witnesses.size() && level + 1 <= cert.picked_indices.size(); ++level) {
    const std::size_t j = cert.witnesses[level];
    const std::vector<std::uint64_t> head(cert.picked_indices.begin(),
                                          cert.picked_indices.begin() + static_cast<std::ptrdiff_t>(level));
    NeumaierSum bound;
    bound.add(coefficient_sum(oracle, j, head));
    bound.add(oracle.tail_energy(j, cert.picked_indices[level]));
    out.push_back(bound.value());
  }
  return out;
}

double estimate_subsequence_lower_bound(const FrameOracle& oracle, std::span<const std::uint64_t> indices,
                                        std::size_t m, double tol) {
  if (indices.empty()) throw InvalidArgument("index list is empty");
  if (m == 0) throw InvalidArgument("truncation dimension must be positive");
  if (const auto dim = oracle.dimension(); dim && m > *dim) throw IndexOutOfRange("truncation exceeds the basis");
  Eigen::MatrixXcd f(static_cast<Eigen::Index>(m), static_cast<Eigen::Index>(indices.size()));
  for (std::size_t c = 0; c < indices.size(); ++c) {
    for (std::size_t r = 0; r < m; ++r) {
      f(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = oracle.coefficient(r + 1, indices[c]);
    }
  }
  const HermitianMatrix s = HermitianMatrix::assemble(m, [&](std::size_t a, std::size_t b) {
    Complex sum(0.0, 0.0);
    for (Eigen::Index c = 0; c < f.cols(); ++c) {
      sum += f(static_cast<Eigen::Index>(a), c) * std::conj(f(static_cast<Eigen::Index>(b), c));
    }
    return sum;
  });
  return extremal_eigenvalues(s, tol).lambda_min;
}

}  // namespace cframes
