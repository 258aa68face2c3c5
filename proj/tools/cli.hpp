#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <ostream>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "carleson_frames/serialization.hpp"

namespace cframes::cli {

inline constexpr const char* kToolName = "carleson-frames";
inline constexpr const char* kToolVersion = "0.1.0";

/// Weave pattern without its factor N; the weave analysis instantiates it
/// once per N.
struct PatternSpec {
  std::string kind = "constant";  // constant | periodic | explicit | seeded
  std::uint64_t j = 1;
  std::vector<std::uint64_t> offsets;
  std::uint64_t seed = 42;
  std::size_t length = 256;

  WeavePattern make(std::uint64_t n) const;
};

PatternSpec pattern_from_json(const Json& j);
Json to_json(const PatternSpec& p);
/// "constant:1", "seeded:42", "seeded:42:128", "periodic:0,1,1", "explicit:0,1"
PatternSpec parse_pattern(std::string_view text);

struct ExperimentConfig {
  std::string analysis;  // carleson | bounds | subsample-sweep | weave | adversary | reproduce-paper
  LambdaSequence sequence = LambdaSequence::geometric(2.0);
  Weights weights = Weights::constant(1.0);
  std::size_t truncation = 40;
  std::size_t n_max = 30;
  std::size_t k_trunc = 200;
  /// Left empty until resolve(); defaults depend on the analysis.
  std::vector<std::uint64_t> subsample_factors;
  std::optional<std::vector<std::uint64_t>> offsets;
  std::vector<std::uint64_t> start_indices = {0};
  PatternSpec pattern;
  std::string oracle = "orbit";  // orbit | orthonormal_basis
  std::size_t levels = 6;
  double tol = 1e-10;
  double sum_tol = 1e-14;
  double fail_threshold = 1e-12;
  double evidence_threshold = 1e-3;
  double safety = 0.5;
  std::size_t j_max = 10000;
  std::size_t search_budget = 1000000;
  bool assert_carleson = false;
  std::string output_json;
  std::string output_csv;
};

/// Unknown keys are rejected.
ExperimentConfig config_from_json(const Json& j);
Json to_json(const ExperimentConfig& c);

/// Fills analysis-dependent defaults and range-checks every field.
/// Throws InvalidArgument.
void resolve(ExperimentConfig& c);

struct Outcome {
  Json result;
  int exit_code = 0;
  std::string summary;
  /// (label, CSV text); a single table goes to output_csv as is, several
  /// get "_<label>" inserted before the extension.
  std::vector<std::pair<std::string, std::string>> tables;
};

Outcome run_analysis(const ExperimentConfig& c);

/// Full report: {"header": {...}, "config": {...}, "result": {...}}. The
/// timestamp is the only field that varies between identical runs.
Json make_report(const ExperimentConfig& c, const Outcome& o, const std::string& generated_at);

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace cframes::cli
