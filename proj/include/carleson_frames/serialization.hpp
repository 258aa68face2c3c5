#pragma once

#include <filesystem>
#include <initializer_list>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "carleson_frames/adversarial.hpp"
#include "carleson_frames/carleson.hpp"
#include "carleson_frames/orbit.hpp"
#include "carleson_frames/sequences.hpp"
#include "carleson_frames/weaving.hpp"

namespace cframes {

using Json = nlohmann::ordered_json;

/// Throws InvalidArgument naming the first key of `obj` not in `allowed`.
void reject_unknown_keys(const Json& obj, std::initializer_list<std::string_view> allowed, std::string_view where);

/// Finite doubles as numbers; inf/-inf/nan as strings.
Json number(double x);
Json complex_to_json(Complex z);
/// Accepts a number or a [re, im] pair.
Complex complex_from_json(const Json& j);

/// {"kind": "geometric", "alpha": 2}
/// {"kind": "explicit", "values": [0.5, [0.1, 0.2]]}
/// {"kind": "two_point_augmented", "q": 0.3, "base": {...}}
/// {"kind": "power_of", "base": {...}, "power": 2}
/// {"kind": "drop_prefix", "base": {...}, "count": 3}
LambdaSequence sequence_from_json(const Json& j);
Json to_json(const LambdaSequence& seq);

/// {"kind": "constant", "value": 1}
/// {"kind": "explicit", "values": [...], "c1": 1, "c2": 2}
Weights weights_from_json(const Json& j);
Json to_json(const Weights& w);

Json to_json(const SequenceFlags& f);
Json to_json(const ValidationReport& r);
Json to_json(const CarlesonReport& r);
Json to_json(const LimitModulusCheck& r);
Json to_json(const SubsampleScheme& s);
Json to_json(const FrameBoundEstimate& e);
Json to_json(const RetildeWeights& r);
Json to_json(const WeavePattern& p);
Json to_json(const TailDefect& d);
Json to_json(const WeavingResult& r);
Json to_json(const AdversarialCertificate& c);

/// RFC 4180 CSV with '.' decimals and 17 significant digits.
std::string csv_number(double x);
std::string csv_escape(std::string_view field);
std::string csv_table(const std::vector<std::string>& header, const std::vector<std::vector<std::string>>& rows);

std::string products_csv(const CarlesonReport& r);
/// Row-major, one quoted "re,im" cell per entry.
std::string matrix_csv(const HermitianMatrix& s);
std::string defect_curve_csv(const std::vector<TailDefect>& curve);
std::string sweep_csv(const std::vector<FrameBoundEstimate>& rows);

/// Writes to a sibling temporary file, then renames over `path`.
void write_file_atomic(const std::filesystem::path& path, std::string_view content);

}  // namespace cframes
