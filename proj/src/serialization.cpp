#include "carleson_frames/serialization.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <system_error>

#include "carleson_frames/errors.hpp"

namespace cframes {

void reject_unknown_keys(const Json& obj, std::initializer_list<std::string_view> allowed, std::string_view where) {
  if (!obj.is_object()) throw InvalidArgument(std::string(where) + " must be a JSON object");
  for (const auto& item : obj.items()) {
    bool known = false;
    for (std::string_view a : allowed) known = known || item.key() == a;
    if (!known) throw InvalidArgument("unknown field '" + item.key() + "' in " + std::string(where));
  }
}

Json number(double x) {
  if (std::isfinite(x)) return x;
  if (std::isnan(x)) return "nan";
  return x > 0 ? "inf" : "-inf";
}

Json complex_to_json(Complex z) {
  if (z.imag() == 0.0) return number(z.real());
  return Json::array({number(z.real()), number(z.imag())});
}

Complex complex_from_json(const Json& j) {
  if (j.is_number()) return {j.get<double>(), 0.0};
  if (j.is_array() && j.size() == 2 && j[0].is_number() && j[1].is_number()) {
    return {j[0].get<double>(), j[1].get<double>()};
  }
  throw InvalidArgument("complex value must be a number or a [re, im] pair, got " + j.dump());
}

namespace {

const Json& field(const Json& obj, const char* key, std::string_view where) {
  const auto it = obj.find(key);
  if (it == obj.end()) throw InvalidArgument("missing field '" + std::string(key) + "' in " + std::string(where));
  return *it;
}

double real_field(const Json& obj, const char* key, std::string_view where) {
  const Json& v = field(obj, key, where);
  if (!v.is_number()) throw InvalidArgument("field '" + std::string(key) + "' must be a number");
  return v.get<double>();
}

std::uint64_t count_field(const Json& obj, const char* key, std::string_view where) {
  const Json& v = field(obj, key, where);
  if (!v.is_number_unsigned() && !(v.is_number_integer() && v.get<std::int64_t>() >= 0)) {
    throw InvalidArgument("field '" + std::string(key) + "' must be a nonnegative integer");
  }
  return v.get<std::uint64_t>();
}

std::string kind_of(const Json& obj, std::string_view where) {
  if (!obj.is_object()) throw InvalidArgument(std::string(where) + " must be a JSON object");
  const Json& k = field(obj, "kind", where);
  if (!k.is_string()) throw InvalidArgument("'kind' must be a string in " + std::string(where));
  return k.get<std::string>();
}

Json complex_list(const std::vector<Complex>& values) {
  Json arr = Json::array();
  for (const Complex& z : values) arr.push_back(complex_to_json(z));
  return arr;
}

Json real_list(const std::vector<double>& values) {
  Json arr = Json::array();
  for (double x : values) arr.push_back(number(x));
  return arr;
}

}  // namespace

LambdaSequence sequence_from_json(const Json& j) {
  constexpr std::string_view where = "sequence";
  const std::string kind = kind_of(j, where);
  if (kind == "geometric") {
    reject_unknown_keys(j, {"kind", "alpha"}, where);
    return LambdaSequence::geometric(real_field(j, "alpha", where));
  }
  if (kind == "explicit") {
    reject_unknown_keys(j, {"kind", "values"}, where);
    const Json& v = field(j, "values", where);
    if (!v.is_array()) throw InvalidArgument("'values' must be an array");
    std::vector<Complex> values;
    for (const Json& x : v) values.push_back(complex_from_json(x));
    return LambdaSequence::explicit_list(std::move(values));
  }
  if (kind == "two_point_augmented") {
    reject_unknown_keys(j, {"kind", "q", "base"}, where);
    return LambdaSequence::two_point_augmented(real_field(j, "q", where), sequence_from_json(field(j, "base", where)));
  }
  if (kind == "power_of") {
    reject_unknown_keys(j, {"kind", "base", "power"}, where);
    return LambdaSequence::power_of(sequence_from_json(field(j, "base", where)), count_field(j, "power", where));
  }
  if (kind == "drop_prefix") {
    reject_unknown_keys(j, {"kind", "base", "count"}, where);
    return LambdaSequence::drop_prefix(sequence_from_json(field(j, "base", where)), count_field(j, "count", where));
  }
  throw InvalidArgument("unknown sequence kind '" + kind + "'");
}

Json to_json(const LambdaSequence& seq) {
  Json j;
  switch (seq.kind()) {
    case LambdaSequence::Kind::Geometric:
      j["kind"] = "geometric";
      j["alpha"] = seq.alpha();
      break;
    case LambdaSequence::Kind::Explicit:
      j["kind"] = "explicit";
      j["values"] = complex_list(seq.values());
      break;
    case LambdaSequence::Kind::TwoPointAugmented:
      j["kind"] = "two_point_augmented";
      j["q"] = seq.q();
      j["base"] = to_json(seq.base());
      break;
    case LambdaSequence::Kind::PowerOf:
      j["kind"] = "power_of";
      j["base"] = to_json(seq.base());
      j["power"] = seq.power();
      break;
    case LambdaSequence::Kind::Shifted:
      j["kind"] = "drop_prefix";
      j["base"] = to_json(seq.base());
      j["count"] = seq.offset();
      break;
  }
  return j;
}

Weights weights_from_json(const Json& j) {
  constexpr std::string_view where = "weights";
  const std::string kind = kind_of(j, where);
  if (kind == "constant") {
    reject_unknown_keys(j, {"kind", "value"}, where);
    return Weights::constant(complex_from_json(field(j, "value", where)));
  }
  if (kind == "explicit") {
    reject_unknown_keys(j, {"kind", "values", "c1", "c2"}, where);
    const Json& v = field(j, "values", where);
    if (!v.is_array()) throw InvalidArgument("'values' must be an array");
    std::vector<Complex> values;
    for (const Json& x : v) values.push_back(complex_from_json(x));
    return Weights::explicit_list(std::move(values), real_field(j, "c1", where), real_field(j, "c2", where));
  }
  throw InvalidArgument("unknown weights kind '" + kind + "'");
}

Json to_json(const Weights& w) {
  Json j;
  if (w.kind() == Weights::Kind::Constant) {
    j["kind"] = "constant";
    j["value"] = complex_to_json(w.values().front());
  } else {
    j["kind"] = "explicit";
    j["values"] = complex_list(w.values());
    j["c1"] = number(w.c1());
    j["c2"] = number(w.c2());
  }
  return j;
}

Json to_json(const SequenceFlags& f) {
  return Json{{"real_positive", f.real_positive}, {"strictly_increasing_moduli", f.strictly_increasing_moduli}};
}

Json to_json(const ValidationReport& r) {
  Json j;
  j["checked"] = r.checked;
  j["in_disc"] = r.in_disc;
  j["distinct"] = r.distinct;
  j["monotone_moduli"] = r.monotone_moduli;
  j["real_positive"] = r.real_positive;
  j["failures"] = r.failures;
  j["flags"] = to_json(r.flags);
  return j;
}

namespace {

Json products_json(const std::vector<ProductEntry>& products) {
  Json arr = Json::array();
  for (const ProductEntry& p : products) {
    arr.push_back(Json{{"n", p.n}, {"value", number(p.value)}, {"tail_error", number(p.tail_error)}});
  }
  return arr;
}

Json optional_number(const std::optional<double>& x) { return x ? number(*x) : Json(nullptr); }

}  // namespace

Json to_json(const CarlesonReport& r) {
  Json j;
  j["sequence"] = r.sequence;
  j["verdict"] = std::string(to_string(r.verdict));
  j["reason"] = r.reason;
  j["inf_estimate"] = number(r.inf_estimate);
  j["ratio_sup"] = optional_number(r.ratio_sup);
  j["certified_c"] = optional_number(r.certified_c);
  j["n_max"] = r.n_max;
  j["k_trunc"] = r.k_trunc;
  j["fail_threshold"] = number(r.fail_threshold);
  if (r.dropped > 0) {
    j["dropped"] = r.dropped;
    j["dropped_products"] = products_json(r.dropped_products);
  }
  j["products"] = products_json(r.products);
  return j;
}

Json to_json(const LimitModulusCheck& r) {
  Json trailing = Json::array();
  for (const TrailingModulus& t : r.trailing) {
    trailing.push_back(Json{{"k", t.k}, {"modulus", number(t.modulus)}, {"gap", number(t.gap)}});
  }
  return Json{{"passes", r.passes}, {"final_gap", number(r.final_gap)}, {"threshold", number(r.threshold)},
              {"k_max", r.k_max}, {"trailing", trailing}};
}

Json to_json(const SubsampleScheme& s) { return Json{{"N", s.N}, {"j", s.j}, {"K", s.K}}; }

Json to_json(const FrameBoundEstimate& e) {
  return Json{{"scheme", to_json(e.scheme)}, {"M", e.M},          {"A_est", number(e.A_est)},
              {"B_est", number(e.B_est)},    {"eig_residual", number(e.eig_residual)}, {"tol", number(e.tol)}};
}

Json to_json(const RetildeWeights& r) {
  return Json{{"count", r.weights.size()},
              {"lower", number(r.lower)},
              {"upper", number(r.upper)},
              {"bound_check", r.bound_check},
              {"identity_check", r.identity_check},
              {"max_identity_ulps", number(r.max_identity_ulps)},
              {"weights", complex_list(r.weights)}};
}

Json to_json(const WeavePattern& p) {
  Json j;
  j["N"] = p.N();
  switch (p.kind()) {
    case WeavePattern::Kind::Constant:
      j["kind"] = "constant";
      j["j"] = p.values().front();
      break;
    case WeavePattern::Kind::Periodic:
      j["kind"] = "periodic";
      j["offsets"] = p.values();
      break;
    case WeavePattern::Kind::Explicit:
      j["kind"] = "explicit";
      j["offsets"] = p.values();
      break;
    case WeavePattern::Kind::Seeded:
      j["kind"] = "seeded";
      j["seed"] = p.seed();
      j["length"] = p.values().size();
      break;
  }
  return j;
}

Json to_json(const TailDefect& d) {
  return Json{{"J", d.J}, {"value", number(d.value)}, {"truncation_bound", number(d.truncation_bound)},
              {"closed_form", d.closed_form}};
}

Json to_json(const WeavingResult& r) {
  Json curve = Json::array();
  for (const TailDefect& d : r.curve) curve.push_back(to_json(d));
  Json j;
  j["J"] = r.J;
  j["defect_at_J"] = number(r.defect_at_J);
  j["defect_value"] = number(r.defect_value);
  j["truncation_bound"] = number(r.truncation_bound);
  j["A_est_used"] = number(r.A_est_used);
  j["safety"] = number(r.safety);
  j["predicted_lower_bound"] = number(r.predicted_lower_bound);
  j["verified_bounds"] = to_json(r.verified_bounds);
  j["verification_passed"] = r.verification_passed;
  j["M"] = r.M;
  j["curve"] = curve;
  return j;
}

Json to_json(const AdversarialCertificate& c) {
  Json j;
  j["oracle"] = c.oracle;
  j["levels"] = c.levels;
  j["search_budget"] = c.search_budget;
  j["picked_indices"] = c.picked_indices;
  j["witnesses"] = c.witnesses;
  j["coefficient_sums"] = real_list(c.coefficient_sums);
  j["tails"] = real_list(c.tails);
  j["step_bounds"] = real_list(c.step_bounds);
  j["thresholds"] = real_list(c.thresholds);
  return j;
}

std::string csv_number(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  if (x == 0.0) return "0";
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, x, std::chars_format::general, 17);
  if (ec != std::errc()) throw InvalidArgument("cannot format number");
  return std::string(buf, ptr);
}

std::string csv_escape(std::string_view field) {
  if (field.find_first_of(",\"\r\n") == std::string_view::npos) return std::string(field);
  std::string out = "\"";
  for (char ch : field) {
    if (ch == '"') out += '"';
    out += ch;
  }
  out += '"';
  return out;
}

std::string csv_table(const std::vector<std::string>& header, const std::vector<std::vector<std::string>>& rows) {
  std::string out;
  auto line = [&](const std::vector<std::string>& cells) {
    for (std::size_t i = 0; i < cells.size(); ++i) {
      if (i) out += ',';
      out += csv_escape(cells[i]);
    }
    out += "\r\n";
  };
  line(header);
  for (const auto& r : rows) line(r);
  return out;
}

std::string products_csv(const CarlesonReport& r) {
  std::vector<std::vector<std::string>> rows;
  for (const ProductEntry& p : r.products) {
    rows.push_back({std::to_string(p.n), csv_number(p.value), csv_number(p.tail_error)});
  }
  return csv_table({"n", "P_n", "tail_error"}, rows);
}

std::string matrix_csv(const HermitianMatrix& s) {
  std::string out;
  for (std::size_t m = 0; m < s.dim(); ++m) {
    for (std::size_t n = 0; n < s.dim(); ++n) {
      if (n) out += ',';
      const Complex z = s(m, n);
      out += csv_escape(csv_number(z.real()) + "," + csv_number(z.imag()));
    }
    out += "\r\n";
  }
  return out;
}

std::string defect_curve_csv(const std::vector<TailDefect>& curve) {
  std::vector<std::vector<std::string>> rows;
  for (const TailDefect& d : curve) {
    rows.push_back({std::to_string(d.J), csv_number(d.value), csv_number(d.truncation_bound)});
  }
  return csv_table({"J", "defect", "truncation_bound"}, rows);
}

std::string sweep_csv(const std::vector<FrameBoundEstimate>& estimates) {
  std::vector<std::vector<std::string>> rows;
  for (const FrameBoundEstimate& e : estimates) {
    rows.push_back({std::to_string(e.scheme.N), std::to_string(e.scheme.j), std::to_string(e.scheme.K),
                    std::to_string(e.M), csv_number(e.A_est), csv_number(e.B_est), csv_number(e.eig_residual)});
  }
  return csv_table({"N", "j", "K", "M", "A_est", "B_est", "eig_residual"}, rows);
}

void write_file_atomic(const std::filesystem::path& path, std::string_view content) {
  std::filesystem::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw InvalidArgument("cannot open " + tmp.string() + " for writing");
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
    out.flush();
    if (!out) throw InvalidArgument("failed writing " + tmp.string());
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) {
    std::filesystem::remove(tmp);
    throw InvalidArgument("cannot move report into place at " + path.string() + ": " + ec.message());
  }
}

}  // namespace cframes
