#include "geotransfer/serde.hpp"

#include <cstdio>
#include <stdexcept>

namespace geotransfer {
namespace {

double require_real(const Json& j, const char* field) {
  if (!j.contains(field) || !j[field].is_number())
    throw std::invalid_argument(std::string("expected a number in field \"") + field + "\"");
  return j[field].get<double>();
}

index_t require_int(const Json& j, const char* field) {
  if (!j.contains(field) || !j[field].is_number_integer())
    throw std::invalid_argument(std::string("expected an integer in field \"") + field +
                                "\"");
  return j[field].get<index_t>();
}

std::vector<double> require_reals(const Json& j, const char* field) {
  if (!j.contains(field) || !j[field].is_array())
    throw std::invalid_argument(std::string("expected an array in field \"") + field + "\"");
  std::vector<double> out;
  for (const Json& x : j[field]) {
    if (!x.is_number())
      throw std::invalid_argument(std::string("non-numeric entry in field \"") + field +
                                  "\"");
    out.push_back(x.get<double>());
  }
  return out;
}

Json ext_to_json(const ExtReal& x) {
  if (x.is_finite()) return x.value();
  return "infinite";
}

}  // namespace

Json to_json(const GeometricTail& t) {
  return Json{{"coefficient", t.coefficient}, {"ratio", t.ratio}};
}

Json to_json(const Stream& s) {
  Json j;
  j["window_lo"] = s.window_lo();
  j["values"] = s.values();
  if (s.left_tail()) j["left_tail"] = to_json(*s.left_tail());
  if (s.right_tail()) j["right_tail"] = to_json(*s.right_tail());
  return j;
}

Json to_json(const TailSpec& t) {
  switch (t.kind) {
    case TailSpec::Kind::kConstant:
      return Json{{"kind", "constant"}, {"value", t.constant_value}};
    case TailSpec::Kind::kPeriodic:
      return Json{{"kind", "periodic"}, {"pattern", t.pattern}};
    case TailSpec::Kind::kFormula:
      return Json{{"kind", "formula"}, {"name", formula_name(t.formula_id)}};
  }
  return Json{};
}

Json to_json(const LambdaProfile& p) {
  Json j;
  j["window_lo"] = p.window_lo();
  j["values"] = p.values();
  j["left_tail"] = to_json(p.left_tail());
  j["right_tail"] = to_json(p.right_tail());
  return j;
}

Json to_json(const FamilyReport& f) {
  Json j;
  j["in_B"] = f.in_B;
  j["in_E"] = f.in_E;
  j["in_T"] = f.in_T;
  j["in_P"] = f.in_P;
  j["in_U"] = f.in_U;
  j["inf_lambda"] = f.inf_lambda;
  j["sup_s"] = ext_to_json(f.sup_s);
  if (f.in_U) j["uniform_value"] = f.uniform_value;
  Json w = Json::object();
  for (const auto& [k, v] : f.witness) w[k] = v;
  j["witness"] = w;
  return j;
}

Json to_json(const AllocationResult& a) {
  Json j;
  j["window_lo"] = a.window_lo;
  j["allocations"] = a.allocations;
  j["residual_transfer"] = a.residual_transfer;
  j["tail_allocation_sum"] = a.tail_allocation_sum;
  j["leaked_mass"] = a.leaked_mass;
  return j;
}

Json to_json(const CaseSpec& c) {
  Json j;
  j["stream"] = to_json(c.r);
  if (c.alt) j["alt_stream"] = to_json(*c.alt);
  j["pivot"] = c.pivot;
  j["mode"] = c.mode;
  return j;
}

Json to_json(const AxiomVerdict& v) {
  Json j;
  j["axiom"] = v.axiom;
  j["outcome"] = outcome_name(v.outcome);
  if (v.witness) {
    j["witness"] = to_json(v.witness->spec);
    j["witness"]["note"] = v.witness->note;
    j["violation"] = v.witness->violation;
  } else {
    j["witness"] = nullptr;
    j["violation"] = 0.0;
  }
  j["battery"] = Json{{"seed", v.battery_seed}, {"size", v.battery_size}};
  j["cases_evaluated"] = v.cases_evaluated;
  j["cases_precondition_unmet"] = v.cases_precondition_unmet;
  return j;
}

Json to_json(const ProbeReport& p) {
  Json j;
  j["outcome"] = probe_outcome_name(p.outcome);
  j["bound"] = p.bound;
  j["note"] = p.note;
  j["witness_values"] = p.witness_values;
  if (p.witness_stream) j["witness_stream"] = to_json(*p.witness_stream);
  return j;
}

Json to_json(const MatrixCell& c) {
  Json j;
  j["rule"] = c.rule;
  j["axiom"] = c.axiom;
  j["outcome"] = outcome_name(c.outcome);
  j["expected"] = outcome_name(c.expected);
  j["match"] = c.match;
  if (!c.match && c.witness) {
    j["witness"] = to_json(c.witness->spec);
    j["witness"]["note"] = c.witness->note;
  }
  return j;
}

Json to_json(const IndependenceMatrix& m) {
  Json j;
  j["all_match"] = m.all_match;
  Json cells = Json::array();
  for (const MatrixCell& c : m.cells) cells.push_back(to_json(c));
  j["cells"] = cells;
  return j;
}

GeometricTail tail_from_json(const Json& j) {
  if (!j.is_object()) throw std::invalid_argument("tail must be an object");
  return GeometricTail{require_real(j, "coefficient"), require_real(j, "ratio")};
}

Stream stream_from_json(const Json& j) {
  if (!j.is_object()) throw std::invalid_argument("stream must be an object");
  const index_t lo = require_int(j, "window_lo");
  std::vector<double> vals = require_reals(j, "values");
  std::optional<GeometricTail> left, right;
  if (j.contains("left_tail") && !j["left_tail"].is_null())
    left = tail_from_json(j["left_tail"]);
  if (j.contains("right_tail") && !j["right_tail"].is_null())
    right = tail_from_json(j["right_tail"]);
  return Stream(lo, std::move(vals), left, right);
}

TailSpec tailspec_from_json(const Json& j) {
  if (!j.is_object() || !j.contains("kind") || !j["kind"].is_string())
    throw std::invalid_argument("tail spec must be an object with a \"kind\" string");
  const std::string kind = j["kind"].get<std::string>();
  if (kind == "constant") return TailSpec::constant(require_real(j, "value"));
  if (kind == "periodic") return TailSpec::periodic(require_reals(j, "pattern"));
  if (kind == "formula") {
    if (!j.contains("name") || !j["name"].is_string())
      throw std::invalid_argument("formula tail spec needs a \"name\" string");
    const auto id = formula_from_name(j["name"].get<std::string>());
    if (!id)
      throw std::invalid_argument("unknown formula name \"" +
                                  j["name"].get<std::string>() + "\"");
    return TailSpec::formula(*id);
  }
  throw std::invalid_argument("unknown tail spec kind \"" + kind + "\"");
}

LambdaProfile profile_from_json(const Json& j) {
  if (!j.is_object()) throw std::invalid_argument("profile must be an object");
  if (!j.contains("left_tail") || !j.contains("right_tail"))
    throw std::invalid_argument("profile needs \"left_tail\" and \"right_tail\" specs");
  return LambdaProfile(require_int(j, "window_lo"), require_reals(j, "values"),
                       tailspec_from_json(j["left_tail"]),
                       tailspec_from_json(j["right_tail"]));
}

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  // trim to the shortest representation that still round-trips
  for (int prec = 1; prec < 17; ++prec) {
    char probe[40];
    std::snprintf(probe, sizeof(probe), "%.*g", prec, v);
    double back = 0.0;
    std::sscanf(probe, "%lf", &back);
    if (back == v) return probe;
  }
  return buf;
}

}  // namespace geotransfer
