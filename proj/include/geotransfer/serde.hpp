#pragma once

#include <string>

#include "json.hpp"

#include "geotransfer/axiom_lab.hpp"
#include "geotransfer/gallery.hpp"
#include "geotransfer/lambda_profile.hpp"
#include "geotransfer/rule_engine.hpp"
#include "geotransfer/stream.hpp"

namespace geotransfer {

// Insertion-ordered JSON keeps report files readable and byte-stable.
using Json = nlohmann::ordered_json;

Json to_json(const GeometricTail& t);
Json to_json(const Stream& s);
Json to_json(const TailSpec& t);
Json to_json(const LambdaProfile& p);
Json to_json(const FamilyReport& f);
Json to_json(const AllocationResult& a);
Json to_json(const CaseSpec& c);
Json to_json(const AxiomVerdict& v);
Json to_json(const ProbeReport& p);
Json to_json(const MatrixCell& c);
Json to_json(const IndependenceMatrix& m);

// Parsers throw std::invalid_argument naming the offending field.
GeometricTail tail_from_json(const Json& j);
Stream stream_from_json(const Json& j);
TailSpec tailspec_from_json(const Json& j);
LambdaProfile profile_from_json(const Json& j);

// Shortest-round-trip decimal text for CSV cells; deterministic across runs.
std::string format_double(double v);

}  // namespace geotransfer
