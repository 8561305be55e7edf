#include "geotransfer/scenario.hpp"

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <ostream>
#include <sstream>

#include "geotransfer/rng.hpp"

namespace geotransfer {
namespace {

constexpr std::size_t kMaxBatteryCount = 20000;
constexpr index_t kMaxProbeDepth = 1024;
constexpr index_t kMaxAllocSpan = 100000;
constexpr index_t kMaxRecoverSpan = 4096;

std::uint64_t fnv1a64(const std::string& s) {
  std::uint64_t h = 1469598103934665603ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  return h;
}

int line_of_offset(const std::string& raw, std::size_t byte) {
  byte = std::min(byte, raw.size());
  return 1 + static_cast<int>(std::count(raw.begin(), raw.begin() + byte, '\n'));
}

int line_of(const std::string& raw, const std::string& needle) {
  const std::size_t pos = raw.find(needle);
  if (pos == std::string::npos) return 1;
  return line_of_offset(raw, pos);
}

[[noreturn]] void fail_at(const std::string& raw, const std::string& source,
                          const std::string& anchor, const std::string& msg) {
  throw ScenarioError(source + ":" + std::to_string(line_of(raw, anchor)) + ": " + msg);
}

struct KindName {
  TaskKind kind;
  const char* name;
};

constexpr KindName kKindNames[] = {
    {TaskKind::kAllocate, "allocate"},   {TaskKind::kClassify, "classify"},
    {TaskKind::kAxioms, "axioms"},       {TaskKind::kProbes, "probes"},
    {TaskKind::kVenn, "venn"},           {TaskKind::kIndependence, "independence"},
    {TaskKind::kReconstruct, "reconstruct"},
};

const LambdaProfile* lookup_profile(const Scenario& s, const std::string& name) {
  for (const auto& [n, p] : s.profiles)
    if (n == name) return &p;
  return nullptr;
}

const Stream* lookup_stream(const Scenario& s, const std::string& name) {
  for (const auto& [n, r] : s.streams)
    if (n == name) return &r;
  return nullptr;
}

Battery task_battery(const Scenario& s, const TaskSpec& t) {
  Battery b;
  b.seed = t.battery_seed ? *t.battery_seed : splitmix64(s.seed ^ fnv1a64(t.name));
  b.count = t.battery_count;
  return b;
}

std::string bool_name(bool b) { return b ? "true" : "false"; }

std::string sup_s_text(const ExtReal& x) {
  return x.is_finite() ? format_double(x.value()) : std::string("inf");
}

struct TaskRun {
  Json body;
  std::string csv;
  bool ok = true;
  std::string message;
};

void note_failure(TaskRun& run, const std::string& msg) {
  run.ok = false;
  if (!run.message.empty()) run.message += "; ";
  run.message += msg;
}

TaskRun task_allocate(const Scenario& s, const TaskSpec& t) {
  const LambdaProfile& p = *lookup_profile(s, t.profile);
  const Stream& r = *lookup_stream(s, t.stream);
  TaskRun run;
  run.body["profile"] = t.profile;
  run.body["stream"] = t.stream;
  run.body["window"] = Json{{"lo", t.window_lo}, {"hi", t.window_hi}};
  const AllocationResult res = allocate(p, r, t.window_lo, t.window_hi);
  run.body["result"] = to_json(res);
  run.body["total_income"] = r.taxicab_norm();
  run.body["total_allocated"] = total_allocated(p, r);
  std::ostringstream csv;
  csv << "index,allocation\n";
  for (std::size_t k = 0; k < res.allocations.size(); ++k)
    csv << (res.window_lo + static_cast<index_t>(k)) << ","
        << format_double(res.allocations[k]) << "\n";
  run.csv = csv.str();
  return run;
}

TaskRun task_classify(const Scenario& s, const TaskSpec& t) {
  TaskRun run;
  Json rows = Json::array();
  std::ostringstream csv;
  csv << "profile,in_B,in_E,in_T,in_P,in_U,inf_lambda,sup_s\n";
  for (const std::string& name : t.profiles) {
    const FamilyReport f = lookup_profile(s, name)->classify();
    Json row;
    row["profile"] = name;
    row["report"] = to_json(f);
    rows.push_back(row);
    csv << name << "," << bool_name(f.in_B) << "," << bool_name(f.in_E) << ","
        << bool_name(f.in_T) << "," << bool_name(f.in_P) << "," << bool_name(f.in_U) << ","
        << format_double(f.inf_lambda) << "," << sup_s_text(f.sup_s) << "\n";
  }
  run.body["rows"] = rows;
  run.csv = csv.str();
  return run;
}

TaskRun task_axioms(const Scenario& s, const TaskSpec& t) {
  const GeometricRule rule(*lookup_profile(s, t.profile));
  const Battery b = task_battery(s, t);
  CheckConfig cfg;
  cfg.tolerance = s.tolerance;
  const std::vector<std::string>& list = t.axioms.empty() ? axiom_names() : t.axioms;

  TaskRun run;
  run.body["profile"] = t.profile;
  run.body["battery"] = Json{{"seed", b.seed}, {"count", b.count}};
  Json verdicts = Json::array();
  Json mismatches = Json::array();
  std::ostringstream csv;
  csv << "axiom,outcome,violation,cases_evaluated,cases_precondition_unmet\n";
  for (const std::string& ax : list) {
    const AxiomVerdict v = check_axiom(rule, ax, b, cfg);
    verdicts.push_back(to_json(v));
    csv << ax << "," << outcome_name(v.outcome) << ","
        << format_double(v.witness ? v.witness->violation : 0.0) << "," << v.cases_evaluated
        << "," << v.cases_precondition_unmet << "\n";
    if (t.expect.is_object() && t.expect.contains(ax)) {
      const std::string want = t.expect[ax].get<std::string>();
      if (want != outcome_name(v.outcome)) {
        mismatches.push_back(ax + ": expected " + want + ", got " + outcome_name(v.outcome));
        note_failure(run, "axiom " + ax + " expected " + want + " but got " +
                              outcome_name(v.outcome));
      }
    }
  }
  run.body["verdicts"] = verdicts;
  run.body["expectation_mismatches"] = mismatches;
  run.csv = csv.str();
  return run;
}

TaskRun task_probes(const Scenario& s, const TaskSpec& t) {
  const Battery b = task_battery(s, t);
  TaskRun run;
  run.body["depth"] = t.depth;
  run.body["battery"] = Json{{"seed", b.seed}, {"count", b.count}};
  Json rows = Json::array();
  std::ostringstream csv;
  csv << "profile,probe,outcome,bound\n";
  for (const std::string& name : t.profiles) {
    const LambdaProfile& p = *lookup_profile(s, name);
    const GeometricRule rule(p);
    const std::pair<std::string, ProbeReport> reports[] = {
        {"sup", sup_continuity_probe(p, t.depth, b, s.tolerance)},
        {"pointwise", pointwise_continuity_probe(p, t.depth, s.tolerance)},
        {"taxicab", taxicab_continuity_probe(rule, t.depth, b, s.tolerance)},
    };
    for (const auto& [probe, rep] : reports) {
      Json row;
      row["profile"] = name;
      row["probe"] = probe;
      row["report"] = to_json(rep);
      rows.push_back(row);
      csv << name << "," << probe << "," << probe_outcome_name(rep.outcome) << ","
          << format_double(rep.bound) << "\n";
      const std::string key = name + "." + probe;
      if (t.expect.is_object() && t.expect.contains(key)) {
        const std::string want = t.expect[key].get<std::string>();
        if (want != probe_outcome_name(rep.outcome))
          note_failure(run, key + " expected " + want + " but got " +
                                probe_outcome_name(rep.outcome));
      }
    }
  }
  run.body["rows"] = rows;
  run.csv = csv.str();
  return run;
}

TaskRun task_venn(const Scenario& s, const TaskSpec& t) {
  TaskRun run;
  Json rows = Json::array();
  std::ostringstream csv;
  csv << "profile,in_B,in_E,in_T,in_P,in_U\n";
  for (const std::string& name : t.profiles) {
    const FamilyReport f = lookup_profile(s, name)->classify();
    Json row;
    row["profile"] = name;
    row["in_B"] = f.in_B;
    row["in_E"] = f.in_E;
    row["in_T"] = f.in_T;
    row["in_P"] = f.in_P;
    row["in_U"] = f.in_U;
    rows.push_back(row);
    csv << name << "," << bool_name(f.in_B) << "," << bool_name(f.in_E) << ","
        << bool_name(f.in_T) << "," << bool_name(f.in_P) << "," << bool_name(f.in_U) << "\n";
    if (t.expect.is_object()) {
      const std::pair<std::string, bool> flags[] = {{"in_B", f.in_B},
                                                    {"in_E", f.in_E},
                                                    {"in_T", f.in_T},
                                                    {"in_P", f.in_P},
                                                    {"in_U", f.in_U}};
      for (const auto& [flag, got] : flags) {
        const std::string key = name + "." + flag;
        if (t.expect.contains(key) && t.expect[key].get<bool>() != got)
          note_failure(run, key + " expected " + bool_name(t.expect[key].get<bool>()) +
                                " but got " + bool_name(got));
      }
    }
  }
  run.body["rows"] = rows;
  run.csv = csv.str();
  return run;
}

TaskRun task_independence(const Scenario& s, const TaskSpec& t) {
  const Battery b = task_battery(s, t);
  CheckConfig cfg;
  cfg.tolerance = s.tolerance;
  const IndependenceMatrix m = independence_matrix(b, cfg);
  TaskRun run;
  run.body["battery"] = Json{{"seed", b.seed}, {"count", b.count}};
  run.body["matrix"] = to_json(m);
  run.csv = matrix_csv(m);
  if (!m.all_match) {
    for (const MatrixCell& c : m.cells)
      if (!c.match)
        note_failure(run, c.rule + "/" + c.axiom + " expected " + outcome_name(c.expected) +
                              " but got " + outcome_name(c.outcome));
  }
  return run;
}

TaskRun task_reconstruct(const Scenario& s, const TaskSpec& t) {
  const LambdaProfile& hidden = *lookup_profile(s, t.profile);
  const GeometricRule hidden_rule(hidden);
  const LambdaRecovery rec = recover_lambda(hidden_rule, t.window_lo, t.window_hi);

  TaskRun run;
  run.body["profile"] = t.profile;
  run.body["window"] = Json{{"lo", t.window_lo}, {"hi", t.window_hi}};
  run.body["recovered"] = rec.values;
  run.body["feasible"] = rec.feasible;

  double max_err = 0.0;
  std::ostringstream csv;
  csv << "index,recovered,hidden\n";
  for (std::size_t k = 0; k < rec.values.size(); ++k) {
    const index_t i = t.window_lo + static_cast<index_t>(k);
    const double actual = hidden.lambda_at(i);
    max_err = std::max(max_err, std::abs(rec.values[k] - actual));
    csv << i << "," << format_double(rec.values[k]) << "," << format_double(actual) << "\n";
  }
  run.csv = csv.str();
  run.body["max_error"] = max_err;
  if (!rec.feasible) {
    note_failure(run, "recovered rates leave [0, 1]");
    run.body["agreement_max_diff"] = nullptr;
    return run;
  }
  if (max_err > s.tolerance)
    note_failure(run, "recovered rates differ from the hidden profile by " +
                          format_double(max_err));

  // Rebuild a rule from the recovered window alone and confirm it allocates
  // identically for incomes supported well inside the window.
  const LambdaProfile rebuilt(t.window_lo, rec.values, TailSpec::constant(0.0),
                              TailSpec::constant(0.0));
  const index_t inner_lo = t.window_lo + 2;
  const index_t inner_hi = t.window_hi - 2;
  double agreement = 0.0;
  for (const Stream& raw : task_battery(s, t).streams()) {
    std::vector<double> vals;
    for (index_t i = inner_lo; i <= inner_hi; ++i) vals.push_back(raw.value_at(i));
    const Stream inner(inner_lo, std::move(vals));
    if (inner.is_zero()) continue;
    const AllocationResult a = allocate(hidden, inner, inner_lo, t.window_hi);
    const AllocationResult c = allocate(rebuilt, inner, inner_lo, t.window_hi);
    const double scale = std::max(1.0, inner.taxicab_norm());
    for (std::size_t k = 0; k < a.allocations.size(); ++k)
      agreement = std::max(agreement,
                           std::abs(a.allocations[k] - c.allocations[k]) / scale);
  }
  run.body["agreement_max_diff"] = agreement;
  if (agreement > s.tolerance)
    note_failure(run, "rebuilt rule disagrees with the hidden rule by " +
                          format_double(agreement));
  return run;
}

TaskRun run_task(const Scenario& s, const TaskSpec& t) {
  switch (t.kind) {
    case TaskKind::kAllocate:
      return task_allocate(s, t);
    case TaskKind::kClassify:
      return task_classify(s, t);
    case TaskKind::kAxioms:
      return task_axioms(s, t);
    case TaskKind::kProbes:
      return task_probes(s, t);
    case TaskKind::kVenn:
      return task_venn(s, t);
    case TaskKind::kIndependence:
      return task_independence(s, t);
    case TaskKind::kReconstruct:
      return task_reconstruct(s, t);
  }
  throw std::logic_error("run_task: unhandled task kind");
}

}  // namespace

const char* task_kind_name(TaskKind k) {
  for (const KindName& kn : kKindNames)
    if (kn.kind == k) return kn.name;
  return "unknown";
}

std::optional<TaskKind> task_kind_from_name(const std::string& name) {
  for (const KindName& kn : kKindNames)
    if (name == kn.name) return kn.kind;
  return std::nullopt;
}

Scenario parse_scenario(const std::string& raw, const std::string& source_name) {
  Json doc;
  try {
    doc = Json::parse(raw);
  } catch (const Json::parse_error& e) {
    throw ScenarioError(source_name + ":" + std::to_string(line_of_offset(raw, e.byte)) +
                        ": " + e.what());
  }
  if (!doc.is_object())
    throw ScenarioError(source_name + ":1: scenario root must be a JSON object");

  auto fail = [&](const std::string& anchor, const std::string& msg) {
    fail_at(raw, source_name, anchor, msg);
  };

  Scenario s;
  if (doc.contains("schema")) {
    if (!doc["schema"].is_string() || doc["schema"].get<std::string>() != "1")
      fail("\"schema\"", "unsupported schema (expected \"1\")");
  }
  if (doc.contains("seed")) {
    if (!doc["seed"].is_number_unsigned() && !doc["seed"].is_number_integer())
      fail("\"seed\"", "seed must be an unsigned integer");
    s.seed = doc["seed"].get<std::uint64_t>();
  }
  if (doc.contains("tolerance")) {
    if (!doc["tolerance"].is_number() || !(doc["tolerance"].get<double>() > 0.0))
      fail("\"tolerance\"", "tolerance must be a positive number");
    s.tolerance = doc["tolerance"].get<double>();
  }

  if (doc.contains("profiles")) {
    if (!doc["profiles"].is_object()) fail("\"profiles\"", "profiles must be an object");
    for (const auto& [name, body] : doc["profiles"].items()) {
      try {
        s.profiles.emplace_back(name, profile_from_json(body));
      } catch (const std::exception& e) {
        fail("\"" + name + "\"", "profile \"" + name + "\": " + e.what());
      }
    }
  }
  if (doc.contains("streams")) {
    if (!doc["streams"].is_object()) fail("\"streams\"", "streams must be an object");
    for (const auto& [name, body] : doc["streams"].items()) {
      try {
        s.streams.emplace_back(name, stream_from_json(body));
      } catch (const std::exception& e) {
        fail("\"" + name + "\"", "stream \"" + name + "\": " + e.what());
      }
    }
  }

  if (!doc.contains("tasks")) return s;
  if (!doc["tasks"].is_array()) fail("\"tasks\"", "tasks must be an array");

  auto need_profile = [&](const TaskSpec& t, const std::string& name) {
    if (!lookup_profile(s, name))
      fail("\"" + name + "\"", "task \"" + t.name + "\": unknown profile \"" + name + "\"");
  };

  for (const Json& tj : doc["tasks"]) {
    if (!tj.is_object()) fail("\"tasks\"", "each task must be an object");
    TaskSpec t;
    if (!tj.contains("name") || !tj["name"].is_string() ||
        tj["name"].get<std::string>().empty())
      fail("\"tasks\"", "every task needs a non-empty \"name\"");
    t.name = tj["name"].get<std::string>();
    for (const TaskSpec& prev : s.tasks)
      if (prev.name == t.name) fail("\"" + t.name + "\"", "duplicate task name \"" + t.name + "\"");
    if (!tj.contains("kind") || !tj["kind"].is_string())
      fail("\"" + t.name + "\"", "task \"" + t.name + "\" needs a \"kind\" string");
    const auto kind = task_kind_from_name(tj["kind"].get<std::string>());
    if (!kind)
      fail("\"" + tj["kind"].get<std::string>() + "\"",
           "task \"" + t.name + "\": unknown kind \"" + tj["kind"].get<std::string>() + "\"");
    t.kind = *kind;

    auto get_int = [&](const char* field, index_t& into, bool required) {
      if (!tj.contains(field)) {
        if (required)
          fail("\"" + t.name + "\"",
               "task \"" + t.name + "\" needs an integer \"" + field + "\"");
        return;
      }
      if (!tj[field].is_number_integer())
        fail("\"" + t.name + "\"", "task \"" + t.name + "\": \"" + std::string(field) +
                                       "\" must be an integer");
      into = tj[field].get<index_t>();
    };
    auto get_names = [&](const char* field) {
      std::vector<std::string> names;
      if (!tj.contains(field) || !tj[field].is_array() || tj[field].empty())
        fail("\"" + t.name + "\"",
             "task \"" + t.name + "\" needs a non-empty \"" + field + "\" array");
      for (const Json& x : tj[field]) {
        if (!x.is_string())
          fail("\"" + t.name + "\"",
               "task \"" + t.name + "\": \"" + field + "\" entries must be strings");
        names.push_back(x.get<std::string>());
      }
      return names;
    };

    if (tj.contains("battery_seed")) {
      if (!tj["battery_seed"].is_number_unsigned() && !tj["battery_seed"].is_number_integer())
        fail("\"" + t.name + "\"", "task \"" + t.name + "\": battery_seed must be unsigned");
      t.battery_seed = tj["battery_seed"].get<std::uint64_t>();
    }
    if (tj.contains("battery_count")) {
      if (!tj["battery_count"].is_number_integer() ||
          tj["battery_count"].get<std::int64_t>() < 1 ||
          tj["battery_count"].get<std::uint64_t>() > kMaxBatteryCount)
        fail("\"" + t.name + "\"", "task \"" + t.name + "\": battery_count out of range [1, " +
                                       std::to_string(kMaxBatteryCount) + "]");
      t.battery_count = tj["battery_count"].get<std::size_t>();
    }
    if (tj.contains("depth")) {
      if (!tj["depth"].is_number_integer() || tj["depth"].get<index_t>() < 1 ||
          tj["depth"].get<index_t>() > kMaxProbeDepth)
        fail("\"" + t.name + "\"", "task \"" + t.name + "\": depth out of range [1, " +
                                       std::to_string(kMaxProbeDepth) + "]");
      t.depth = tj["depth"].get<index_t>();
    }
    if (tj.contains("expect")) {
      if (!tj["expect"].is_object())
        fail("\"" + t.name + "\"", "task \"" + t.name + "\": expect must be an object");
      t.expect = tj["expect"];
    }

    switch (t.kind) {
      case TaskKind::kAllocate: {
        if (!tj.contains("profile") || !tj["profile"].is_string())
          fail("\"" + t.name + "\"", "task \"" + t.name + "\" needs a \"profile\" name");
        if (!tj.contains("stream") || !tj["stream"].is_string())
          fail("\"" + t.name + "\"", "task \"" + t.name + "\" needs a \"stream\" name");
        t.profile = tj["profile"].get<std::string>();
        t.stream = tj["stream"].get<std::string>();
        need_profile(t, t.profile);
        if (!lookup_stream(s, t.stream))
          fail("\"" + t.stream + "\"",
               "task \"" + t.name + "\": unknown stream \"" + t.stream + "\"");
        get_int("window_lo", t.window_lo, true);
        get_int("window_hi", t.window_hi, true);
        if (t.window_hi < t.window_lo || t.window_hi - t.window_lo > kMaxAllocSpan)
          fail("\"" + t.name + "\"",
               "task \"" + t.name + "\": window must be ordered and span at most " +
                   std::to_string(kMaxAllocSpan));
        break;
      }
      case TaskKind::kClassify:
      case TaskKind::kVenn: {
        t.profiles = get_names("profiles");
        for (const std::string& n : t.profiles) need_profile(t, n);
        break;
      }
      case TaskKind::kProbes: {
        t.profiles = get_names("profiles");
        for (const std::string& n : t.profiles) need_profile(t, n);
        break;
      }
      case TaskKind::kAxioms: {
        if (!tj.contains("profile") || !tj["profile"].is_string())
          fail("\"" + t.name + "\"", "task \"" + t.name + "\" needs a \"profile\" name");
        t.profile = tj["profile"].get<std::string>();
        need_profile(t, t.profile);
        if (tj.contains("axioms")) {
          t.axioms = get_names("axioms");
          for (const std::string& ax : t.axioms)
            if (std::find(axiom_names().begin(), axiom_names().end(), ax) ==
                axiom_names().end())
              fail("\"" + ax + "\"",
                   "task \"" + t.name + "\": unknown axiom \"" + ax + "\"");
        }
        break;
      }
      case TaskKind::kIndependence:
        break;
      case TaskKind::kReconstruct: {
        if (!tj.contains("profile") || !tj["profile"].is_string())
          fail("\"" + t.name + "\"", "task \"" + t.name + "\" needs a \"profile\" name");
        t.profile = tj["profile"].get<std::string>();
        need_profile(t, t.profile);
        get_int("window_lo", t.window_lo, true);
        get_int("window_hi", t.window_hi, true);
        if (t.window_hi < t.window_lo + 6 || t.window_hi - t.window_lo > kMaxRecoverSpan)
          fail("\"" + t.name + "\"",
               "task \"" + t.name + "\": window must span at least 7 and at most " +
                   std::to_string(kMaxRecoverSpan) + " indices");
        break;
      }
    }
    s.tasks.push_back(std::move(t));
  }
  return s;
}

Json scenario_to_json(const Scenario& s) {
  Json doc;
  doc["schema"] = "1";
  doc["seed"] = s.seed;
  doc["tolerance"] = s.tolerance;
  Json profiles = Json::object();
  for (const auto& [name, p] : s.profiles) profiles[name] = to_json(p);
  doc["profiles"] = profiles;
  Json streams = Json::object();
  for (const auto& [name, r] : s.streams) streams[name] = to_json(r);
  doc["streams"] = streams;
  Json tasks = Json::array();
  for (const TaskSpec& t : s.tasks) {
    Json tj;
    tj["name"] = t.name;
    tj["kind"] = task_kind_name(t.kind);
    switch (t.kind) {
      case TaskKind::kAllocate:
        tj["profile"] = t.profile;
        tj["stream"] = t.stream;
        tj["window_lo"] = t.window_lo;
        tj["window_hi"] = t.window_hi;
        break;
      case TaskKind::kClassify:
      case TaskKind::kVenn:
        tj["profiles"] = t.profiles;
        break;
      case TaskKind::kProbes:
        tj["profiles"] = t.profiles;
        tj["depth"] = t.depth;
        tj["battery_count"] = t.battery_count;
        break;
      case TaskKind::kAxioms:
        tj["profile"] = t.profile;
        if (!t.axioms.empty()) tj["axioms"] = t.axioms;
        tj["battery_count"] = t.battery_count;
        break;
      case TaskKind::kIndependence:
        tj["battery_count"] = t.battery_count;
        break;
      case TaskKind::kReconstruct:
        tj["profile"] = t.profile;
        tj["window_lo"] = t.window_lo;
        tj["window_hi"] = t.window_hi;
        tj["battery_count"] = t.battery_count;
        break;
    }
    if (t.battery_seed) tj["battery_seed"] = *t.battery_seed;
    if (t.expect.is_object()) tj["expect"] = t.expect;
    tasks.push_back(tj);
  }
  doc["tasks"] = tasks;
  return doc;
}

Scenario builtin_fixtures() {
  Scenario s;
  s.seed = 1;
  s.tolerance = 1e-9;

  const TailSpec zero = TailSpec::constant(0.0);
  const TailSpec unit_half = TailSpec::periodic({1.0, 0.5});
  s.profiles.emplace_back("uniform_0", LambdaProfile::uniform(0.0));
  s.profiles.emplace_back("uniform_quarter", LambdaProfile::uniform(0.25));
  s.profiles.emplace_back("uniform_half", LambdaProfile::uniform(0.5));
  s.profiles.emplace_back("uniform_1", LambdaProfile::uniform(1.0));
  s.profiles.emplace_back(
      "example1",
      LambdaProfile(0, {0.0}, zero, TailSpec::formula(FormulaId::kExample1Decay)));
  s.profiles.emplace_back("venn_blocks",
                          LambdaProfile(0, {1.0}, TailSpec::formula(FormulaId::kVennBlocks),
                                        TailSpec::formula(FormulaId::kVennBlocks)));
  s.profiles.emplace_back("periodic_unit_half",
                          LambdaProfile(0, {1.0, 0.5}, unit_half, unit_half));
  s.profiles.emplace_back("step_left_unit",
                          LambdaProfile(0, {1.0}, TailSpec::constant(1.0), zero));
  s.profiles.emplace_back("step_left_zero",
                          LambdaProfile(0, {0.0}, zero, TailSpec::constant(0.5)));
  s.profiles.emplace_back("sup_witness", LambdaProfile(0, {1.0}, zero, zero));

  s.streams.emplace_back("e0", Stream::basis(0));
  s.streams.emplace_back("e1", Stream::basis(1));
  s.streams.emplace_back("half_geometric",
                         Stream(0, {1.0}, std::nullopt, GeometricTail{0.5, 0.5}));
  s.streams.emplace_back("six_three", Stream(0, {6.0, 3.0}));

  auto task = [&](const char* name, TaskKind kind) {
    TaskSpec t;
    t.name = name;
    t.kind = kind;
    return t;
  };

  {
    TaskSpec t = task("allocate_uniform_half_e0", TaskKind::kAllocate);
    t.profile = "uniform_half";
    t.stream = "e0";
    t.window_lo = -4;
    t.window_hi = 40;
    s.tasks.push_back(t);
  }
  {
    TaskSpec t = task("allocate_example1_e1", TaskKind::kAllocate);
    t.profile = "example1";
    t.stream = "e1";
    t.window_lo = -2;
    t.window_hi = 48;
    s.tasks.push_back(t);
  }
  {
    TaskSpec t = task("allocate_periodic_six_three", TaskKind::kAllocate);
    t.profile = "periodic_unit_half";
    t.stream = "six_three";
    t.window_lo = -4;
    t.window_hi = 16;
    s.tasks.push_back(t);
  }
  {
    TaskSpec t = task("classify_profiles", TaskKind::kClassify);
    for (const auto& [name, p] : s.profiles) t.profiles.push_back(name);
    s.tasks.push_back(t);
  }
  {
    TaskSpec t = task("axioms_uniform_half", TaskKind::kAxioms);
    t.profile = "uniform_half";
    t.battery_seed = 1;
    t.battery_count = 96;
    t.expect = Json{{"feasibility", "pass"},
                    {"balance", "pass"},
                    {"scale_invariance", "pass"},
                    {"independence_future_income", "pass"},
                    {"independence_future_streams", "pass"},
                    {"zero_inessential", "pass"},
                    {"translation_invariance", "pass"},
                    {"idempotency", "fail"},
                    {"consistency", "pass"},
                    {"continuity", "pass"}};
    s.tasks.push_back(t);
  }
  {
    TaskSpec t = task("axioms_example1", TaskKind::kAxioms);
    t.profile = "example1";
    t.battery_seed = 1;
    t.battery_count = 96;
    t.expect = Json{{"feasibility", "pass"},
                    {"balance", "fail"},
                    {"scale_invariance", "pass"},
                    {"independence_future_income", "pass"},
                    {"independence_future_streams", "pass"},
                    {"zero_inessential", "pass"},
                    {"translation_invariance", "fail"},
                    {"idempotency", "fail"},
                    {"consistency", "pass"},
                    {"continuity", "pass"}};
    s.tasks.push_back(t);
  }
  {
    TaskSpec t = task("probes_families", TaskKind::kProbes);
    t.profiles = {"uniform_0",   "uniform_half",       "uniform_1",
                  "example1",    "venn_blocks",        "periodic_unit_half",
                  "step_left_unit", "step_left_zero",  "sup_witness"};
    t.depth = 24;
    t.battery_count = 64;
    t.expect = Json{{"uniform_0.sup", "certified-pass"},
                    {"uniform_0.pointwise", "certified-pass"},
                    {"uniform_0.taxicab", "certified-pass"},
                    {"uniform_half.sup", "certified-pass"},
                    {"uniform_half.pointwise", "certified-fail"},
                    {"uniform_half.taxicab", "certified-pass"},
                    {"uniform_1.sup", "certified-pass"},
                    {"uniform_1.pointwise", "certified-pass"},
                    {"uniform_1.taxicab", "certified-pass"},
                    {"example1.sup", "certified-fail"},
                    {"example1.pointwise", "certified-fail"},
                    {"example1.taxicab", "certified-pass"},
                    {"venn_blocks.sup", "certified-fail"},
                    {"venn_blocks.pointwise", "certified-pass"},
                    {"venn_blocks.taxicab", "certified-pass"},
                    {"periodic_unit_half.sup", "certified-pass"},
                    {"periodic_unit_half.pointwise", "certified-pass"},
                    {"periodic_unit_half.taxicab", "certified-pass"},
                    {"step_left_unit.sup", "certified-pass"},
                    {"step_left_unit.pointwise", "certified-pass"},
                    {"step_left_unit.taxicab", "certified-pass"},
                    {"step_left_zero.sup", "certified-fail"},
                    {"step_left_zero.pointwise", "certified-fail"},
                    {"step_left_zero.taxicab", "certified-pass"},
                    {"sup_witness.sup", "certified-fail"},
                    {"sup_witness.pointwise", "certified-fail"},
                    {"sup_witness.taxicab", "certified-pass"}};
    s.tasks.push_back(t);
  }
  {
    TaskSpec t = task("venn", TaskKind::kVenn);
    t.profiles = {"venn_blocks",    "periodic_unit_half", "step_left_unit",
                  "step_left_zero", "uniform_half",       "uniform_0"};
    t.expect = Json{{"venn_blocks.in_P", true},        {"venn_blocks.in_T", false},
                    {"venn_blocks.in_B", true},        {"venn_blocks.in_E", false},
                    {"venn_blocks.in_U", false},       {"periodic_unit_half.in_P", true},
                    {"periodic_unit_half.in_T", true}, {"periodic_unit_half.in_B", true},
                    {"periodic_unit_half.in_E", true}, {"periodic_unit_half.in_U", false},
                    {"step_left_unit.in_T", true},     {"step_left_unit.in_P", true},
                    {"step_left_unit.in_B", false},    {"step_left_unit.in_E", false},
                    {"step_left_unit.in_U", false},    {"step_left_zero.in_B", true},
                    {"step_left_zero.in_T", false},    {"step_left_zero.in_P", false},
                    {"step_left_zero.in_E", false},    {"step_left_zero.in_U", false},
                    {"uniform_half.in_U", true},       {"uniform_half.in_T", true},
                    {"uniform_half.in_B", true},       {"uniform_half.in_E", true},
                    {"uniform_half.in_P", false},      {"uniform_0.in_U", true},
                    {"uniform_0.in_B", false},         {"uniform_0.in_E", false},
                    {"uniform_0.in_P", false},         {"uniform_0.in_T", true}};
    s.tasks.push_back(t);
  }
  {
    TaskSpec t = task("independence", TaskKind::kIndependence);
    t.battery_seed = 1;
    t.battery_count = 200;
    s.tasks.push_back(t);
  }
  {
    TaskSpec t = task("reconstruct_periodic", TaskKind::kReconstruct);
    t.profile = "periodic_unit_half";
    t.window_lo = -32;
    t.window_hi = 31;
    t.battery_count = 24;
    s.tasks.push_back(t);
  }
  return s;
}

int run_scenario(const Scenario& s, const std::string& out_dir, std::ostream& log) {
  namespace fs = std::filesystem;
  if (s.tasks.empty()) {
    log << "no tasks declared; nothing to do\n";
    return 0;
  }
  fs::create_directories(out_dir);
  bool all_ok = true;
  for (const TaskSpec& t : s.tasks) {
    TaskRun run;
    try {
      run = run_task(s, t);
    } catch (const std::exception& e) {
      run.body["error"] = e.what();
      run.ok = false;
      run.message = e.what();
      run.csv.clear();
    }
    Json envelope;
    envelope["schema"] = "1";
    envelope["task"] = t.name;
    envelope["kind"] = task_kind_name(t.kind);
    envelope["status"] = run.ok ? "ok" : "failed";
    envelope["message"] = run.message;
    for (const auto& [k, v] : run.body.items()) envelope[k] = v;
    {
      std::ofstream out(fs::path(out_dir) / (t.name + ".json"), std::ios::binary);
      out << envelope.dump(2) << "\n";
    }
    if (!run.csv.empty()) {
      std::ofstream out(fs::path(out_dir) / (t.name + ".csv"), std::ios::binary);
      out << run.csv;
    }
    log << "task " << t.name << ": " << (run.ok ? "ok" : "FAILED") << "\n";
    if (!run.ok && !run.message.empty()) log << "  " << run.message << "\n";
    all_ok = all_ok && run.ok;
  }
  return all_ok ? 0 : 1;
}

}  // namespace geotransfer
