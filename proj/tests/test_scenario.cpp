#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "geotransfer/scenario.hpp"

using namespace geotransfer;
namespace fs = std::filesystem;

namespace {

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  REQUIRE(in.good());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

fs::path fresh_dir(const char* tag) {
  const fs::path d = fs::temp_directory_path() / (std::string("geotransfer_test_") + tag);
  fs::remove_all(d);
  return d;
}

std::string error_text(const std::string& raw, const char* source) {
  try {
    parse_scenario(raw, source);
  } catch (const ScenarioError& e) {
    return e.what();
  }
  return "";
}

}  // namespace

TEST_CASE("streams survive a serialization round trip exactly") {
  const Stream cases[] = {
      Stream::zero(),
      Stream::basis(0),
      Stream::basis(-3),
      Stream(0, {6.0, 3.0}),
      Stream(-2, {3.0, 0.0, 1.0, 4.0}, GeometricTail{2.0, 0.5}, GeometricTail{1.0, 0.25}),
      Stream(0, {1.0}, std::nullopt, GeometricTail{0.5, 0.5}),
  };
  for (const Stream& s : cases) {
    const Json j = to_json(s);
    const Stream back = stream_from_json(j);
    CHECK(exact_equal(back, s));
    CHECK(to_json(back).dump() == j.dump());
  }
}

TEST_CASE("profiles survive a serialization round trip exactly") {
  const LambdaProfile cases[] = {
      LambdaProfile::uniform(0.0),
      LambdaProfile::uniform(0.5),
      LambdaProfile::uniform(1.0),
      LambdaProfile(0, {1.0, 0.5}, TailSpec::periodic({1.0, 0.5}),
                    TailSpec::periodic({1.0, 0.5})),
      LambdaProfile(0, {0.0}, TailSpec::constant(0.0),
                    TailSpec::formula(FormulaId::kExample1Decay)),
      LambdaProfile(0, {1.0}, TailSpec::formula(FormulaId::kVennBlocks),
                    TailSpec::formula(FormulaId::kVennBlocks)),
      LambdaProfile(-3, {0.25, 1.0, 0.75}, TailSpec::constant(1.0), TailSpec::constant(0.0)),
  };
  for (const LambdaProfile& p : cases) {
    const Json j = to_json(p);
    const LambdaProfile back = profile_from_json(j);
    CHECK(to_json(back).dump() == j.dump());
    for (index_t i = -40; i <= 40; ++i) CHECK(back.lambda_at(i) == p.lambda_at(i));
  }
}

TEST_CASE("float formatting is shortest round-trip") {
  const double cases[] = {0.0,   1.0,    1.0 / 3.0, 0.1,  1e-300, 1e300,
                          1.5,   5e-324, 2.0 / 3.0, 0.25, 1e-9,   0.7071067811865476};
  for (const double x : cases) {
    const std::string text = format_double(x);
    CHECK(std::strtod(text.c_str(), nullptr) == x);
  }
  CHECK(format_double(0.5) == "0.5");
  CHECK(format_double(2.0) == "2");
}

TEST_CASE("builtin fixtures serialize, reparse, and reserialize byte-identically") {
  const Scenario s = builtin_fixtures();
  CHECK(s.profiles.size() == 10);
  CHECK(s.streams.size() == 4);
  CHECK(s.tasks.size() == 10);
  const std::string d1 = scenario_to_json(s).dump(2);
  const Scenario s2 = parse_scenario(d1, "builtin");
  const std::string d2 = scenario_to_json(s2).dump(2);
  CHECK(d1 == d2);
  CHECK(s2.seed == s.seed);
  CHECK(s2.tolerance == s.tolerance);
  CHECK(s2.tasks.size() == s.tasks.size());
}

TEST_CASE("malformed JSON reports the source name and a line number") {
  const std::string msg = error_text("{\n  \"tasks\": [\n", "bad.json");
  CAPTURE(msg);
  CHECK(msg.find("bad.json:3") == 0);
  CHECK(msg.find("line") != std::string::npos);
}

TEST_CASE("semantic scenario errors are anchored to the offending name") {
  const char* raw = R"({
  "profiles": {"half": {"window_lo": 0, "values": [0.5],
                        "left_tail": {"kind": "constant", "value": 0.5},
                        "right_tail": {"kind": "constant", "value": 0.5}}},
  "streams": {"e0": {"window_lo": 0, "values": [1.0]}},
  "tasks": [
    {"name": "a", "kind": "allocate", "profile": "nope",
     "stream": "e0", "window_lo": 0, "window_hi": 4}
  ]
})";
  const std::string msg = error_text(raw, "scn.json");
  CAPTURE(msg);
  CHECK(msg.find("scn.json:7:") == 0);
  CHECK(msg.find("unknown profile \"nope\"") != std::string::npos);

  const std::string dup = error_text(R"({
  "tasks": [
    {"name": "t", "kind": "independence"},
    {"name": "t", "kind": "independence"}
  ]
})",
                                     "dup.json");
  CHECK(dup.find("dup.json:") == 0);
  CHECK(dup.find("duplicate task name") != std::string::npos);

  const std::string kind = error_text(R"({"tasks": [{"name": "t", "kind": "dance"}]})",
                                      "kind.json");
  CHECK(kind.find("unknown kind \"dance\"") != std::string::npos);

  const std::string tol = error_text(R"({"tolerance": 0})", "tol.json");
  CHECK(tol.find("tolerance must be a positive number") != std::string::npos);

  const std::string count = error_text(
      R"({"tasks": [{"name": "t", "kind": "independence", "battery_count": 0}]})",
      "count.json");
  CHECK(count.find("battery_count out of range") != std::string::npos);
}

TEST_CASE("a scenario with no tasks succeeds and writes nothing") {
  const Scenario s = parse_scenario(R"({"schema": "1", "seed": 7})", "empty.json");
  CHECK(s.seed == 7);
  CHECK(s.tasks.empty());
  const fs::path dir = fresh_dir("empty");
  std::ostringstream log;
  CHECK(run_scenario(s, dir.string(), log) == 0);
  CHECK(!fs::exists(dir));
}

TEST_CASE("builtin fixtures run clean and reruns are byte-identical") {
  const Scenario s = builtin_fixtures();
  const fs::path d1 = fresh_dir("fixtures_a");
  const fs::path d2 = fresh_dir("fixtures_b");
  std::ostringstream log1, log2;
  const int rc1 = run_scenario(s, d1.string(), log1);
  CAPTURE(log1.str());
  CHECK(rc1 == 0);
  for (const TaskSpec& t : s.tasks) {
    CHECK(fs::exists(d1 / (t.name + ".json")));
    CHECK(fs::exists(d1 / (t.name + ".csv")));
    const Json j = Json::parse(slurp(d1 / (t.name + ".json")));
    CHECK(j["schema"].get<std::string>() == "1");
    CHECK(j["task"].get<std::string>() == t.name);
    CHECK(j["status"].get<std::string>() == "ok");
  }
  CHECK(run_scenario(s, d2.string(), log2) == 0);
  std::size_t compared = 0;
  for (const auto& entry : fs::directory_iterator(d1)) {
    CHECK(slurp(entry.path()) == slurp(d2 / entry.path().filename()));
    ++compared;
  }
  CHECK(compared == 2 * s.tasks.size());
}

TEST_CASE("failing tasks still write reports and flip the exit code") {
  Scenario s;
  s.profiles.emplace_back("half", LambdaProfile::uniform(0.5));
  s.streams.emplace_back("left", Stream(-10, {1.0, 2.0}));
  {
    TaskSpec t;
    t.name = "bad_window";
    t.kind = TaskKind::kAllocate;
    t.profile = "half";
    t.stream = "left";
    t.window_lo = 0;
    t.window_hi = 8;
    s.tasks.push_back(t);
  }
  {
    TaskSpec t;
    t.name = "wrong_venn";
    t.kind = TaskKind::kVenn;
    t.profiles = {"half"};
    t.expect = Json{{"half.in_B", false}};  // a positive uniform rate drains every tail
    s.tasks.push_back(t);
  }
  {
    TaskSpec t;
    t.name = "fine";
    t.kind = TaskKind::kAllocate;
    t.profile = "half";
    t.stream = "left";
    t.window_lo = -10;
    t.window_hi = 4;
    s.tasks.push_back(t);
  }
  const fs::path dir = fresh_dir("failing");
  std::ostringstream log;
  CHECK(run_scenario(s, dir.string(), log) == 1);

  const Json bad = Json::parse(slurp(dir / "bad_window.json"));
  CHECK(bad["status"].get<std::string>() == "failed");
  CHECK(!bad["message"].get<std::string>().empty());
  CHECK(!fs::exists(dir / "bad_window.csv"));

  const Json venn = Json::parse(slurp(dir / "wrong_venn.json"));
  CHECK(venn["status"].get<std::string>() == "failed");
  CHECK(venn["message"].get<std::string>().find("half.in_B") != std::string::npos);
  CHECK(fs::exists(dir / "wrong_venn.csv"));

  const Json fine = Json::parse(slurp(dir / "fine.json"));
  CHECK(fine["status"].get<std::string>() == "ok");
  CHECK(log.str().find("task bad_window: FAILED") != std::string::npos);
  CHECK(log.str().find("task fine: ok") != std::string::npos);
}

TEST_CASE("task battery seeds derive from the scenario seed unless pinned") {
  Scenario s = builtin_fixtures();
  const fs::path d1 = fresh_dir("seed_a");
  const fs::path d2 = fresh_dir("seed_b");
  std::ostringstream log;
  REQUIRE(run_scenario(s, d1.string(), log) == 0);
  s.seed = 99;
  // The independence task pins battery_seed = 1, so its battery is unchanged;
  // the axioms tasks also pin their seed, while reconstruct derives its own.
  REQUIRE(run_scenario(s, d2.string(), log) == 0);
  CHECK(slurp(d1 / "independence.json") == slurp(d2 / "independence.json"));
  const Json r1 = Json::parse(slurp(d1 / "reconstruct_periodic.json"));
  const Json r2 = Json::parse(slurp(d2 / "reconstruct_periodic.json"));
  CHECK(r1["status"] == "ok");
  CHECK(r2["status"] == "ok");
}

TEST_CASE("allocate reports balance the incoming mass") {
  const Scenario s = builtin_fixtures();
  const fs::path dir = fresh_dir("balance");
  std::ostringstream log;
  REQUIRE(run_scenario(s, dir.string(), log) == 0);
  const Json j = Json::parse(slurp(dir / "allocate_uniform_half_e0.json"));
  const double total = j["total_allocated"].get<double>();
  CHECK(total == doctest::Approx(1.0).epsilon(1e-12));
  // Halving at every index: the window row for index 0 holds exactly 1/2.
  const Json result = j["result"];
  const auto& allocs = result["allocations"];
  const index_t lo = result["window_lo"].get<index_t>();
  CHECK(allocs[static_cast<std::size_t>(0 - lo)].get<double>() == 0.5);
  const std::string csv = slurp(dir / "allocate_uniform_half_e0.csv");
  CHECK(csv.find("index,allocation\n") == 0);
  CHECK(csv.find("0,0.5\n") != std::string::npos);
}
