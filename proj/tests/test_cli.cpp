#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "fitheight/cli.hpp"
#include "fitheight/selftest.hpp"
#include "support.hpp"

using namespace fitheight;
using namespace support;
namespace cli = fitheight::cli;

namespace {

struct Outcome {
  int code;
  std::string out;
  std::string err;
};

Outcome run(std::vector<std::string> args) {
  args.insert(args.begin(), "fitheight");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  const int code = cli::main(static_cast<int>(argv.size()), argv.data(), out, err);
  return {code, out.str(), err.str()};
}

cli::ParseError parse_error(const std::string& text) {
  try {
    cli::parse(text);
  } catch (const cli::ParseError& e) {
    return e;
  }
  FAIL("no parse error for " << text);
  throw;
}

std::string temp_path(const std::string& name) {
  const auto p = std::filesystem::temp_directory_path() / ("fitheight_test_" + name);
  std::filesystem::remove(p);
  return p.string();
}

}  // namespace

TEST_CASE("parser") {
  CHECK(cli::parse("W(C(2),C(3))") == W(C(2), C(3)));
  CHECK(expand(cli::parse("Ex2(2,3,1)")) == W(W(C(2), C(3)), C(2)));
  CHECK(cli::parse(" W ( C( 2 ) ,\tC(3) ) ") == W(C(2), C(3)));
  CHECK(cli::parse("Ex1(2,3,5,7,0)") == GroupExpr::ex1(2, 3, 5, 7, 0));
  CHECK(cli::parse("C(12)").str() == "C(12)");

  cli::ParseError e = parse_error("W(C(2)");
  CHECK(e.offset() == 6);
  CHECK(e.expected() == std::vector<std::string>{")", ","});
  e = parse_error("Ex2(4,3,1)");
  CHECK(e.offset() == 4);
  e = parse_error("Ex2(2,2,1)");
  CHECK(e.offset() == 0);
  e = parse_error("W(C(2),C(3),C(5))");
  CHECK(e.offset() == 0);
  CHECK(std::string(e.what()).find("takes 2 arguments") != std::string::npos);
  e = parse_error("Q(2)");
  CHECK(e.offset() == 0);
  CHECK(e.expected().size() == 5);
  e = parse_error("C(2))");
  CHECK(e.offset() == 4);
  CHECK(e.expected() == std::vector<std::string>{"end of input"});
  CHECK(parse_error("C(0)").offset() == 2);
  CHECK(parse_error("D(2,C(3))").offset() == 2);
  CHECK(parse_error("C(x)").expected() == std::vector<std::string>{"integer"});
  CHECK(parse_error("").offset() == 0);
  CHECK(parse_error("C(99999999999)").offset() == 2);
}

TEST_CASE("parse and print round-trip") {
  Rng rng(31);
  for (int i = 0; i < 300; ++i) {
    const GroupExpr e = random_expr(rng, 1'000'000'000, 4);
    const std::string s = e.str();
    CHECK(s.find(' ') == std::string::npos);
    CHECK(cli::parse(s) == e);
    CHECK(cli::parse(s).str() == s);
    std::string spaced;
    for (char c : s) spaced += std::string(1, c) + (c == ',' || c == '(' ? " " : "");
    CHECK(cli::parse(spaced) == e);
  }
  for (const auto& e : oracle_suite()) CHECK(cli::parse(e.str()) == e);
}

TEST_CASE("sigma lists") {
  CHECK(cli::parse_sigma("2,5") == PrimeSet{2, 5});
  CHECK(cli::parse_sigma(" 3 ") == PrimeSet{3});
  CHECK(cli::parse_sigma("5, 2, 5") == PrimeSet{2, 5});
  CHECK_THROWS_AS(cli::parse_sigma("4"), cli::ParseError);
  CHECK_THROWS_AS(cli::parse_sigma(""), cli::ParseError);
  CHECK_THROWS_AS(cli::parse_sigma("2,,3"), cli::ParseError);
  CHECK_THROWS_AS(cli::parse_sigma("2;3"), cli::ParseError);
  CHECK(cli::format_sigma({2, 5}) == "2,5");
}

TEST_CASE("commands and exit codes") {
  Outcome o = run({"invariants", "--expr", "C(6)"});
  REQUIRE(o.code == cli::kOk);
  const cli::Json j = cli::Json::parse(o.out);
  CHECK(j["schema"] == cli::kSchema);
  CHECK(j["scalars"]["fitting_height"] == 1);
  CHECK(j["scalars"]["derived_length"] == 1);
  CHECK(j["scalars"]["delta"] == 1);

  o = run({"bounds", "--expr", "Ex2(2,3,1)", "--sigma", "2", "--format", "json"});
  REQUIRE(o.code == cli::kOk);
  const cli::Json b = cli::Json::parse(o.out);
  CHECK(b["order"] == "1152");
  for (const auto& row : b["rows"])
    if (row["name"] == "nilpotent_complement") CHECK(row["slack"] == 0);

  o = run({"towers", "--expr", "W(C(2),C(3))", "--mode", "exact"});
  REQUIRE(o.code == cli::kOk);
  CHECK(cli::Json::parse(o.out)["length"] == 2);

  CHECK(run({"invariants", "--expr", "W(C(2)"}).code == cli::kUsage);
  CHECK(run({"invariants"}).code == cli::kUsage);
  CHECK(run({"bounds", "--expr", "C(6)"}).code == cli::kUsage);
  CHECK(run({"bounds", "--expr", "C(6)", "--sigma", "4"}).code == cli::kUsage);
  CHECK(run({"bounds", "--expr", "C(6)", "--sigma", "2", "--format", "csv"}).code == cli::kUsage);
  CHECK(run({"frobnicate"}).code == cli::kUsage);
  CHECK(run({"invariants", "--expr", "C(6)", "--format", "xml"}).code == cli::kUsage);
  CHECK(run({"invariants", "--expr", "C(6)", "--max-order", "lots"}).code == cli::kUsage);
  CHECK(run({"--help"}).code == cli::kOk);

  o = run({"invariants", "--expr", "W(C(7),W(C(7),W(C(7),C(7))))"});
  CHECK(o.code == cli::kBudget);
  CHECK(o.err.find("budget") != std::string::npos);
  CHECK(run({"towers", "--expr", "Ex2(2,3,1)", "--max-order", "100"}).code == cli::kBudget);
  CHECK(run({"towers", "--expr", "Ex2(2,3,1)", "--max-order", "100", "--mode", "budgeted"}).code == cli::kOk);
}

TEST_CASE("markdown output") {
  const Outcome o = run({"bounds", "--expr", "W(C(2),C(3))", "--sigma", "2", "--format", "md"});
  REQUIRE(o.code == cli::kOk);
  CHECK(o.out.find("| delta_product ") != std::string::npos);
  std::istringstream in(o.out);
  std::string line;
  std::size_t width = 0;
  bool in_bounds = false;
  while (std::getline(in, line)) {
    if (line.rfind("| bound", 0) == 0) in_bounds = true, width = line.size();
    else if (in_bounds && line.rfind("|", 0) == 0) CHECK(line.size() == width);
    else in_bounds = false;
  }
  CHECK(width > 0);
}

TEST_CASE("result cache") {
  const std::string path = temp_path("cache.jsonl");
  const std::vector<std::string> args = {"bounds", "--expr", "W(C(2),C(3))", "--sigma", "2", "--cache", path};
  const Outcome first = run(args);
  const Outcome second = run(args);
  CHECK(first.code == cli::kOk);
  CHECK(first.out == second.out);
  std::ifstream in(path);
  std::string line;
  std::size_t lines = 0;
  while (std::getline(in, line)) ++lines;
  CHECK(lines == 1);

  std::ofstream(path, std::ios::app) << "{not json\n\n{\"key\": 3}\n";
  const Outcome third = run(args);
  CHECK(third.out == first.out);
  CHECK(third.err.find("skipping") != std::string::npos);
  std::ostringstream warn;
  const cli::ResultCache cache(path, warn);
  CHECK(cache.skipped() == 2);

  setenv(cli::kCacheEnv, path.c_str(), 1);
  const Outcome env = run({"bounds", "--expr", "W(C(2),C(3))", "--sigma", "2"});
  unsetenv(cli::kCacheEnv);
  CHECK(env.out == first.out);
  CHECK(env.err.find("skipping") != std::string::npos);
  std::filesystem::remove(path);
}

TEST_CASE("census") {
  const Outcome a = run({"census", "--count", "12", "--seed", "4"});
  const Outcome b = run({"census", "--count", "12", "--seed", "4", "--jobs", "3"});
  REQUIRE(a.code == cli::kOk);
  CHECK(a.out == b.out);
  const cli::Json j = cli::Json::parse(a.out);
  CHECK(j["records"].size() + j["skipped"].size() == 24);
  CHECK(j["violation_count"] == 0);
  for (const auto& r : j["records"]) CHECK(Order(r["order"].get<std::string>()) <= 1'000'000);
  CHECK(run({"census", "--count", "12", "--seed", "5"}).out != a.out);

  const std::string path = temp_path("census.jsonl");
  const Outcome c1 = run({"census", "--count", "6", "--seed", "4", "--cache", path});
  const Outcome c2 = run({"census", "--count", "6", "--seed", "4", "--cache", path});
  CHECK(c1.out == c2.out);
  std::filesystem::remove(path);

  const Outcome csv = run({"census", "--count", "3", "--seed", "4", "--format", "csv"});
  REQUIRE(csv.code == cli::kOk);
  CHECK(csv.out.rfind("expr,order,sigma,sigma_prime,h_g", 0) == 0);
  CHECK(std::count(csv.out.begin(), csv.out.end(), '\n') == 7);
}

TEST_CASE("selftest command") {
  const Outcome o = run({"selftest", "--count", "3", "--seed", "2", "--format", "md"});
  CHECK(o.code == cli::kOk);
  CHECK(o.out.find("failures: 0") != std::string::npos);
}

namespace {

const cli::Json& resolve(const cli::Json& schema, const cli::Json& node) {
  if (!node.contains("$ref")) return node;
  const std::string ref = node["$ref"];
  return resolve(schema, schema["$defs"][ref.substr(ref.rfind('/') + 1)]);
}

// Every key of `value` must be declared somewhere in `node`; reports the
// first undeclared path.
std::string undeclared(const cli::Json& schema, const cli::Json& node_in, const cli::Json& value, const std::string& path) {
  const cli::Json& node = resolve(schema, node_in);
  if (value.is_array() && node.contains("items")) {
    for (const auto& v : value)
      if (auto bad = undeclared(schema, node["items"], v, path + "[]"); !bad.empty()) return bad;
    return "";
  }
  if (!value.is_object()) return "";
  for (const auto& [key, v] : value.items()) {
    const std::string p = path + "." + key;
    if (node.contains("properties") && node["properties"].contains(key)) {
      if (auto bad = undeclared(schema, node["properties"][key], v, p); !bad.empty()) return bad;
    } else if (node.contains("additionalProperties") && node["additionalProperties"].is_object()) {
      if (auto bad = undeclared(schema, node["additionalProperties"], v, p); !bad.empty()) return bad;
    } else {
      return p;
    }
  }
  return "";
}

}  // namespace

TEST_CASE("schema documents every report field") {
  std::ifstream in(FITHEIGHT_SCHEMA);
  REQUIRE(in);
  const cli::Json schema = cli::Json::parse(in);
  const std::vector<std::vector<std::string>> commands = {
      {"invariants", "--expr", "Ex2(2,3,1)", "--sigma", "2"},
      {"bounds", "--expr", "W(C(5),W(C(2),C(3)))", "--sigma", "3"},
      {"towers", "--expr", "W(C(2),C(3))", "--mode", "exact"},
      {"census", "--count", "3", "--seed", "2"},
      {"selftest", "--count", "1"},
  };
  for (const auto& args : commands) {
    const Outcome o = run(args);
    REQUIRE(o.code == 0);
    const cli::Json report = cli::Json::parse(o.out);
    CHECK(report["schema"] == schema["$id"]);
    const cli::Json& def = schema["$defs"][args[0]];
    CAPTURE(args[0]);
    CHECK(undeclared(schema, def, report, "") == "");
  }
}
