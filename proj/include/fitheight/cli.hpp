#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "fitheight/bounds.hpp"
#include "fitheight/errors.hpp"
#include "fitheight/towers.hpp"

namespace fitheight::cli {

using Json = nlohmann::ordered_json;

inline constexpr const char* kSchema = "fitheight.report/1";
inline constexpr const char* kCacheEnv = "FITHEIGHT_CACHE";

enum Exit { kOk = 0, kViolation = 1, kUsage = 2, kBudget = 3 };

/// Syntax or semantic error in an expression or sigma list. `offset` is a
/// byte offset into the input; `expected` lists the tokens that would have
/// been accepted there (empty for semantic errors).
class ParseError : public PreconditionError {
 public:
  ParseError(std::size_t offset, std::string message, std::vector<std::string> expected = {});
  std::size_t offset() const { return offset_; }
  const std::vector<std::string>& expected() const { return expected_; }
  const std::string& message() const { return message_; }

 private:
  std::size_t offset_;
  std::string message_;
  std::vector<std::string> expected_;
};

/// expr := "C(" int ")" | "D(" expr "," expr ")" | "W(" expr "," expr ")"
///       | "Ex1(" p "," q "," r "," t "," n ")" | "Ex2(" p "," q "," n ")"
/// Whitespace between tokens is ignored.
GroupExpr parse(std::string_view text);
/// Comma-separated primes, e.g. "2,5".
PrimeSet parse_sigma(std::string_view text);
std::string format_sigma(const PrimeSet& sigma);

enum class Format { Json, Md, Csv };
enum class Command { Invariants, Bounds, Towers, Census, Selftest };

struct ParsedCommand {
  Command command = Command::Invariants;
  std::optional<GroupExpr> expr;
  std::optional<PrimeSet> sigma;
  Format format = Format::Json;
  std::uint64_t seed = 1;
  /// Orbit-point cap for every orbit computation.
  std::size_t budget = 1'000'000;
  Order max_order = 1'000'000;
  SearchMode mode = SearchMode::Exact;
  /// Census and selftest: number of random expressions.
  std::size_t count = 50;
  /// Census worker threads; 0 means one per hardware thread.
  unsigned jobs = 0;
  std::optional<std::string> cache;
};

// Reports. Orders are decimal strings; everything else is a JSON number,
// bool, string or array.
Json invariants_report(const BuiltGroup& g, const std::optional<PrimeSet>& sigma, const Limits& limits = {});
Json bounds_report(const BoundReport& r);
Json towers_report(const BuiltGroup& g, const SearchResult& r, SearchMode mode);

/// Renders a report produced above (or by census/selftest). Throws
/// PreconditionError for csv on anything but a census.
std::string render(const Json& report, Format format);

/// Append-only JSON-lines store of reports. Lines that fail to parse are
/// skipped with a warning on `warn`.
class ResultCache {
 public:
  ResultCache(std::string path, std::ostream& warn);
  std::optional<Json> get(const std::string& key) const;
  void put(const std::string& key, const Json& report);
  std::size_t skipped() const { return skipped_; }

 private:
  std::string path_;
  std::vector<std::pair<std::string, Json>> entries_;
  std::size_t skipped_ = 0;
};

/// Cache key for a command on one expression.
std::string cache_key(const ParsedCommand& cmd);

/// Executes a parsed command, writing the report to `out` and diagnostics
/// to `err`. Returns an Exit code.
int run(const ParsedCommand& cmd, std::ostream& out, std::ostream& err);

/// Full command line handling (argv[0] included).
int main(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace fitheight::cli
