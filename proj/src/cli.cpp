#include "fitheight/cli.hpp"

#include <algorithm>
#include <atomic>
#include <cctype>
#include <chrono>
#include <cstdlib>
#include <ctime>
#include <fstream>
#include <iostream>
#include <limits>
#include <map>
#include <sstream>
#include <thread>

#include <CLI11.hpp>

#include "fitheight/invariants.hpp"
#include "fitheight/selftest.hpp"

namespace fitheight::cli {

namespace {

std::string join_expected(const std::vector<std::string>& ex) {
  std::string out;
  for (std::size_t i = 0; i < ex.size(); ++i) {
    if (i) out += i + 1 == ex.size() ? " or " : ", ";
    out += ex[i] == "end of input" || ex[i] == "integer" || ex[i] == "prime" ? ex[i] : "\"" + ex[i] + "\"";
  }
  return out;
}

std::string parse_error_text(std::size_t offset, const std::string& message, const std::vector<std::string>& expected) {
  std::string s = "offset " + std::to_string(offset) + ": " + message;
  if (!expected.empty()) s += "; expected " + join_expected(expected);
  return s;
}

const std::vector<std::string> kExprStart = {"C(", "D(", "W(", "Ex1(", "Ex2("};

class Parser {
 public:
  explicit Parser(std::string_view s) : s_(s) {}

  GroupExpr top() {
    GroupExpr e = expr();
    skip();
    if (i_ != s_.size()) fail({"end of input"});
    return e;
  }

 private:
  struct Arg {
    std::size_t offset;
    std::uint64_t number = 0;
    std::optional<GroupExpr> expr;
  };

  void skip() {
    while (i_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[i_]))) ++i_;
  }

  [[noreturn]] void fail(std::vector<std::string> expected) {
    skip();
    const std::string got = i_ < s_.size() ? "unexpected '" + std::string(1, s_[i_]) + "'" : "unexpected end of input";
    throw ParseError(i_, got, std::move(expected));
  }

  bool eat(char c) {
    skip();
    if (i_ < s_.size() && s_[i_] == c) {
      ++i_;
      return true;
    }
    return false;
  }

  std::uint64_t number() {
    skip();
    const std::size_t start = i_;
    std::uint64_t v = 0;
    while (i_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[i_]))) {
      const unsigned d = static_cast<unsigned>(s_[i_] - '0');
      if (v > (std::numeric_limits<std::uint32_t>::max() - d) / 10) throw ParseError(start, "integer too large");
      v = v * 10 + d;
      ++i_;
    }
    if (i_ == start) fail({"integer"});
    return v;
  }

  GroupExpr expr() {
    skip();
    const std::size_t start = i_;
    while (i_ < s_.size() && std::isalnum(static_cast<unsigned char>(s_[i_]))) ++i_;
    const std::string name(s_.substr(start, i_ - start));
    if (name.empty()) fail(kExprStart);
    if (name != "C" && name != "D" && name != "W" && name != "Ex1" && name != "Ex2")
      throw ParseError(start, "unknown constructor '" + name + "'", kExprStart);
    if (!eat('(')) fail({"("});
    const bool takes_groups = name == "D" || name == "W";
    std::vector<Arg> args;
    for (;;) {
      skip();
      Arg a{i_, 0, std::nullopt};
      if (takes_groups)
        a.expr = expr();
      else
        a.number = number();
      args.push_back(std::move(a));
      if (eat(',')) continue;
      if (eat(')')) break;
      fail({")", ","});
    }
    const std::size_t arity = name == "C" ? 1 : name == "Ex1" ? 5 : name == "Ex2" ? 3 : 2;
    if (args.size() != arity)
      throw ParseError(start, name + " takes " + std::to_string(arity) + " argument" + (arity > 1 ? "s" : "") + ", got " +
                                  std::to_string(args.size()));
    if (name == "C") {
      if (args[0].number == 0) throw ParseError(args[0].offset, "C(n) needs n >= 1");
      return GroupExpr::cyclic(args[0].number);
    }
    if (name == "D") return GroupExpr::direct(*args[0].expr, *args[1].expr);
    if (name == "W") return GroupExpr::wreath(*args[0].expr, *args[1].expr);
    for (std::size_t k = 0; k + 1 < arity; ++k)
      if (!is_prime(args[k].number))
        throw ParseError(args[k].offset, std::to_string(args[k].number) + " is not prime", {"prime"});
    try {
      if (name == "Ex1")
        return GroupExpr::ex1(static_cast<Prime>(args[0].number), static_cast<Prime>(args[1].number),
                              static_cast<Prime>(args[2].number), static_cast<Prime>(args[3].number),
                              static_cast<unsigned>(args[4].number));
      return GroupExpr::ex2(static_cast<Prime>(args[0].number), static_cast<Prime>(args[1].number),
                            static_cast<unsigned>(args[2].number));
    } catch (const ParseError&) {
      throw;
    } catch (const PreconditionError& e) {
      throw ParseError(start, e.what());
    }
  }

  std::string_view s_;
  std::size_t i_ = 0;
};

std::string engine_version() { return FITHEIGHT_VERSION; }

Json envelope(const std::string& command, const std::string& expr) {
  Json j;
  j["schema"] = kSchema;
  j["engine"] = engine_version();
  j["command"] = command;
  if (!expr.empty()) j["expr"] = expr;
  return j;
}

Json primes_json(const PrimeSet& s) { return Json(std::vector<Prime>(s.begin(), s.end())); }

Json series_json(const SeriesReport& s) {
  Json j;
  j["kind"] = std::string(to_string(s.kind));
  j["length"] = s.length;
  Json orders = Json::array();
  for (const auto& t : s.terms) orders.push_back(to_string(t.order()));
  j["orders"] = orders;
  return j;
}

Json lambda_json(const LambdaBreakdown& l) {
  Json j;
  j["total"] = l.total;
  Json layers = Json::array();
  for (const auto& layer : l.layers) layers.push_back({{"index", layer.index}, {"primes", primes_json(layer.primes)}, {"value", layer.value}});
  j["layers"] = layers;
  return j;
}

std::string sigma_text(const Json& arr) {
  std::string s = "{";
  for (std::size_t i = 0; i < arr.size(); ++i) s += (i ? "," : "") + std::to_string(arr[i].get<Prime>());
  return s + "}";
}

std::string cell(const Json& v) {
  if (v.is_null()) return "-";
  if (v.is_string()) return v.get<std::string>();
  if (v.is_boolean()) return v.get<bool>() ? "yes" : "no";
  if (v.is_array()) return sigma_text(v);
  return v.dump();
}

std::string table(const std::vector<std::string>& head, const std::vector<std::vector<std::string>>& rows) {
  std::vector<std::size_t> w(head.size());
  for (std::size_t c = 0; c < head.size(); ++c) {
    w[c] = head[c].size();
    for (const auto& r : rows) w[c] = std::max(w[c], r[c].size());
  }
  auto line = [&](const std::vector<std::string>& r) {
    std::string s = "|";
    for (std::size_t c = 0; c < r.size(); ++c) s += " " + r[c] + std::string(w[c] - r[c].size(), ' ') + " |";
    return s + "\n";
  };
  std::string out = line(head) + "|";
  for (std::size_t c = 0; c < head.size(); ++c) out += std::string(w[c] + 2, '-') + "|";
  out += "\n";
  for (const auto& r : rows) out += line(r);
  return out;
}

std::vector<std::vector<std::string>> pairs(const Json& obj) {
  std::vector<std::vector<std::string>> rows;
  for (const auto& [k, v] : obj.items()) rows.push_back({k, cell(v)});
  return rows;
}

std::string render_invariants_md(const Json& j) {
  std::string out = "# invariants " + j["expr"].get<std::string>() + "\n\n";
  out += "|G| = " + j["order"].get<std::string>() + ", " + std::to_string(j["generators"].get<int>()) +
         " pc generators, primes " + sigma_text(j["primes"]) + "\n\n";
  std::vector<std::vector<std::string>> rows;
  for (const auto& [k, v] : j["scalars"].items()) {
    if (k == "pi_lengths") continue;
    rows.push_back({k, cell(v)});
  }
  for (const auto& [p, v] : j["scalars"]["pi_lengths"].items()) rows.push_back({"l_" + p, cell(v)});
  out += table({"invariant", "value"}, rows) + "\n";
  rows.clear();
  for (const auto& s : j["series"]) {
    std::string kind = s["kind"].get<std::string>();
    if (s.contains("sigma")) kind += " " + sigma_text(s["sigma"]);
    std::string orders;
    for (const auto& o : s["orders"]) orders += (orders.empty() ? "" : " ") + o.get<std::string>();
    rows.push_back({kind, std::to_string(s["length"].get<int>()), orders});
  }
  out += table({"series", "length", "orders"}, rows);
  return out;
}

std::string render_bounds_md(const Json& j) {
  std::string out = "# bounds " + j["expr"].get<std::string>() + "\n\n";
  out += "|G| = " + j["order"].get<std::string>() + ", sigma = " + sigma_text(j["sigma"]) +
         ", sigma' = " + sigma_text(j["sigma_prime"]) + "\n\n";
  out += table({"factorisation", "value"}, pairs(j["factorisation"])) + "\n";
  auto inv = pairs(j["invariants"]);
  inv.push_back({"lambda_a", cell(j["lambda"]["a"]["total"])});
  inv.push_back({"lambda_b", cell(j["lambda"]["b"]["total"])});
  out += table({"invariant", "value"}, inv) + "\n";
  std::vector<std::vector<std::string>> rows;
  for (const auto& r : j["rows"]) {
    const bool app = r["applicable"].get<bool>();
    std::string name = r["name"].get<std::string>();
    if (!r["asserted"].get<bool>()) name += " (tracked)";
    rows.push_back({name, app ? "yes" : "no", cell(r["lhs"]), cell(r["rhs"]), app ? cell(r["slack"]) : "-"});
  }
  out += table({"bound", "applicable", "lhs", "rhs", "slack"}, rows);
  out += "\nviolations: " + std::to_string(j["violations"].size()) + "\n";
  return out;
}

std::string render_towers_md(const Json& j) {
  std::string out = "# towers " + j["expr"].get<std::string>() + "\n\n";
  out += "|G| = " + j["order"].get<std::string>() + ", mode " + j["mode"].get<std::string>() + ", length " +
         std::to_string(j["length"].get<int>()) + ", h(G) = " + std::to_string(j["upper_bound"].get<int>()) +
         ", certified " + cell(j["certified"]) + ", nodes " + std::to_string(j["nodes"].get<std::size_t>()) + "\n\n";
  std::vector<std::vector<std::string>> rows;
  for (const auto& e : j["entries"])
    rows.push_back({cell(e["index"]), cell(e["prime"]), cell(e["order"]), cell(e["bar_order"])});
  out += table({"i", "prime", "|P_i|", "|bar P_i|"}, rows);
  return out;
}

std::string render_census_md(const Json& j) {
  std::string out = "# census seed " + std::to_string(j["seed"].get<std::uint64_t>()) + "\n\n";
  out += std::to_string(j["records"].size()) + " scenarios, " + std::to_string(j["skipped"].size()) +
         " skipped, max order " + j["max_order"].get<std::string>() + "\n\n";
  std::vector<std::vector<std::string>> rows;
  for (const auto& s : j["summary"])
    rows.push_back({cell(s["bound"]), cell(s["applicable"]), cell(s["min_slack"]), cell(s["violations"])});
  out += table({"bound", "applicable", "min slack", "violations"}, rows);
  return out;
}

std::string render_selftest_md(const Json& j) {
  std::string out = "# selftest seed " + std::to_string(j["seed"].get<std::uint64_t>()) + "\n\n";
  out += std::to_string(j["groups"].size()) + " groups, " + std::to_string(j["skipped"].size()) + " skipped\n\n";
  std::vector<std::vector<std::string>> rows;
  for (const auto& p : j["properties"]) rows.push_back({cell(p["name"]), cell(p["checked"]), cell(p["failed"])});
  out += table({"property", "checked", "failed"}, rows);
  for (const auto& p : j["properties"])
    for (const auto& ex : p["examples"]) out += "\nFAIL " + p["name"].get<std::string>() + ": " + ex.get<std::string>();
  out += "\nfailures: " + std::to_string(j["failures"].get<std::size_t>()) + "\n";
  return out;
}

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string q = "\"";
  for (char c : s) q += c == '"' ? std::string("\"\"") : std::string(1, c);
  return q + "\"";
}

std::string render_census_csv(const Json& j) {
  std::vector<std::string> bounds;
  if (!j["records"].empty())
    for (const auto& [k, v] : j["records"][0]["slack"].items()) bounds.push_back(k);
  const std::vector<std::string> fields = {"h_g", "h_a", "h_b", "d_a", "d_b", "delta_a", "delta_b",
                                           "ell_sigma", "ell_sigma_prime", "lambda_a", "lambda_b"};
  std::string out = "expr,order,sigma,sigma_prime";
  for (const auto& f : fields) out += "," + f;
  for (const auto& b : bounds) out += ",slack_" + b;
  out += "\n";
  auto set = [](const Json& a) {
    std::string s;
    for (const auto& p : a) s += (s.empty() ? "" : " ") + std::to_string(p.get<Prime>());
    return s;
  };
  for (const auto& r : j["records"]) {
    out += csv_field(r["expr"].get<std::string>()) + "," + r["order"].get<std::string>() + "," + set(r["sigma"]) + "," +
           set(r["sigma_prime"]);
    for (const auto& f : fields) out += "," + r[f].dump();
    for (const auto& b : bounds) out += "," + (r["slack"][b].is_null() ? std::string() : r["slack"][b].dump());
    out += "\n";
  }
  return out;
}

std::string timestamp() {
  const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

Limits limits_of(const ParsedCommand& cmd) {
  Limits l;
  l.max_orbit = cmd.budget;
  return l;
}

int exit_for(const Json& report) {
  const std::string c = report["command"].get<std::string>();
  if (c == "bounds") return report["violations"].empty() ? kOk : kViolation;
  if (c == "census") return report["violation_count"].get<std::size_t>() == 0 ? kOk : kViolation;
  if (c == "selftest") return report["failures"].get<std::size_t>() == 0 ? kOk : kViolation;
  return kOk;
}

Json compute_single(const ParsedCommand& cmd) {
  const BuiltGroup g = build(*cmd.expr);
  const Limits limits = limits_of(cmd);
  switch (cmd.command) {
    case Command::Invariants:
      return invariants_report(g, cmd.sigma, limits);
    case Command::Bounds:
      if (!cmd.sigma) throw PreconditionError("bounds needs --sigma");
      return bounds_report(check_all(scenario(g, *cmd.sigma), limits));
    case Command::Towers: {
      SearchOptions so;
      so.mode = cmd.mode;
      so.max_order = cmd.max_order;
      so.limits = limits;
      return towers_report(g, search_max(g, so), cmd.mode);
    }
    default:
      throw PreconditionError("not a single-expression command");
  }
}

Json census_record(const Json& report) {
  Json r;
  r["expr"] = report["expr"];
  r["order"] = report["order"];
  r["sigma"] = report["sigma"];
  r["sigma_prime"] = report["sigma_prime"];
  for (const auto& [k, v] : report["invariants"].items()) r[k] = v;
  r["lambda_a"] = report["lambda"]["a"]["total"];
  r["lambda_b"] = report["lambda"]["b"]["total"];
  Json slack;
  for (const auto& row : report["rows"])
    slack[row["name"].get<std::string>()] = row["applicable"].get<bool>() ? row["slack"] : Json();
  r["slack"] = slack;
  r["violations"] = report["violations"];
  return r;
}

struct Scenario {
  GroupExpr expr;
  PrimeSet sigma;
};

Json run_census(const ParsedCommand& cmd, ResultCache* cache, std::ostream& err) {
  Rng rng(cmd.seed);
  std::vector<Scenario> work;
  for (std::size_t i = 0; i < cmd.count; ++i) {
    GroupExpr e = random_expr(rng, cmd.max_order);
    const PrimeSet primes = prime_divisors(*estimate(e, 10'000).order);
    PrimeSet sigma = cmd.sigma ? intersect(*cmd.sigma, primes) : PrimeSet{};
    if (sigma.empty() || sigma == primes) sigma = random_sigma(rng, primes);
    work.push_back({e, sigma});
    work.push_back({e, complement(primes, sigma)});
  }

  std::vector<std::string> keys(work.size());
  std::vector<std::optional<Json>> reports(work.size());
  std::vector<std::string> failures(work.size());
  std::vector<bool> fresh(work.size(), false);
  for (std::size_t i = 0; i < work.size(); ++i) {
    ParsedCommand c = cmd;
    c.command = Command::Bounds;
    c.expr = work[i].expr;
    c.sigma = work[i].sigma;
    keys[i] = cache_key(c);
    if (cache) reports[i] = cache->get(keys[i]);
  }

  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i; (i = next.fetch_add(1)) < work.size();) {
      if (reports[i]) continue;
      try {
        const BuiltGroup g = build(work[i].expr);
        reports[i] = bounds_report(check_all(scenario(g, work[i].sigma), limits_of(cmd)));
        fresh[i] = true;
      } catch (const BudgetExceeded& e) {
        failures[i] = std::string("budget: ") + e.what();
      }
    }
  };
  const unsigned jobs = cmd.jobs ? cmd.jobs : std::max(1u, std::thread::hardware_concurrency());
  std::vector<std::thread> pool;
  for (unsigned t = 1; t < jobs; ++t) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();

  Json out = envelope("census", "");
  out["seed"] = cmd.seed;
  out["count"] = cmd.count;
  out["max_order"] = to_string(cmd.max_order);
  Json records = Json::array(), skipped = Json::array();
  std::map<std::string, std::pair<std::size_t, std::optional<long long>>> mins;
  std::map<std::string, std::size_t> violations;
  std::vector<std::string> order;
  std::size_t total_violations = 0;
  for (std::size_t i = 0; i < work.size(); ++i) {
    if (!reports[i]) {
      skipped.push_back({{"expr", work[i].expr.str()}, {"sigma", primes_json(work[i].sigma)}, {"reason", failures[i]}});
      continue;
    }
    if (cache && fresh[i]) cache->put(keys[i], *reports[i]);
    for (const auto& row : (*reports[i])["rows"]) {
      const std::string name = row["name"].get<std::string>();
      if (!mins.contains(name)) order.push_back(name);
      auto& m = mins[name];
      if (!row["applicable"].get<bool>()) continue;
      ++m.first;
      const long long s = row["slack"].get<long long>();
      if (!m.second || s < *m.second) m.second = s;
      if (s < 0 && row["asserted"].get<bool>()) ++violations[name], ++total_violations;
    }
    records.push_back(census_record(*reports[i]));
  }
  if (!skipped.empty()) err << "census: " << skipped.size() << " scenarios skipped (budget)\n";
  out["records"] = records;
  out["skipped"] = skipped;
  Json summary = Json::array();
  for (const auto& name : order) {
    const auto& m = mins[name];
    summary.push_back({{"bound", name},
                       {"applicable", m.first},
                       {"min_slack", m.second ? Json(*m.second) : Json()},
                       {"violations", violations[name]}});
  }
  out["summary"] = summary;
  out["violation_count"] = total_violations;
  return out;
}

Json run_selftest(const ParsedCommand& cmd, std::ostream& err) {
  Rng rng(cmd.seed);
  std::vector<GroupExpr> exprs = {GroupExpr::ex2(2, 3, 1),
                                  GroupExpr::wreath(GroupExpr::cyclic(2), GroupExpr::cyclic(3)),
                                  GroupExpr::wreath(GroupExpr::cyclic(5), GroupExpr::wreath(GroupExpr::cyclic(2), GroupExpr::cyclic(3)))};
  for (std::size_t i = 0; i < cmd.count; ++i) exprs.push_back(random_expr(rng, cmd.max_order));
  SelftestOptions opt;
  opt.limits = limits_of(cmd);
  PropertyLog log;
  Json groups = Json::array(), skipped = Json::array();
  for (const auto& e : exprs) {
    try {
      const BuiltGroup g = build(e);
      PropertyLog local;
      check_engine(g, rng, local, opt);
      check_invariants(g, local, opt);
      check_towers(g, local, opt);
      if (g.group->primes().size() >= 2) check_bounds(g, random_sigma(rng, g.group->primes()), local, opt);
      log.merge(local);
      groups.push_back(e.str());
    } catch (const BudgetExceeded& x) {
      skipped.push_back({{"expr", e.str()}, {"reason", std::string("budget: ") + x.what()}});
    }
  }
  if (!skipped.empty()) err << "selftest: " << skipped.size() << " groups skipped (budget)\n";
  Json out = envelope("selftest", "");
  out["seed"] = cmd.seed;
  out["count"] = cmd.count;
  out["max_order"] = to_string(cmd.max_order);
  out["groups"] = groups;
  out["skipped"] = skipped;
  Json props = Json::array();
  for (const auto& [name, t] : log.tallies())
    props.push_back({{"name", name}, {"checked", t.checked}, {"failed", t.failed}, {"examples", t.examples}});
  out["properties"] = props;
  out["failures"] = log.failures();
  return out;
}

std::string command_name(Command c) {
  switch (c) {
    case Command::Invariants: return "invariants";
    case Command::Bounds: return "bounds";
    case Command::Towers: return "towers";
    case Command::Census: return "census";
    case Command::Selftest: return "selftest";
  }
  return "";
}

}  // namespace

ParseError::ParseError(std::size_t offset, std::string message, std::vector<std::string> expected)
    : PreconditionError(parse_error_text(offset, message, expected)),
      offset_(offset),
      message_(std::move(message)),
      expected_(std::move(expected)) {}

GroupExpr parse(std::string_view text) { return Parser(text).top(); }

PrimeSet parse_sigma(std::string_view text) {
  PrimeSet out;
  std::size_t i = 0;
  auto skip = [&] {
    while (i < text.size() && std::isspace(static_cast<unsigned char>(text[i]))) ++i;
  };
  for (;;) {
    skip();
    const std::size_t start = i;
    std::uint64_t v = 0;
    while (i < text.size() && std::isdigit(static_cast<unsigned char>(text[i])) && v < 1'000'000'000)
      v = v * 10 + static_cast<unsigned>(text[i++] - '0');
    if (i == start) {
      const std::string got = i < text.size() ? "unexpected '" + std::string(1, text[i]) + "'" : "unexpected end of input";
      throw ParseError(i, got, {"prime"});
    }
    if (!is_prime(v)) throw ParseError(start, std::to_string(v) + " is not prime", {"prime"});
    out.insert(static_cast<Prime>(v));
    skip();
    if (i == text.size()) return out;
    if (text[i] != ',') throw ParseError(i, "unexpected '" + std::string(1, text[i]) + "'", {",", "end of input"});
    ++i;
  }
}

std::string format_sigma(const PrimeSet& sigma) {
  std::string s;
  for (Prime p : sigma) s += (s.empty() ? "" : ",") + std::to_string(p);
  return s;
}

Json invariants_report(const BuiltGroup& g, const std::optional<PrimeSet>& sigma, const Limits& limits) {
  const Subgroup whole = Subgroup::whole(g.group);
  Json j = envelope("invariants", g.expr.str());
  j["order"] = to_string(g.group->order());
  j["generators"] = g.group->size();
  const PrimeSet primes = g.group->primes();
  j["primes"] = primes_json(primes);
  const SeriesReport derived = derived_series(whole);
  const SeriesReport lower = lower_nilpotent_series(whole);
  const SeriesReport upper = upper_fitting_series(g.group, limits);
  Json s;
  s["derived_length"] = derived.length;
  s["fitting_height"] = lower.length;
  s["upper_fitting_length"] = upper.length;
  s["delta"] = delta(whole, g.basis);
  s["nilpotent"] = lower.length <= 1;
  s["fitting_order"] = to_string(fitting_subgroup(g.group, limits).order());
  Json ell = Json::object();
  for (Prime p : primes) ell[std::to_string(p)] = pi_length(g.group, {p}, limits);
  s["pi_lengths"] = ell;
  j["scalars"] = s;
  Json series = Json::array();
  series.push_back(series_json(derived));
  series.push_back(series_json(lower_central_series(whole)));
  series.push_back(series_json(lower));
  series.push_back(series_json(upper));
  std::vector<PrimeSet> sigmas;
  if (sigma)
    sigmas.push_back(intersect(*sigma, primes));
  else
    for (Prime p : primes) sigmas.push_back({p});
  for (const auto& sg : sigmas) {
    Json ps = series_json(pi_series(g.group, sg, limits));
    ps["sigma"] = primes_json(sg);
    series.push_back(ps);
  }
  j["series"] = series;
  return j;
}

Json bounds_report(const BoundReport& r) {
  Json j = envelope("bounds", r.expr);
  j["order"] = to_string(r.order);
  j["sigma"] = primes_json(r.sigma);
  j["sigma_prime"] = primes_json(complement(prime_divisors(r.order), r.sigma));
  j["factorisation"] = {{"order_a", to_string(r.order_a)}, {"order_b", to_string(r.order_b)},
                        {"a_proper", r.a_proper},         {"b_proper", r.b_proper},
                        {"b_odd", r.b_odd},               {"b_nilpotent", r.b_nilpotent}};
  j["invariants"] = {{"h_g", r.h_g},         {"h_a", r.h_a},         {"h_b", r.h_b},
                     {"d_a", r.d_a},         {"d_b", r.d_b},         {"delta_a", r.delta_a},
                     {"delta_b", r.delta_b}, {"ell_sigma", r.ell_sigma}, {"ell_sigma_prime", r.ell_sigma_prime}};
  j["lambda"] = {{"a", lambda_json(r.lambda_a)}, {"b", lambda_json(r.lambda_b)}};
  Json rows = Json::array();
  for (const auto& row : r.rows)
    rows.push_back({{"name", row.name},
                    {"applicable", row.applicable},
                    {"asserted", row.asserted},
                    {"lhs", row.lhs},
                    {"rhs", row.rhs},
                    {"slack", row.slack()}});
  j["rows"] = rows;
  Json v = Json::array();
  for (const BoundRow* row : r.violations()) v.push_back(row->name);
  j["violations"] = v;
  return j;
}

Json towers_report(const BuiltGroup& g, const SearchResult& r, SearchMode mode) {
  Json j = envelope("towers", g.expr.str());
  j["order"] = to_string(g.group->order());
  j["mode"] = mode == SearchMode::Exact ? "exact" : "budgeted";
  j["upper_bound"] = r.upper_bound;
  j["length"] = r.tower.length();
  j["certified"] = r.certified;
  j["valid"] = r.check.valid;
  j["nodes"] = r.nodes;
  j["primes"] = r.tower.primes();
  Json entries = Json::array();
  const auto& es = r.tower.entries();
  for (std::size_t i = 0; i < es.size(); ++i) {
    Json igs = Json::array();
    for (const auto& u : es[i].group.igs()) igs.push_back(u.exps);
    entries.push_back({{"index", i + 1},
                       {"prime", es[i].prime},
                       {"order", to_string(es[i].group.order())},
                       {"bar_order", to_string(r.check.bars[i])},
                       {"igs", igs}});
  }
  j["entries"] = entries;
  return j;
}

std::string render(const Json& report, Format format) {
  const std::string c = report["command"].get<std::string>();
  if (format == Format::Json) return report.dump(2) + "\n";
  if (format == Format::Csv) {
    if (c != "census") throw PreconditionError("csv output is only available for census");
    return render_census_csv(report);
  }
  if (c == "invariants") return render_invariants_md(report);
  if (c == "bounds") return render_bounds_md(report);
  if (c == "towers") return render_towers_md(report);
  if (c == "census") return render_census_md(report);
  return render_selftest_md(report);
}

ResultCache::ResultCache(std::string path, std::ostream& warn) : path_(std::move(path)) {
  std::ifstream in(path_);
  std::string line;
  std::size_t n = 0;
  while (std::getline(in, line)) {
    ++n;
    if (line.empty()) continue;
    const Json j = Json::parse(line, nullptr, false);
    if (j.is_discarded() || !j.is_object() || !j.contains("key") || !j["key"].is_string() || !j.contains("report") ||
        !j["report"].is_object()) {
      warn << "warning: " << path_ << ":" << n << ": skipping unreadable cache line\n";
      ++skipped_;
      continue;
    }
    entries_.emplace_back(j["key"].get<std::string>(), j["report"]);
  }
}

std::optional<Json> ResultCache::get(const std::string& key) const {
  for (const auto& [k, v] : entries_)
    if (k == key) return v;
  return std::nullopt;
}

void ResultCache::put(const std::string& key, const Json& report) {
  Json line;
  line["key"] = key;
  line["engine"] = engine_version();
  line["timestamp"] = timestamp();
  line["report"] = report;
  std::ofstream out(path_, std::ios::app);
  if (!out) throw PreconditionError("cannot write cache file " + path_);
  out << line.dump() << "\n";
  entries_.emplace_back(key, report);
}

std::string cache_key(const ParsedCommand& cmd) {
  std::string k = command_name(cmd.command) + "|" + (cmd.expr ? cmd.expr->str() : "") + "|" +
                  (cmd.sigma ? format_sigma(*cmd.sigma) : "");
  if (cmd.command == Command::Towers) k += std::string("|") + (cmd.mode == SearchMode::Exact ? "exact" : "budgeted");
  return k + "|" + engine_version();
}

int run(const ParsedCommand& cmd, std::ostream& out, std::ostream& err) {
  try {
    if (cmd.format == Format::Csv && cmd.command != Command::Census) {
      err << "error: csv output is only available for census\n";
      return kUsage;
    }
    std::optional<ResultCache> cache;
    if (cmd.cache) cache.emplace(*cmd.cache, err);
    Json report;
    if (cmd.command == Command::Census) {
      report = run_census(cmd, cache ? &*cache : nullptr, err);
    } else if (cmd.command == Command::Selftest) {
      report = run_selftest(cmd, err);
    } else {
      if (!cmd.expr) {
        err << "error: " << command_name(cmd.command) << " needs --expr\n";
        return kUsage;
      }
      if (cmd.command == Command::Bounds && !cmd.sigma) {
        err << "error: bounds needs --sigma\n";
        return kUsage;
      }
      const std::string key = cache_key(cmd);
      std::optional<Json> hit = cache ? cache->get(key) : std::nullopt;
      if (hit) {
        report = std::move(*hit);
      } else {
        report = compute_single(cmd);
        if (cache) cache->put(key, report);
      }
    }
    out << render(report, cmd.format);
    const int code = exit_for(report);
    if (code == kViolation) err << "violation: an asserted bound or property failed\n";
    return code;
  } catch (const BudgetExceeded& e) {
    err << "budget exceeded: " << e.what() << "\n";
    return kBudget;
  } catch (const PreconditionError& e) {
    err << "error: " << e.what() << "\n";
    return kUsage;
  } catch (const EngineBug& e) {
    err << "engine bug: " << e.what() << "\n";
    return kViolation;
  }
}

int main(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Fitting height, towers and factorisation bounds for finite soluble groups"};
  app.require_subcommand(1);
  app.set_version_flag("--version", engine_version());

  std::string expr, sigma, format = "json", mode = "exact", max_order = "1000000", cache;
  ParsedCommand cmd;
  auto common = [&](CLI::App* sub, bool needs_expr) {
    auto* e = sub->add_option("--expr", expr, "group expression, e.g. W(C(2),C(3))");
    if (needs_expr) e->required();
    sub->add_option("--sigma", sigma, "comma-separated primes, e.g. 2,5");
    sub->add_option("--format", format, "json, md or csv (census only)")
        ->check(CLI::IsMember({"json", "md", "csv"}));
    sub->add_option("--seed", cmd.seed, "random seed");
    sub->add_option("--budget", cmd.budget, "orbit points allowed per orbit computation");
    sub->add_option("--max-order", max_order, "largest group order considered");
    sub->add_option("--cache", cache, std::string("JSON-lines result cache (default: $") + kCacheEnv + ")");
  };
  auto* inv = app.add_subcommand("invariants", "series and scalar invariants of one group");
  common(inv, true);
  auto* bnd = app.add_subcommand("bounds", "every bound for G = AB with A a Hall sigma-subgroup");
  common(bnd, true);
  auto* tow = app.add_subcommand("towers", "maximal tower search");
  common(tow, true);
  tow->add_option("--mode", mode, "exact or budgeted")->check(CLI::IsMember({"exact", "budgeted"}));
  auto* cen = app.add_subcommand("census", "bounds over seeded random expressions");
  common(cen, false);
  cen->add_option("--count", cmd.count, "number of random expressions");
  cen->add_option("--jobs", cmd.jobs, "worker threads (0: one per core)");
  auto* st = app.add_subcommand("selftest", "property suites over seeded random groups");
  common(st, false);
  st->add_option("--count", cmd.count, "number of random expressions");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kOk : kUsage;
  }

  cmd.command = inv->parsed()   ? Command::Invariants
                : bnd->parsed() ? Command::Bounds
                : tow->parsed() ? Command::Towers
                : cen->parsed() ? Command::Census
                                : Command::Selftest;
  if (st->parsed() && st->count("--count") == 0) cmd.count = 20;
  cmd.format = format == "md" ? Format::Md : format == "csv" ? Format::Csv : Format::Json;
  cmd.mode = mode == "exact" ? SearchMode::Exact : SearchMode::Budgeted;
  try {
    if (!expr.empty()) cmd.expr = parse(expr);
  } catch (const ParseError& e) {
    err << "error: " << e.what() << "\n  " << expr << "\n  " << std::string(e.offset(), ' ') << "^\n";
    return kUsage;
  }
  try {
    if (!sigma.empty()) cmd.sigma = parse_sigma(sigma);
  } catch (const ParseError& e) {
    err << "error: --sigma: " << e.what() << "\n";
    return kUsage;
  }
  try {
    cmd.max_order = Order(max_order);
  } catch (const std::exception&) {
    err << "error: --max-order must be a positive integer\n";
    return kUsage;
  }
  if (cmd.max_order < 1) {
    err << "error: --max-order must be a positive integer\n";
    return kUsage;
  }
  if (!cache.empty())
    cmd.cache = cache;
  else if (const char* env = std::getenv(kCacheEnv); env && *env)
    cmd.cache = env;
  return run(cmd, out, err);
}

}  // namespace fitheight::cli
