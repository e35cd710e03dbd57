#include <doctest.h>

#include "fitheight/invariants.hpp"
#include "fitheight/selftest.hpp"
#include "support.hpp"

using namespace fitheight;
using namespace support;

namespace {

void require_clean(const PropertyLog& log) {
  for (const auto& [name, t] : log.tallies()) {
    CAPTURE(name);
    CHECK(t.checked > 0);
    CHECK(t.failed == 0);
    for (const auto& ex : t.examples) MESSAGE(ex);
  }
}

}  // namespace

TEST_CASE("property log") {
  PropertyLog a, b;
  a.check("x", true, [] { return ""; });
  b.check("x", false, [] { return "first"; });
  b.check("y", false, [] { return "second"; });
  a.merge(b);
  CHECK(a.failures() == 2);
  CHECK(a.tallies().at("x").checked == 2);
  CHECK(a.tallies().at("x").examples == std::vector<std::string>{"first"});
}

TEST_CASE("random expressions respect the order cap") {
  Rng rng(5);
  for (int i = 0; i < 200; ++i) {
    const GroupExpr e = random_expr(rng, 10'000);
    const Order n = *estimate(e, 10'000).order;
    CHECK(n <= 10'000);
    CHECK(prime_divisors(n).size() >= 2);
    const PrimeSet s = random_sigma(rng, prime_divisors(n));
    CHECK(!s.empty());
    CHECK(s != prime_divisors(n));
  }
  Rng r1(9), r2(9);
  for (int i = 0; i < 20; ++i) CHECK(random_expr(r1, 1'000'000) == random_expr(r2, 1'000'000));
}

TEST_CASE("property suites on the oracle groups") {
  PropertyLog log;
  Rng rng(17);
  for (const auto& e : oracle_suite()) {
    const BuiltGroup b = build(e);
    check_engine(b, rng, log);
    check_invariants(b, log);
    check_towers(b, log);
    for (Prime p : b.group->primes())
      if (b.group->primes().size() > 1) check_bounds(b, {p}, log);
  }
  require_clean(log);
}

TEST_CASE("property suites on seeded random groups") {
  PropertyLog log;
  Rng rng(2024);
  SelftestOptions opt;
  opt.triples = 300;
  for (int i = 0; i < 40; ++i) {
    const BuiltGroup b = build(random_expr(rng, 100'000));
    check_engine(b, rng, log, opt);
    check_invariants(b, log, opt);
    check_towers(b, log, opt);
    check_bounds(b, random_sigma(rng, b.group->primes()), log, opt);
  }
  require_clean(log);
}
