#include <doctest.h>

#include "fitheight/errors.hpp"
#include "fitheight/invariants.hpp"
#include "fitheight/towers.hpp"
#include "support.hpp"

using namespace fitheight;
using namespace support;

namespace {

Subgroup gen(const GroupPtr& g, std::initializer_list<std::size_t> idx) {
  std::vector<Element> gens;
  for (auto i : idx) gens.push_back(g->generator(i));
  return induced_pcgs(g, gens);
}

std::vector<std::pair<std::uint32_t, oracle::Set>> to_oracle(const oracle::FiniteGroup& o, const Tower& t) {
  std::vector<std::pair<std::uint32_t, oracle::Set>> out;
  for (const auto& e : t.entries()) out.push_back({e.prime, to_set(o, e.group)});
  return out;
}

}  // namespace

TEST_CASE("validation") {
  // W(C3,C2): g0 top of order 2, g1, g2 base.
  const GroupPtr w = build(W(C(3), C(2))).group;
  const Tower t(w, {{2, gen(w, {0})}, {3, gen(w, {1, 2})}});
  const TowerCheck c = validate(t);
  CHECK(c.valid);
  CHECK(c.bars == std::vector<Order>{2, 9});
  const oracle::FiniteGroup o = oracle::build(W(C(3), C(2)));
  CHECK(oracle::is_tower(o, to_oracle(o, t)));

  const GroupPtr c6 = build(C(6)).group;
  const TowerCheck bad = validate(Tower(c6, {{2, gen(c6, {0})}, {3, gen(c6, {1})}}));
  CHECK_FALSE(bad.valid);
  CHECK(bad.condition == 3);
  CHECK(bad.index == 1);

  const BuiltGroup e = build(GroupExpr::ex2(2, 3, 1));
  const TowerCheck one = validate(Tower(e.group, {{3, e.basis.at(3)}}));
  CHECK(one.valid);
  CHECK(validate(Tower(e.group)).valid);

  CHECK(validate(Tower(c6, {{3, gen(c6, {0})}})).condition == 1);
  const GroupPtr w23 = build(W(C(2), C(3))).group;
  // A base coordinate does not normalize the top.
  CHECK(validate(Tower(w23, {{2, gen(w23, {1})}, {3, gen(w23, {0})}})).condition == 2);
  CHECK(validate(Tower(w23, {{2, gen(w23, {1, 2, 3})}, {2, gen(w23, {1, 2, 3})}})).condition == 3);
}

TEST_CASE("block statistics") {
  const BuiltGroup e = build(GroupExpr::ex2(2, 3, 1));
  const SearchResult r = search_max(e);
  REQUIRE(r.tower.primes() == std::vector<Prime>{2, 3, 2});
  BlockStats s = stats(r.tower, {2});
  CHECK(s.nu == 2);
  CHECK(s.beta == 2);
  CHECK(s.blocks == std::vector<std::pair<std::size_t, std::size_t>>{{1, 1}, {3, 3}});
  s = stats(r.tower, {3});
  CHECK(s.nu == 1);
  CHECK(s.beta == 1);
  s = stats(r.tower, {5});
  CHECK(s.nu == 0);
  CHECK(s.beta == 0);
  CHECK(s.tail_products.size() == 3);
  const auto tails = tail_subgroups(r.tower);
  for (const auto& tj : tails) CHECK(normalizes(tails.front(), tj));
  CHECK(stats(r.tower, {2}).nu + stats(r.tower, {3}).nu == 3);
}

TEST_CASE("deletion") {
  const BuiltGroup e = build(GroupExpr::ex2(2, 3, 1));
  const Tower t = search_max(e).tower;
  const Deletion middle = delete_entries(t, 2, 0);
  CHECK(middle.witness);
  CHECK(middle.flank == 2);
  const Deletion last = delete_entries(t, 3, 0);
  REQUIRE(last.tower);
  CHECK(last.tower->primes() == std::vector<Prime>{2, 3});
  const Deletion all = delete_entries(t, 1, 2);
  REQUIRE(all.tower);
  CHECK(all.tower->length() == 0);
  CHECK_THROWS_AS(delete_entries(t, 3, 1), PreconditionError);
  CHECK_THROWS_AS(delete_entries(t, 0, 0), PreconditionError);
}

TEST_CASE("projection to quotients") {
  const BuiltGroup w = build(W(C(2), C(3)));
  const GroupPtr g = w.group;
  const Tower t(g, {{3, gen(g, {0})}, {2, gen(g, {1, 2, 3})}});
  REQUIRE(validate(t).valid);
  const Projection one = project_mod(t, Subgroup::trivial(g));
  CHECK(one.tower.length() == 1);
  CHECK(one.check.valid);
  const Subgroup diag = induced_pcgs(g, std::vector<Element>{g->element({0, 1, 1, 1})});
  const Projection p = project_mod(t, diag);
  CHECK(p.quotient.image()->order() == 12);
  CHECK(p.tower.length() == 1);
  CHECK(p.check.valid);
  // Hypothesis fails: the top meets N = G outside C(P_h).
  CHECK_THROWS_AS(project_mod(Tower(g, {{3, gen(g, {0})}, {2, gen(g, {1, 2, 3})}}), Subgroup::whole(g)),
                  PreconditionError);
  CHECK_THROWS_AS(project_mod(t, gen(g, {0})), PreconditionError);
}

TEST_CASE("O_sigma' projection in the counting argument") {
  const BuiltGroup e = build(GroupExpr::ex2(2, 3, 1));
  const Tower t = search_max(e).tower;
  const Prime top = t.primes().back();
  const Subgroup n = o_pi(e.group, complement(e.group->primes(), {top}));
  const Projection p = project_mod(t, n);
  CHECK(p.check.valid);
}

TEST_CASE("maximal tower search") {
  CHECK(search_max(build(C(6))).tower.length() == 1);
  CHECK(search_max(build(W(C(2), C(3)))).tower.length() == 2);
  CHECK(search_max(build(GroupExpr::ex2(2, 3, 1))).tower.length() == 3);
  const SearchResult empty = search_max(build(C(1)));
  CHECK(empty.tower.length() == 0);
  CHECK(empty.certified);
  SearchOptions small;
  small.max_order = 100;
  CHECK_THROWS_AS(search_max(build(GroupExpr::ex2(2, 3, 1)), small), BudgetExceeded);
  small.mode = SearchMode::Budgeted;
  CHECK(search_max(build(GroupExpr::ex2(2, 3, 1)), small).certified);
}

TEST_CASE("search is exact on the suite and agrees with exhaustive search") {
  for (const auto& e : oracle_suite()) {
    CAPTURE(e.str());
    const BuiltGroup b = build(e);
    const SearchResult r = search_max(b);
    CHECK(r.certified);
    CHECK(static_cast<int>(r.tower.length()) == fitting_height(Subgroup::whole(b.group)));
    const oracle::FiniteGroup o = oracle::build(e);
    CHECK(oracle::is_tower(o, to_oracle(o, r.tower)));
    if (b.group->order() <= 72) CHECK(oracle::max_tower_length(o) == static_cast<int>(r.tower.length()));
  }
}

TEST_CASE("monotone kernels") {
  for (const auto& e : oracle_suite()) {
    const BuiltGroup b = build(e);
    const SearchResult r = search_max(b);
    const auto& es = r.tower.entries();
    for (std::size_t j = 0; j + 1 < es.size(); ++j) {
      const Subgroup c = centralizer(es[j].group, es.back().group);
      CHECK(is_subgroup_of(c, r.check.kernels[j]));
    }
  }
}
