#pragma once

#include <random>
#include <vector>

#include "fitheight/constructors.hpp"
#include "oracle/oracle.hpp"

namespace support {

using fitheight::GroupExpr;

inline GroupExpr C(std::uint64_t n) { return GroupExpr::cyclic(n); }
inline GroupExpr D(GroupExpr a, GroupExpr b) { return GroupExpr::direct(std::move(a), std::move(b)); }
inline GroupExpr W(GroupExpr a, GroupExpr b) { return GroupExpr::wreath(std::move(a), std::move(b)); }

/// Groups small enough for the brute-force oracle (order <= 5000).
inline std::vector<GroupExpr> oracle_suite() {
  return {
      C(6),
      C(12),
      D(C(2), C(3)),
      W(C(2), C(3)),
      W(C(3), C(2)),
      W(C(2), C(2)),
      W(C(5), C(2)),
      W(D(C(2), C(3)), C(2)),
      D(W(C(2), C(3)), C(5)),
      W(C(3), C(3)),
      W(C(2), C(5)),
      W(C(3), C(4)),
      W(C(3), D(C(2), C(2))),
      W(C(5), C(3)),
      D(W(C(2), C(3)), W(C(3), C(2))),
      W(W(C(3), C(2)), C(2)),
      W(C(2), C(7)),
      W(C(7), C(3)),
      GroupExpr::ex2(2, 3, 1),
      W(C(3), C(5)),
      W(C(2), W(C(2), C(2))),
      W(C(5), C(4)),
  };
}

inline fitheight::Element random_element(const fitheight::PcGroup& g, std::mt19937_64& rng) {
  std::vector<int> e(g.size());
  for (std::size_t i = 0; i < g.size(); ++i)
    e[i] = static_cast<int>(std::uniform_int_distribution<unsigned>(0, g.relative_order(i) - 1)(rng));
  return g.element(std::move(e));
}

/// Every element of a small pc group in lexicographic exponent order.
inline std::vector<fitheight::Element> all_elements(const fitheight::PcGroup& g) {
  std::vector<fitheight::Element> out;
  std::vector<int> e(g.size(), 0);
  for (;;) {
    out.push_back(g.element(e));
    std::size_t k = g.size();
    while (k-- > 0) {
      if (++e[k] < static_cast<int>(g.relative_order(k))) break;
      e[k] = 0;
    }
    if (k == static_cast<std::size_t>(-1)) return out;
  }
}

inline oracle::Elt image(const oracle::FiniteGroup& o, const fitheight::Element& x) { return o.from_exponents(x.exps); }

/// Oracle set of a pc subgroup: closure of the images of its igs.
inline oracle::Set to_set(const oracle::FiniteGroup& o, const fitheight::Subgroup& h) {
  std::vector<oracle::Elt> gens;
  for (const auto& u : h.igs()) gens.push_back(image(o, u));
  return oracle::closure(o, gens);
}

}  // namespace support
