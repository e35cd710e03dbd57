#pragma once

// Orbit-stabilizer over an induced pcgs. Internal to the library.

#include <cstdint>
#include <unordered_map>
#include <vector>

#include <boost/container_hash/hash.hpp>

#include "fitheight/errors.hpp"
#include "fitheight/subgroup.hpp"

namespace fitheight::detail {

struct PointHash {
  std::size_t operator()(const std::vector<int>& v) const { return boost::hash_range(v.begin(), v.end()); }
};

/// Stabilizer of `omega` in U, where U acts on points through
/// act(point, g, g^{-1}). Walks the igs of U bottom-up: U_{i+1} is normal in
/// U_i with prime index, so the U_i-orbit is either the U_{i+1}-orbit (and
/// s_i times a transversal inverse is a new Schreier generator) or r
/// disjoint translates of it.
template <class Act>
Subgroup stabilizer(const Subgroup& u, std::vector<int> omega, Act act, const Limits& limits) {
  const PcGroup& g = u.group();
  const auto& gens = u.igs();
  std::vector<Element> inv;
  inv.reserve(gens.size());
  for (const auto& x : gens) inv.push_back(g.inverse(x));

  std::vector<std::vector<int>> points{omega};
  std::vector<std::uint32_t> parent{0};
  std::vector<std::uint32_t> label{0};  // igs index that maps parent to point
  std::unordered_map<std::vector<int>, std::uint32_t, PointHash> index;
  index.emplace(std::move(omega), 0);

  auto transversal = [&](std::uint32_t k) {
    std::vector<std::uint32_t> chain;
    while (k != 0) {
      chain.push_back(label[k]);
      k = parent[k];
    }
    Element t = g.identity();
    for (auto it = chain.rbegin(); it != chain.rend(); ++it) t = g.multiply(t, gens[*it]);
    return t;
  };

  std::vector<Element> stab;
  for (std::size_t i = gens.size(); i-- > 0;) {
    std::vector<int> img = act(points[0], gens[i], inv[i]);
    if (auto it = index.find(img); it != index.end()) {
      stab.push_back(g.multiply(gens[i], g.inverse(transversal(it->second))));
      continue;
    }
    const std::size_t block = points.size();
    const Prime r = g.relative_order(gens[i].depth());
    if (block * r > limits.max_orbit)
      throw BudgetExceeded("orbit exceeds " + std::to_string(limits.max_orbit) + " points");
    for (Prime t = 1; t < r; ++t) {
      const std::size_t from = (t - 1) * block;
      for (std::size_t k = from; k < from + block; ++k) {
        std::vector<int> next = k == 0 ? img : act(points[k], gens[i], inv[i]);
        const auto id = static_cast<std::uint32_t>(points.size());
        if (!index.emplace(next, id).second) throw EngineBug("stabilizer: orbit blocks overlap");
        points.push_back(std::move(next));
        parent.push_back(static_cast<std::uint32_t>(k));
        label.push_back(static_cast<std::uint32_t>(i));
      }
    }
  }
  return induced_pcgs(u.ambient(), stab);
}

}  // namespace fitheight::detail
