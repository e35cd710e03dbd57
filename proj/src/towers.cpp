#include "fitheight/towers.hpp"

#include <algorithm>
#include <map>

#include "fitheight/errors.hpp"
#include "fitheight/invariants.hpp"

namespace fitheight {

Tower::Tower(GroupPtr ambient, std::vector<TowerEntry> entries)
    : ambient_(std::move(ambient)), entries_(std::move(entries)) {
  for (const auto& e : entries_)
    if (e.group.ambient()->id() != ambient_->id()) throw PreconditionError("tower entry in a different group");
}

std::vector<Prime> Tower::primes() const {
  std::vector<Prime> out;
  for (const auto& e : entries_) out.push_back(e.group.is_trivial() ? 1 : e.prime);
  return out;
}

TowerCheck validate(const Tower& t, const Limits& limits) {
  TowerCheck c;
  const auto& es = t.entries();
  const std::size_t h = es.size();
  auto fail = [&](int cond, std::size_t i, std::string why) {
    c.valid = false;
    c.condition = cond;
    c.index = i + 1;
    c.reason = std::move(why);
    return c;
  };
  for (std::size_t i = 0; i < h; ++i)
    if (es[i].group.is_trivial() || !is_p_group(es[i].group, es[i].prime))
      return fail(1, i, "P_" + std::to_string(i + 1) + " is not a nontrivial " + std::to_string(es[i].prime) + "-subgroup");
  for (std::size_t i = 0; i < h; ++i)
    for (std::size_t j = i + 1; j < h; ++j)
      if (!normalizes(es[i].group, es[j].group))
        return fail(2, i, "P_" + std::to_string(i + 1) + " does not normalize P_" + std::to_string(j + 1));
  c.bars.assign(h, Order(0));
  c.kernels.assign(h, Subgroup::trivial(t.ambient()));
  for (std::size_t i = h; i-- > 0;) {
    if (i + 1 < h) c.kernels[i] = section_kernel(es[i].group, es[i + 1].group, c.kernels[i + 1], limits);
    c.bars[i] = es[i].group.order() / c.kernels[i].order();
  }
  for (std::size_t i = 0; i < h; ++i)
    if (c.bars[i] == 1) return fail(3, i, "bar P_" + std::to_string(i + 1) + " is trivial");
  for (std::size_t i = 0; i + 1 < h; ++i)
    if (es[i].prime == es[i + 1].prime)
      return fail(4, i, "P_" + std::to_string(i + 1) + " and P_" + std::to_string(i + 2) + " have the same prime");
  c.valid = true;
  return c;
}

std::vector<Subgroup> tail_subgroups(const Tower& t) {
  const auto& es = t.entries();
  std::vector<Subgroup> out(es.size(), Subgroup::trivial(t.ambient()));
  Subgroup acc = Subgroup::trivial(t.ambient());
  for (std::size_t j = es.size(); j-- > 0;) {
    acc = join(acc, es[j].group);
    out[j] = acc;
  }
  return out;
}

BlockStats stats(const Tower& t, const PrimeSet& sigma) {
  BlockStats s;
  s.sigma = sigma;
  const std::vector<Prime> ps = t.primes();
  for (std::size_t i = 0; i < ps.size(); ++i) {
    if (!sigma.contains(ps[i])) continue;
    ++s.nu;
    if (i == 0 || !sigma.contains(ps[i - 1]))
      s.blocks.push_back({i + 1, i + 1});
    else
      s.blocks.back().second = i + 1;
  }
  s.beta = static_cast<int>(s.blocks.size());
  for (const auto& tj : tail_subgroups(t)) s.tail_products.push_back(tj.order());
  return s;
}

Deletion delete_entries(const Tower& t, std::size_t j, std::size_t s, const Limits& limits) {
  const std::size_t h = t.length();
  if (j < 1 || j + s > h) throw PreconditionError("delete_entries: need 1 <= j <= j+s <= h");
  std::vector<TowerEntry> kept;
  for (std::size_t i = 1; i <= h; ++i)
    if (i < j || i > j + s) kept.push_back(t.entries()[i - 1]);
  Tower shorter(t.ambient(), std::move(kept));
  const TowerCheck c = validate(shorter, limits);
  Deletion d;
  if (c.valid) {
    d.tower = std::move(shorter);
    return d;
  }
  const auto ps = t.primes();
  const bool inner = 1 < j && j + s < h;
  if (c.condition == 4 && inner && ps[j - 2] == ps[j + s]) {
    d.witness = true;
    d.flank = ps[j - 2];
    return d;
  }
  throw EngineBug("delete_entries: deletion rule violated (" + c.reason + ")");
}

Projection project_mod(const Tower& t, const Subgroup& n, const Limits& limits) {
  const std::size_t h = t.length();
  if (h == 0) throw PreconditionError("project_mod: empty tower");
  if (!is_normal(n)) throw PreconditionError("project_mod: N is not normal");
  const PcGroup& g = *t.ambient();
  const Subgroup& top = t.entries()[h - 1].group;
  for (std::size_t j = 0; j + 1 < h; ++j) {
    const Subgroup meet = intersect_normal(t.entries()[j].group, n, limits);
    for (const auto& x : meet.igs())
      for (const auto& y : top.igs())
        if (!g.commutator(x, y).is_identity())
          throw PreconditionError("project_mod: P_" + std::to_string(j + 1) + " meet N does not centralize P_h");
  }
  Quotient q = quotient(n);
  std::vector<TowerEntry> entries;
  for (std::size_t i = 0; i + 1 < h; ++i) entries.push_back({t.entries()[i].prime, q.image_of(t.entries()[i].group)});
  Tower image(q.image(), std::move(entries));
  TowerCheck c = validate(image, limits);
  return {std::move(q), std::move(image), std::move(c)};
}

// ------------------------------------------------------------------ search

namespace {

struct Searcher {
  Searcher(const BuiltGroup& group, const SearchOptions& options) : g(group), opt(options) {}

  const BuiltGroup& g;
  const SearchOptions& opt;
  std::size_t nodes = 0;
  bool exhausted_budget = false;
  std::vector<TowerEntry> chain;  // top-down: chain[0] is P_h
  std::vector<TowerEntry> best;

  // Sylow subgroups of the lower nilpotent series terms of K, deepest
  // layer first; within a layer primes by decreasing multiplicity.
  std::vector<TowerEntry> candidates(const Subgroup& k, Prime avoid) {
    const SeriesReport series = lower_nilpotent_series(k);
    std::vector<TowerEntry> out;
    const bool k_whole = k.is_whole();
    for (std::size_t layer = series.terms.size() - 1; layer-- > 0;) {
      const Subgroup& r = series.terms[layer];
      std::vector<std::pair<Prime, unsigned>> primes;
      for (Prime q : r.primes()) {
        if (q == avoid) continue;
        unsigned mult = 0;
        for (std::size_t d : k.depths()) mult += g.group->relative_order(d) == q;
        primes.push_back({q, mult});
      }
      std::stable_sort(primes.begin(), primes.end(),
                       [](const auto& a, const auto& b) { return a.second > b.second; });
      for (const auto& [q, m] : primes) {
        // In G itself the basis member meets a normal term in a Sylow subgroup.
        Subgroup s = k_whole && g.basis.contains(q) ? intersect_normal(g.basis.at(q), r, opt.limits)
                                                    : hall_subgroup(r, {q}, opt.limits);
        if (std::none_of(out.begin(), out.end(), [&](const TowerEntry& e) { return e.group == s; }))
          out.push_back({q, std::move(s)});
      }
    }
    return out;
  }

  bool dfs(const Subgroup& k, const Subgroup& prev_kernel, int remaining) {
    if (chain.size() > best.size()) best = chain;
    if (remaining == 0) return true;
    const Prime avoid = chain.empty() ? 0 : chain.back().prime;
    std::vector<TowerEntry> cands;
    try {
      cands = candidates(k, avoid);
    } catch (const BudgetExceeded&) {
      if (opt.mode == SearchMode::Exact) throw;
      exhausted_budget = true;
      return false;
    }
    for (auto& c : cands) {
      if (++nodes > opt.max_nodes) {
        if (opt.mode == SearchMode::Exact) throw BudgetExceeded("search_max: node budget exhausted");
        exhausted_budget = true;
        return false;
      }
      try {
        // K may be larger than the normalizer intersection (see below).
        if (!std::all_of(chain.begin(), chain.end(), [&](const TowerEntry& e) { return normalizes(c.group, e.group); }))
          continue;
        Subgroup kernel = chain.empty() ? Subgroup::trivial(g.group)
                                        : section_kernel(c.group, chain.back().group, prev_kernel, opt.limits);
        if (kernel.order() == c.group.order()) continue;
        Subgroup next_k = k;
        if (!normalizes(k, c.group)) {
          if (opt.mode == SearchMode::Exact) {
            next_k = normalizer(k, c.group, opt.limits);
          } else {
            // A budgeted search keeps K when the normalizer orbit is too
            // long; h(K) still bounds h of the true normalizer.
            Limits small = opt.limits;
            small.max_orbit = std::min(small.max_orbit, opt.normalizer_orbit);
            try {
              next_k = normalizer(k, c.group, small);
            } catch (const BudgetExceeded&) {
              exhausted_budget = true;
            }
          }
        }
        if (remaining > 1 && fitting_height(next_k) < remaining - 1) continue;
        chain.push_back(c);
        if (dfs(next_k, kernel, remaining - 1)) return true;
        chain.pop_back();
      } catch (const BudgetExceeded&) {
        if (opt.mode == SearchMode::Exact) throw;
        exhausted_budget = true;
      }
    }
    return false;
  }
};

}  // namespace

SearchResult search_max(const BuiltGroup& g, const SearchOptions& options) {
  if (options.mode == SearchMode::Exact && g.group->order() > options.max_order)
    throw BudgetExceeded("search_max: exact mode limited to order " + to_string(options.max_order) + ", group has order " +
                         to_string(g.group->order()));
  const Subgroup whole = Subgroup::whole(g.group);
  SearchResult res{Tower(g.group), {}, fitting_height(whole), false, 0};
  Searcher s(g, options);
  if (res.upper_bound > 0) s.dfs(whole, Subgroup::trivial(g.group), res.upper_bound);
  res.nodes = s.nodes;
  std::vector<TowerEntry> entries(s.best.rbegin(), s.best.rend());
  res.tower = Tower(g.group, std::move(entries));
  res.check = validate(res.tower, options.limits);
  if (!res.check.valid) throw EngineBug("search_max: produced an invalid tower (" + res.check.reason + ")");
  res.certified = static_cast<int>(res.tower.length()) == res.upper_bound;
  if (options.mode == SearchMode::Exact && !res.certified)
    throw EngineBug("search_max: no tower of length h(G) = " + std::to_string(res.upper_bound) + " in the candidate space");
  return res;
}

}  // namespace fitheight
