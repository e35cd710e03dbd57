#include "fitheight/constructors.hpp"

#include <algorithm>

#include "fitheight/errors.hpp"

namespace fitheight {

struct GroupExpr::Node {
  Kind kind;
  std::vector<std::uint64_t> params;
  std::vector<GroupExpr> children;
};

namespace {

void require_prime(std::uint64_t p) {
  if (!is_prime(p)) throw PreconditionError(std::to_string(p) + " is not prime");
}

void require_distinct(std::vector<std::uint64_t> ps) {
  std::sort(ps.begin(), ps.end());
  if (std::adjacent_find(ps.begin(), ps.end()) != ps.end())
    throw PreconditionError("example primes must be distinct");
}

}  // namespace

GroupExpr GroupExpr::cyclic(std::uint64_t n) {
  if (n < 1) throw PreconditionError("C(n) needs n >= 1");
  if (n > std::numeric_limits<std::uint32_t>::max()) throw PreconditionError("C(n): n too large");
  return GroupExpr(std::make_shared<const Node>(Node{Kind::Cyclic, {n}, {}}));
}

GroupExpr GroupExpr::direct(GroupExpr a, GroupExpr b) {
  return GroupExpr(std::make_shared<const Node>(Node{Kind::Direct, {}, {std::move(a), std::move(b)}}));
}

GroupExpr GroupExpr::wreath(GroupExpr a, GroupExpr b) {
  return GroupExpr(std::make_shared<const Node>(Node{Kind::Wreath, {}, {std::move(a), std::move(b)}}));
}

GroupExpr GroupExpr::ex1(Prime p, Prime q, Prime r, Prime t, unsigned n) {
  for (Prime x : {p, q, r, t}) require_prime(x);
  require_distinct({p, q, r, t});
  return GroupExpr(std::make_shared<const Node>(Node{Kind::Ex1, {p, q, r, t, n}, {}}));
}

GroupExpr GroupExpr::ex2(Prime p, Prime q, unsigned n) {
  require_prime(p);
  require_prime(q);
  require_distinct({p, q});
  return GroupExpr(std::make_shared<const Node>(Node{Kind::Ex2, {p, q, n}, {}}));
}

GroupExpr::Kind GroupExpr::kind() const { return node_->kind; }
const std::vector<std::uint64_t>& GroupExpr::params() const { return node_->params; }

const GroupExpr& GroupExpr::left() const {
  if (node_->children.size() != 2) throw PreconditionError("expression has no operands");
  return node_->children[0];
}

const GroupExpr& GroupExpr::right() const {
  if (node_->children.size() != 2) throw PreconditionError("expression has no operands");
  return node_->children[1];
}

std::string GroupExpr::str() const {
  auto join = [](const std::vector<std::uint64_t>& v) {
    std::string s;
    for (auto x : v) s += (s.empty() ? "" : ",") + std::to_string(x);
    return s;
  };
  switch (kind()) {
    case Kind::Cyclic: return "C(" + std::to_string(params()[0]) + ")";
    case Kind::Direct: return "D(" + left().str() + "," + right().str() + ")";
    case Kind::Wreath: return "W(" + left().str() + "," + right().str() + ")";
    case Kind::Ex1: return "Ex1(" + join(params()) + ")";
    case Kind::Ex2: return "Ex2(" + join(params()) + ")";
  }
  return {};
}

bool GroupExpr::operator==(const GroupExpr& other) const {
  if (node_ == other.node_) return true;
  if (kind() != other.kind() || params() != other.params()) return false;
  if (node_->children.size() != other.node_->children.size()) return false;
  for (std::size_t i = 0; i < node_->children.size(); ++i)
    if (!(node_->children[i] == other.node_->children[i])) return false;
  return true;
}

GroupExpr example1(Prime p, Prime q, Prime r, Prime t, unsigned n) {
  for (Prime x : {p, q, r, t}) require_prime(x);
  require_distinct({p, q, r, t});
  auto c = GroupExpr::cyclic;
  GroupExpr h = GroupExpr::wreath(c(p), c(q));
  for (unsigned i = 1; i <= n; ++i) {
    GroupExpr top = i % 2 == 1 ? GroupExpr::wreath(c(q), c(p)) : GroupExpr::wreath(c(p), c(q));
    h = GroupExpr::wreath(GroupExpr::wreath(h, c(r)), top);
  }
  return GroupExpr::wreath(c(t), h);
}

GroupExpr example2(Prime p, Prime q, unsigned n) {
  require_prime(p);
  require_prime(q);
  require_distinct({p, q});
  GroupExpr g = GroupExpr::cyclic(p);
  for (unsigned i = 1; i <= 2 * n; ++i) g = GroupExpr::wreath(g, GroupExpr::cyclic(i % 2 == 1 ? q : p));
  return g;
}

GroupExpr expand(const GroupExpr& e) {
  const auto& ps = e.params();
  switch (e.kind()) {
    case GroupExpr::Kind::Cyclic: return e;
    case GroupExpr::Kind::Direct: return GroupExpr::direct(expand(e.left()), expand(e.right()));
    case GroupExpr::Kind::Wreath: return GroupExpr::wreath(expand(e.left()), expand(e.right()));
    case GroupExpr::Kind::Ex1:
      return example1(static_cast<Prime>(ps[0]), static_cast<Prime>(ps[1]), static_cast<Prime>(ps[2]),
                      static_cast<Prime>(ps[3]), static_cast<unsigned>(ps[4]));
    case GroupExpr::Kind::Ex2:
      return example2(static_cast<Prime>(ps[0]), static_cast<Prime>(ps[1]), static_cast<unsigned>(ps[2]));
  }
  return e;
}

SizeEstimate estimate(const GroupExpr& expr, const Order& generator_cap) {
  const GroupExpr e = expand(expr);
  switch (e.kind()) {
    case GroupExpr::Kind::Cyclic: {
      unsigned k = 0;
      for (auto [p, m] : factorize(e.params()[0])) k += m;
      return {Order(k), Order(e.params()[0])};
    }
    case GroupExpr::Kind::Direct: {
      SizeEstimate a = estimate(e.left(), generator_cap), b = estimate(e.right(), generator_cap);
      SizeEstimate out{a.generators + b.generators, std::nullopt};
      if (a.order && b.order && out.generators <= generator_cap) out.order = *a.order * *b.order;
      return out;
    }
    case GroupExpr::Kind::Wreath: {
      SizeEstimate a = estimate(e.left(), generator_cap), b = estimate(e.right(), generator_cap);
      if (!b.order) return {generator_cap + 1, std::nullopt};
      SizeEstimate out{*b.order * a.generators + b.generators, std::nullopt};
      if (a.order && out.generators <= generator_cap)
        out.order = boost::multiprecision::pow(*a.order, static_cast<unsigned>(*b.order)) * *b.order;
      return out;
    }
    default: break;
  }
  throw EngineBug("estimate: unexpanded node");
}

const Subgroup& SylowBasis::at(Prime p) const {
  auto it = members_.find(p);
  if (it == members_.end()) throw PreconditionError("Sylow basis has no member for prime " + std::to_string(p));
  return it->second;
}

PrimeSet SylowBasis::primes() const {
  PrimeSet out;
  for (const auto& [p, s] : members_) out.insert(p);
  return out;
}

namespace {

// Exponent vector of `x` (a vector over `src`) placed at `offset` in a
// vector of length n.
std::vector<int> embed(const std::vector<int>& x, std::size_t offset, std::size_t n) {
  std::vector<int> v(n, 0);
  std::copy(x.begin(), x.end(), v.begin() + static_cast<std::ptrdiff_t>(offset));
  return v;
}

// Copies all relations of `src` into `pres` with generators shifted by
// `offset`.
void copy_relations(PcPresentation& pres, const PcGroup& src, std::size_t offset) {
  const std::size_t n = pres.size();
  for (std::size_t i = 0; i < src.size(); ++i) {
    pres.set_power(offset + i, embed(src.power_relation(i).exps, offset, n));
    for (std::size_t j = i + 1; j < src.size(); ++j)
      if (!src.commute(i, j))
        pres.set_conjugate(offset + i, offset + j, embed(src.conjugate_relation(i, j).exps, offset, n));
  }
}

BuiltGroup build_cyclic(const GroupExpr& e) {
  const auto factors = factorize(e.params()[0]);
  std::vector<Prime> rel;
  for (auto [p, m] : factors) rel.insert(rel.end(), m, p);
  PcPresentation pres(rel);
  const std::size_t n = rel.size();
  // Each prime power is a chain g_1^p = g_2, ..., g_m^p = 1.
  std::vector<std::pair<Prime, std::pair<std::size_t, std::size_t>>> blocks;
  std::size_t pos = 0;
  for (auto [p, m] : factors) {
    for (std::size_t k = 0; k + 1 < m; ++k) {
      std::vector<int> v(n, 0);
      v[pos + k + 1] = 1;
      pres.set_power(pos + k, v);
    }
    blocks.push_back({p, {pos, pos + m}});
    pos += m;
  }
  GroupPtr g = pres.build();
  std::map<Prime, Subgroup> basis;
  for (const auto& [p, range] : blocks) {
    std::vector<Element> gens;
    for (std::size_t k = range.first; k < range.second; ++k) gens.push_back(g->generator(k));
    basis.emplace(p, induced_pcgs(g, gens));
  }
  return {e, g, SylowBasis(std::move(basis))};
}

std::map<Prime, std::vector<Element>> basis_generators(const SylowBasis& b, const GroupPtr& target,
                                                       std::size_t offset) {
  std::map<Prime, std::vector<Element>> out;
  for (const auto& [p, s] : b.members())
    for (const auto& u : s.igs()) out[p].push_back(target->element(embed(u.exps, offset, target->size())));
  return out;
}

SylowBasis finish_basis(const GroupPtr& g, std::map<Prime, std::vector<Element>> gens) {
  std::map<Prime, Subgroup> members;
  for (auto& [p, list] : gens) members.emplace(p, induced_pcgs(g, list));
  return SylowBasis(std::move(members));
}

BuiltGroup build_expanded(const GroupExpr& e);

BuiltGroup build_direct(const GroupExpr& e) {
  BuiltGroup a = build_expanded(e.left()), b = build_expanded(e.right());
  std::vector<Prime> rel = a.group->relative_orders();
  rel.insert(rel.end(), b.group->relative_orders().begin(), b.group->relative_orders().end());
  PcPresentation pres(rel);
  copy_relations(pres, *a.group, 0);
  copy_relations(pres, *b.group, a.group->size());
  GroupPtr g = pres.build();
  auto gens = basis_generators(a.basis, g, 0);
  for (auto& [p, list] : basis_generators(b.basis, g, a.group->size()))
    gens[p].insert(gens[p].end(), list.begin(), list.end());
  return {e, g, finish_basis(g, std::move(gens))};
}

// Regular wreath product A wr B: B's generators first, then one copy of A
// per element of B. Coordinates are indexed by B's elements in
// lexicographic normal-form order; g_{c,a}^{b} = g_{c*b,a}.
BuiltGroup build_wreath(const GroupExpr& e) {
  BuiltGroup a = build_expanded(e.left()), b = build_expanded(e.right());
  const PcGroup& top = *b.group;
  const std::size_t m = top.size(), na = a.group->size();
  const auto coords = static_cast<std::size_t>(top.order());

  std::vector<Element> elems;
  elems.reserve(coords);
  {
    std::vector<int> exps(m, 0);
    for (std::size_t c = 0; c < coords; ++c) {
      elems.push_back(top.element(exps));
      for (std::size_t k = m; k-- > 0;) {
        if (++exps[k] < static_cast<int>(top.relative_order(k))) break;
        exps[k] = 0;
      }
    }
  }
  auto index_of = [&](const Element& x) {
    std::size_t c = 0;
    for (std::size_t k = 0; k < m; ++k) c = c * top.relative_order(k) + static_cast<std::size_t>(x.exps[k]);
    return c;
  };

  std::vector<Prime> rel = top.relative_orders();
  for (std::size_t c = 0; c < coords; ++c)
    rel.insert(rel.end(), a.group->relative_orders().begin(), a.group->relative_orders().end());
  PcPresentation pres(rel);
  const std::size_t n = rel.size();
  copy_relations(pres, top, 0);
  for (std::size_t c = 0; c < coords; ++c) copy_relations(pres, *a.group, m + c * na);
  for (std::size_t i = 0; i < m; ++i) {
    const Element bi = top.generator(i);
    for (std::size_t c = 0; c < coords; ++c) {
      const std::size_t target = index_of(top.multiply(elems[c], bi));
      if (target == c) continue;
      for (std::size_t k = 0; k < na; ++k) {
        std::vector<int> v(n, 0);
        v[m + target * na + k] = 1;
        pres.set_conjugate(i, m + c * na + k, std::move(v));
      }
    }
  }
  GroupPtr g = pres.build();

  auto gens = basis_generators(b.basis, g, 0);
  for (std::size_t c = 0; c < coords; ++c)
    for (auto& [p, list] : basis_generators(a.basis, g, m + c * na))
      gens[p].insert(gens[p].end(), list.begin(), list.end());
  return {e, g, finish_basis(g, std::move(gens))};
}

BuiltGroup build_expanded(const GroupExpr& e) {
  switch (e.kind()) {
    case GroupExpr::Kind::Cyclic: return build_cyclic(e);
    case GroupExpr::Kind::Direct: return build_direct(e);
    case GroupExpr::Kind::Wreath: return build_wreath(e);
    default: break;
  }
  throw EngineBug("build: unexpanded node");
}

}  // namespace

BuiltGroup build(const GroupExpr& e, const BuildOptions& options) {
  const Order cap(options.max_generators);
  const SizeEstimate size = estimate(e, cap);
  if (size.generators > cap)
    throw BudgetExceeded(e.str() + " needs " + (size.order ? to_string(size.generators) : "more than " + to_string(cap)) +
                         " pc generators (limit " + to_string(cap) + ")");
  BuiltGroup out = build_expanded(expand(e));
  out.expr = e;
  return out;
}

Subgroup hall(const GroupPtr& g, const SylowBasis& basis, const PrimeSet& sigma) {
  Subgroup h = Subgroup::trivial(g);
  for (Prime p : sigma) {
    if (!basis.contains(p)) continue;
    CoprimeProduct prod = product_coprime(h, basis.at(p));
    if (!prod.permutable) throw EngineBug("hall: basis members are not permutable at prime " + std::to_string(p));
    h = std::move(prod.group);
  }
  return h;
}

}  // namespace fitheight
