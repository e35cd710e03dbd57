#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <string>
#include <vector>

#include "fitheight/subgroup.hpp"

namespace fitheight {

/// Group expression: C(n) | D(a,b) | W(a,b) | Ex1(p,q,r,t,n) | Ex2(p,q,n).
/// W(a,b) is the regular wreath product a wr b. Values are immutable and
/// cheap to copy.
class GroupExpr {
 public:
  enum class Kind { Cyclic, Direct, Wreath, Ex1, Ex2 };

  static GroupExpr cyclic(std::uint64_t n);
  static GroupExpr direct(GroupExpr a, GroupExpr b);
  static GroupExpr wreath(GroupExpr a, GroupExpr b);
  /// Unexpanded example nodes; see example1() / example2() for the trees.
  static GroupExpr ex1(Prime p, Prime q, Prime r, Prime t, unsigned n);
  static GroupExpr ex2(Prime p, Prime q, unsigned n);

  Kind kind() const;
  /// C: {n}; Ex1: {p,q,r,t,n}; Ex2: {p,q,n}; empty otherwise.
  const std::vector<std::uint64_t>& params() const;
  const GroupExpr& left() const;
  const GroupExpr& right() const;

  /// Canonical text, no whitespace. Stable: used as a cache key.
  std::string str() const;

  bool operator==(const GroupExpr& other) const;

 private:
  struct Node;
  explicit GroupExpr(std::shared_ptr<const Node> node) : node_(std::move(node)) {}
  std::shared_ptr<const Node> node_;
};

/// Ex1 family: C_t wr H_n with H_0 = C_p wr C_q and the alternating
/// (H wr C_r) wr (C_q wr C_p) / (C_p wr C_q) steps. Primes must be distinct.
GroupExpr example1(Prime p, Prime q, Prime r, Prime t, unsigned n);
/// Ex2 family: G_{2n} with G_0 = C_p, odd steps wr C_q, even steps wr C_p.
GroupExpr example2(Prime p, Prime q, unsigned n);

/// Replaces every Ex1/Ex2 node by its wreath tree.
GroupExpr expand(const GroupExpr& e);

struct SizeEstimate {
  Order generators;
  /// Unset when the generator count already exceeds the cap (the order
  /// is then astronomically large and is not computed).
  std::optional<Order> order;
};

/// Predicted pc generator count and order without building anything.
SizeEstimate estimate(const GroupExpr& e, const Order& generator_cap);

/// One Sylow subgroup per prime of |G|, pairwise permutable.
class SylowBasis {
 public:
  SylowBasis() = default;
  explicit SylowBasis(std::map<Prime, Subgroup> members) : members_(std::move(members)) {}

  const Subgroup& at(Prime p) const;
  bool contains(Prime p) const { return members_.contains(p); }
  PrimeSet primes() const;
  const std::map<Prime, Subgroup>& members() const { return members_; }

 private:
  std::map<Prime, Subgroup> members_;
};

struct BuildOptions {
  std::size_t max_generators = 10'000;
};

struct BuiltGroup {
  GroupExpr expr;
  GroupPtr group;
  SylowBasis basis;
};

/// Builds the presentation and a compatible Sylow basis. Throws
/// BudgetExceeded (before allocating) when the generator count would
/// exceed the limit, PreconditionError for invalid parameters.
BuiltGroup build(const GroupExpr& e, const BuildOptions& options = {});

/// Product of the basis members for the primes in sigma (empty sigma gives
/// the trivial subgroup).
Subgroup hall(const GroupPtr& g, const SylowBasis& basis, const PrimeSet& sigma);

}  // namespace fitheight
