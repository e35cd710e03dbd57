#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "fitheight/pc_group.hpp"

namespace fitheight {

/// Work limits shared by the orbit algorithms.
struct Limits {
  /// Maximum number of points (cosets, conjugate subgroups) enumerated by a
  /// single orbit computation.
  std::size_t max_orbit = 1'000'000;
};

/// A subgroup of a PcGroup held as its canonical induced pcgs: leading
/// depths strictly increase, leading exponents are 1 and every entry has
/// exponent 0 at the leading depth of every other entry.
class Subgroup {
 public:
  Subgroup() = default;

  static Subgroup trivial(GroupPtr ambient);
  static Subgroup whole(GroupPtr ambient);

  const GroupPtr& ambient() const { return ambient_; }
  const PcGroup& group() const { return *ambient_; }
  const std::vector<Element>& igs() const { return igs_; }
  const Order& order() const { return order_; }
  bool is_trivial() const { return igs_.empty(); }
  bool is_whole() const { return igs_.size() == ambient_->size(); }
  std::vector<std::size_t> depths() const;
  PrimeSet primes() const;
  /// <igs[i], ..., igs[last]>, the intersection with the ambient pc series
  /// term at depth(igs[i]).
  Subgroup tail(std::size_t i) const;

  bool operator==(const Subgroup& other) const;

 private:
  friend class IgsBuilder;
  GroupPtr ambient_;
  std::vector<Element> igs_;
  Order order_ = 1;
};

/// Incremental induced-pcgs construction: a table indexed by depth, closed
/// under p-th powers and commutators of its entries.
class IgsBuilder {
 public:
  explicit IgsBuilder(GroupPtr ambient);
  IgsBuilder(const Subgroup& start);

  /// Adds x and closes the table; returns true if the subgroup grew.
  bool add(const Element& x);
  bool contains(const Element& x) const;
  /// Entries inserted since the last call (including closure products).
  std::vector<Element> take_fresh();
  std::size_t rank() const { return count_; }

  Subgroup finish() const;

 private:
  Element sift(Element x) const;
  void insert(Element x);

  GroupPtr ambient_;
  std::vector<std::optional<Element>> slots_;
  std::size_t count_ = 0;
  std::vector<Element> fresh_;
};

Subgroup induced_pcgs(const GroupPtr& ambient, std::span<const Element> gens);

bool contains(const Subgroup& h, const Element& x);
bool is_subgroup_of(const Subgroup& h, const Subgroup& k);

/// <H, K>.
Subgroup join(const Subgroup& h, const Subgroup& k);

/// Smallest subgroup containing H and normalized by K.
Subgroup normal_closure(const Subgroup& h, const Subgroup& k);
Subgroup normal_closure(const Subgroup& h);

/// True when every igs entry of `q` conjugated by every igs entry of `p`
/// stays in `q`.
bool normalizes(const Subgroup& p, const Subgroup& q);
bool is_normal(const Subgroup& h);

/// [H, K], the normal closure in <H, K> of the generator commutators.
Subgroup commutator_subgroup(const Subgroup& h, const Subgroup& k);

struct CoprimeProduct {
  Subgroup group;
  /// |<H,K>| == |H||K|, i.e. HK = KH as sets.
  bool permutable = false;
};

/// <H, K> for subgroups of coprime order.
CoprimeProduct product_coprime(const Subgroup& h, const Subgroup& k);

/// Canonical representative of the coset xN: exponents at the leading
/// depths of N are zero. Requires only that N is a subgroup.
Element coset_representative(const Subgroup& n, Element x);

/// sigma-part of x: the power of x whose order is the sigma-part of |x|.
Element sigma_part(const PcGroup& g, const Element& x, const PrimeSet& sigma);

/// Subgroup generated by the sigma-parts of the igs entries of h.
Subgroup sigma_parts(const Subgroup& h, const PrimeSet& sigma);

/// C_P(Q/R) = { g in P : [g, x] in R for all x in Q }. Requires R normal in
/// Q and P normalizing Q and R.
Subgroup section_kernel(const Subgroup& p, const Subgroup& q, const Subgroup& r,
                        const Limits& limits = {});

/// C_P(Q).
Subgroup centralizer(const Subgroup& p, const Subgroup& q, const Limits& limits = {});

/// N_U(S).
Subgroup normalizer(const Subgroup& u, const Subgroup& s, const Limits& limits = {});

/// P intersected with a normal subgroup N (stabilizer of the coset N under
/// right multiplication by P).
Subgroup intersect_normal(const Subgroup& p, const Subgroup& n, const Limits& limits = {});

/// A Hall sigma-subgroup of U, built up the igs of U with Frattini steps.
Subgroup hall_subgroup(const Subgroup& u, const PrimeSet& sigma, const Limits& limits = {});
Subgroup sylow_subgroup(const Subgroup& u, Prime p, const Limits& limits = {});

/// Image of H under conjugation by g.
Subgroup conjugate(const Subgroup& h, const Element& g);

bool is_p_group(const Subgroup& h, Prime p);

}  // namespace fitheight
