#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <random>
#include <string>
#include <vector>

#include "fitheight/bounds.hpp"
#include "fitheight/towers.hpp"

namespace fitheight {

using Rng = std::mt19937_64;

/// Uniform random element of G.
Element random_element(const PcGroup& g, Rng& rng);
/// Uniform random element of H (random exponents along its igs).
Element random_member(const Subgroup& h, Rng& rng);

/// Seeded random nesting of D and W over C(2), C(3), C(5), C(7) with at
/// least two primes in the order and predicted order at most `max_order`.
/// Nothing is built; the order comes from estimate().
GroupExpr random_expr(Rng& rng, const Order& max_order, unsigned max_depth = 3);

/// Random nonempty proper subset of pi(G); requires |pi(G)| >= 2.
PrimeSet random_sigma(Rng& rng, const PrimeSet& primes);

struct PropertyTally {
  std::size_t checked = 0;
  std::size_t failed = 0;
  /// First few failure descriptions.
  std::vector<std::string> examples;
};

class PropertyLog {
 public:
  void check(const std::string& name, bool ok, const std::function<std::string()>& detail);
  void merge(const PropertyLog& other);
  const std::map<std::string, PropertyTally>& tallies() const { return tallies_; }
  std::size_t failures() const;

 private:
  std::map<std::string, PropertyTally> tallies_;
};

struct SelftestOptions {
  /// Random associativity triples per group.
  std::size_t triples = 1000;
  /// Sampled elements for homomorphism and kernel checks.
  std::size_t samples = 100;
  /// Groups up to this order get an exact tower search; larger ones a
  /// budgeted search whose result is only validated.
  Order exact_order = 100'000;
  Limits limits{};
};

/// Collection, igs canonicity, quotient maps, section kernels, Sylow basis.
void check_engine(const BuiltGroup& g, Rng& rng, PropertyLog& log, const SelftestOptions& opt = {});
/// Series agreement and the inequalities between invariants.
void check_invariants(const BuiltGroup& g, PropertyLog& log, const SelftestOptions& opt = {});
/// Tower search plus the counting and centralizer statements on the result.
/// Returns the tower found.
Tower check_towers(const BuiltGroup& g, PropertyLog& log, const SelftestOptions& opt = {});
/// check_all for sigma and its complement; slack, Lambda, symmetry.
void check_bounds(const BuiltGroup& g, const PrimeSet& sigma, PropertyLog& log, const SelftestOptions& opt = {});

}  // namespace fitheight
