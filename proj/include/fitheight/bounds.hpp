#pragma once

#include <map>
#include <string>
#include <vector>

#include "fitheight/constructors.hpp"

namespace fitheight {

/// G = AB with A a Hall sigma-subgroup and B a Hall sigma'-subgroup taken
/// from the same Sylow basis.
struct Factorisation {
  std::string expr;
  GroupPtr group;
  SylowBasis basis;
  PrimeSet sigma;        // sigma meet pi(G)
  PrimeSet sigma_prime;  // pi(G) minus sigma
  Subgroup a;
  Subgroup b;
  bool b_odd = false;
  bool b_nilpotent = false;
  bool a_proper = false;
  bool b_proper = false;
};

/// Throws EngineBug if the Hall subgroups fail to factorise G.
Factorisation scenario(const BuiltGroup& g, const PrimeSet& sigma);

struct LambdaLayer {
  int index;       // i = 1..h(H)
  PrimeSet primes; // pi(R^{i-1}(H) / R^i(H))
  int value;       // max l_p(G) over those primes
};

struct LambdaBreakdown {
  std::vector<LambdaLayer> layers;
  int total = 0;
};

/// Lambda_G(H). `ell` caches l_p(G) per prime and is filled on demand.
LambdaBreakdown lambda(const GroupPtr& g, const Subgroup& h, std::map<Prime, int>& ell, const Limits& limits = {});
LambdaBreakdown lambda(const GroupPtr& g, const Subgroup& h, const Limits& limits = {});

struct BoundRow {
  std::string name;
  bool applicable = false;
  /// False for tracked-only rows (the conjecture), which never fail a run.
  bool asserted = true;
  long long lhs = 0;
  long long rhs = 0;
  long long slack() const { return rhs - lhs; }
};

struct BoundReport {
  std::string expr;
  Order order;
  PrimeSet sigma;
  Order order_a, order_b;
  bool b_odd = false, b_nilpotent = false, a_proper = false, b_proper = false;
  int h_g = 0, h_a = 0, h_b = 0;
  int d_a = 0, d_b = 0;
  int delta_a = 0, delta_b = 0;
  int ell_sigma = 0, ell_sigma_prime = 0;
  LambdaBreakdown lambda_a, lambda_b;
  std::vector<BoundRow> rows;

  const BoundRow& row(const std::string& name) const;
  /// Applicable asserted rows with negative slack.
  std::vector<const BoundRow*> violations() const;
};

BoundReport check_all(const Factorisation& f, const Limits& limits = {});

}  // namespace fitheight
