#include "fitheight/bounds.hpp"

#include <algorithm>

#include "fitheight/errors.hpp"
#include "fitheight/invariants.hpp"

namespace fitheight {

Factorisation scenario(const BuiltGroup& g, const PrimeSet& sigma) {
  Factorisation f;
  f.expr = g.expr.str();
  f.group = g.group;
  f.basis = g.basis;
  const PrimeSet all = g.group->primes();
  f.sigma = intersect(all, sigma);
  f.sigma_prime = complement(all, sigma);
  f.a = hall(g.group, g.basis, f.sigma);
  f.b = hall(g.group, g.basis, f.sigma_prime);
  const CoprimeProduct ab = product_coprime(f.a, f.b);
  if (!ab.permutable || !ab.group.is_whole())
    throw EngineBug("scenario: Hall subgroups do not factorise the group");
  f.b_odd = f.b.order() % 2 == 1;
  f.b_nilpotent = is_nilpotent(f.b);
  f.a_proper = !f.a.is_trivial() && !f.a.is_whole();
  f.b_proper = !f.b.is_trivial() && !f.b.is_whole();
  return f;
}

LambdaBreakdown lambda(const GroupPtr& g, const Subgroup& h, std::map<Prime, int>& ell, const Limits& limits) {
  LambdaBreakdown out;
  const SeriesReport s = lower_nilpotent_series(h);
  for (std::size_t i = 1; i < s.terms.size(); ++i) {
    LambdaLayer layer{static_cast<int>(i), {}, 0};
    for (Prime p : prime_divisors(s.terms[i - 1].order() / s.terms[i].order())) {
      layer.primes.insert(p);
      auto it = ell.find(p);
      if (it == ell.end()) it = ell.emplace(p, pi_length(g, {p}, limits)).first;
      layer.value = std::max(layer.value, it->second);
    }
    out.total += layer.value;
    out.layers.push_back(std::move(layer));
  }
  return out;
}

LambdaBreakdown lambda(const GroupPtr& g, const Subgroup& h, const Limits& limits) {
  std::map<Prime, int> ell;
  return lambda(g, h, ell, limits);
}

const BoundRow& BoundReport::row(const std::string& name) const {
  for (const auto& r : rows)
    if (r.name == name) return r;
  throw PreconditionError("no bound named " + name);
}

std::vector<const BoundRow*> BoundReport::violations() const {
  std::vector<const BoundRow*> out;
  for (const auto& r : rows)
    if (r.applicable && r.asserted && r.slack() < 0) out.push_back(&r);
  return out;
}

BoundReport check_all(const Factorisation& f, const Limits& limits) {
  BoundReport r;
  r.expr = f.expr;
  r.order = f.group->order();
  r.sigma = f.sigma;
  r.order_a = f.a.order();
  r.order_b = f.b.order();
  r.b_odd = f.b_odd;
  r.b_nilpotent = f.b_nilpotent;
  r.a_proper = f.a_proper;
  r.b_proper = f.b_proper;
  r.h_g = fitting_height(Subgroup::whole(f.group));
  r.h_a = fitting_height(f.a);
  r.h_b = fitting_height(f.b);
  r.d_a = derived_length(f.a);
  r.d_b = derived_length(f.b);
  r.delta_a = delta(f.a, f.basis);
  r.delta_b = delta(f.b, f.basis);
  r.ell_sigma = pi_length(f.group, f.sigma, limits);
  r.ell_sigma_prime = pi_length(f.group, f.sigma_prime, limits);
  std::map<Prime, int> ell;
  r.lambda_a = lambda(f.group, f.a, ell, limits);
  r.lambda_b = lambda(f.group, f.b, ell, limits);

  long long sum_dbp = 0;
  for (Prime p : f.b.primes()) sum_dbp += derived_length(f.basis.at(p));
  const long long pi_b = static_cast<long long>(f.b.primes().size());

  const long long hg = r.h_g, ha = r.h_a, hb = r.h_b, db = r.d_b, da = r.delta_a, dbb = r.delta_b;
  const long long ls = r.ell_sigma, lsp = r.ell_sigma_prime;
  const bool both = f.a_proper && f.b_proper;
  const long long delta_product = ha * da + hb * dbb;
  auto add = [&](std::string name, bool applicable, long long lhs, long long rhs, bool asserted = true) {
    r.rows.push_back({std::move(name), applicable, asserted, lhs, rhs});
  };
  add("odd_complement", both && f.b_odd, hg, ha + hb + 2 * db - 1);
  add("nilpotent_complement", both && f.b_nilpotent, hg, ha + 2 * db);
  add("delta_complement", both, hg, ha + (2 * dbb + 1) * hb - 1);
  add("delta_product", both, hg, delta_product);
  add("sylow_sum", both, hg, ha + 2 * sum_dbp);
  add("prime_count", both, hg, ha + 2 * pi_b * dbb);
  add("pi_length_sum", both, hg, ha + hb + ls + lsp - 2);
  add("pi_length_min", both, hg, ha + hb + 2 * std::min(ls, lsp) - 1);
  add("pi_length_a", true, ls, da * ha);
  add("pi_length_b", true, lsp, dbb * hb);
  add("lambda", both, hg, r.lambda_a.total + r.lambda_b.total);
  add("product_vs_weaker", ha >= 1 && hb >= 1, delta_product, (da + 1) * ha + (dbb + 1) * hb - 2);
  add("conjecture", both, hg, ha + hb + 2 * db - 1, false);
  return r;
}

}  // namespace fitheight
