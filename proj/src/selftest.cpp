#include "fitheight/selftest.hpp"

#include <algorithm>
#include <span>

#include "fitheight/errors.hpp"
#include "fitheight/invariants.hpp"
#include "fitheight/quotient.hpp"

namespace fitheight {

Element random_element(const PcGroup& g, Rng& rng) {
  std::vector<int> e(g.size());
  for (std::size_t i = 0; i < g.size(); ++i)
    e[i] = static_cast<int>(std::uniform_int_distribution<unsigned>(0, g.relative_order(i) - 1)(rng));
  return g.element(std::move(e));
}

Element random_member(const Subgroup& h, Rng& rng) {
  const PcGroup& g = h.group();
  Element x = g.identity();
  for (const auto& u : h.igs()) {
    const Prime r = g.relative_order(u.depth());
    x = g.multiply(x, g.power(u, std::uniform_int_distribution<std::uint64_t>(0, r - 1)(rng)));
  }
  return x;
}

namespace {

constexpr Prime kLeafPrimes[] = {2, 3, 5, 7};

GroupExpr random_tree(Rng& rng, unsigned depth) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  if (depth == 0 || u(rng) < 0.3)
    return GroupExpr::cyclic(kLeafPrimes[std::uniform_int_distribution<int>(0, 3)(rng)]);
  const bool wreath = u(rng) < 0.6;
  GroupExpr a = random_tree(rng, depth - 1);
  GroupExpr b = random_tree(rng, depth - 1);
  return wreath ? GroupExpr::wreath(std::move(a), std::move(b)) : GroupExpr::direct(std::move(a), std::move(b));
}

std::vector<PrimeSet> tested_sigmas(const PrimeSet& primes) {
  std::vector<PrimeSet> out;
  for (Prime p : primes) {
    out.push_back({p});
    if (primes.size() > 2) out.push_back(complement(primes, {p}));
  }
  return out;
}

std::vector<Subgroup> sample_normals(const GroupPtr& g, const Limits& limits) {
  const Subgroup whole = Subgroup::whole(g);
  std::vector<Subgroup> out;
  if (whole.is_trivial()) return out;
  const SeriesReport d = derived_series(whole);
  if (d.terms.size() > 1) out.push_back(d.terms[1]);
  out.push_back(fitting_subgroup(g, limits));
  out.push_back(minimal_normal_subgroup(whole));
  return out;
}

}  // namespace

GroupExpr random_expr(Rng& rng, const Order& max_order, unsigned max_depth) {
  for (;;) {
    GroupExpr e = random_tree(rng, max_depth);
    const SizeEstimate est = estimate(e, 10'000);
    if (est.order && *est.order <= max_order && prime_divisors(*est.order).size() >= 2) return e;
  }
}

PrimeSet random_sigma(Rng& rng, const PrimeSet& primes) {
  if (primes.size() < 2) throw PreconditionError("random_sigma: need at least two primes");
  const std::vector<Prime> ps(primes.begin(), primes.end());
  const unsigned full = (1u << ps.size()) - 1;
  const unsigned mask = std::uniform_int_distribution<unsigned>(1, full - 1)(rng);
  PrimeSet out;
  for (std::size_t i = 0; i < ps.size(); ++i)
    if (mask >> i & 1u) out.insert(ps[i]);
  return out;
}

void PropertyLog::check(const std::string& name, bool ok, const std::function<std::string()>& detail) {
  PropertyTally& t = tallies_[name];
  ++t.checked;
  if (ok) return;
  ++t.failed;
  if (t.examples.size() < 5) t.examples.push_back(detail());
}

void PropertyLog::merge(const PropertyLog& other) {
  for (const auto& [name, o] : other.tallies_) {
    PropertyTally& t = tallies_[name];
    t.checked += o.checked;
    t.failed += o.failed;
    for (const auto& ex : o.examples)
      if (t.examples.size() < 5) t.examples.push_back(ex);
  }
}

std::size_t PropertyLog::failures() const {
  std::size_t n = 0;
  for (const auto& [name, t] : tallies_) n += t.failed;
  return n;
}

void check_engine(const BuiltGroup& b, Rng& rng, PropertyLog& log, const SelftestOptions& opt) {
  const PcGroup& g = *b.group;
  const std::string ex = b.expr.str();
  for (std::size_t t = 0; t < opt.triples; ++t) {
    const Element x = random_element(g, rng), y = random_element(g, rng), z = random_element(g, rng);
    log.check("engine.associativity", g.multiply(g.multiply(x, y), z) == g.multiply(x, g.multiply(y, z)),
              [&] { return ex + ": (xy)z != x(yz)"; });
  }
  for (std::size_t t = 0; t < opt.samples; ++t) {
    const Element x = random_element(g, rng);
    log.check("engine.inverse", g.multiply(x, g.inverse(x)).is_identity(), [&] { return ex + ": x x^-1 != 1"; });
    log.check("engine.element_order", g.power(x, g.element_order(x)).is_identity(),
              [&] { return ex + ": x^|x| != 1"; });
  }
  for (int t = 0; t < 5; ++t) {
    std::vector<Element> gens;
    const int k = std::uniform_int_distribution<int>(1, 3)(rng);
    for (int i = 0; i < k; ++i) gens.push_back(random_element(g, rng));
    const Subgroup s1 = induced_pcgs(b.group, gens);
    std::shuffle(gens.begin(), gens.end(), rng);
    gens.push_back(random_member(s1, rng));
    std::shuffle(gens.begin(), gens.end(), rng);
    const Subgroup s2 = induced_pcgs(b.group, gens);
    log.check("engine.igs_canonical", s1.igs() == s2.igs(), [&] { return ex + ": igs depends on generator order"; });
  }

  for (const Subgroup& n : sample_normals(b.group, opt.limits)) {
    const Quotient q = quotient(n);
    const PcGroup& im = *q.image();
    log.check("engine.quotient_order", im.order() * n.order() == g.order(),
              [&] { return ex + ": |G/N||N| != |G|"; });
    for (std::size_t t = 0; t < opt.samples; ++t) {
      const Element x = random_element(g, rng), y = random_element(g, rng);
      log.check("engine.quotient_hom", q.project(g.multiply(x, y)) == im.multiply(q.project(x), q.project(y)),
                [&] { return ex + ": projection is not multiplicative"; });
      log.check("engine.quotient_kernel", contains(n, x) == q.project(x).is_identity(),
                [&] { return ex + ": projection kernel differs from N"; });
      log.check("engine.quotient_kernel", q.project(random_member(n, rng)).is_identity(),
                [&] { return ex + ": element of N projects nontrivially"; });
      const Element u = random_element(im, rng);
      log.check("engine.quotient_surjective", q.project(q.lift(u)) == u,
                [&] { return ex + ": lift is not a section of the projection"; });
    }
  }

  for (const auto& [p, s] : b.basis.members()) {
    log.check("constructors.basis", is_p_group(s, p) && s.order() == sigma_part(g.order(), {p}),
              [&] { return ex + ": basis member for " + std::to_string(p) + " is not Sylow"; });
    for (const auto& [q, t] : b.basis.members())
      if (p < q)
        log.check("constructors.basis", product_coprime(s, t).permutable,
                  [&] { return ex + ": basis members do not permute"; });
  }
  if (b.expr.kind() == GroupExpr::Kind::Wreath) {
    const Order oa = *estimate(b.expr.left(), 10'000).order;
    const Order ob = *estimate(b.expr.right(), 10'000).order;
    log.check("constructors.wreath_order", g.order() == boost::multiprecision::pow(oa, static_cast<unsigned>(ob)) * ob,
              [&] { return ex + ": |A wr B| != |A|^|B| |B|"; });
  }
}

void check_invariants(const BuiltGroup& b, PropertyLog& log, const SelftestOptions& opt) {
  const std::string ex = b.expr.str();
  const Subgroup whole = Subgroup::whole(b.group);
  const int h = fitting_height(whole);
  const int d = derived_length(whole);
  const SeriesReport lower = lower_nilpotent_series(whole);
  const SeriesReport upper = upper_fitting_series(b.group, opt.limits);
  log.check("invariants.fitting_agree", upper.length == h, [&] {
    return ex + ": upper Fitting length " + std::to_string(upper.length) + " vs " + std::to_string(h);
  });
  if (upper.length == h)
    for (int i = 0; i <= h; ++i)
      log.check("invariants.lower_in_upper", is_subgroup_of(lower.terms[h - i], upper.terms[i]),
                [&] { return ex + ": R^{h-i} not in F_i at i=" + std::to_string(i); });

  for (const Subgroup& n : sample_normals(b.group, opt.limits)) {
    const Quotient q = quotient(n);
    const Subgroup top = Subgroup::whole(q.image());
    log.check("invariants.quotient_monotone", fitting_height(top) <= h && derived_length(top) <= d,
              [&] { return ex + ": h or d grew in a quotient"; });
  }

  // Minimality through the pc engine alone: every nonidentity element of E
  // sampled must have normal closure E.
  const Subgroup e = minimal_normal_subgroup(whole);
  const Prime ep = *e.primes().begin();
  bool elementary = e.primes().size() == 1 && commutator_subgroup(e, e).is_trivial();
  for (const auto& x : e.igs()) elementary = elementary && b.group->power(x, ep).is_identity();
  log.check("invariants.minimal_normal", elementary && normal_closure(e) == e,
            [&] { return ex + ": E is not a normal elementary abelian subgroup"; });
  std::vector<Element> probes = e.igs();
  Rng rng(e.igs().size());
  for (std::size_t t = 0; t < opt.samples / 4 + 1; ++t) probes.push_back(random_member(e, rng));
  for (const auto& x : probes)
    if (!x.is_identity())
      log.check("invariants.minimal_normal", normal_closure(induced_pcgs(b.group, std::span(&x, 1))) == e,
                [&] { return ex + ": an element of E has a smaller normal closure"; });

  const PrimeSet primes = b.group->primes();
  for (Prime p : primes) {
    const int lp = pi_length(b.group, {p}, opt.limits);
    const int dp = derived_length(b.basis.at(p));
    log.check("invariants.hall_higman", lp <= dp, [&] {
      return ex + ": l_" + std::to_string(p) + " = " + std::to_string(lp) + " > d(G_p) = " + std::to_string(dp);
    });
  }
  for (const PrimeSet& sigma : tested_sigmas(primes)) {
    const PrimeSet rest = complement(primes, sigma);
    const int ls = pi_length(b.group, sigma, opt.limits);
    const int lr = pi_length(b.group, rest, opt.limits);
    log.check("invariants.pi_prime_length", lr <= ls + 1 && ls <= lr + 1,
              [&] { return ex + ": l_pi' > l_pi + 1"; });
    const Subgroup hs = hall(b.group, b.basis, sigma);
    if (!sigma.contains(2) || is_nilpotent(hs))
      log.check("invariants.kazarin", ls <= derived_length(hs), [&] { return ex + ": l_sigma > d(G_sigma)"; });
  }
}

Tower check_towers(const BuiltGroup& b, PropertyLog& log, const SelftestOptions& opt) {
  const std::string ex = b.expr.str();
  SearchOptions so;
  so.limits = opt.limits;
  so.max_order = opt.exact_order;
  so.mode = b.group->order() <= opt.exact_order ? SearchMode::Exact : SearchMode::Budgeted;
  SearchResult r{Tower(b.group), {}, 0, false, 0};
  try {
    r = search_max(b, so);
  } catch (const EngineBug& e) {
    log.check("towers.search", false, [&] { return ex + ": " + e.what(); });
    return Tower(b.group);
  }
  log.check("towers.valid", r.check.valid, [&] { return ex + ": " + r.check.reason; });
  if (so.mode == SearchMode::Exact)
    log.check("towers.exact", r.certified, [&] { return ex + ": tower shorter than h(G)"; });

  const Tower& t = r.tower;
  const auto& es = t.entries();
  const std::size_t h = es.size();
  Rng rng(h * 7919 + b.group->size());

  const PrimeSet primes = b.group->primes();
  for (const PrimeSet& sigma : tested_sigmas(primes)) {
    const BlockStats s = stats(t, sigma);
    if (s.nu > 0) {
      const int ha = fitting_height(hall(b.group, b.basis, sigma));
      log.check("towers.counting_height", ha >= s.nu - s.beta + 1, [&] { return ex + ": h(A) < nu - beta + 1"; });
    }
    log.check("towers.counting_length", pi_length(b.group, sigma, opt.limits) >= s.beta,
              [&] { return ex + ": l_sigma < beta"; });
  }

  for (std::size_t j = 0; j + 1 < h; ++j) {
    const Subgroup c = centralizer(es[j].group, es[h - 1].group, opt.limits);
    log.check("towers.monotone_bars", is_subgroup_of(c, r.check.kernels[j]),
              [&] { return ex + ": C_{P_j}(P_h) not in C_{P_j}(bar P_{j+1})"; });
    const Subgroup& k = r.check.kernels[j];
    const Subgroup& q = es[j + 1].group;
    const Subgroup& rr = r.check.kernels[j + 1];
    for (std::size_t i = 0; i < opt.samples / 4 + 1; ++i) {
      const Element x = random_member(k, rng), y = random_member(q, rng);
      log.check("engine.section_kernel", contains(rr, b.group->commutator(x, y)),
                [&] { return ex + ": kernel element moves a sampled point of the section"; });
      const Element z = random_member(es[j].group, rng);
      const bool central = std::all_of(q.igs().begin(), q.igs().end(),
                                       [&](const Element& u) { return contains(rr, b.group->commutator(z, u)); });
      log.check("engine.section_kernel", contains(k, z) == central,
                [&] { return ex + ": section kernel is not the full centralizer"; });
    }
  }
  const auto tails = tail_subgroups(t);
  for (const auto& tj : tails)
    log.check("towers.tails_normal", normalizes(tails.front(), tj), [&] { return ex + ": T_j not normal in T_1"; });
  for (std::size_t j = 1; j <= h; ++j)
    for (std::size_t s = 0; j + s <= h; ++s) {
      bool ok = true;
      try {
        delete_entries(t, j, s, opt.limits);
      } catch (const EngineBug&) {
        ok = false;
      }
      log.check("towers.deletion", ok, [&] { return ex + ": deletion has a third outcome"; });
    }
  return t;
}

void check_bounds(const BuiltGroup& b, const PrimeSet& sigma, PropertyLog& log, const SelftestOptions& opt) {
  const std::string ex = b.expr.str();
  const Factorisation f = scenario(b, sigma);
  const BoundReport r = check_all(f, opt.limits);
  const BoundReport s = check_all(scenario(b, f.sigma_prime), opt.limits);
  for (const BoundReport* rep : {&r, &s})
    for (const auto& row : rep->rows)
      if (row.applicable && row.asserted)
        log.check("bounds." + row.name, row.slack() >= 0, [&] {
          return ex + ": " + row.name + " lhs " + std::to_string(row.lhs) + " > rhs " + std::to_string(row.rhs);
        });
  for (const BoundReport* rep : {&r, &s}) {
    log.check("bounds.lambda_delta",
              rep->lambda_a.total <= rep->delta_a * rep->h_a && rep->lambda_b.total <= rep->delta_b * rep->h_b,
              [&] { return ex + ": Lambda(H) > delta(H) h(H)"; });
    if (rep->b_nilpotent && rep->a_proper && rep->b_proper)
      log.check("bounds.delta_reduces", rep->row("delta_complement").rhs == rep->row("nilpotent_complement").rhs,
                [&] { return ex + ": delta_complement does not reduce to nilpotent_complement"; });
  }
  const bool swapped = s.h_a == r.h_b && s.h_b == r.h_a && s.d_a == r.d_b && s.d_b == r.d_a &&
                       s.delta_a == r.delta_b && s.delta_b == r.delta_a && s.ell_sigma == r.ell_sigma_prime &&
                       s.ell_sigma_prime == r.ell_sigma && s.lambda_a.total == r.lambda_b.total &&
                       s.row("delta_product").rhs == r.row("delta_product").rhs && s.row("lambda").rhs == r.row("lambda").rhs &&
                       s.row("pi_length_sum").rhs == r.row("pi_length_sum").rhs &&
                       s.row("pi_length_min").rhs == r.row("pi_length_min").rhs &&
                       s.row("pi_length_a").lhs == r.row("pi_length_b").lhs &&
                       s.row("pi_length_a").rhs == r.row("pi_length_b").rhs;
  log.check("bounds.symmetry", swapped, [&] { return ex + ": sigma <-> sigma' does not swap A and B"; });
}

}  // namespace fitheight
