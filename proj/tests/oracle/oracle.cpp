#include "oracle.hpp"

#include <algorithm>
#include <deque>
#include <functional>
#include <map>
#include <stdexcept>

namespace oracle {

namespace {

std::vector<std::pair<std::uint32_t, std::uint32_t>> factor(std::uint64_t n) {
  std::vector<std::pair<std::uint32_t, std::uint32_t>> out;
  for (std::uint32_t p = 2; static_cast<std::uint64_t>(p) * p <= n; ++p) {
    std::uint32_t m = 0;
    while (n % p == 0) {
      n /= p;
      ++m;
    }
    if (m) out.push_back({p, m});
  }
  if (n > 1) out.push_back({static_cast<std::uint32_t>(n), 1});
  return out;
}

}  // namespace

std::set<std::uint32_t> primes_of(std::uint64_t n) {
  std::set<std::uint32_t> out;
  for (auto [p, m] : factor(n)) out.insert(p);
  return out;
}

bool is_pi_number(std::uint64_t n, const std::set<std::uint32_t>& pi) {
  for (auto p : primes_of(n))
    if (!pi.contains(p)) return false;
  return true;
}

void FiniteGroup::finish() {
  inv_.assign(n_, 0);
  for (Elt a = 0; a < n_; ++a)
    for (Elt b = 0; b < n_; ++b)
      if (mul(a, b) == 0) {
        inv_[a] = b;
        break;
      }
}

Elt FiniteGroup::pow(Elt a, std::uint64_t k) const {
  Elt r = 0;
  for (std::uint64_t i = 0; i < k; ++i) r = mul(r, a);
  return r;
}

std::uint32_t FiniteGroup::order_of(Elt a) const {
  std::uint32_t k = 1;
  for (Elt x = a; x != 0; x = mul(x, a)) ++k;
  return k;
}

Elt FiniteGroup::from_exponents(const std::vector<int>& exps) const {
  Elt x = 0;
  for (std::size_t i = 0; i < exps.size(); ++i) x = mul(x, pow(pc_images_[i], static_cast<std::uint64_t>(exps[i])));
  return x;
}

FiniteGroup FiniteGroup::cyclic(std::uint32_t n) {
  FiniteGroup g;
  g.n_ = n;
  g.table_.resize(static_cast<std::size_t>(n) * n);
  for (Elt a = 0; a < n; ++a)
    for (Elt b = 0; b < n; ++b) g.table_[static_cast<std::size_t>(a) * n + b] = static_cast<std::uint16_t>((a + b) % n);
  for (auto [p, m] : factor(n)) {
    std::uint32_t pm = 1;
    for (std::uint32_t k = 0; k < m; ++k) pm *= p;
    std::uint32_t x = n / pm;  // generates the subgroup of order p^m
    for (std::uint32_t k = 0; k < m; ++k) {
      g.pc_images_.push_back(x);
      g.pc_orders_.push_back(p);
      x *= p;
    }
  }
  g.finish();
  return g;
}

FiniteGroup FiniteGroup::direct(const FiniteGroup& a, const FiniteGroup& b) {
  FiniteGroup g;
  g.n_ = a.n_ * b.n_;
  g.table_.resize(static_cast<std::size_t>(g.n_) * g.n_);
  for (Elt x = 0; x < g.n_; ++x)
    for (Elt y = 0; y < g.n_; ++y)
      g.table_[static_cast<std::size_t>(x) * g.n_ + y] =
          static_cast<std::uint16_t>(a.mul(x / b.n_, y / b.n_) * b.n_ + b.mul(x % b.n_, y % b.n_));
  for (std::size_t i = 0; i < a.pc_images_.size(); ++i) {
    g.pc_images_.push_back(a.pc_images_[i] * b.n_);
    g.pc_orders_.push_back(a.pc_orders_[i]);
  }
  for (std::size_t i = 0; i < b.pc_images_.size(); ++i) {
    g.pc_images_.push_back(b.pc_images_[i]);
    g.pc_orders_.push_back(b.pc_orders_[i]);
  }
  g.finish();
  return g;
}

FiniteGroup FiniteGroup::wreath(const FiniteGroup& a, const FiniteGroup& b) {
  const std::uint32_t k = b.n_;
  std::uint64_t base = 1;
  for (std::uint32_t i = 0; i < k; ++i) base *= a.n_;
  const std::uint64_t total = base * k;
  if (total > 65535) throw std::invalid_argument("oracle: group too large");
  FiniteGroup g;
  g.n_ = static_cast<std::uint32_t>(total);
  auto encode = [&](Elt y, const std::vector<Elt>& f) {
    std::uint64_t idx = 0;
    for (std::uint32_t x = k; x-- > 0;) idx = idx * a.n_ + f[x];
    return static_cast<Elt>(y * base + idx);
  };
  std::vector<std::pair<Elt, std::vector<Elt>>> decoded(g.n_);
  for (Elt e = 0; e < g.n_; ++e) {
    std::uint64_t rest = e % base;
    std::vector<Elt> f(k);
    for (std::uint32_t x = 0; x < k; ++x) {
      f[x] = static_cast<Elt>(rest % a.n_);
      rest /= a.n_;
    }
    decoded[e] = {static_cast<Elt>(e / base), std::move(f)};
  }
  g.table_.resize(static_cast<std::size_t>(g.n_) * g.n_);
  std::vector<Elt> h(k);
  for (Elt s = 0; s < g.n_; ++s)
    for (Elt t = 0; t < g.n_; ++t) {
      const auto& [y, f] = decoded[s];
      const auto& [y2, f2] = decoded[t];
      const Elt y2_inv = b.inv(y2);
      for (Elt x = 0; x < k; ++x) h[x] = a.mul(f[b.mul(x, y2_inv)], f2[x]);
      g.table_[static_cast<std::size_t>(s) * g.n_ + t] = static_cast<std::uint16_t>(encode(b.mul(y, y2), h));
    }
  // Top generators, then one block of A's generators per coordinate.
  const std::vector<Elt> zero(k, 0);
  for (std::size_t i = 0; i < b.pc_images_.size(); ++i) {
    g.pc_images_.push_back(encode(b.pc_images_[i], zero));
    g.pc_orders_.push_back(b.pc_orders_[i]);
  }
  std::vector<int> exps(b.pc_orders_.size(), 0);
  for (std::uint32_t c = 0; c < k; ++c) {
    const Elt coord = b.from_exponents(exps);
    for (std::size_t i = 0; i < a.pc_images_.size(); ++i) {
      std::vector<Elt> f = zero;
      f[coord] = a.pc_images_[i];
      g.pc_images_.push_back(encode(0, f));
      g.pc_orders_.push_back(a.pc_orders_[i]);
    }
    for (std::size_t j = exps.size(); j-- > 0;) {
      if (++exps[j] < static_cast<int>(b.pc_orders_[j])) break;
      exps[j] = 0;
    }
  }
  g.finish();
  return g;
}

FiniteGroup build(const fitheight::GroupExpr& expr) {
  using K = fitheight::GroupExpr::Kind;
  const fitheight::GroupExpr e = fitheight::expand(expr);
  switch (e.kind()) {
    case K::Cyclic: return FiniteGroup::cyclic(static_cast<std::uint32_t>(e.params()[0]));
    case K::Direct: return FiniteGroup::direct(oracle::build(e.left()), oracle::build(e.right()));
    case K::Wreath: return FiniteGroup::wreath(oracle::build(e.left()), oracle::build(e.right()));
    default: break;
  }
  throw std::logic_error("oracle: unexpanded expression");
}

std::size_t count(const Set& s) { return static_cast<std::size_t>(std::count(s.begin(), s.end(), 1)); }

std::vector<Elt> elements(const Set& s) {
  std::vector<Elt> out;
  for (Elt i = 0; i < s.size(); ++i)
    if (s[i]) out.push_back(i);
  return out;
}

Set closure(const FiniteGroup& g, const std::vector<Elt>& gens) {
  Set in(g.size(), 0);
  in[0] = 1;
  std::vector<Elt> queue{0};
  for (std::size_t i = 0; i < queue.size(); ++i)
    for (Elt s : gens) {
      const Elt y = g.mul(queue[i], s);
      if (!in[y]) {
        in[y] = 1;
        queue.push_back(y);
      }
    }
  return in;
}

Set whole(const FiniteGroup& g) { return Set(g.size(), 1); }

Set trivial(const FiniteGroup& g) {
  Set s(g.size(), 0);
  s[0] = 1;
  return s;
}

Set normal_closure(const FiniteGroup& g, const std::vector<Elt>& gens) {
  std::vector<Elt> all = gens;
  Set h = closure(g, all);
  for (std::size_t i = 0; i < all.size(); ++i)
    for (Elt y = 0; y < g.size(); ++y) {
      const Elt c = g.conj(all[i], y);
      if (!h[c]) {
        all.push_back(c);
        h = closure(g, all);
      }
    }
  return h;
}

Set commutator(const FiniteGroup& g, const Set& h, const Set& k) {
  std::vector<Elt> gens;
  Set seen(g.size(), 0);
  for (Elt x : elements(h))
    for (Elt y : elements(k)) {
      const Elt c = g.comm(x, y);
      if (!seen[c]) {
        seen[c] = 1;
        gens.push_back(c);
      }
    }
  return closure(g, gens);
}

bool subset(const Set& a, const Set& b) {
  for (std::size_t i = 0; i < a.size(); ++i)
    if (a[i] && !b[i]) return false;
  return true;
}

bool is_normal(const FiniteGroup& g, const Set& h) {
  for (Elt x : elements(h))
    for (Elt y = 0; y < g.size(); ++y)
      if (!h[g.conj(x, y)]) return false;
  return true;
}

int derived_length(const FiniteGroup& g, const Set& h) {
  int d = 0;
  Set cur = h;
  while (count(cur) > 1) {
    Set next = commutator(g, cur, cur);
    if (next == cur) throw std::logic_error("oracle: perfect subgroup");
    cur = std::move(next);
    ++d;
  }
  return d;
}

Set nilpotent_residual(const FiniteGroup& g, const Set& h) {
  Set cur = h;
  for (;;) {
    Set next = commutator(g, cur, h);
    if (next == cur) return cur;
    cur = std::move(next);
  }
}

int fitting_height(const FiniteGroup& g, const Set& h) {
  int n = 0;
  Set cur = h;
  while (count(cur) > 1) {
    cur = nilpotent_residual(g, cur);
    ++n;
  }
  return n;
}

namespace {

// Conjugacy class representatives with their classes.
std::vector<std::vector<Elt>> classes(const FiniteGroup& g) {
  std::vector<std::vector<Elt>> out;
  Set seen(g.size(), 0);
  for (Elt x = 0; x < g.size(); ++x) {
    if (seen[x]) continue;
    std::vector<Elt> cls;
    for (Elt y = 0; y < g.size(); ++y) {
      const Elt c = g.conj(x, y);
      if (!seen[c]) {
        seen[c] = 1;
        cls.push_back(c);
      }
    }
    out.push_back(std::move(cls));
  }
  return out;
}

}  // namespace

Set o_pi_mod(const FiniteGroup& g, const Set& n, const std::set<std::uint32_t>& pi) {
  // x lies in the preimage iff <x^G, N>/N is a pi-group.
  const std::size_t n_order = count(n);
  const std::vector<Elt> n_elts = elements(n);
  Set out(g.size(), 0);
  for (const auto& cls : classes(g)) {
    std::vector<Elt> gens = cls;
    gens.insert(gens.end(), n_elts.begin(), n_elts.end());
    const std::size_t m = count(closure(g, gens));
    if (is_pi_number(m / n_order, pi))
      for (Elt x : cls) out[x] = 1;
  }
  return closure(g, elements(out));
}

Set fitting_mod(const FiniteGroup& g, const Set& n) {
  std::vector<Elt> gens = elements(n);
  for (auto p : primes_of(g.size())) {
    const auto part = elements(o_pi_mod(g, n, {p}));
    gens.insert(gens.end(), part.begin(), part.end());
  }
  return closure(g, gens);
}

int upper_fitting_length(const FiniteGroup& g) {
  int n = 0;
  Set cur = trivial(g);
  while (count(cur) < g.size()) {
    Set next = fitting_mod(g, cur);
    if (next == cur) throw std::logic_error("oracle: Fitting series stalled");
    cur = std::move(next);
    ++n;
  }
  return n;
}

int pi_length(const FiniteGroup& g, const std::set<std::uint32_t>& pi) {
  std::set<std::uint32_t> co;
  for (auto p : primes_of(g.size()))
    if (!pi.contains(p)) co.insert(p);
  int steps = 0;
  Set cur = trivial(g);
  bool sigma_turn = false;
  while (count(cur) < g.size()) {
    Set next = o_pi_mod(g, cur, sigma_turn ? pi : co);
    if (sigma_turn && next != cur) ++steps;
    cur = std::move(next);
    sigma_turn = !sigma_turn;
  }
  return steps;
}

bool is_minimal_normal(const FiniteGroup& g, const Set& m) {
  if (count(m) <= 1 || !is_normal(g, m)) return false;
  for (Elt x : elements(m))
    if (x != 0 && normal_closure(g, {x}) != m) return false;
  return true;
}

std::vector<Set> minimal_normal_subgroups(const FiniteGroup& g) {
  std::vector<Set> out;
  for (const auto& cls : classes(g)) {
    if (cls[0] == 0) continue;
    Set m = normal_closure(g, {cls[0]});
    if (std::find(out.begin(), out.end(), m) == out.end() && is_minimal_normal(g, m)) out.push_back(std::move(m));
  }
  return out;
}

Set section_kernel(const FiniteGroup& g, const Set& p, const Set& q, const Set& r) {
  Set out(g.size(), 0);
  const auto qs = elements(q);
  for (Elt x : elements(p)) {
    bool ok = true;
    for (Elt y : qs)
      if (!r[g.comm(x, y)]) {
        ok = false;
        break;
      }
    if (ok) out[x] = 1;
  }
  return out;
}

namespace {

bool normalizes(const FiniteGroup& g, const Set& p, const Set& q) {
  for (Elt y : elements(p))
    for (Elt x : elements(q))
      if (!q[g.conj(x, y)]) return false;
  return true;
}

}  // namespace

bool is_tower(const FiniteGroup& g, const std::vector<std::pair<std::uint32_t, Set>>& entries) {
  const std::size_t h = entries.size();
  for (std::size_t i = 0; i < h; ++i) {
    const auto& [p, s] = entries[i];
    const std::size_t o = count(s);
    if (o <= 1 || primes_of(o) != std::set<std::uint32_t>{p}) return false;
    for (std::size_t j = i + 1; j < h; ++j)
      if (!normalizes(g, s, entries[j].second)) return false;
    if (i + 1 < h && entries[i + 1].first == p) return false;
  }
  Set r = trivial(g);
  for (std::size_t i = h; i-- > 0;) {
    Set ker = i + 1 == h ? trivial(g) : section_kernel(g, entries[i].second, entries[i + 1].second, r);
    if (count(ker) == count(entries[i].second)) return false;
    r = std::move(ker);
  }
  return true;
}

int max_tower_length(const FiniteGroup& g) {
  // All nontrivial subgroups of prime-power order.
  std::vector<std::pair<std::uint32_t, Set>> subs;
  for (auto p : primes_of(g.size())) {
    std::vector<Set> cyc;
    for (Elt x = 1; x < g.size(); ++x)
      if (primes_of(g.order_of(x)) == std::set<std::uint32_t>{p}) {
        Set c = closure(g, {x});
        if (std::find(cyc.begin(), cyc.end(), c) == cyc.end()) cyc.push_back(std::move(c));
      }
    std::set<Set> found(cyc.begin(), cyc.end());
    std::deque<Set> work(cyc.begin(), cyc.end());
    while (!work.empty()) {
      Set s = std::move(work.front());
      work.pop_front();
      for (const auto& c : cyc) {
        if (subset(c, s)) continue;
        std::vector<Elt> gens = elements(s);
        const auto ce = elements(c);
        gens.insert(gens.end(), ce.begin(), ce.end());
        Set j = closure(g, gens);
        if (!is_pi_number(count(j), {p})) continue;
        if (found.insert(j).second) work.push_back(std::move(j));
      }
    }
    for (const auto& s : found) subs.push_back({p, s});
  }
  // Depth-first, from the top entry downwards: (P_{i+1}, R_{i+1}) and the
  // entries above decide which P_i can be added.
  int best = 0;
  std::vector<std::size_t> chosen;
  std::function<void(const Set&)> dfs = [&](const Set& r) {
    best = std::max(best, static_cast<int>(chosen.size()));
    const auto& [p_next, s_next] = subs[chosen.back()];
    for (std::size_t c = 0; c < subs.size(); ++c) {
      const auto& [p, s] = subs[c];
      if (p == p_next) continue;
      bool ok = true;
      for (std::size_t k : chosen)
        if (!normalizes(g, s, subs[k].second)) {
          ok = false;
          break;
        }
      if (!ok) continue;
      Set ker = section_kernel(g, s, s_next, r);
      if (count(ker) == count(s)) continue;
      chosen.push_back(c);
      dfs(ker);
      chosen.pop_back();
    }
  };
  for (std::size_t c = 0; c < subs.size(); ++c) {
    chosen = {c};
    dfs(trivial(g));
  }
  return best;
}

}  // namespace oracle
