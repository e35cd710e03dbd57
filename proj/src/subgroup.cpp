#include "fitheight/subgroup.hpp"

#include <algorithm>

#include "fitheight/errors.hpp"
#include "orbit.hpp"

namespace fitheight {

namespace {

void require_same_ambient(const Subgroup& a, const Subgroup& b, const char* what) {
  if (!a.ambient() || !b.ambient() || a.ambient()->id() != b.ambient()->id())
    throw PreconditionError(std::string(what) + ": subgroups of different groups");
}

// Conjugation by a fixed element with its inverse cached.
struct Conjugator {
  const PcGroup& g;
  Element by;
  Element by_inv;
  Conjugator(const PcGroup& group, const Element& y) : g(group), by(y), by_inv(group.inverse(y)) {}
  Element operator()(const Element& x) const { return g.multiply(g.multiply(by_inv, x), by); }
};

// Closes `b` under conjugation by `gens`, starting from the entries it
// already holds.
void close_under_conjugation(IgsBuilder& b, const GroupPtr& ambient, const std::vector<Element>& gens) {
  std::vector<Conjugator> conj;
  conj.reserve(gens.size());
  for (const auto& g : gens) conj.emplace_back(*ambient, g);
  std::vector<Element> work = b.take_fresh();
  while (!work.empty()) {
    for (const auto& u : work)
      for (const auto& c : conj) b.add(c(u));
    work = b.take_fresh();
  }
}

}  // namespace

// ---------------------------------------------------------------- Subgroup

Subgroup Subgroup::trivial(GroupPtr ambient) {
  Subgroup s;
  s.ambient_ = std::move(ambient);
  return s;
}

Subgroup Subgroup::whole(GroupPtr ambient) {
  Subgroup s;
  for (std::size_t i = 0; i < ambient->size(); ++i) s.igs_.push_back(ambient->generator(i));
  s.order_ = ambient->order();
  s.ambient_ = std::move(ambient);
  return s;
}

std::vector<std::size_t> Subgroup::depths() const {
  std::vector<std::size_t> d;
  d.reserve(igs_.size());
  for (const auto& u : igs_) d.push_back(u.depth());
  return d;
}

PrimeSet Subgroup::primes() const {
  PrimeSet out;
  for (const auto& u : igs_) out.insert(ambient_->relative_order(u.depth()));
  return out;
}

Subgroup Subgroup::tail(std::size_t i) const {
  Subgroup s;
  s.ambient_ = ambient_;
  for (std::size_t k = i; k < igs_.size(); ++k) {
    s.igs_.push_back(igs_[k]);
    s.order_ *= ambient_->relative_order(igs_[k].depth());
  }
  return s;
}

bool Subgroup::operator==(const Subgroup& other) const {
  return ambient_ && other.ambient_ && ambient_->id() == other.ambient_->id() && igs_ == other.igs_;
}

// -------------------------------------------------------------- IgsBuilder

IgsBuilder::IgsBuilder(GroupPtr ambient) : ambient_(std::move(ambient)), slots_(ambient_->size()) {}

IgsBuilder::IgsBuilder(const Subgroup& start) : IgsBuilder(start.ambient()) {
  for (const auto& u : start.igs()) {
    slots_[u.depth()] = u;
    fresh_.push_back(u);
    ++count_;
  }
}

Element IgsBuilder::sift(Element x) const {
  const PcGroup& g = *ambient_;
  for (;;) {
    const std::size_t d = x.depth();
    if (d == x.exps.size() || !slots_[d]) return x;
    const long long k = static_cast<long long>(g.relative_order(d)) - x.exps[d];
    x = g.multiply(x, g.power(*slots_[d], static_cast<std::uint64_t>(k)));
  }
}

void IgsBuilder::insert(Element x) {
  const PcGroup& g = *ambient_;
  std::vector<Element> work{std::move(x)};
  while (!work.empty()) {
    Element y = sift(std::move(work.back()));
    work.pop_back();
    if (y.is_identity()) continue;
    const std::size_t d = y.depth();
    const Prime r = g.relative_order(d);
    if (y.exps[d] != 1) {
      // y^k can generate less than y when gcd(k, |y|) > 1; y^r recovers the rest.
      work.push_back(g.power(y, static_cast<std::uint64_t>(r)));
      auto k = static_cast<std::uint64_t>(mod_inverse(Order(y.exps[d]), Order(r)));
      y = g.power(y, k);
    }
    for (const auto& s : slots_)
      if (s) work.push_back(g.commutator(*s, y));
    work.push_back(g.power(y, static_cast<std::uint64_t>(r)));
    slots_[d] = y;
    fresh_.push_back(y);
    ++count_;
  }
}

bool IgsBuilder::add(const Element& x) {
  ambient_->check(x);
  Element y = sift(x);
  if (y.is_identity()) return false;
  insert(std::move(y));
  return true;
}

bool IgsBuilder::contains(const Element& x) const { return sift(x).is_identity(); }

std::vector<Element> IgsBuilder::take_fresh() {
  std::vector<Element> out;
  out.swap(fresh_);
  return out;
}

Subgroup IgsBuilder::finish() const {
  const PcGroup& g = *ambient_;
  Subgroup s;
  s.ambient_ = ambient_;
  for (const auto& slot : slots_)
    if (slot) s.igs_.push_back(*slot);
  // Clear every entry at the leading depths of the later entries.
  for (std::size_t i = 0; i < s.igs_.size(); ++i) {
    for (std::size_t j = i + 1; j < s.igs_.size(); ++j) {
      const std::size_t dj = s.igs_[j].depth();
      const int e = s.igs_[i].exps[dj];
      if (!e) continue;
      const auto k = static_cast<std::uint64_t>(g.relative_order(dj) - static_cast<Prime>(e));
      s.igs_[i] = g.multiply(s.igs_[i], g.power(s.igs_[j], k));
    }
    s.order_ *= g.relative_order(s.igs_[i].depth());
  }
  return s;
}

// -------------------------------------------------------------- operations

Subgroup induced_pcgs(const GroupPtr& ambient, std::span<const Element> gens) {
  IgsBuilder b(ambient);
  for (const auto& x : gens) b.add(x);
  return b.finish();
}

bool contains(const Subgroup& h, const Element& x) {
  const PcGroup& g = h.group();
  g.check(x);
  Element y = x;
  for (const auto& u : h.igs()) {
    const std::size_t d = u.depth();
    if (y.depth() < d) return false;
    if (const int e = y.exps[d]) y = g.multiply(y, g.power(u, static_cast<std::uint64_t>(g.relative_order(d) - e)));
  }
  return y.is_identity();
}

bool is_subgroup_of(const Subgroup& h, const Subgroup& k) {
  require_same_ambient(h, k, "is_subgroup_of");
  if (h.order() > k.order()) return false;
  return std::all_of(h.igs().begin(), h.igs().end(), [&](const Element& x) { return contains(k, x); });
}

Subgroup join(const Subgroup& h, const Subgroup& k) {
  require_same_ambient(h, k, "join");
  IgsBuilder b(h);
  for (const auto& x : k.igs()) b.add(x);
  return b.finish();
}

Subgroup normal_closure(const Subgroup& h, const Subgroup& k) {
  require_same_ambient(h, k, "normal_closure");
  IgsBuilder b(h);
  close_under_conjugation(b, h.ambient(), k.igs());
  return b.finish();
}

Subgroup normal_closure(const Subgroup& h) { return normal_closure(h, Subgroup::whole(h.ambient())); }

bool normalizes(const Subgroup& p, const Subgroup& q) {
  require_same_ambient(p, q, "normalizes");
  for (const auto& g : p.igs()) {
    Conjugator c(p.group(), g);
    for (const auto& x : q.igs())
      if (!contains(q, c(x))) return false;
  }
  return true;
}

bool is_normal(const Subgroup& h) { return normalizes(Subgroup::whole(h.ambient()), h); }

Subgroup commutator_subgroup(const Subgroup& h, const Subgroup& k) {
  require_same_ambient(h, k, "commutator_subgroup");
  const PcGroup& g = h.group();
  IgsBuilder b(h.ambient());
  const bool same = h == k;
  for (std::size_t i = 0; i < h.igs().size(); ++i)
    for (std::size_t j = same ? i + 1 : 0; j < k.igs().size(); ++j)
      b.add(g.commutator(h.igs()[i], k.igs()[j]));
  std::vector<Element> gens = h.igs();
  if (!same) gens.insert(gens.end(), k.igs().begin(), k.igs().end());
  close_under_conjugation(b, h.ambient(), gens);
  return b.finish();
}

CoprimeProduct product_coprime(const Subgroup& h, const Subgroup& k) {
  require_same_ambient(h, k, "product_coprime");
  if (gcd(h.order(), k.order()) != 1)
    throw PreconditionError("product_coprime: orders " + to_string(h.order()) + " and " +
                            to_string(k.order()) + " are not coprime");
  CoprimeProduct out;
  out.group = join(h, k);
  out.permutable = out.group.order() == h.order() * k.order();
  return out;
}

Element coset_representative(const Subgroup& n, Element x) {
  const PcGroup& g = n.group();
  for (const auto& u : n.igs()) {
    const std::size_t d = u.depth();
    if (const int e = x.exps[d]) x = g.multiply(x, g.power(u, static_cast<std::uint64_t>(g.relative_order(d) - e)));
  }
  return x;
}

Element sigma_part(const PcGroup& g, const Element& x, const PrimeSet& sigma) {
  const Order o = g.element_order(x);
  const Order os = fitheight::sigma_part(o, sigma);
  if (os == 1) return g.identity();
  const Order rest = o / os;
  if (rest == 1) return x;
  const Order e = rest * mod_inverse(rest, os);
  return g.power(x, e % o);
}

Subgroup sigma_parts(const Subgroup& h, const PrimeSet& sigma) {
  IgsBuilder b(h.ambient());
  for (const auto& u : h.igs()) b.add(sigma_part(h.group(), u, sigma));
  return b.finish();
}

Subgroup section_kernel(const Subgroup& p, const Subgroup& q, const Subgroup& r, const Limits& limits) {
  require_same_ambient(p, q, "section_kernel");
  require_same_ambient(q, r, "section_kernel");
  if (!is_subgroup_of(r, q) || !normalizes(q, r))
    throw PreconditionError("section_kernel: R is not a normal subgroup of Q");
  if (!normalizes(p, q) || !normalizes(p, r))
    throw PreconditionError("section_kernel: P does not normalize Q and R");
  const PcGroup& g = p.group();
  Subgroup stab = p;
  for (const auto& x : q.igs()) {
    if (contains(r, x)) continue;
    const Element start = coset_representative(r, x);
    stab = detail::stabilizer(
        stab, start.exps,
        [&](const std::vector<int>& pt, const Element& by, const Element& by_inv) {
          Element y{g.id(), pt};
          return coset_representative(r, g.multiply(g.multiply(by_inv, y), by)).exps;
        },
        limits);
    if (stab.is_trivial()) break;
  }
  return stab;
}

Subgroup centralizer(const Subgroup& p, const Subgroup& q, const Limits& limits) {
  return section_kernel(p, q, Subgroup::trivial(q.ambient()), limits);
}

Subgroup conjugate(const Subgroup& h, const Element& g) {
  Conjugator c(h.group(), g);
  std::vector<Element> gens;
  gens.reserve(h.igs().size());
  for (const auto& u : h.igs()) gens.push_back(c(u));
  return induced_pcgs(h.ambient(), gens);
}

Subgroup normalizer(const Subgroup& u, const Subgroup& s, const Limits& limits) {
  require_same_ambient(u, s, "normalizer");
  const GroupPtr& amb = s.ambient();
  const std::size_t n = amb->size();
  auto flatten = [](const Subgroup& h) {
    std::vector<int> pt;
    for (const auto& e : h.igs()) pt.insert(pt.end(), e.exps.begin(), e.exps.end());
    return pt;
  };
  return detail::stabilizer(
      u, flatten(s),
      [&](const std::vector<int>& pt, const Element& by, const Element& by_inv) {
        std::vector<Element> gens;
        for (std::size_t off = 0; off < pt.size(); off += n) {
          Element x{amb->id(), std::vector<int>(pt.begin() + static_cast<std::ptrdiff_t>(off),
                                                pt.begin() + static_cast<std::ptrdiff_t>(off + n))};
          gens.push_back(amb->multiply(amb->multiply(by_inv, x), by));
        }
        return flatten(induced_pcgs(amb, gens));
      },
      limits);
}

Subgroup intersect_normal(const Subgroup& p, const Subgroup& n, const Limits& limits) {
  require_same_ambient(p, n, "intersect_normal");
  const PcGroup& g = p.group();
  return detail::stabilizer(
      p, g.identity().exps,
      [&](const std::vector<int>& pt, const Element& by, const Element&) {
        return coset_representative(n, g.multiply(Element{g.id(), pt}, by)).exps;
      },
      limits);
}

Subgroup hall_subgroup(const Subgroup& u, const PrimeSet& sigma, const Limits& limits) {
  const PcGroup& g = u.group();
  IgsBuilder hall(u.ambient());
  Subgroup s = Subgroup::trivial(u.ambient());
  for (std::size_t i = u.igs().size(); i-- > 0;) {
    const Element& ui = u.igs()[i];
    const std::size_t d = ui.depth();
    if (!sigma.contains(g.relative_order(d))) continue;
    Element step = ui;
    if (!s.is_trivial() && !(conjugate(s, ui) == s)) {
      const Subgroup norm = normalizer(u.tail(i), s, limits);
      auto it = std::find_if(norm.igs().begin(), norm.igs().end(),
                             [d](const Element& x) { return x.depth() == d; });
      if (it == norm.igs().end()) throw EngineBug("hall_subgroup: Frattini step found no normalizing element");
      step = *it;
    }
    hall.add(sigma_part(g, step, sigma));
    s = hall.finish();
  }
  return s;
}

Subgroup sylow_subgroup(const Subgroup& u, Prime p, const Limits& limits) {
  return hall_subgroup(u, PrimeSet{p}, limits);
}

bool is_p_group(const Subgroup& h, Prime p) {
  return std::all_of(h.igs().begin(), h.igs().end(),
                     [&](const Element& x) { return h.group().relative_order(x.depth()) == p; });
}

}  // namespace fitheight
