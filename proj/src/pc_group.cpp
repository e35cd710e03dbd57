#include "fitheight/pc_group.hpp"

#include <algorithm>
#include <atomic>

#include "fitheight/errors.hpp"

namespace fitheight {

namespace {

std::atomic<std::uint64_t> next_group_id{1};

Word to_word(const std::vector<int>& exps) {
  Word w;
  for (std::size_t i = 0; i < exps.size(); ++i)
    if (exps[i]) w.emplace_back(static_cast<int>(i), exps[i]);
  return w;
}

// Pushes `w` repeated `times` so that it is consumed left to right.
void push_word(std::vector<Syllable>& stack, const Word& w, long long times) {
  if (times <= 0 || w.empty()) return;
  if (w.size() == 1) {
    stack.emplace_back(w[0].first, w[0].second * times);
    return;
  }
  for (long long t = 0; t < times; ++t)
    for (auto it = w.rbegin(); it != w.rend(); ++it) stack.push_back(*it);
}

}  // namespace

bool Element::is_identity() const {
  return std::all_of(exps.begin(), exps.end(), [](int e) { return e == 0; });
}

std::size_t Element::depth() const {
  for (std::size_t i = 0; i < exps.size(); ++i)
    if (exps[i]) return i;
  return exps.size();
}

int Element::leading_exponent() const {
  std::size_t d = depth();
  return d < exps.size() ? exps[d] : 0;
}

PrimeSet PcGroup::primes() const { return PrimeSet(rel_orders_.begin(), rel_orders_.end()); }

Element PcGroup::identity() const { return Element{id_, std::vector<int>(size(), 0)}; }

Element PcGroup::generator(std::size_t i) const {
  if (i >= size()) throw PreconditionError("generator index out of range");
  Element g = identity();
  g.exps[i] = 1;
  return g;
}

Element PcGroup::element(std::vector<int> exps) const {
  Element x{id_, std::move(exps)};
  check(x);
  return x;
}

void PcGroup::check(const Element& x) const {
  if (x.group != id_) throw PreconditionError("element belongs to a different group");
  if (x.exps.size() != size()) throw PreconditionError("element has wrong length");
  for (std::size_t i = 0; i < size(); ++i)
    if (x.exps[i] < 0 || static_cast<Prime>(x.exps[i]) >= rel_orders_[i])
      throw PreconditionError("exponent out of range");
}

bool PcGroup::row_bit(std::size_t i, std::size_t j) const {
  return (nontrivial_[i][j / 64] >> (j % 64)) & 1u;
}

bool PcGroup::commute(std::size_t i, std::size_t j) const {
  if (i == j) return true;
  if (i > j) std::swap(i, j);
  return !row_bit(i, j);
}

const Word* PcGroup::conjugate_word(std::size_t i, std::size_t j) const {
  const auto& targets = conj_targets_[i];
  auto it = std::lower_bound(targets.begin(), targets.end(), j);
  if (it == targets.end() || *it != j) return nullptr;
  return &conj_words_[i][static_cast<std::size_t>(it - targets.begin())];
}

Element PcGroup::conjugate_relation(std::size_t i, std::size_t j) const {
  if (i >= j || j >= size()) throw PreconditionError("conjugate_relation needs i < j < n");
  const auto& targets = conj_targets_[i];
  auto it = std::lower_bound(targets.begin(), targets.end(), j);
  if (it == targets.end() || *it != j) return generator(j);
  return conj_values_[i][static_cast<std::size_t>(it - targets.begin())];
}

void PcGroup::collect(std::vector<int>& x, std::vector<Syllable>& stack) const {
  const std::size_t n = size();
  std::vector<Syllable> tail;
  while (!stack.empty()) {
    auto [k, e] = stack.back();
    stack.pop_back();
    if (e == 0) continue;
    const auto uk = static_cast<std::size_t>(k);
    const long long r = rel_orders_[uk];

    std::size_t last = n;
    for (std::size_t j = n; j-- > uk + 1;)
      if (x[j]) {
        last = j;
        break;
      }

    bool commutes = true;
    if (last != n) {
      for (std::size_t j = uk + 1; j <= last; ++j)
        if (x[j] && row_bit(uk, j)) {
          commutes = false;
          break;
        }
    }

    if (commutes) {
      long long v = x[uk] + e;
      if (v < r) {
        x[uk] = static_cast<int>(v);
        continue;
      }
      x[uk] = static_cast<int>(v % r);
      if (last != n) {
        // prefix * g_k^{v mod r} * power^q * tail
        tail.clear();
        for (std::size_t j = uk + 1; j <= last; ++j)
          if (x[j]) {
            tail.emplace_back(static_cast<int>(j), x[j]);
            x[j] = 0;
          }
        for (auto it = tail.rbegin(); it != tail.rend(); ++it) stack.push_back(*it);
      }
      push_word(stack, power_words_[uk], v / r);
      continue;
    }

    // x * g_k = prefix * g_k^{x_k + 1} * tail^{g_k}
    if (e > 1) stack.emplace_back(k, e - 1);
    tail.clear();
    for (std::size_t j = uk + 1; j <= last; ++j)
      if (x[j]) {
        tail.emplace_back(static_cast<int>(j), x[j]);
        x[j] = 0;
      }
    for (auto it = tail.rbegin(); it != tail.rend(); ++it) {
      const auto j = static_cast<std::size_t>(it->first);
      if (const Word* w = conjugate_word(uk, j))
        push_word(stack, *w, it->second);
      else
        stack.push_back(*it);
    }
    if (x[uk] + 1 == r) {
      x[uk] = 0;
      push_word(stack, power_words_[uk], 1);
    } else {
      x[uk] += 1;
    }
  }
}

Element PcGroup::normal_form(const Word& word) const {
  Element x = identity();
  std::vector<Syllable> stack;
  for (auto it = word.rbegin(); it != word.rend(); ++it) {
    if (it->first < 0 || static_cast<std::size_t>(it->first) >= size())
      throw PreconditionError("normal_form: generator index out of range");
    if (it->second < 0) throw PreconditionError("normal_form: negative exponent");
    stack.push_back(*it);
  }
  collect(x.exps, stack);
  return x;
}

Element PcGroup::multiply(const Element& x, const Element& y) const {
  if (x.group != id_ || y.group != id_)
    throw PreconditionError("multiply: elements of different groups");
  Element z = x;
  std::vector<Syllable> stack;
  for (std::size_t j = y.exps.size(); j-- > 0;)
    if (y.exps[j]) stack.emplace_back(static_cast<int>(j), y.exps[j]);
  collect(z.exps, stack);
  return z;
}

Element PcGroup::inverse(const Element& x) const {
  if (x.group != id_) throw PreconditionError("inverse: element of a different group");
  // z = x * y stays in G_k after clearing positions < k; y is already a
  // normal-form word because its syllables are appended in index order.
  Element y = identity();
  std::vector<int> z = x.exps;
  std::vector<Syllable> stack;
  for (std::size_t k = 0; k < size(); ++k) {
    if (!z[k]) continue;
    int m = static_cast<int>(rel_orders_[k]) - z[k];
    y.exps[k] = m;
    stack.emplace_back(static_cast<int>(k), m);
    collect(z, stack);
  }
  return y;
}

Element PcGroup::power(const Element& x, std::uint64_t n) const {
  Element result = identity();
  Element base = x;
  while (n) {
    if (n & 1u) result = multiply(result, base);
    n >>= 1u;
    if (n) base = multiply(base, base);
  }
  return result;
}

Element PcGroup::power(const Element& x, const Order& n) const {
  if (n < 0) return power(inverse(x), Order(-n));
  Element result = identity();
  Element base = x;
  Order m = n;
  while (m != 0) {
    if (bit_test(m, 0)) result = multiply(result, base);
    m >>= 1;
    if (m != 0) base = multiply(base, base);
  }
  return result;
}

Element PcGroup::conjugate(const Element& x, const Element& y) const {
  return multiply(multiply(inverse(y), x), y);
}

Element PcGroup::commutator(const Element& x, const Element& y) const {
  return multiply(inverse(multiply(y, x)), multiply(x, y));
}

Order PcGroup::element_order(const Element& x) const {
  check(x);
  Order o = 1;
  Element y = x;
  while (!y.is_identity()) {
    Prime r = rel_orders_[y.depth()];
    y = power(y, static_cast<std::uint64_t>(r));
    o *= r;
  }
  return o;
}

Word PcGroup::word(const Element& x) const { return to_word(x.exps); }

PcPresentation::PcPresentation(std::vector<Prime> rel_orders)
    : rel_orders_(std::move(rel_orders)),
      powers_(rel_orders_.size(), std::vector<int>(rel_orders_.size(), 0)),
      conjugates_(rel_orders_.size()) {}

void PcPresentation::set_power(std::size_t i, std::vector<int> value) {
  if (i >= size() || value.size() != size()) throw PreconditionError("set_power: bad index or length");
  powers_[i] = std::move(value);
}

void PcPresentation::set_conjugate(std::size_t i, std::size_t j, std::vector<int> value) {
  if (i >= j || j >= size() || value.size() != size())
    throw PreconditionError("set_conjugate: bad index or length");
  conjugates_[i].emplace_back(j, std::move(value));
}

GroupPtr PcPresentation::build() const {
  const std::size_t n = size();
  auto supported_above = [n](const std::vector<int>& v, std::size_t i) {
    for (std::size_t k = 0; k <= i && k < n; ++k)
      if (v[k]) return false;
    return true;
  };

  std::shared_ptr<PcGroup> g(new PcGroup());
  g->id_ = next_group_id.fetch_add(1);
  g->rel_orders_ = rel_orders_;
  for (Prime r : rel_orders_) {
    if (!is_prime(r)) throw PreconditionError("relative order " + std::to_string(r) + " is not prime");
    g->order_ *= r;
  }
  const std::size_t words = (n + 63) / 64;
  g->nontrivial_.assign(n, std::vector<std::uint64_t>(words, 0));
  g->conj_targets_.resize(n);
  g->conj_words_.resize(n);
  g->conj_values_.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    const auto& p = powers_[i];
    if (!supported_above(p, i)) throw PreconditionError("power relation not supported above its generator");
    for (std::size_t k = 0; k < n; ++k)
      if (p[k] < 0 || static_cast<Prime>(p[k]) >= rel_orders_[k])
        throw PreconditionError("power relation exponent out of range");
    g->powers_.push_back(Element{g->id_, p});
    g->power_words_.push_back(to_word(p));

    auto rels = conjugates_[i];
    std::sort(rels.begin(), rels.end(), [](const auto& a, const auto& b) { return a.first < b.first; });
    for (const auto& [j, v] : rels) {
      if (!supported_above(v, i)) throw PreconditionError("conjugate relation not supported above its generator");
      bool trivial = v[j] == 1;
      for (std::size_t k = 0; k < n && trivial; ++k)
        if (k != j && v[k]) trivial = false;
      if (trivial) continue;
      if (!g->conj_targets_[i].empty() && g->conj_targets_[i].back() == j)
        throw PreconditionError("conjugate relation set twice");
      g->conj_targets_[i].push_back(j);
      g->conj_words_[i].push_back(to_word(v));
      g->conj_values_[i].push_back(Element{g->id_, v});
      g->nontrivial_[i][j / 64] |= std::uint64_t{1} << (j % 64);
    }
  }
  return g;
}

}  // namespace fitheight
