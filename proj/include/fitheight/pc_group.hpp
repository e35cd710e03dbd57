#pragma once

#include <cstdint>
#include <memory>
#include <span>
#include <utility>
#include <vector>

#include "fitheight/order.hpp"

namespace fitheight {

class PcGroup;
using GroupPtr = std::shared_ptr<const PcGroup>;

/// (generator index, exponent). Generator indices are 0-based.
using Syllable = std::pair<int, long long>;
using Word = std::vector<Syllable>;

/// A group element in collected normal form g_0^{e_0} g_1^{e_1} ... with
/// 0 <= e_i < r_i. `group` tags the owning presentation so that mixing
/// elements of different groups is caught.
struct Element {
  std::uint64_t group = 0;
  std::vector<int> exps;

  bool operator==(const Element&) const = default;

  bool is_identity() const;
  /// Index of the first nonzero exponent, or exps.size() for the identity.
  std::size_t depth() const;
  int leading_exponent() const;
};

/// Consistent polycyclic presentation with prime relative orders, using
/// collection from the left. Immutable once built; share through GroupPtr.
///
/// Relations: g_i^{r_i} = power(i) and g_j^{g_i} = conjugate(i, j) for i < j,
/// both supported on generators with index > i.
class PcGroup {
 public:
  std::size_t size() const { return rel_orders_.size(); }
  std::uint64_t id() const { return id_; }
  const std::vector<Prime>& relative_orders() const { return rel_orders_; }
  Prime relative_order(std::size_t i) const { return rel_orders_[i]; }
  const Order& order() const { return order_; }
  PrimeSet primes() const;

  Element identity() const;
  Element generator(std::size_t i) const;
  /// Wraps an exponent vector, checking length and 0 <= e_i < r_i.
  Element element(std::vector<int> exps) const;

  /// Collected form of an arbitrary word (exponents may be >= r_i).
  Element normal_form(const Word& word) const;

  Element multiply(const Element& x, const Element& y) const;
  Element inverse(const Element& x) const;
  Element power(const Element& x, const Order& n) const;
  Element power(const Element& x, std::uint64_t n) const;
  /// x^y = y^{-1} x y.
  Element conjugate(const Element& x, const Element& y) const;
  /// [x, y] = x^{-1} y^{-1} x y.
  Element commutator(const Element& x, const Element& y) const;
  Order element_order(const Element& x) const;

  /// Value of g_i^{r_i}.
  const Element& power_relation(std::size_t i) const { return powers_[i]; }
  /// Value of g_j^{g_i} for i < j.
  Element conjugate_relation(std::size_t i, std::size_t j) const;
  /// True when g_j^{g_i} = g_j is recorded (i < j).
  bool commute(std::size_t i, std::size_t j) const;

  /// Normal-form word of an element (nonzero syllables, ascending).
  Word word(const Element& x) const;

  void check(const Element& x) const;

 private:
  friend class PcPresentation;
  PcGroup() = default;

  void collect(std::vector<int>& x, std::vector<Syllable>& stack) const;
  const Word* conjugate_word(std::size_t i, std::size_t j) const;
  bool row_bit(std::size_t i, std::size_t j) const;

  std::uint64_t id_ = 0;
  std::vector<Prime> rel_orders_;
  Order order_ = 1;
  std::vector<Element> powers_;
  std::vector<Word> power_words_;
  // Nontrivial conjugate relations, row i sorted by j.
  std::vector<std::vector<std::size_t>> conj_targets_;
  std::vector<std::vector<Word>> conj_words_;
  std::vector<std::vector<Element>> conj_values_;
  // Bitset per row marking nontrivial g_j^{g_i}.
  std::vector<std::vector<std::uint64_t>> nontrivial_;
};

/// Mutable presentation builder. Relations default to trivial
/// (g_i^{r_i} = 1, g_j^{g_i} = g_j). Only constructors and quotients should
/// use this: consistency is not checked here, only audited by tests.
class PcPresentation {
 public:
  explicit PcPresentation(std::vector<Prime> rel_orders);

  std::size_t size() const { return rel_orders_.size(); }

  /// Sets g_i^{r_i}; `value` is an exponent vector supported above i.
  void set_power(std::size_t i, std::vector<int> value);
  /// Sets g_j^{g_i} for i < j; `value` supported above i.
  void set_conjugate(std::size_t i, std::size_t j, std::vector<int> value);

  GroupPtr build() const;

 private:
  std::vector<Prime> rel_orders_;
  std::vector<std::vector<int>> powers_;
  std::vector<std::vector<std::pair<std::size_t, std::vector<int>>>> conjugates_;
};

}  // namespace fitheight
