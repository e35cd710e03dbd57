#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "fitheight/constructors.hpp"
#include "fitheight/quotient.hpp"
#include "fitheight/subgroup.hpp"

namespace fitheight {

struct TowerEntry {
  Prime prime;
  Subgroup group;
};

/// (P_1, ..., P_h), stored bottom-up: entries()[0] is P_1.
class Tower {
 public:
  explicit Tower(GroupPtr ambient, std::vector<TowerEntry> entries = {});

  const GroupPtr& ambient() const { return ambient_; }
  const std::vector<TowerEntry>& entries() const { return entries_; }
  std::size_t length() const { return entries_.size(); }
  /// pi*(P_i) for i = 1..h: the prime of a nontrivial entry, 1 otherwise.
  std::vector<Prime> primes() const;

 private:
  GroupPtr ambient_;
  std::vector<TowerEntry> entries_;
};

struct TowerCheck {
  bool valid = false;
  /// First violated condition (1: prime-power subgroup, 2: normalizing,
  /// 3: nontrivial bars, 4: adjacent primes differ); 0 when valid.
  int condition = 0;
  /// 1-based entry index where the condition fails.
  std::size_t index = 0;
  std::string reason;
  /// |bar P_i| for i = 1..h (filled when conditions 1 and 2 hold).
  std::vector<Order> bars;
  /// R_i = C_{P_i}(bar P_{i+1}), R_h = 1; bar P_i = P_i / R_i.
  std::vector<Subgroup> kernels;
};

TowerCheck validate(const Tower& t, const Limits& limits = {});

struct BlockStats {
  PrimeSet sigma;
  int nu = 0;
  int beta = 0;
  /// Maximal sigma-runs as 1-based closed intervals.
  std::vector<std::pair<std::size_t, std::size_t>> blocks;
  /// |T_j| for j = 1..h where T_j = P_h P_{h-1} ... P_j.
  std::vector<Order> tail_products;
};

BlockStats stats(const Tower& t, const PrimeSet& sigma);
/// T_j = <P_j, ..., P_h> for j = 1..h.
std::vector<Subgroup> tail_subgroups(const Tower& t);

/// Result of removing P_j, ..., P_{j+s}: either a tower, or the flanking
/// primes agree (the only other outcome the deletion rule allows).
struct Deletion {
  std::optional<Tower> tower;
  bool witness = false;
  Prime flank = 0;
};

/// Throws PreconditionError on bad indices and EngineBug if neither
/// outcome of the rule occurs.
Deletion delete_entries(const Tower& t, std::size_t j, std::size_t s, const Limits& limits = {});

struct Projection {
  Quotient quotient;
  Tower tower;
  TowerCheck check;
};

/// (P_i N / N, i < h) in G/N. Checks P_j meet N inside C_{P_j}(P_h) for
/// j < h; throws PreconditionError naming the first failing j.
Projection project_mod(const Tower& t, const Subgroup& n, const Limits& limits = {});

enum class SearchMode { Exact, Budgeted };

struct SearchOptions {
  SearchMode mode = SearchMode::Exact;
  /// Exact mode refuses groups above this order.
  Order max_order = 100'000;
  /// Candidate nodes explored before giving up (budgeted mode returns the
  /// best tower so far; exact mode throws).
  std::size_t max_nodes = 20'000;
  /// Budgeted mode: orbit cap for normalizer computations. Past it the
  /// search continues in the enclosing group and checks normalizing
  /// directly, so it may miss towers but never returns an invalid one.
  std::size_t normalizer_orbit = 2'000;
  Limits limits{};
};

struct SearchResult {
  Tower tower;
  TowerCheck check;
  /// h(G): every tower has at most this length.
  int upper_bound = 0;
  bool certified = false;
  std::size_t nodes = 0;
};

/// Longest tower found by descending from P_h with candidates drawn from
/// Sylow subgroups of the lower nilpotent series of the running
/// normalizer intersection. Exact mode throws EngineBug if the result
/// cannot be certified against h(G).
SearchResult search_max(const BuiltGroup& g, const SearchOptions& options = {});

}  // namespace fitheight
