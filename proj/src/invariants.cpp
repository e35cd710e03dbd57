#include "fitheight/invariants.hpp"

#include <algorithm>
#include <optional>
#include <random>

#include "fitheight/errors.hpp"
#include "fitheight/quotient.hpp"

namespace fitheight {

std::string_view to_string(SeriesKind kind) {
  switch (kind) {
    case SeriesKind::Derived: return "derived";
    case SeriesKind::LowerCentral: return "lower-central";
    case SeriesKind::LowerNilpotent: return "lower-nilpotent";
    case SeriesKind::UpperFitting: return "upper-fitting";
    case SeriesKind::PiSeries: return "pi-series";
  }
  return "unknown";
}

SeriesReport derived_series(const Subgroup& h) {
  SeriesReport s{SeriesKind::Derived, {h}, 0};
  while (!s.terms.back().is_trivial()) {
    Subgroup next = commutator_subgroup(s.terms.back(), s.terms.back());
    if (next == s.terms.back()) throw PreconditionError("derived_series: perfect subgroup in a soluble group");
    s.terms.push_back(std::move(next));
  }
  s.length = static_cast<int>(s.terms.size()) - 1;
  return s;
}

int derived_length(const Subgroup& h) { return derived_series(h).length; }

SeriesReport lower_central_series(const Subgroup& h) {
  SeriesReport s{SeriesKind::LowerCentral, {h}, 0};
  for (;;) {
    Subgroup next = commutator_subgroup(s.terms.back(), h);
    if (next == s.terms.back()) break;
    s.terms.push_back(std::move(next));
  }
  s.length = static_cast<int>(s.terms.size()) - 1;
  return s;
}

Subgroup nilpotent_residual(const Subgroup& h) { return lower_central_series(h).terms.back(); }

bool is_nilpotent(const Subgroup& h) { return nilpotent_residual(h).is_trivial(); }

SeriesReport lower_nilpotent_series(const Subgroup& h) {
  SeriesReport s{SeriesKind::LowerNilpotent, {h}, 0};
  while (!s.terms.back().is_trivial()) {
    Subgroup next = nilpotent_residual(s.terms.back());
    if (next == s.terms.back()) throw EngineBug("lower_nilpotent_series: residual did not descend");
    s.terms.push_back(std::move(next));
  }
  s.length = static_cast<int>(s.terms.size()) - 1;
  return s;
}

int fitting_height(const Subgroup& h) { return lower_nilpotent_series(h).length; }

// ------------------------------------------------------ minimal normal

namespace {

using Vec = std::vector<int>;

// Row-reduced basis of a subspace of GF(p)^n, pivots strictly increasing.
struct Subspace {
  Prime p;
  std::size_t n;
  std::vector<Vec> rows;
  std::vector<std::size_t> pivots;

  // Reduces v against the rows; returns the remainder.
  Vec reduce(Vec v) const {
    for (std::size_t k = 0; k < rows.size(); ++k) {
      const int c = v[pivots[k]];
      if (c == 0) continue;
      for (std::size_t i = 0; i < n; ++i)
        v[i] = static_cast<int>((v[i] + static_cast<long long>(p - c) * rows[k][i]) % p);
    }
    return v;
  }

  // Adds v if independent; keeps the echelon form fully reduced.
  bool add(Vec v) {
    v = reduce(std::move(v));
    auto it = std::find_if(v.begin(), v.end(), [](int x) { return x != 0; });
    if (it == v.end()) return false;
    const auto piv = static_cast<std::size_t>(it - v.begin());
    const auto inv = static_cast<long long>(static_cast<unsigned>(mod_inverse(Order(*it), Order(p))));
    for (auto& x : v) x = static_cast<int>(x * inv % p);
    for (auto& row : rows)
      if (const int c = row[piv])
        for (std::size_t i = 0; i < n; ++i)
          row[i] = static_cast<int>((row[i] + static_cast<long long>(p - c) * v[i]) % p);
    const auto pos = static_cast<std::size_t>(std::lower_bound(pivots.begin(), pivots.end(), piv) - pivots.begin());
    rows.insert(rows.begin() + static_cast<std::ptrdiff_t>(pos), std::move(v));
    pivots.insert(pivots.begin() + static_cast<std::ptrdiff_t>(pos), piv);
    return true;
  }

  std::size_t dim() const { return rows.size(); }
};

Vec apply(const std::vector<Vec>& m, const Vec& v, Prime p) {
  // Row-vector convention: v * M.
  Vec out(v.size(), 0);
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (v[i] == 0) continue;
    for (std::size_t j = 0; j < v.size(); ++j) out[j] = static_cast<int>((out[j] + static_cast<long long>(v[i]) * m[i][j]) % p);
  }
  return out;
}

Subspace spin(const Vec& v, const std::vector<std::vector<Vec>>& action, Prime p) {
  Subspace s{p, v.size(), {}, {}};
  std::vector<Vec> work{v};
  s.add(v);
  while (!work.empty()) {
    Vec x = std::move(work.back());
    work.pop_back();
    for (const auto& m : action) {
      Vec y = apply(m, x, p);
      if (s.add(y)) work.push_back(std::move(y));
    }
  }
  return s;
}

using Mat = std::vector<Vec>;

Mat identity(std::size_t n) {
  Mat m(n, Vec(n, 0));
  for (std::size_t i = 0; i < n; ++i) m[i][i] = 1;
  return m;
}

Mat multiply(const Mat& a, const Mat& b, Prime p) {
  Mat out;
  out.reserve(a.size());
  for (const auto& row : a) out.push_back(apply(b, row, p));
  return out;
}

Mat transpose(const Mat& a, std::size_t cols) {
  Mat t(cols, Vec(a.size(), 0));
  for (std::size_t i = 0; i < a.size(); ++i)
    for (std::size_t j = 0; j < cols; ++j) t[j][i] = a[i][j];
  return t;
}

// Basis of {x : x * a = 0}; `a` has `cols` columns.
std::vector<Vec> left_kernel(const Mat& a, std::size_t cols, Prime p) {
  const std::size_t k = a.size();
  Mat aug(k);
  for (std::size_t i = 0; i < k; ++i) {
    aug[i] = a[i];
    aug[i].resize(cols + k, 0);
    aug[i][cols + i] = 1;
  }
  std::size_t row = 0;
  for (std::size_t col = 0; col < cols && row < k; ++col) {
    std::size_t piv = row;
    while (piv < k && aug[piv][col] == 0) ++piv;
    if (piv == k) continue;
    std::swap(aug[piv], aug[row]);
    const auto inv = static_cast<long long>(static_cast<unsigned>(mod_inverse(Order(aug[row][col]), Order(p))));
    for (auto& x : aug[row]) x = static_cast<int>(x * inv % p);
    for (std::size_t r = 0; r < k; ++r)
      if (r != row && aug[r][col] != 0) {
        const long long c = aug[r][col];
        for (std::size_t j = 0; j < cols + k; ++j) aug[r][j] = static_cast<int>((aug[r][j] + (p - c) * aug[row][j]) % p);
      }
    ++row;
  }
  std::vector<Vec> out;
  for (std::size_t r = row; r < k; ++r) out.emplace_back(aug[r].begin() + static_cast<std::ptrdiff_t>(cols), aug[r].end());
  return out;
}

// Nonzero vector of w fixed by every matrix, if any.
std::optional<Vec> fixed_vector(const Subspace& w, const std::vector<Mat>& action, Prime p) {
  // Coefficients c (in w's basis) with (c W)(M - I) = 0 for all M.
  const std::size_t k = w.dim(), n = w.n;
  Mat images(k);  // row i: w_i (M_1 - I) | w_i (M_2 - I) | ...
  for (std::size_t i = 0; i < k; ++i) {
    for (const auto& m : action) {
      Vec y = apply(m, w.rows[i], p);
      for (std::size_t j = 0; j < n; ++j) y[j] = static_cast<int>((y[j] + p - w.rows[i][j]) % p);
      images[i].insert(images[i].end(), y.begin(), y.end());
    }
  }
  const auto ker = left_kernel(images, n * action.size(), p);
  if (ker.empty()) return std::nullopt;
  Vec out(n, 0);
  for (std::size_t i = 0; i < k; ++i)
    if (const int c = ker[0][i])
      for (std::size_t j = 0; j < n; ++j) out[j] = static_cast<int>((out[j] + static_cast<long long>(c) * w.rows[i][j]) % p);
  return out;
}

// Action of the module generators restricted to w, in w's coordinates.
std::vector<Mat> restrict_action(const Subspace& w, const std::vector<Mat>& action, Prime p) {
  std::vector<Mat> out;
  for (const auto& m : action) {
    Mat r;
    for (const auto& row : w.rows) {
      Vec y = apply(m, row, p);
      Vec c(w.dim(), 0);
      // Rows are fully reduced, so the pivot entries are the coordinates.
      for (std::size_t k = 0; k < w.dim(); ++k) c[k] = y[w.pivots[k]];
      r.push_back(std::move(c));
    }
    out.push_back(std::move(r));
  }
  return out;
}

// Monic irreducible polynomials of degree 1..3 over GF(p), low coefficients
// first (the leading 1 is implicit).
std::vector<Vec> small_irreducibles(Prime p) {
  std::vector<Vec> out;
  for (std::size_t d = 1; d <= 3; ++d) {
    Vec c(d, 0);
    for (;;) {
      bool root = false;
      if (d > 1)
        for (long long x = 0; x < static_cast<long long>(p) && !root; ++x) {
          long long v = 1;
          for (std::size_t i = d; i-- > 0;) v = (v * x + c[i]) % p;
          root = v == 0;
        }
      if (!root) out.push_back(c);
      std::size_t i = 0;
      while (i < d && ++c[i] == static_cast<int>(p)) c[i++] = 0;
      if (i == d) break;
    }
  }
  return out;
}

struct Split {
  bool irreducible = false;
  std::optional<Subspace> proper;
};

// Nullspace spinning test. For theta in the enveloping algebra and an
// irreducible f with nullity(f(theta)) = deg f, the module is irreducible iff
// one nonzero null vector spins to everything and one null vector of the
// transpose spins to everything under the transposed action. Gives up
// (neither field set) after `tries` algebra elements without such an f.
Split nullspace_split(const std::vector<Mat>& action, std::size_t dim, Prime p, std::size_t tries) {
  std::mt19937_64 rng(0x5eed);
  std::vector<Mat> pool(action.begin(), action.end());
  std::vector<Mat> dual;
  for (const auto& m : action) dual.push_back(transpose(m, dim));
  const auto polys = small_irreducibles(p);
  for (std::size_t t = 0; t < tries; ++t) {
    std::uniform_int_distribution<std::size_t> pick(0, pool.size() - 1);
    pool.push_back(multiply(pool[pick(rng)], pool[pick(rng)], p));
    Mat theta(dim, Vec(dim, 0));
    for (int term = 0; term < 3; ++term) {
      const Mat& g = pool[pick(rng)];
      const long long c = std::uniform_int_distribution<long long>(1, static_cast<long long>(p) - 1)(rng);
      for (std::size_t i = 0; i < dim; ++i)
        for (std::size_t j = 0; j < dim; ++j) theta[i][j] = static_cast<int>((theta[i][j] + c * g[i][j]) % p);
    }
    for (const auto& f : polys) {
      // Horner: f(theta) = (((theta + c_{d-1}) theta + c_{d-2}) ...).
      Mat ft = theta;
      for (std::size_t i = 0; i < dim; ++i) ft[i][i] = static_cast<int>((ft[i][i] + f.back()) % p);
      for (std::size_t k = f.size() - 1; k-- > 0;) {
        ft = multiply(ft, theta, p);
        for (std::size_t i = 0; i < dim; ++i) ft[i][i] = static_cast<int>((ft[i][i] + f[k]) % p);
      }
      const auto null = left_kernel(ft, dim, p);
      if (null.empty()) continue;
      Subspace s = spin(null[0], action, p);
      if (s.dim() < dim) return {false, std::move(s)};
      if (null.size() != f.size()) continue;
      const Subspace sd = spin(left_kernel(transpose(ft, dim), dim, p)[0], dual, p);
      if (sd.dim() == dim) return {true, std::nullopt};
      // The annihilator of a proper dual submodule is a proper submodule.
      Subspace ann{p, dim, {}, {}};
      for (auto& v : left_kernel(transpose(sd.rows, dim), sd.dim(), p)) ann.add(std::move(v));
      return {false, std::move(ann)};
    }
  }
  return {};
}

// Basis vectors (in the coordinates of `action`) of an irreducible submodule.
std::vector<Vec> irreducible_submodule(std::vector<Mat> action, std::size_t n, Prime p, std::size_t max_spins) {
  // `basis` expresses the current module in the original coordinates.
  std::vector<Vec> basis = identity(n);
  std::size_t spins = 0;
  auto descend = [&](const Subspace& w) {
    std::vector<Vec> next;
    for (const auto& row : w.rows) {
      Vec v(n, 0);
      for (std::size_t k = 0; k < row.size(); ++k)
        if (row[k])
          for (std::size_t j = 0; j < n; ++j) v[j] = static_cast<int>((v[j] + static_cast<long long>(row[k]) * basis[k][j]) % p);
      next.push_back(std::move(v));
    }
    action = restrict_action(w, action, p);
    basis = std::move(next);
  };

  for (;;) {
    const std::size_t dim = basis.size();
    if (dim == 1) return basis;
    Subspace whole{p, dim, {}, {}};
    for (auto& e : identity(dim)) whole.add(std::move(e));
    if (auto f = fixed_vector(whole, action, p)) {
      Subspace line{p, dim, {}, {}};
      line.add(*f);
      descend(line);
      return basis;
    }
    Split split = nullspace_split(action, dim, p, 64);
    if (split.irreducible) return basis;
    if (split.proper) {
      descend(*split.proper);
      continue;
    }
    // No usable algebra element: spin vectors in lexicographic order, first
    // nonzero entry 1.
    std::optional<Subspace> proper;
    Vec v(dim, 0);
    for (std::size_t lead = dim; lead-- > 0 && !proper;) {
      std::fill(v.begin(), v.end(), 0);
      v[lead] = 1;
      for (;;) {
        if (++spins > max_spins) throw BudgetExceeded("minimal_normal_subgroup: more than " + std::to_string(max_spins) + " spins");
        Subspace s = spin(v, action, p);
        if (s.dim() < dim) {
          proper = std::move(s);
          break;
        }
        std::size_t k = dim;
        while (k-- > lead + 1) {
          if (++v[k] < static_cast<int>(p)) break;
          v[k] = 0;
        }
        if (k == lead) break;
      }
    }
    if (!proper) return basis;
    descend(*proper);
  }
}

// Coordinates of x in an elementary abelian subgroup with igs `e`.
Vec coordinates(const PcGroup& g, const std::vector<Element>& e, Element x) {
  Vec c(e.size(), 0);
  for (std::size_t i = 0; i < e.size(); ++i) {
    const int k = x.exps[e[i].depth()];
    c[i] = k;
    if (k) x = g.multiply(g.power(g.inverse(e[i]), static_cast<std::uint64_t>(k)), x);
  }
  if (!x.is_identity()) throw EngineBug("coordinates: element outside the layer");
  return c;
}

}  // namespace

Subgroup minimal_normal_subgroup(const Subgroup& h, std::size_t max_spins) {
  if (h.is_trivial()) throw PreconditionError("minimal_normal_subgroup: trivial group");
  const PcGroup& g = h.group();
  const SeriesReport ds = derived_series(h);
  const Subgroup& d = ds.terms[ds.terms.size() - 2];
  const Prime p = *d.primes().begin();
  const Subgroup pd = sigma_parts(d, {p});
  // Top nontrivial agemo layer of the abelian p-group: exponent p.
  Subgroup e = pd;
  for (;;) {
    std::vector<Element> powers;
    for (const auto& x : e.igs()) powers.push_back(g.power(x, static_cast<std::uint64_t>(p)));
    Subgroup next = induced_pcgs(h.ambient(), powers);
    if (next.is_trivial()) break;
    e = std::move(next);
  }
  const auto& basis = e.igs();
  const std::size_t n = basis.size();
  std::vector<std::vector<Vec>> action;
  for (const auto& y : h.igs()) {
    const Element y_inv = g.inverse(y);
    std::vector<Vec> m;
    for (const auto& x : basis) m.push_back(coordinates(g, basis, g.multiply(g.multiply(y_inv, x), y)));
    action.push_back(std::move(m));
  }
  std::vector<Element> gens;
  for (const auto& v : irreducible_submodule(std::move(action), n, p, max_spins)) {
    Element x = g.identity();
    for (std::size_t i = 0; i < n; ++i)
      if (v[i]) x = g.multiply(x, g.power(basis[i], static_cast<std::uint64_t>(v[i])));
    gens.push_back(std::move(x));
  }
  return induced_pcgs(h.ambient(), gens);
}

// ------------------------------------------------------------- O_pi etc.

Subgroup o_pi(const GroupPtr& g, const PrimeSet& sigma, const Limits& limits) {
  const Subgroup whole = Subgroup::whole(g);
  const PrimeSet prs = g->primes();
  if (intersect(prs, sigma).empty()) return Subgroup::trivial(g);
  if (intersect(prs, sigma) == prs) return whole;
  // D: last nontrivial derived term, abelian and characteristic.
  const SeriesReport ds = derived_series(whole);
  const Subgroup& d = ds.terms[ds.terms.size() - 2];
  const Subgroup d_sigma = sigma_parts(d, sigma);
  if (!d_sigma.is_trivial()) {
    const Quotient q = quotient(d_sigma);
    return q.preimage(o_pi(q.image(), sigma, limits));
  }
  // D is a sigma'-group, so O_sigma(G) centralizes it: O_sigma(G) is the
  // sigma-part of C_H(D), where H/D = O_sigma(G/D).
  const Quotient q = quotient(d);
  const Subgroup h = q.preimage(o_pi(q.image(), sigma, limits));
  const Subgroup c = centralizer(h, d, limits);
  return sigma_parts(c, sigma);
}

Subgroup fitting_subgroup(const GroupPtr& g, const Limits& limits) {
  Subgroup f = Subgroup::trivial(g);
  for (Prime p : g->primes()) f = join(f, o_pi(g, {p}, limits));
  return f;
}

SeriesReport upper_fitting_series(const GroupPtr& g, const Limits& limits) {
  SeriesReport s{SeriesKind::UpperFitting, {Subgroup::trivial(g)}, 0};
  while (!s.terms.back().is_whole()) {
    const Quotient q = quotient(s.terms.back());
    Subgroup next = q.preimage(fitting_subgroup(q.image(), limits));
    if (next == s.terms.back()) throw EngineBug("upper_fitting_series: trivial Fitting subgroup");
    s.terms.push_back(std::move(next));
  }
  s.length = static_cast<int>(s.terms.size()) - 1;
  return s;
}

SeriesReport pi_series(const GroupPtr& g, const PrimeSet& sigma, const Limits& limits) {
  const PrimeSet co = complement(g->primes(), sigma);
  SeriesReport s{SeriesKind::PiSeries, {Subgroup::trivial(g)}, 0};
  bool want_sigma = false;
  int stalled = 0;
  while (!s.terms.back().is_whole()) {
    const Quotient q = quotient(s.terms.back());
    Subgroup next = q.preimage(o_pi(q.image(), want_sigma ? sigma : co, limits));
    if (next == s.terms.back()) {
      if (++stalled == 2) throw EngineBug("pi_series: no progress");
    } else {
      stalled = 0;
      if (want_sigma) ++s.length;
      s.terms.push_back(std::move(next));
    }
    want_sigma = !want_sigma;
  }
  return s;
}

int pi_length(const GroupPtr& g, const PrimeSet& sigma, const Limits& limits) {
  return pi_series(g, sigma, limits).length;
}

int delta(const Subgroup& h, const SylowBasis& basis) {
  int out = 0;
  for (Prime p : h.primes()) {
    const Subgroup& hp = basis.at(p);
    if (hp.order() != fitheight::sigma_part(h.order(), {p})) throw PreconditionError("delta: basis member is not a Sylow subgroup of H");
    if (!is_subgroup_of(hp, h)) throw PreconditionError("delta: basis member for " + std::to_string(p) + " is not in H");
    out = std::max(out, derived_length(hp));
  }
  return out;
}

}  // namespace fitheight
