#pragma once

#include <string_view>
#include <vector>

#include "fitheight/constructors.hpp"
#include "fitheight/subgroup.hpp"

namespace fitheight {

enum class SeriesKind { Derived, LowerCentral, LowerNilpotent, UpperFitting, PiSeries };

std::string_view to_string(SeriesKind kind);

/// A chain of subgroups of one ambient group. Upper series are stored as
/// preimages in the ambient group, so every term is a genuine Subgroup.
struct SeriesReport {
  SeriesKind kind;
  std::vector<Subgroup> terms;
  int length = 0;
};

/// H = D_0 > D_1 > ... > D_d = 1; length d.
SeriesReport derived_series(const Subgroup& h);
int derived_length(const Subgroup& h);

/// H = g_1 >= g_2 >= ... down to the first repeated term (which is kept
/// once); length is the number of strict descents.
SeriesReport lower_central_series(const Subgroup& h);
Subgroup nilpotent_residual(const Subgroup& h);
bool is_nilpotent(const Subgroup& h);

/// H = R^0 > R^1 > ... > R^h = 1 with R^{i+1} the nilpotent residual of R^i.
SeriesReport lower_nilpotent_series(const Subgroup& h);
int fitting_height(const Subgroup& h);

/// Some minimal normal subgroup of H (normal in H), chosen
/// deterministically. Throws PreconditionError for H = 1 and
/// BudgetExceeded if the vector enumeration exceeds `max_spins`.
Subgroup minimal_normal_subgroup(const Subgroup& h, std::size_t max_spins = 1'000'000);

/// Largest normal sigma-subgroup of G (the whole ambient group).
Subgroup o_pi(const GroupPtr& g, const PrimeSet& sigma, const Limits& limits = {});

Subgroup fitting_subgroup(const GroupPtr& g, const Limits& limits = {});
/// 1 = F_0 < F_1 < ... < F_h = G.
SeriesReport upper_fitting_series(const GroupPtr& g, const Limits& limits = {});

/// Upper sigma'sigma-series 1 = P_0 <= N_0 <= P_1 <= ... = G with repeated
/// terms dropped. length is the number of nontrivial sigma-steps.
SeriesReport pi_series(const GroupPtr& g, const PrimeSet& sigma, const Limits& limits = {});
int pi_length(const GroupPtr& g, const PrimeSet& sigma, const Limits& limits = {});

/// Maximal derived length of the Sylow subgroups of H, taken from the
/// basis members for the primes of |H| (each must lie in H).
int delta(const Subgroup& h, const SylowBasis& basis);

}  // namespace fitheight
