#pragma once

#include <cstddef>
#include <limits>
#include <optional>
#include <stop_token>
#include <string>

#include "torinv/lattice.hpp"

namespace torinv {

using intlin::AbelianGroupStructure;

inline constexpr std::size_t kUncapped = std::numeric_limits<std::size_t>::max();

/// 3 for nonabelian groups of order >= 8, 5 otherwise, uncapped for cyclic groups.
std::size_t default_degree_cap(const FiniteGroup& g);

struct CohomologyOptions {
  /// Unset means default_degree_cap.
  std::optional<std::size_t> degree_cap;
  std::stop_token stop;
};

struct CohomologyResult {
  std::string group;
  /// Describes the coefficients, e.g. "Z[G/H]" or "M (x) Q/Z".
  std::string coefficient;
  std::size_t degree = 0;
  AbelianGroupStructure value;
  /// Copies of Q/Z split off the value; only H^0 with Q/Z coefficients has any.
  std::size_t divisible_rank = 0;

  /// "Z/2", "(Q/Z)^2 + Z/3", ...
  std::string value_string() const;
};

/// Normalized inhomogeneous cochain differential d^i : C^i -> C^{i+1}, where
/// C^i has basis (g_1..g_i, b) with every g_k != 1, tuples in lexicographic
/// element-index order and the lattice basis index b fastest.
intlin::SparseMatrix normalized_differential(const GLattice& m, std::size_t i);
std::size_t normalized_cochain_rank(const GLattice& m, std::size_t i);

/// H^i(G, M). Cyclic groups use the 2-periodic resolution (g - 1, norm);
/// other groups the normalized cochain complex.
/// Throws DegreeCapExceeded past the degree cap.
CohomologyResult cohomology(const GLattice& m, std::size_t i, const CohomologyOptions& opts = {});

/// H^i(G, M (x) Q/Z): H^{i+1}(G, M) for i >= 1; for i = 0 the divisible part
/// (Q/Z)^{rank M^G} plus H^1(G, M).
CohomologyResult cohomology_qz(const GLattice& m, std::size_t i, const CohomologyOptions& opts = {});

inline constexpr std::size_t kBruteForceSizeCap = 100000;

/// Unnormalized cochains on all of G^i, as a single dense kernel/image
/// problem. Requires i <= 2 and |G|^{i+1} * rank(M) <= 1e5; throws SizeExceeded.
CohomologyResult brute_force_cohomology(const GLattice& m, std::size_t i);

struct ShapiroVerdict {
  CohomologyResult induced;     // H^i(G, Z[G/H])
  CohomologyResult restricted;  // H^i(H, Z)
  bool equal = false;
};
ShapiroVerdict shapiro_compare(const GroupPtr& g, const ElementSet& h, std::size_t i,
                               const CohomologyOptions& opts = {});

/// Drops every cached differential.
void clear_cohomology_cache();

}  // namespace torinv
