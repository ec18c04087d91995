#pragma once

#include <optional>
#include <string>
#include <vector>

#include "torinv/gcohom.hpp"
#include "torinv/lattice.hpp"

namespace torinv {

enum class TorusProvenance { norm_one, weil_restriction, quotient, explicit_lattice };
std::string to_string(TorusProvenance p);

/// Character-level data of an extension 1 -> T -> P -> G_m^n -> 1 with P
/// quasi-split: 0 -> Z^n -> P^ -> T^ -> 0.
struct FamilyDatum {
  std::size_t n = 0;
  GLattice phat;
  /// rank(P^) x n, the characters of G_m^n inside P^.
  IntMatrix inclusion;
  /// P^ is a free Z[G]-module.
  bool phat_free = false;
};

struct TorusLattice {
  GLattice lattice;
  TorusProvenance provenance = TorusProvenance::explicit_lattice;
  std::optional<FamilyDatum> family;
  /// Expression the lattice was built from, for reports.
  std::string expression;
};

/// Z[G] modulo the norm element, with family datum (1, Z[G], norm).
TorusLattice norm_one_lattice(const GroupPtr& g);
/// Z[G/H], the characters of R_{L/F}(G_m) for L the fixed field of H; family with n = 0.
TorusLattice weil_restriction_lattice(const GroupPtr& g, const ElementSet& h);
/// Z^r with trivial action, presented as Z^{2r} / Z^r so that n = r.
TorusLattice split_torus_lattice(const GroupPtr& g, std::size_t r);
/// Family data add up when both summands carry one.
TorusLattice torus_direct_sum(const TorusLattice& a, const TorusLattice& b);

struct PermutationVerdict {
  bool holds = true;
  /// First element whose matrix is not a permutation matrix.
  std::size_t element = 0;
};
PermutationVerdict is_permutation_in_basis(const GLattice& l);

enum class FlasqueKind { flasque, coflasque };

struct SubgroupCertificate {
  ElementSet subgroup;
  std::string name;
  AbelianGroupStructure h1;
};

struct FlasquenessVerdict {
  FlasqueKind kind = FlasqueKind::flasque;
  bool holds = true;
  std::vector<SubgroupCertificate> certificate;
  std::string to_string() const;
};

/// coflasque: H^1(H, L) = 0 for all subgroups H; flasque: H^1(H, dual L) = 0.
FlasquenessVerdict flasqueness(const GLattice& l, FlasqueKind kind, const CohomologyOptions& opts = {});

struct ResolutionResult {
  ShortExactSequence ses;
  FlasquenessVerdict certificate;
  ExactnessVerdict exactness;
};

/// 0 -> C -> P -> M -> 0 with P permutation and C coflasque. P sums one
/// Z[G/H] per (subgroup H, basis vector v of M^H), sending gH to g.v.
/// A lattice that is already permutation in its basis resolves trivially.
ResolutionResult coflasque_resolution(const GLattice& m, const CohomologyOptions& opts = {});

/// 0 -> S -> P -> T -> 0 with P permutation and T flasque, the dual of the
/// coflasque resolution of dual(S).
ResolutionResult flasque_resolution(const GLattice& s, const CohomologyOptions& opts = {});

/// Tate cohomology in degree 0: L^G / N L.
AbelianGroupStructure tate_h0(const GLattice& l);

}  // namespace torinv
