#pragma once

#include <filesystem>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "torinv/gcohom.hpp"

namespace torinv {

class GroupRegistry;

enum class NodeStatus { computed, symbolic, external_input };
std::string to_string(NodeStatus s);

/// The closed set of coefficient tokens.
enum class CoefficientToken { z, qz, qz2, qz2_p, qz3, qz4 };
std::string to_string(CoefficientToken c);
bool is_torsion(CoefficientToken c);

/// What is known about the base field. Parsed from key=value lines:
///   characteristic=0|p  cd_bound=n|unknown  splitting_group=G
///   rel_brauer_trivial= mu2_full= odd_part_only= p_inverted= (true|false)
struct FieldProfile {
  unsigned long characteristic = 0;
  std::optional<std::size_t> cd_bound;
  GroupPtr splitting_group;
  bool rel_brauer_trivial = false;
  /// Q/Z(2) restricted to the splitting field is Q/Z with trivial action.
  bool mu2_full = false;
  bool odd_part_only = false;
  bool p_inverted = false;

  /// Positive characteristic forces p_inverted.
  void normalize();
  std::string to_string() const;
};
FieldProfile parse_profile(const std::string& text, GroupRegistry* registry = nullptr);
FieldProfile read_profile(const std::filesystem::path& path, GroupRegistry* registry = nullptr);

enum class TermKind {
  zero,
  group,        // computed abelian group
  lattice,      // computed G-lattice factor
  token,        // coefficient token
  atom,         // field atom, symbolic or external
  field_coh,    // H^i(F, child)
  lattice_coh,  // H^i(G, lattice (x) token), computed
  sum,
  tensor,
  quotient,     // children[0] / children[1]
  kernel,       // ker(children[0] -> children[1])
  invariants,   // (child)^Gamma
  torsion_part,
  power,        // child^{+copies}
};

/// Properties a field atom carries into simplification.
struct AtomTraits {
  bool external = false;
  bool uniquely_divisible = false;
  /// Divisible with torsion subgroup a Q/Z(j) and uniquely divisible quotient.
  bool divisible_torsion = false;
  bool relative_brauer = false;
  /// Vanishes for tori of the special family (torsion of CH^3(BT) and I).
  bool vanishes_in_family = false;
  /// Dec, the decomposable part of S^2(T^)^Gamma; full in the special family.
  bool decomposable = false;
  /// Units of a separably closed field or of a Galois splitting field.
  bool units = false;
};

struct Term;
using TermPtr = std::shared_ptr<const Term>;

struct Term {
  TermKind kind = TermKind::zero;
  std::string name;
  std::size_t degree = 0;
  CoefficientToken token = CoefficientToken::z;
  std::optional<GLattice> lattice;
  AbelianGroupStructure value;
  std::size_t divisible_rank = 0;
  /// lattice_coh over Z[G/H]: the subgroup H, for the Shapiro rewrite.
  std::optional<ElementSet> induced_from;
  /// Group value already reduced to its odd part.
  bool odd_only = false;
  AtomTraits traits;
  std::vector<TermPtr> children;

  NodeStatus status() const;
  std::string to_string() const;
  bool operator==(const Term& other) const;
};

TermPtr zero_term();
TermPtr group_term(AbelianGroupStructure value, std::size_t divisible_rank = 0, std::string name = {});
TermPtr lattice_term(std::string name, GLattice l);
TermPtr token_term(CoefficientToken c);
TermPtr atom_term(std::string name, AtomTraits traits = {});
TermPtr field_coh(std::size_t degree, TermPtr coefficient);
/// Computes H^i(G, L) (token z) or H^i(G, L (x) Q/Z) (token qz) at construction.
TermPtr lattice_coh(std::string lattice_name, GLattice l, CoefficientToken c, std::size_t degree,
                    std::optional<ElementSet> induced_from = std::nullopt, const CohomologyOptions& opts = {});
TermPtr sum_term(std::vector<TermPtr> parts);
TermPtr tensor_term(std::vector<TermPtr> parts);
TermPtr quotient_term(TermPtr a, TermPtr b);
TermPtr kernel_term(TermPtr source, TermPtr target);
TermPtr invariants_term(TermPtr t);
TermPtr torsion_term(TermPtr t);
TermPtr power_term(TermPtr t, std::size_t copies);

enum class Rule { zero, cd, h90, shapiro, br, div, two_torsion, family };
std::string to_string(Rule r);
const std::vector<Rule>& all_rules();

struct SimplificationEntry {
  std::string rule;
  std::string anchor;
  std::string before;
  std::string after;
};

struct SimplifyOptions {
  /// Order in which rules are tried at each node; every rule is tried until
  /// none applies, so the order only affects the path.
  std::vector<Rule> order = all_rules();
  /// The torus sits in 1 -> T -> P -> G_m^n -> 1 with P quasi-split.
  bool special_family = false;
};

/// Rewrites bottom-up to a fixed point, appending one entry per rewrite.
TermPtr simplify_term(const TermPtr& t, const FieldProfile& profile, std::vector<SimplificationEntry>* log = nullptr,
                      const SimplifyOptions& opts = {});

}  // namespace torinv
