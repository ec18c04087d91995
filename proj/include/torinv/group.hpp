#pragma once

#include <cstddef>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "torinv/intlin.hpp"

namespace torinv {

/// Images of 0..m-1; composition (p*q)(x) = p(q(x)).
using Permutation = std::vector<std::size_t>;

inline constexpr std::size_t kDefaultGroupCap = 64;

/// Sorted element indices of a subgroup of some FiniteGroup.
using ElementSet = std::vector<std::size_t>;

/// Finite group stored through its multiplication table. Elements are indexed
/// in breadth-first order from the identity (index 0), multiplying on the
/// right by generators in the order given.
class FiniteGroup {
 public:
  static FiniteGroup from_permutations(const std::vector<Permutation>& gens, std::size_t cap = kDefaultGroupCap,
                                       std::string name = {});
  /// Generators must be square unimodular matrices of a common size.
  static FiniteGroup from_matrices(const std::vector<intlin::IntMatrix>& gens, std::size_t cap = kDefaultGroupCap,
                                   std::string name = {});
  /// Group with a given table. Element 0 must be the identity; used for subgroups.
  static FiniteGroup from_table(std::vector<std::vector<std::size_t>> table, std::vector<std::size_t> generators,
                                std::vector<std::string> element_names, std::string name);

  std::size_t order() const { return table_.size(); }
  static constexpr std::size_t identity() { return 0; }
  std::size_t mul(std::size_t a, std::size_t b) const { return table_[a][b]; }
  std::size_t inverse(std::size_t a) const { return inverse_[a]; }
  std::size_t element_order(std::size_t a) const;
  /// Generator indices as elements.
  const std::vector<std::size_t>& generators() const { return generators_; }
  /// Element a equals mul(word_parent(a), generators()[word_generator(a)]) for a != 0.
  std::size_t word_parent(std::size_t a) const { return parent_[a]; }
  std::size_t word_generator(std::size_t a) const { return parent_gen_[a]; }

  const std::string& name() const { return name_; }
  const std::string& element_name(std::size_t a) const { return element_names_[a]; }
  std::optional<std::size_t> find_element(const std::string& element_name) const;

  bool is_abelian() const;
  /// Smallest-index element of order |G|, if G is cyclic.
  std::optional<std::size_t> cyclic_generator() const;

  /// Every subgroup exactly once, sorted by (order, element set).
  const std::vector<ElementSet>& subgroups() const;
  /// Smallest subgroup containing the given elements.
  ElementSet closure(const std::vector<std::size_t>& elements) const;
  bool is_subgroup(const ElementSet& elements) const;
  /// Subgroup as a group in its own right; element k of the result is
  /// elements[k] here. Element names are inherited.
  FiniteGroup subgroup_group(const ElementSet& elements, std::string name = {}) const;
  /// Readable name for a subgroup: "1", the group name, or "<a,b>".
  std::string subgroup_name(const ElementSet& elements) const;

  const std::vector<std::vector<std::size_t>>& table() const { return table_; }
  bool same_structure(const FiniteGroup& other) const { return table_ == other.table_; }

 private:
  FiniteGroup() = default;
  void finish();

  std::string name_;
  std::vector<std::vector<std::size_t>> table_;
  std::vector<std::size_t> inverse_;
  std::vector<std::size_t> generators_;
  std::vector<std::size_t> parent_;
  std::vector<std::size_t> parent_gen_;
  std::vector<std::string> element_names_;
  mutable std::shared_ptr<std::vector<ElementSet>> subgroups_;
};

using GroupPtr = std::shared_ptr<const FiniteGroup>;

/// Builtins: C1..C64, C2xC2, C2xC4, C2xC2xC2, S3, S4, D4, Q8.
/// Q8 acts on its units 1,-1,i,-i,j,-j,k,-k by left multiplication.
GroupPtr builtin_group(const std::string& name, std::size_t cap = kDefaultGroupCap);
std::vector<std::string> builtin_group_names();

/// Builtin name, permutations in cycle notation separated by ";" ("(1,2,3);(1,2)"),
/// or a generator file with lines "perm <cycles>" / "matrix <intlin matrix>".
GroupPtr parse_group(const std::string& text, std::size_t cap = kDefaultGroupCap);

/// "(1,2)(3,4)" style, 1-based points; identity is "()".
Permutation parse_cycles(const std::string& text, std::size_t degree = 0);
std::string format_cycles(const Permutation& p);

/// "1", the group's name, "#k" (index into subgroups()), "<a,b>" or "{a,b}" with element names.
ElementSet parse_subgroup(const FiniteGroup& g, const std::string& text);

}  // namespace torinv
