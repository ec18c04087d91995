#pragma once

#include <cstddef>
#include <memory>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "torinv/group.hpp"
#include "torinv/intlin.hpp"

namespace torinv {

using intlin::IntMatrix;

inline constexpr std::size_t kDefaultRankCap = 4096;

/// Free abelian group of finite rank with a G-action. Action matrices act on
/// column vectors: column j of action(g) is the image of basis vector j.
/// Cheap to copy; the data is shared and immutable.
class GLattice {
 public:
  GLattice() = default;
  /// One matrix per group element (indexed as in the group). Verifies the
  /// homomorphism property; throws InvalidSpec otherwise.
  GLattice(GroupPtr group, std::vector<IntMatrix> action, std::vector<std::string> labels = {});
  /// Extends generator images to the whole group along the BFS words and
  /// verifies that the result is a homomorphism.
  static GLattice from_generator_images(GroupPtr group, const std::vector<IntMatrix>& images,
                                        std::vector<std::string> labels = {});

  const GroupPtr& group_ptr() const { return data_->group; }
  const FiniteGroup& group() const { return *data_->group; }
  std::size_t rank() const { return data_->rank; }
  const IntMatrix& action(std::size_t g) const { return data_->action[g]; }
  const std::vector<IntMatrix>& actions() const { return data_->action; }
  const std::vector<std::string>& labels() const { return data_->labels; }
  const std::string& label(std::size_t i) const { return data_->labels[i]; }

  /// Stable identity of the shared data, for caches keyed by lattice.
  std::shared_ptr<const void> identity() const { return data_; }
  bool same_action(const GLattice& other) const;
  GLattice with_labels(std::vector<std::string> labels) const;

 private:
  struct Data {
    GroupPtr group;
    std::size_t rank = 0;
    std::vector<IntMatrix> action;
    std::vector<std::string> labels;
  };
  std::shared_ptr<const Data> data_;
};

/// A group homomorphism of lattices given by a target.rank x source.rank matrix.
struct LatticeMorphism {
  GLattice source;
  GLattice target;
  IntMatrix matrix;
};

/// Exact sequence 0 -> left.source -> left.target = right.source -> right.target -> 0.
struct ShortExactSequence {
  LatticeMorphism left;
  LatticeMorphism right;
};

struct EquivarianceVerdict {
  bool equivariant = true;
  /// First violation: group element and entry (row, col) of f*g - g*f.
  std::size_t element = 0;
  std::size_t row = 0;
  std::size_t col = 0;
  std::string to_string(const FiniteGroup& g) const;
};

bool same_group(const FiniteGroup& a, const FiniteGroup& b);

EquivarianceVerdict verify_equivariant_map(const LatticeMorphism& f);

struct ExactnessVerdict {
  bool exact = false;
  std::string detail;
};
/// Checks dimensions, equivariance, injectivity on the left, surjectivity on
/// the right, and image(left) = kernel(right).
ExactnessVerdict verify_short_exact(const ShortExactSequence& ses);

GLattice trivial_lattice(GroupPtr g, std::size_t rank);
/// Z[G/H] on left cosets gH, ordered by their smallest element index, with left translation.
GLattice permutation_lattice(GroupPtr g, const ElementSet& h);
/// Z[G] with basis labelled by element names.
GLattice regular_lattice(GroupPtr g);
/// Acts by inverse transpose.
GLattice dual_lattice(const GLattice& l);
GLattice direct_sum(const GLattice& a, const GLattice& b, std::size_t rank_cap = kDefaultRankCap);
GLattice direct_sum(const std::vector<GLattice>& parts, std::size_t rank_cap = kDefaultRankCap);
/// Basis e_i (x) f_j at index i * rank(b) + j.
GLattice tensor_product(const GLattice& a, const GLattice& b, std::size_t rank_cap = kDefaultRankCap);
/// Multiset-monomial basis (nondecreasing index tuples) in lexicographic order.
GLattice sym_power(const GLattice& l, std::size_t q, std::size_t rank_cap = kDefaultRankCap);
/// Strictly increasing index tuples in lexicographic order.
GLattice wedge_power(const GLattice& l, std::size_t q, std::size_t rank_cap = kDefaultRankCap);
/// Restriction of the action to a subgroup, as a lattice over that subgroup.
GLattice restrict_lattice(const GLattice& l, const ElementSet& h);

/// Index tuples of the sym/wedge bases, in basis order.
std::vector<std::vector<std::size_t>> sym_basis(std::size_t rank, std::size_t q);
std::vector<std::vector<std::size_t>> wedge_basis(std::size_t rank, std::size_t q);
std::size_t binomial(std::size_t n, std::size_t k);

/// S^q(f) and Lambda^q(f) for f : Z^a -> Z^b (b x a).
IntMatrix sym_power_matrix(const IntMatrix& f, std::size_t q);
IntMatrix wedge_power_matrix(const IntMatrix& f, std::size_t q);
/// x_i x_j -> e_i (x) e_j + e_j (x) e_i, from S^2 to the tensor square.
IntMatrix symmetrization_matrix(std::size_t rank);
/// e_i (x) e_j -> x_i x_j, the natural quotient of the tensor square.
IntMatrix symmetric_projection_matrix(std::size_t rank);

/// Sublattice spanned by the columns of `basis` (need not be saturated).
/// Throws InvalidSpec if the span is not G-stable or the columns are dependent.
std::pair<GLattice, LatticeMorphism> sub_lattice(const GLattice& l, const IntMatrix& basis,
                                                 std::vector<std::string> labels = {});

/// Quotient by the image of an injective morphism with saturated image.
/// Throws NotInjective or NotSaturated (with the torsion factors).
/// When possible the quotient basis is the classes of target basis vectors,
/// chosen greedily in index order, and inherits their labels.
std::pair<GLattice, LatticeMorphism> quotient_lattice(const LatticeMorphism& incl);

/// Saturated basis (columns) of the invariants of the whole group.
IntMatrix invariants_sublattice(const GLattice& l);

std::string format_lattice(const GLattice& l);

}  // namespace torinv
