#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "torinv/lattice.hpp"

namespace torinv {

using intlin::AbelianGroupStructure;

/// Bounded chain complex of G-lattices, degree 0 rightmost:
/// C_top -> ... -> C_1 -> C_0.
class ChainComplexZ {
 public:
  ChainComplexZ() = default;
  /// boundaries[k - 1] maps terms[k] to terms[k - 1]. Checks shapes,
  /// equivariance and d o d = 0; throws InvalidSpec otherwise.
  ChainComplexZ(std::vector<GLattice> terms, std::vector<IntMatrix> boundaries);

  std::size_t top_degree() const { return terms_.empty() ? 0 : terms_.size() - 1; }
  const GLattice& term(std::size_t k) const { return terms_[k]; }
  const std::vector<GLattice>& terms() const { return terms_; }
  /// d_k : C_k -> C_{k-1}, for 1 <= k <= top_degree().
  LatticeMorphism boundary(std::size_t k) const;
  const IntMatrix& boundary_matrix(std::size_t k) const { return boundaries_[k - 1]; }

 private:
  std::vector<GLattice> terms_;
  std::vector<IntMatrix> boundaries_;
};

/// K(alpha, q): C_i = wedge^i(Q) (x) S^{q-i}(P), basis index
/// (wedge index) * rank S^{q-i}(P) + (monomial index), with
/// d(c_1 ^ ... ^ c_i (x) m) = sum_k (-1)^{k+1} (... omit c_k ...) (x) alpha(c_k) m.
ChainComplexZ build_koszul(const ShortExactSequence& ses, std::size_t q, std::size_t rank_cap = kDefaultRankCap);

/// ker d_k / im d_{k+1}.
AbelianGroupStructure complex_homology(const ChainComplexZ& c, std::size_t k);

struct KoszulVerdict {
  bool pass = false;
  /// H_0 .. H_q.
  std::vector<AbelianGroupStructure> homology;
  std::size_t sym_target_rank = 0;
  bool higher_homology_vanishes = false;
  bool sym_beta_surjective = false;
  bool composite_zero = false;
  /// ker S^q(beta) = im d_1 as saturated sublattices.
  bool kernel_matches = false;
  std::string detail;
};

/// Checks that K(alpha, q) resolves S^q(T) through S^q(beta).
KoszulVerdict verify_koszul_quasi_iso(const ShortExactSequence& ses, std::size_t q,
                                      std::size_t rank_cap = kDefaultRankCap);

}  // namespace torinv
