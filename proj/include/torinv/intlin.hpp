#pragma once

#include <cstddef>
#include <initializer_list>
#include <iosfwd>
#include <optional>
#include <stop_token>
#include <string>
#include <tuple>
#include <utility>
#include <vector>

#include "torinv/integer.hpp"

namespace torinv::intlin {

class SparseMatrix;

/// Dense row-major integer matrix.
class IntMatrix {
 public:
  IntMatrix() = default;
  IntMatrix(std::size_t rows, std::size_t cols) : rows_(rows), cols_(cols), data_(rows * cols) {}
  IntMatrix(std::initializer_list<std::initializer_list<long long>> rows);

  static IntMatrix identity(std::size_t n);
  static IntMatrix zero(std::size_t rows, std::size_t cols) { return IntMatrix(rows, cols); }

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  bool empty() const { return rows_ == 0 || cols_ == 0; }

  Integer& operator()(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }
  const Integer& operator()(std::size_t i, std::size_t j) const { return data_[i * cols_ + j]; }

  bool is_zero() const;
  bool is_identity() const;
  IntMatrix transpose() const;
  IntMatrix column(std::size_t j) const;
  IntMatrix columns(std::size_t first, std::size_t count) const;
  IntMatrix row_block(std::size_t first, std::size_t count) const;
  /// [this | other]
  IntMatrix hstack(const IntMatrix& other) const;
  /// [this ; other]
  IntMatrix vstack(const IntMatrix& other) const;

  void swap_rows(std::size_t a, std::size_t b);
  void swap_cols(std::size_t a, std::size_t b);
  /// row a -= f * row b
  void row_submul(std::size_t a, const Integer& f, std::size_t b);
  /// col a -= f * col b
  void col_submul(std::size_t a, const Integer& f, std::size_t b);
  void negate_row(std::size_t a);
  void negate_col(std::size_t a);

  IntMatrix operator*(const IntMatrix& o) const;
  IntMatrix operator+(const IntMatrix& o) const;
  IntMatrix operator-(const IntMatrix& o) const;
  IntMatrix scaled(const Integer& f) const;

  friend bool operator==(const IntMatrix& a, const IntMatrix& b) {
    return a.rows_ == b.rows_ && a.cols_ == b.cols_ && a.data_ == b.data_;
  }
  friend bool operator==(const IntMatrix& a, const SparseMatrix& b);

  std::string to_string() const;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<Integer> data_;
};

using SparseEntry = std::pair<std::size_t, Integer>;
/// Nonzero entries of one row, sorted by column, no explicit zeros.
using SparseRow = std::vector<SparseEntry>;

/// Row-compressed sparse integer matrix.
class SparseMatrix {
 public:
  SparseMatrix() = default;
  SparseMatrix(std::size_t rows, std::size_t cols) : cols_(cols), rows_(rows) {}
  explicit SparseMatrix(const IntMatrix& dense);
  /// Duplicate (r, c) triples are summed; zero sums are dropped.
  static SparseMatrix from_triples(std::size_t rows, std::size_t cols,
                                   std::vector<std::tuple<std::size_t, std::size_t, Integer>> triples);

  std::size_t rows() const { return rows_.size(); }
  std::size_t cols() const { return cols_; }
  std::size_t nonzeros() const;

  const SparseRow& row(std::size_t i) const { return rows_[i]; }
  /// Replaces a row; entries are sorted and zeros dropped.
  void set_row(std::size_t i, SparseRow entries);
  Integer at(std::size_t i, std::size_t j) const;

  IntMatrix to_dense() const;
  SparseMatrix transpose() const;
  /// this * other, computed sparsely.
  SparseMatrix operator*(const SparseMatrix& other) const;
  bool is_zero() const;

  friend bool operator==(const SparseMatrix& a, const SparseMatrix& b) {
    return a.cols_ == b.cols_ && a.rows_ == b.rows_;
  }

 private:
  std::size_t cols_ = 0;
  std::vector<SparseRow> rows_;
};

inline bool operator==(const SparseMatrix& a, const IntMatrix& b) { return b == a; }

/// U * A * V = S with S diagonal, d1 | d2 | ..., U and V unimodular.
struct SmithDecomposition {
  IntMatrix S;
  IntMatrix U;
  IntMatrix V;

  std::vector<Integer> diagonal() const;
  std::size_t rank() const;
};

/// Invariant-factor description of a finitely generated abelian group.
class AbelianGroupStructure {
 public:
  AbelianGroupStructure() = default;
  /// Canonicalizes: drops unit factors, sorts into a divisibility chain.
  AbelianGroupStructure(std::size_t free_rank, std::vector<Integer> torsion);

  static AbelianGroupStructure zero() { return {}; }
  static AbelianGroupStructure free(std::size_t rank) { return AbelianGroupStructure(rank, {}); }
  static AbelianGroupStructure cyclic(long long n);

  std::size_t free_rank() const { return free_rank_; }
  const std::vector<Integer>& torsion() const { return torsion_; }
  bool is_zero() const { return free_rank_ == 0 && torsion_.empty(); }
  bool is_free() const { return torsion_.empty(); }
  /// Order of the torsion subgroup.
  Integer torsion_order() const;

  AbelianGroupStructure direct_sum(const AbelianGroupStructure& other) const;
  AbelianGroupStructure power(std::size_t copies) const;
  /// Drops all 2-primary torsion (the group tensored with Z[1/2], torsion part).
  AbelianGroupStructure odd_part() const;
  AbelianGroupStructure torsion_part() const { return AbelianGroupStructure(0, torsion_); }

  /// e.g. "0", "Z/2", "Z^3 + Z/2 + Z/4"
  std::string to_string() const;

  friend bool operator==(const AbelianGroupStructure&, const AbelianGroupStructure&) = default;

 private:
  std::size_t free_rank_ = 0;
  std::vector<Integer> torsion_;
};

/// Result of the transform-free sparse elimination.
struct SmithInvariants {
  std::size_t rank = 0;
  /// Nonzero invariant factors in divisibility order (units included).
  std::vector<Integer> factors;

  std::vector<Integer> nonunit_factors() const;
};

SmithDecomposition smith_decompose(const IntMatrix& A);

/// Invariant factors by sparse elimination: unit pivots first (shortest row,
/// then sparsest column), then minimal-absolute-value pivots. No transforms
/// are tracked, so fill-in stays proportional to the active submatrix.
SmithInvariants smith_invariants(const SparseMatrix& A, std::stop_token stop = {});
SmithInvariants smith_invariants(const IntMatrix& A);

/// Saturated basis of the integer null space, as columns, in column Hermite form.
IntMatrix kernel_basis(const IntMatrix& A);

/// Z^rows / column-span(A).
AbelianGroupStructure cokernel_structure(const IntMatrix& A);
AbelianGroupStructure cokernel_structure(const SparseMatrix& A);

/// ker(A) / im(B) for composable A * B = 0 (B maps into the source of A).
AbelianGroupStructure homology_structure(const SparseMatrix& A, const SparseMatrix& B, std::stop_token stop = {});

std::size_t rank(const IntMatrix& A);

/// Row-style Hermite normal form: U * A = H, U unimodular, H in row echelon
/// form with positive pivots and entries above each pivot reduced into [0, pivot).
struct HermiteDecomposition {
  IntMatrix H;
  IntMatrix U;
};
HermiteDecomposition hermite_decompose(const IntMatrix& A);

Integer determinant(const IntMatrix& A);
bool is_unimodular(const IntMatrix& A);
/// Inverse of a unimodular matrix; throws std::invalid_argument otherwise.
IntMatrix inverse_unimodular(const IntMatrix& A);

/// Integer solution X of A * X = B, if one exists.
std::optional<IntMatrix> solve(const IntMatrix& A, const IntMatrix& B);

/// True if the column span of A is saturated in Z^rows.
bool is_saturated(const IntMatrix& A);

/// Matrix text format: "rows cols", then "dense" and row-major entries or
/// "sparse" and "r c v" triples, whitespace separated.
IntMatrix read_matrix(std::istream& in);
IntMatrix parse_matrix(const std::string& text);
std::string format_dense(const IntMatrix& A);
std::string format_sparse(const IntMatrix& A);

}  // namespace torinv::intlin
