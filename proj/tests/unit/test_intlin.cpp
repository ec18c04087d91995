#include <random>
#include <sstream>

#include "doctest.h"
#include "torinv/intlin.hpp"

using namespace torinv;
using namespace torinv::intlin;

namespace {

// Laplace expansion on small matrices: slow, but shares no code with Bareiss.
long long laplace_det(const std::vector<std::vector<long long>>& m) {
  const std::size_t n = m.size();
  if (n == 0) return 1;
  if (n == 1) return m[0][0];
  long long det = 0;
  for (std::size_t c = 0; c < n; ++c) {
    if (m[0][c] == 0) continue;
    std::vector<std::vector<long long>> minor;
    for (std::size_t r = 1; r < n; ++r) {
      std::vector<long long> row;
      for (std::size_t k = 0; k < n; ++k)
        if (k != c) row.push_back(m[r][k]);
      minor.push_back(row);
    }
    long long term = m[0][c] * laplace_det(minor);
    det += (c % 2 == 0) ? term : -term;
  }
  return det;
}

void subsets(std::size_t n, std::size_t k, std::size_t start, std::vector<std::size_t>& cur,
             std::vector<std::vector<std::size_t>>& out) {
  if (cur.size() == k) {
    out.push_back(cur);
    return;
  }
  for (std::size_t i = start; i < n; ++i) {
    cur.push_back(i);
    subsets(n, k, i + 1, cur, out);
    cur.pop_back();
  }
}

long long gcd_ll(long long a, long long b) {
  a = a < 0 ? -a : a;
  b = b < 0 ? -b : b;
  while (b) {
    long long t = a % b;
    a = b;
    b = t;
  }
  return a;
}

// Invariant factors from determinantal divisors: d_k = D_k / D_{k-1}, D_k = gcd of k x k minors.
std::vector<long long> determinantal_factors(const std::vector<std::vector<long long>>& a) {
  const std::size_t m = a.size(), n = m ? a[0].size() : 0;
  std::vector<long long> out;
  long long prev = 1;
  for (std::size_t k = 1; k <= std::min(m, n); ++k) {
    std::vector<std::vector<std::size_t>> rs, cs;
    std::vector<std::size_t> cur;
    subsets(m, k, 0, cur, rs);
    subsets(n, k, 0, cur, cs);
    long long g = 0;
    for (const auto& r : rs)
      for (const auto& c : cs) {
        std::vector<std::vector<long long>> sub(k, std::vector<long long>(k));
        for (std::size_t i = 0; i < k; ++i)
          for (std::size_t j = 0; j < k; ++j) sub[i][j] = a[r[i]][c[j]];
        g = gcd_ll(g, laplace_det(sub));
      }
    if (g == 0) break;
    out.push_back(g / prev);
    prev = g;
  }
  return out;
}

IntMatrix random_matrix(std::mt19937_64& rng, std::size_t rows, std::size_t cols, int bound, double density = 1.0) {
  std::uniform_int_distribution<int> val(-bound, bound);
  std::bernoulli_distribution keep(density);
  IntMatrix m(rows, cols);
  for (std::size_t i = 0; i < rows; ++i)
    for (std::size_t j = 0; j < cols; ++j)
      if (keep(rng)) m(i, j) = val(rng);
  return m;
}

IntMatrix random_unimodular(std::mt19937_64& rng, std::size_t n) {
  IntMatrix u = IntMatrix::identity(n);
  if (n < 2) return u;
  std::uniform_int_distribution<std::size_t> idx(0, n - 1);
  std::uniform_int_distribution<int> f(-2, 2);
  for (std::size_t k = 0; k < 3 * n; ++k) {
    std::size_t a = idx(rng), b = idx(rng);
    if (a != b) u.row_submul(a, Integer(f(rng)), b);
  }
  return u;
}

std::vector<std::vector<long long>> to_ll(const IntMatrix& m) {
  std::vector<std::vector<long long>> out(m.rows(), std::vector<long long>(m.cols()));
  for (std::size_t i = 0; i < m.rows(); ++i)
    for (std::size_t j = 0; j < m.cols(); ++j) out[i][j] = m(i, j).small_value();
  return out;
}

void check_smith(const IntMatrix& A, const SmithDecomposition& sd) {
  CHECK(sd.U * A * sd.V == sd.S);
  CHECK(determinant(sd.U).is_unit());
  CHECK(determinant(sd.V).is_unit());
  auto d = sd.diagonal();
  for (std::size_t i = 0; i < sd.S.rows(); ++i)
    for (std::size_t j = 0; j < sd.S.cols(); ++j)
      if (i != j) CHECK(sd.S(i, j).is_zero());
  for (std::size_t i = 0; i < d.size(); ++i) {
    CHECK(d[i].sign() >= 0);
    if (i + 1 < d.size()) CHECK(divides(d[i], d[i + 1]));
  }
}

}  // namespace

TEST_CASE("integer arithmetic promotes on overflow and demotes back") {
  Integer a(std::numeric_limits<long long>::max());
  Integer b = a + Integer(1);
  CHECK_FALSE(b.is_small());
  CHECK(b.to_string() == "9223372036854775808");
  Integer c = b - Integer(1);
  CHECK(c.is_small());
  CHECK(c == a);
  Integer sq = a * a;
  CHECK(sq.to_string() == "85070591730234615847396907784232501249");
  CHECK(div_exact(sq, a) == a);
  Integer m(std::numeric_limits<long long>::min());
  CHECK((-m).to_string() == "9223372036854775808");
  CHECK(div_round(Integer(7), Integer(2)) == Integer(3));
  CHECK(div_round(Integer(-7), Integer(2)) == Integer(-4));
  CHECK(div_round(Integer(5), Integer(-3)) == Integer(-2));
  CHECK(div_floor(Integer(-7), Integer(2)) == Integer(-4));
  CHECK(gcd(Integer(-12), Integer(18)) == Integer(6));
  CHECK(Integer::parse("-123456789012345678901234567890").to_string() == "-123456789012345678901234567890");
}

TEST_CASE("smith form of small fixed matrices") {
  SUBCASE("identity") {
    auto sd = smith_decompose(IntMatrix::identity(2));
    CHECK(sd.S == IntMatrix::identity(2));
  }
  SUBCASE("[[2,4],[6,8]] has factors 2, 4") {
    IntMatrix A{{2, 4}, {6, 8}};
    auto sd = smith_decompose(A);
    check_smith(A, sd);
    CHECK(sd.S == IntMatrix{{2, 0}, {0, 4}});
    CHECK(determinantal_factors(to_ll(A)) == std::vector<long long>{2, 4});
    CHECK(cokernel_structure(A) == AbelianGroupStructure(0, {Integer(2), Integer(4)}));
  }
  SUBCASE("1x1 zero") {
    auto sd = smith_decompose(IntMatrix(1, 1));
    CHECK(sd.S == IntMatrix{{0}});
    CHECK(sd.rank() == 0);
  }
  SUBCASE("empty") {
    auto sd = smith_decompose(IntMatrix(0, 3));
    CHECK(sd.S.rows() == 0);
    CHECK(sd.V == IntMatrix::identity(3));
  }
}

TEST_CASE("smith form agrees with determinantal divisors on random small matrices") {
  std::mt19937_64 rng(20240611);
  for (int trial = 0; trial < 60; ++trial) {
    std::uniform_int_distribution<std::size_t> dim(1, 4);
    IntMatrix A = random_matrix(rng, dim(rng), dim(rng), 6, 0.7);
    auto sd = smith_decompose(A);
    check_smith(A, sd);
    std::vector<long long> diag;
    for (const auto& d : sd.diagonal())
      if (!d.is_zero()) diag.push_back(d.small_value());
    CHECK(diag == determinantal_factors(to_ll(A)));
  }
}

TEST_CASE("dense and sparse elimination agree") {
  std::mt19937_64 rng(7);
  for (int trial = 0; trial < 40; ++trial) {
    std::uniform_int_distribution<std::size_t> dim(1, 30);
    IntMatrix A = random_matrix(rng, dim(rng), dim(rng), 3, 0.2);
    auto sd = smith_decompose(A);
    auto inv = smith_invariants(A);
    CHECK(inv.rank == sd.rank());
    std::vector<Integer> diag;
    for (const auto& d : sd.diagonal())
      if (!d.is_zero()) diag.push_back(d);
    CHECK(inv.factors == diag);
  }
}

TEST_CASE("sparse elimination on a structured rank-deficient matrix") {
  // Boundary of a 2-periodic chain: rows are differences of cyclic neighbours, entries +-1.
  const std::size_t n = 300;
  std::vector<std::tuple<std::size_t, std::size_t, Integer>> t;
  for (std::size_t i = 0; i < n; ++i) {
    t.emplace_back(i, i, Integer(1));
    t.emplace_back(i, (i + 1) % n, Integer(-1));
  }
  auto A = SparseMatrix::from_triples(n, n, t);
  auto inv = smith_invariants(A);
  CHECK(inv.rank == n - 1);
  CHECK(inv.nonunit_factors().empty());
  CHECK(cokernel_structure(A) == AbelianGroupStructure::free(1));
}

TEST_CASE("kernel basis") {
  SUBCASE("[[1,0]]") {
    CHECK(kernel_basis(IntMatrix{{1, 0}}) == IntMatrix{{0}, {1}});
  }
  SUBCASE("[[2,-2]] is spanned by (1,1)") {
    CHECK(kernel_basis(IntMatrix{{2, -2}}) == IntMatrix{{1}, {1}});
  }
  SUBCASE("identity has empty kernel") {
    CHECK(kernel_basis(IntMatrix::identity(3)).cols() == 0);
  }
  SUBCASE("every small solution lies in the span") {
    IntMatrix A{{2, 4, -6, 0}, {1, 2, -3, 3}};
    IntMatrix K = kernel_basis(A);
    CHECK((A * K).is_zero());
    CHECK(K.cols() == 4 - rank(A));
    CHECK(is_saturated(K));
    for (int a = -2; a <= 2; ++a)
      for (int b = -2; b <= 2; ++b)
        for (int c = -2; c <= 2; ++c)
          for (int d = -2; d <= 2; ++d) {
            IntMatrix v{{a}, {b}, {c}, {d}};
            if (!(A * v).is_zero()) continue;
            CHECK(solve(K, v).has_value());
          }
  }
}

TEST_CASE("hermite form") {
  std::mt19937_64 rng(99);
  for (int trial = 0; trial < 30; ++trial) {
    IntMatrix A = random_matrix(rng, 5, 4, 5, 0.8);
    auto h = hermite_decompose(A);
    CHECK(h.U * A == h.H);
    CHECK(determinant(h.U).is_unit());
    // Echelon shape with positive pivots and reduced entries above them.
    std::size_t last = 0;
    bool seen_zero_row = false;
    for (std::size_t i = 0; i < h.H.rows(); ++i) {
      std::size_t j = 0;
      while (j < h.H.cols() && h.H(i, j).is_zero()) ++j;
      if (j == h.H.cols()) {
        seen_zero_row = true;
        continue;
      }
      CHECK_FALSE(seen_zero_row);
      if (i > 0) CHECK(j > last);
      last = j;
      CHECK(h.H(i, j).sign() > 0);
      for (std::size_t k = 0; k < i; ++k) {
        CHECK(h.H(k, j).sign() >= 0);
        CHECK(h.H(k, j) < h.H(i, j));
      }
    }
  }
}

TEST_CASE("determinant, inverse and solve") {
  IntMatrix A{{2, 1}, {7, 4}};
  CHECK(determinant(A) == Integer(1));
  IntMatrix inv = inverse_unimodular(A);
  CHECK(A * inv == IntMatrix::identity(2));
  CHECK_THROWS_AS(inverse_unimodular(IntMatrix{{2, 0}, {0, 1}}), std::invalid_argument);
  CHECK(determinant(IntMatrix{{0, 1}, {1, 0}}) == Integer(-1));
  CHECK(determinant(IntMatrix{{1, 2, 3}, {4, 5, 6}, {7, 8, 10}}) == Integer(-3));

  IntMatrix B{{2, 0}, {0, 3}};
  CHECK(solve(B, IntMatrix{{4}, {9}}) == IntMatrix{{2}, {3}});
  CHECK_FALSE(solve(B, IntMatrix{{1}, {0}}).has_value());
  CHECK_FALSE(solve(IntMatrix{{1}, {1}}, IntMatrix{{1}, {2}}).has_value());
}

TEST_CASE("cokernel is invariant under unimodular change of basis") {
  std::mt19937_64 rng(4242);
  for (int trial = 0; trial < 20; ++trial) {
    IntMatrix A = random_matrix(rng, 6, 5, 4, 0.6);
    IntMatrix P = random_unimodular(rng, 6), Q = random_unimodular(rng, 5);
    CHECK(cokernel_structure(P * A * Q) == cokernel_structure(A));
  }
}

TEST_CASE("abelian group structure is canonical") {
  AbelianGroupStructure g(1, {Integer(6), Integer(4), Integer(1), Integer(0)});
  CHECK(g.free_rank() == 2);
  CHECK(g.torsion() == std::vector<Integer>{Integer(2), Integer(12)});
  CHECK(g.to_string() == "Z^2 + Z/2 + Z/12");
  CHECK(g.odd_part() == AbelianGroupStructure(2, {Integer(3)}));
  CHECK(AbelianGroupStructure::zero().to_string() == "0");
  CHECK(AbelianGroupStructure(0, {Integer(2), Integer(3)}) == AbelianGroupStructure::cyclic(6));
}

TEST_CASE("matrix text format") {
  IntMatrix A{{0, 3}, {-1, 0}, {0, 0}};
  CHECK(parse_matrix(format_dense(A)) == A);
  CHECK(parse_matrix(format_sparse(A)) == A);
  CHECK(SparseMatrix(A) == A);
  CHECK(parse_matrix("2 2 sparse  0 0 5  1 1 -7") == IntMatrix{{5, 0}, {0, -7}});
  CHECK(parse_matrix("2 2 sparse") == IntMatrix(2, 2));
  CHECK_THROWS(parse_matrix("2 2 dense 1 2 3"));
  CHECK_THROWS(parse_matrix("1 1 sparse 3 0 1"));
  CHECK_THROWS(parse_matrix("1 1 sparse 0 0 0"));
  // Consecutive matrices in one stream: the triples stop at the next header.
  std::istringstream two("2 2 sparse 0 1 4 1 0 -1\n1 1 sparse 0 0 3\nnext");
  CHECK(read_matrix(two) == IntMatrix{{0, 4}, {-1, 0}});
  CHECK(read_matrix(two) == IntMatrix{{3}});
  std::string rest;
  two >> rest;
  CHECK(rest == "next");
  CHECK_THROWS(parse_matrix("1 1 banded 1"));
}
