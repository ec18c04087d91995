#include <random>

#include "doctest.h"
#include "torinv/errors.hpp"
#include "torinv/lattice.hpp"

using namespace torinv;

namespace {

GLattice sign_lattice() {
  auto c2 = builtin_group("C2");
  return GLattice::from_generator_images(c2, {IntMatrix{{-1}}});
}

/// Z[Q8] / Z[Q8/{+-1}] built by hand from the basis sums e+e', x+x', ...
std::pair<GLattice, LatticeMorphism> q8_quotient() {
  auto q8 = builtin_group("Q8");
  GLattice qhat = regular_lattice(q8);
  IntMatrix b(8, 4);
  for (std::size_t c = 0; c < 4; ++c) {
    b(*q8->find_element(std::vector<std::string>{"1", "i", "j", "k"}[c]), c) = 1;
    b(*q8->find_element(std::vector<std::string>{"-1", "-i", "-j", "-k"}[c]), c) = 1;
  }
  auto [phat, incl] = sub_lattice(qhat, b);
  return quotient_lattice(incl);
}

IntMatrix random_matrix(std::mt19937_64& rng, std::size_t rows, std::size_t cols) {
  std::uniform_int_distribution<int> v(-3, 3);
  IntMatrix m(rows, cols);
  for (std::size_t i = 0; i < rows; ++i)
    for (std::size_t j = 0; j < cols; ++j) m(i, j) = v(rng);
  return m;
}

}  // namespace

TEST_CASE("constructed ranks") {
  auto q8 = builtin_group("Q8");
  auto [that, proj] = q8_quotient();
  CHECK(that.rank() == 4);
  CHECK(that.labels() == std::vector<std::string>{"1", "i", "j", "k"});
  CHECK(sym_power(that, 2).rank() == 10);
  CHECK(sym_power(that, 3).rank() == 20);
  GLattice s0 = sym_power(that, 0);
  CHECK(s0.rank() == 1);
  CHECK(s0.same_action(trivial_lattice(q8, 1)));
  CHECK(wedge_power(that, 5).rank() == 0);
  CHECK(wedge_power(that, 2).rank() == 6);
  CHECK(permutation_lattice(q8, parse_subgroup(*q8, "{1,-1}")).rank() == 4);
  CHECK(tensor_product(that, that).rank() == 16);
  CHECK_THROWS_AS(sym_power(regular_lattice(q8), 4, 100), RankOverflow);
}

TEST_CASE("quaternion quotient action") {
  auto [that, proj] = q8_quotient();
  const FiniteGroup& q = that.group();
  const IntMatrix& i = that.action(*q.find_element("i"));
  // columns are images: i.e = x, i.x = -e, i.y = z, i.z = -y
  CHECK(i == IntMatrix{{0, -1, 0, 0}, {1, 0, 0, 0}, {0, 0, 0, -1}, {0, 0, 1, 0}});
  CHECK(i * i == IntMatrix::identity(4).scaled(Integer(-1)));
  const IntMatrix& j = that.action(*q.find_element("j"));
  CHECK(j == IntMatrix{{0, 0, -1, 0}, {0, 0, 0, 1}, {1, 0, 0, 0}, {0, -1, 0, 0}});
  CHECK(verify_equivariant_map(proj).equivariant);
}

TEST_CASE("functoriality spot checks") {
  auto s3 = builtin_group("S3");
  GLattice l = direct_sum(regular_lattice(s3), permutation_lattice(s3, parse_subgroup(*s3, "<(1,2)>")));
  CHECK(dual_lattice(dual_lattice(l)).same_action(l));
  CHECK(sym_power(l, 1).same_action(l));
  CHECK(wedge_power(l, 1).same_action(l));
  CHECK(tensor_product(l, sign_lattice().rank() == 1 ? l : l).rank() == l.rank() * l.rank());
  CHECK(dual_lattice(regular_lattice(s3)).same_action(regular_lattice(s3)));
}

TEST_CASE("exterior and symmetric powers of matrices") {
  CHECK(wedge_power_matrix(IntMatrix{{0, 1}, {1, 0}}, 2) == IntMatrix{{-1}});
  CHECK(sym_power_matrix(IntMatrix{{0, 1}, {1, 0}}, 2) == IntMatrix{{0, 0, 1}, {0, 1, 0}, {1, 0, 0}});
  CHECK(sym_power_matrix(IntMatrix{{2}}, 3) == IntMatrix{{8}});
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 10; ++trial) {
    IntMatrix a = random_matrix(rng, 4, 3), b = random_matrix(rng, 3, 4);
    for (std::size_t q = 0; q <= 3; ++q) {
      CHECK(sym_power_matrix(a * b, q) == sym_power_matrix(a, q) * sym_power_matrix(b, q));
      CHECK(wedge_power_matrix(a * b, q) == wedge_power_matrix(a, q) * wedge_power_matrix(b, q));
    }
    // Entries of the exterior power are the q x q minors.
    IntMatrix w = wedge_power_matrix(a, 2);
    auto rows = wedge_basis(4, 2), cols = wedge_basis(3, 2);
    for (std::size_t r = 0; r < rows.size(); ++r)
      for (std::size_t c = 0; c < cols.size(); ++c) {
        IntMatrix minor(2, 2);
        for (std::size_t x = 0; x < 2; ++x)
          for (std::size_t y = 0; y < 2; ++y) minor(x, y) = a(rows[r][x], cols[c][y]);
        CHECK(w(r, c) == intlin::determinant(minor));
      }
  }
}

TEST_CASE("symmetrization then projection is multiplication by 2") {
  for (std::size_t r = 0; r <= 6; ++r)
    CHECK(symmetric_projection_matrix(r) * symmetrization_matrix(r) ==
          IntMatrix::identity(r * (r + 1) / 2).scaled(Integer(2)));
  auto c3 = builtin_group("C3");
  GLattice p = regular_lattice(c3);
  GLattice s2 = sym_power(p, 2), t2 = tensor_product(p, p);
  CHECK(verify_equivariant_map({s2, t2, symmetrization_matrix(3)}).equivariant);
  CHECK(verify_equivariant_map({t2, s2, symmetric_projection_matrix(3)}).equivariant);
}

TEST_CASE("quotients") {
  auto c2 = builtin_group("C2");
  GLattice z = trivial_lattice(c2, 1);
  GLattice reg = regular_lattice(c2);

  SUBCASE("zero sublattice") {
    auto [q, p] = quotient_lattice({trivial_lattice(c2, 0), reg, IntMatrix(2, 0)});
    CHECK(q.same_action(reg));
  }
  SUBCASE("index 2 is not saturated") {
    try {
      quotient_lattice({z, z, IntMatrix{{2}}});
      FAIL("expected NotSaturated");
    } catch (const NotSaturated& e) {
      CHECK(e.factors() == "Z/2");
    }
  }
  SUBCASE("non-injective") {
    CHECK_THROWS_AS(quotient_lattice({direct_sum(z, z), reg, IntMatrix{{1, 1}, {1, 1}}}), NotInjective);
  }
  SUBCASE("norm-one quotient of Z[C2] is the sign lattice") {
    auto [q, p] = quotient_lattice({z, reg, IntMatrix{{1}, {1}}});
    CHECK(q.same_action(sign_lattice()));
  }
  SUBCASE("complement without coordinate vectors") {
    // (2,3) is saturated but neither e1 nor e2 completes it unimodularly.
    auto [q, p] = quotient_lattice({z, trivial_lattice(c2, 2), IntMatrix{{2}, {3}}});
    CHECK(q.rank() == 1);
    CHECK((p.matrix * IntMatrix{{2}, {3}}).is_zero());
  }
}

TEST_CASE("invariants") {
  auto c2 = builtin_group("C2");
  CHECK(invariants_sublattice(trivial_lattice(c2, 3)) == IntMatrix::identity(3));
  CHECK(invariants_sublattice(regular_lattice(c2)) == IntMatrix{{1}, {1}});
  CHECK(invariants_sublattice(sign_lattice()).cols() == 0);
}

TEST_CASE("equivariance verdicts") {
  auto c2 = builtin_group("C2");
  GLattice z = trivial_lattice(c2, 1), reg = regular_lattice(c2);
  CHECK(verify_equivariant_map({reg, reg, IntMatrix::identity(2)}).equivariant);
  CHECK(verify_equivariant_map({z, reg, IntMatrix{{1}, {1}}}).equivariant);
  auto bad = verify_equivariant_map({z, reg, IntMatrix{{1}, {0}}});
  CHECK_FALSE(bad.equivariant);
  CHECK(c2->element_name(bad.element) == "g");
}

TEST_CASE("actions must be homomorphisms") {
  auto c2 = builtin_group("C2");
  CHECK_THROWS_AS(GLattice::from_generator_images(c2, {IntMatrix{{2}}}), InvalidSpec);
  CHECK_THROWS_AS(GLattice::from_generator_images(c2, {IntMatrix{{0, 1}, {1, 1}}}), InvalidSpec);
  auto q8 = builtin_group("Q8");
  // Sending both i and j to -1 is fine, i to -1 and j to a transposition is not.
  CHECK_NOTHROW(GLattice::from_generator_images(q8, {IntMatrix{{-1}}, IntMatrix{{-1}}}));
  CHECK_THROWS_AS(GLattice::from_generator_images(q8, {IntMatrix{{0, 1}, {1, 0}}, IntMatrix{{1, 0}, {0, -1}}}),
                  InvalidSpec);
}
