#include "doctest.h"
#include "torinv/errors.hpp"
#include "torinv/gcohom.hpp"

using namespace torinv;
using intlin::AbelianGroupStructure;

namespace {

GLattice sign_lattice() { return GLattice::from_generator_images(builtin_group("C2"), {IntMatrix{{-1}}}); }

AbelianGroupStructure Zmod(long long n) { return AbelianGroupStructure::cyclic(n); }

// Lattices of rank <= 4 over g: trivial, permutation lattices, their duals,
// and the augmentation kernels of permutation lattices.
std::vector<GLattice> small_lattices(const GroupPtr& g) {
  std::vector<GLattice> out{trivial_lattice(g, 1), trivial_lattice(g, 2)};
  for (const auto& h : g->subgroups()) {
    if (g->order() / h.size() > 4 || h.size() == g->order()) continue;
    GLattice p = permutation_lattice(g, h);
    out.push_back(p);
    IntMatrix ones(p.rank(), 1);
    for (std::size_t k = 0; k < p.rank(); ++k) ones(k, 0) = 1;
    auto [q, proj] = quotient_lattice({trivial_lattice(g, 1), p, ones});
    out.push_back(q);
    out.push_back(dual_lattice(q));
  }
  return out;
}

}  // namespace

TEST_CASE("worked values") {
  CHECK(cohomology(sign_lattice(), 1).value == Zmod(2));
  CHECK(cohomology(sign_lattice(), 0).value.is_zero());
  CHECK(cohomology(trivial_lattice(builtin_group("C3"), 1), 2).value == Zmod(3));
  auto c1 = builtin_group("C1");
  GLattice z3 = trivial_lattice(c1, 3);
  CHECK(cohomology(z3, 0).value == AbelianGroupStructure::free(3));
  for (std::size_t i = 1; i <= 4; ++i) CHECK(cohomology(z3, i).value.is_zero());
  auto s3 = builtin_group("S3");
  CHECK(cohomology(regular_lattice(s3), 1).value.is_zero());
  CHECK(brute_force_cohomology(regular_lattice(s3), 1).value.is_zero());
  CHECK(cohomology(regular_lattice(s3), 0).value == AbelianGroupStructure::free(1));
  // H^2(S3, Z) = Hom(S3, Q/Z) = Z/2, H^3(S3, Z) = 0, H^4(S3, Z) = Z/6.
  CHECK(cohomology(trivial_lattice(s3, 1), 2).value == Zmod(2));
  CHECK(cohomology(trivial_lattice(s3, 1), 3).value.is_zero());
  CHECK(cohomology(trivial_lattice(s3, 1), 4).value == Zmod(6));
  // H^2(Q8, Z) = Q8^ab dual = (Z/2)^2, H^4(Q8, Z) = Z/8 (periodic of period 4).
  auto q8 = builtin_group("Q8");
  CHECK(cohomology(trivial_lattice(q8, 1), 2).value == AbelianGroupStructure(0, {2, 2}));
  CHECK(cohomology(trivial_lattice(q8, 1), 3).value.is_zero());
}

TEST_CASE("divisible coefficients") {
  CHECK(cohomology_qz(sign_lattice(), 1).value.is_zero());
  auto c1 = builtin_group("C1");
  auto h0 = cohomology_qz(trivial_lattice(c1, 3), 0);
  CHECK(h0.divisible_rank == 3);
  CHECK(h0.value.is_zero());
  CHECK(h0.value_string() == "(Q/Z)^3");
  CHECK(cohomology_qz(trivial_lattice(builtin_group("C3"), 1), 3).value == Zmod(3));
  auto s = cohomology_qz(sign_lattice(), 0);
  CHECK(s.divisible_rank == 0);
  CHECK(s.value == Zmod(2));
}

TEST_CASE("brute force worked values") {
  CHECK(brute_force_cohomology(sign_lattice(), 1).value == Zmod(2));
  CHECK(brute_force_cohomology(trivial_lattice(builtin_group("C2"), 1), 2).value == Zmod(2));
  CHECK(brute_force_cohomology(regular_lattice(builtin_group("C4")), 0).value == AbelianGroupStructure::free(1));
  CHECK_THROWS_AS(brute_force_cohomology(sign_lattice(), 3), SizeExceeded);
  CHECK_THROWS_AS(brute_force_cohomology(trivial_lattice(builtin_group("C64"), 1), 2), SizeExceeded);
}

TEST_CASE("normalized differentials square to zero") {
  for (const char* name : {"C4", "S3", "Q8", "C2xC2"}) {
    auto g = builtin_group(name);
    for (const auto& m : small_lattices(g))
      for (std::size_t i = 0; i < 3; ++i) {
        auto a = normalized_differential(m, i), b = normalized_differential(m, i + 1);
        CHECK((b * a).is_zero());
        CHECK(a.cols() == normalized_cochain_rank(m, i));
      }
  }
}

TEST_CASE("cochain model agrees with the brute-force oracle") {
  for (const auto& name : builtin_group_names()) {
    auto g = builtin_group(name);
    if (g->order() > 8) continue;
    for (const auto& m : small_lattices(g))
      for (std::size_t i = 0; i <= 2; ++i) {
        INFO(name << " rank " << m.rank() << " degree " << i);
        CHECK(cohomology(m, i).value == brute_force_cohomology(m, i).value);
      }
  }
}

TEST_CASE("periodic resolution agrees with the cochain model") {
  for (const char* name : {"C2", "C3", "C4", "C6"}) {
    auto g = builtin_group(name);
    for (const auto& m : small_lattices(g))
      for (std::size_t i = 1; i <= 3; ++i) {
        auto direct = intlin::homology_structure(normalized_differential(m, i), normalized_differential(m, i - 1));
        CHECK(cohomology(m, i).value == direct);
      }
  }
}

TEST_CASE("cyclic periodicity") {
  for (long long n = 1; n <= 12; ++n) {
    GLattice z = trivial_lattice(builtin_group("C" + std::to_string(n)), 1);
    for (std::size_t k = 1; k <= 3; ++k) {
      CHECK(cohomology(z, 2 * k).value == Zmod(n));
      CHECK(cohomology(z, 2 * k + 1).value.is_zero());
    }
  }
}

TEST_CASE("positive-degree cohomology is killed by the group order") {
  for (const char* name : {"C4", "S3", "D4", "Q8", "C2xC2"}) {
    auto g = builtin_group(name);
    for (const auto& m : small_lattices(g))
      for (std::size_t i = 1; i <= 3; ++i) {
        auto v = cohomology(m, i).value;
        INFO(name << " rank " << m.rank() << " degree " << i << ": " << v.to_string());
        for (const auto& d : v.torsion()) CHECK(divides(d, Integer((long long)g->order())));
      }
  }
}

TEST_CASE("cohomology of the symmetric square of the regular lattice is 2-torsion") {
  for (const char* name : {"C3", "S3"}) {
    GLattice s2 = sym_power(regular_lattice(builtin_group(name)), 2);
    for (std::size_t i = 1; i <= 3; ++i) {
      auto v = cohomology(s2, i).value;
      CHECK(v.free_rank() == 0);
      for (const auto& d : v.torsion()) CHECK(d == Integer(2));
    }
  }
}

TEST_CASE("shapiro comparisons") {
  auto q8 = builtin_group("Q8");
  auto v = shapiro_compare(q8, parse_subgroup(*q8, "{1,-1}"), 1);
  CHECK(v.equal);
  CHECK(v.induced.value.is_zero());
  auto c4 = builtin_group("C4");
  auto w = shapiro_compare(c4, c4->subgroups()[1], 2);
  CHECK(w.equal);
  CHECK(w.induced.value == Zmod(2));
  auto s3 = builtin_group("S3");
  auto full = shapiro_compare(s3, parse_subgroup(*s3, "S3"), 2);
  CHECK(full.equal);
  CHECK(full.restricted.value == Zmod(2));
}

TEST_CASE("degree caps") {
  auto q8 = builtin_group("Q8");
  CHECK(default_degree_cap(*q8) == 3);
  CHECK(default_degree_cap(*builtin_group("C2xC2")) == 5);
  CHECK(default_degree_cap(*builtin_group("C5")) == kUncapped);
  try {
    cohomology(trivial_lattice(q8, 1), 4);
    FAIL("expected DegreeCapExceeded");
  } catch (const DegreeCapExceeded& e) {
    CHECK(e.estimated_cochain_rank() == doctest::Approx(16807.0));
  }
  CohomologyOptions opts;
  opts.degree_cap = 4;
  CHECK(cohomology(trivial_lattice(q8, 1), 4, opts).value == Zmod(8));
  CHECK_NOTHROW(cohomology(trivial_lattice(builtin_group("C7"), 1), 11));
}

TEST_CASE("cancellation") {
  std::stop_source src;
  src.request_stop();
  CohomologyOptions opts;
  opts.stop = src.get_token();
  clear_cohomology_cache();
  CHECK_THROWS_AS(cohomology(regular_lattice(builtin_group("Q8")), 2, opts), Cancelled);
}
