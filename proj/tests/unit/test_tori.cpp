#include "doctest.h"
#include "torinv/errors.hpp"
#include "torinv/tori.hpp"

using namespace torinv;
using intlin::AbelianGroupStructure;

namespace {

GLattice sign_lattice() { return GLattice::from_generator_images(builtin_group("C2"), {IntMatrix{{-1}}}); }

void check_flasque_resolution(const GLattice& s) {
  auto r = flasque_resolution(s);
  CHECK(r.exactness.exact);
  INFO(r.exactness.detail);
  CHECK(r.ses.left.source.same_action(s));
  CHECK(is_permutation_in_basis(r.ses.left.target).holds);
  CHECK(r.certificate.holds);
  CHECK(r.certificate.certificate.size() == s.group().subgroups().size());
  CHECK(flasqueness(r.ses.right.target, FlasqueKind::flasque).holds);
}

}  // namespace

TEST_CASE("norm-one lattices") {
  auto c2 = builtin_group("C2");
  auto t2 = norm_one_lattice(c2);
  CHECK(t2.lattice.same_action(sign_lattice()));
  CHECK(t2.family->n == 1);
  CHECK(norm_one_lattice(builtin_group("C1")).lattice.rank() == 0);
  auto c3 = builtin_group("C3");
  auto t3 = norm_one_lattice(c3);
  CHECK(t3.lattice.rank() == 2);
  CHECK(t3.lattice.action(c3->generators()[0]) == IntMatrix{{0, -1}, {1, -1}});
  for (const char* name : {"C4", "S3", "Q8", "D4"}) {
    auto g = builtin_group(name);
    auto t = norm_one_lattice(g);
    CHECK(t.lattice.rank() == g->order() - 1);
    // dual(T) sits in Z[G] as the augmentation kernel, with trivial quotient.
    IntMatrix aug(1, g->order());
    for (std::size_t k = 0; k < g->order(); ++k) aug(0, k) = 1;
    IntMatrix ker = intlin::kernel_basis(aug);
    auto [a, incl] = sub_lattice(regular_lattice(g), ker);
    CHECK(verify_short_exact({incl, {regular_lattice(g), trivial_lattice(g, 1), aug}}).exact);
    // The augmentation kernel and the dual of the norm quotient have equal
    // cohomology in low degrees.
    for (std::size_t i = 0; i <= 2; ++i) CHECK(cohomology(a, i).value == cohomology(dual_lattice(t.lattice), i).value);
  }
}

TEST_CASE("permutation recognition") {
  auto q8 = builtin_group("Q8");
  for (const auto& h : q8->subgroups()) CHECK(is_permutation_in_basis(permutation_lattice(q8, h)).holds);
  auto v = is_permutation_in_basis(sign_lattice());
  CHECK_FALSE(v.holds);
  CHECK(v.element == 1);
}

TEST_CASE("flasqueness predicates") {
  auto q8 = builtin_group("Q8");
  auto z = trivial_lattice(q8, 1);
  CHECK(flasqueness(z, FlasqueKind::flasque).holds);
  CHECK(flasqueness(z, FlasqueKind::coflasque).holds);
  for (const auto& h : q8->subgroups()) {
    GLattice p = permutation_lattice(q8, h);
    CHECK(flasqueness(p, FlasqueKind::flasque).holds);
    CHECK(flasqueness(p, FlasqueKind::coflasque).holds);
  }
  auto s = flasqueness(sign_lattice(), FlasqueKind::coflasque);
  CHECK_FALSE(s.holds);
  CHECK(s.certificate.back().h1 == AbelianGroupStructure::cyclic(2));
  CHECK_FALSE(flasqueness(sign_lattice(), FlasqueKind::flasque).holds);
  // Duality between the two notions.
  for (const char* name : {"C3", "S3", "C2xC2"}) {
    GLattice t = norm_one_lattice(builtin_group(name)).lattice;
    CHECK(flasqueness(t, FlasqueKind::flasque).holds == flasqueness(dual_lattice(t), FlasqueKind::coflasque).holds);
    CHECK(flasqueness(t, FlasqueKind::coflasque).holds == flasqueness(dual_lattice(t), FlasqueKind::flasque).holds);
  }
  // The norm-one torus of a Klein four extension is not flasque: H^1(G, dual T) = H^2(G, Z) = (Z/2)^2.
  CHECK_FALSE(flasqueness(norm_one_lattice(builtin_group("C2xC2")).lattice, FlasqueKind::flasque).holds);
}

TEST_CASE("coflasque resolutions") {
  auto c2 = builtin_group("C2");
  auto triv = coflasque_resolution(trivial_lattice(c2, 1));
  CHECK(triv.ses.left.source.rank() == 0);
  CHECK(triv.ses.left.target.rank() == 1);
  CHECK(triv.exactness.exact);
  auto reg = coflasque_resolution(regular_lattice(c2));
  CHECK(reg.ses.left.source.rank() == 0);
  CHECK(reg.certificate.holds);
  auto sign = coflasque_resolution(sign_lattice());
  CHECK(sign.exactness.exact);
  CHECK(sign.certificate.holds);
  CHECK(is_permutation_in_basis(sign.ses.left.target).holds);
}

TEST_CASE("flasque resolutions") {
  auto c2 = builtin_group("C2");
  auto triv = flasque_resolution(trivial_lattice(c2, 1));
  CHECK(triv.ses.right.target.rank() == 0);
  CHECK(triv.exactness.exact);

  auto sign = flasque_resolution(sign_lattice());
  CHECK(sign.ses.left.target.same_action(regular_lattice(c2)));
  CHECK(sign.ses.right.target.same_action(trivial_lattice(c2, 1)));
  CHECK(sign.ses.left.matrix == IntMatrix{{1}, {-1}});

  check_flasque_resolution(sign_lattice());
  check_flasque_resolution(norm_one_lattice(builtin_group("C3")).lattice);
  check_flasque_resolution(norm_one_lattice(builtin_group("S3")).lattice);
  check_flasque_resolution(norm_one_lattice(builtin_group("C2xC2")).lattice);
}

TEST_CASE("tate cohomology in degree zero") {
  auto c3 = builtin_group("C3");
  CHECK(tate_h0(trivial_lattice(c3, 1)) == AbelianGroupStructure::cyclic(3));
  CHECK(tate_h0(regular_lattice(c3)).is_zero());
  // Agrees with H^2 = H^0-hat for cyclic groups.
  GLattice t = norm_one_lattice(c3).lattice;
  CHECK(tate_h0(t) == cohomology(t, 2).value);
}

TEST_CASE("family data") {
  auto c3 = builtin_group("C3");
  auto two = torus_direct_sum(norm_one_lattice(c3), norm_one_lattice(c3));
  REQUIRE(two.family);
  CHECK(two.family->n == 2);
  CHECK(two.family->phat.rank() == 6);
  CHECK(two.family->phat_free);
  // 0 -> Z^n -> P -> T -> 0 is exact.
  auto [q, proj] = quotient_lattice({trivial_lattice(c3, 2), two.family->phat, two.family->inclusion});
  CHECK(q.same_action(two.lattice));
  auto split = split_torus_lattice(builtin_group("C1"), 3);
  CHECK(split.family->n == 3);
  CHECK(split.family->phat.rank() == 6);
}
