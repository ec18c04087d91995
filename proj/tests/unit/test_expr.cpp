#include <filesystem>
#include <fstream>

#include "doctest.h"
#include "torinv/errors.hpp"
#include "torinv/expr.hpp"

using namespace torinv;

namespace {

std::filesystem::path scratch_dir() {
  auto dir = std::filesystem::temp_directory_path() / "torinv_test_expr";
  std::filesystem::create_directories(dir);
  return dir;
}

void write_file(const std::filesystem::path& p, const std::string& text) {
  std::ofstream out(p);
  out << text;
}

}  // namespace

TEST_CASE("atoms and operators") {
  auto c2 = builtin_group("C2");
  CHECK(parse_lattice_expr("norm_one(C2)").lattice.same_action(
      GLattice::from_generator_images(c2, {IntMatrix{{-1}}})));
  CHECK(parse_lattice_expr("dual(norm_one(C2))").lattice.rank() == 1);
  CHECK(parse_lattice_expr("Z[Q8/{1,-1}]").lattice.rank() == 4);
  CHECK(parse_lattice_expr("Z[Q8]").lattice.rank() == 8);
  CHECK(parse_lattice_expr("Z[S3/<(1,2)>]").lattice.rank() == 3);
  CHECK(parse_lattice_expr("sym(Z[C3], 2)").lattice.rank() == 6);
  CHECK(parse_lattice_expr("wedge(Z[C3],2)").lattice.rank() == 3);
  CHECK(parse_lattice_expr("Z^3 (+) Z[C2]").lattice.rank() == 5);
  // (x) binds tighter than (+)
  CHECK(parse_lattice_expr("Z[C2] (+) Z[C2] (x) Z[C2]").lattice.rank() == 6);
  CHECK(parse_lattice_expr("(Z[C2] (+) Z[C2]) (x) Z[C2]").lattice.rank() == 8);
  CHECK(parse_lattice_expr("norm_one((1,2,3);(1,2))").lattice.rank() == 5);
}

TEST_CASE("the group of a bare Z") {
  CHECK_THROWS_AS(parse_lattice_expr("Z"), InvalidSpec);
  ExprContext ctx;
  ctx.group = builtin_group("C3");
  auto z = parse_lattice_expr("Z^2", ctx);
  CHECK(z.lattice.rank() == 2);
  CHECK(z.lattice.group().order() == 3);
  CHECK(parse_lattice_expr("Z (+) norm_one(C2)").lattice.group().order() == 2);
  CHECK_THROWS_AS(parse_lattice_expr("norm_one(C2) (+) norm_one(C3)"), InvalidSpec);
  CHECK_THROWS_AS(parse_lattice_expr("norm_one(C2)", ctx), InvalidSpec);
}

TEST_CASE("family data travel through direct sums") {
  auto t = parse_lattice_expr("norm_one(C3) (+) norm_one(C3)");
  REQUIRE(t.family);
  CHECK(t.family->n == 2);
  CHECK(t.family->phat_free);
  CHECK_FALSE(parse_lattice_expr("dual(norm_one(C3))").family);
  CHECK(t.expression == "norm_one(C3) (+) norm_one(C3)");
}

TEST_CASE("malformed expressions") {
  for (const char* bad : {"", "Z[", "sym(Z[C2])", "wedge(Z[C2], x)", "norm_one(C2", "Q", "Z[C2] (+)",
                          "Z[C2] Z[C2]", "Z[A5]", "Z[Q8/{1,i}]"})
    CHECK_THROWS_AS(parse_lattice_expr(bad), InvalidSpec);
  CHECK_THROWS_AS(parse_lattice_expr("sym(Z[S4], 4)"), RankOverflow);
}

TEST_CASE("explicit lattice files") {
  auto dir = scratch_dir();
  GLattice t = parse_lattice_expr("norm_one(C3)").lattice;
  write_file(dir / "t.lat", "# norm-one lattice of C3\n" + format_explicit_lattice(t, "C3"));
  auto back = parse_lattice_expr("explicit(t.lat)", ExprContext{nullptr, dir});
  CHECK(back.lattice.same_action(t));
  CHECK(back.lattice.labels() == t.labels());
  CHECK(parse_lattice_expr("explicit(t.lat) (+) Z", ExprContext{nullptr, dir}).lattice.rank() == 3);

  write_file(dir / "bad.lat", "group C2\nrank 1\n1 1 dense 2\n");
  CHECK_THROWS_AS(read_explicit_lattice(dir / "bad.lat"), InvalidSpec);
  write_file(dir / "short.lat", "group C2\nrank 2\n1 1 dense 1\n");
  CHECK_THROWS_AS(read_explicit_lattice(dir / "short.lat"), InvalidSpec);
  CHECK_THROWS_AS(read_explicit_lattice(dir / "missing.lat"), InvalidSpec);
}

TEST_CASE("short exact sequence files") {
  auto dir = scratch_dir();
  write_file(dir / "c2.ses", "group C2\nleft Z\nmiddle Z[C2]\nright quotient\nalpha 2 1 dense 1 1\n");
  auto ses = read_ses_file(dir / "c2.ses");
  CHECK(verify_short_exact(ses).exact);
  CHECK(ses.right.target.rank() == 1);

  write_file(dir / "c2b.ses",
             "group C2\nleft Z\nmiddle Z[C2]\nright norm_one(C2)\nalpha\n2 1 sparse 0 0 1 1 0 1\nbeta\n1 2 dense\n1 -1\n");
  auto ses2 = read_ses_file(dir / "c2b.ses");
  CHECK(verify_short_exact(ses2).exact);

  write_file(dir / "bad.ses", "group C2\nleft Z\nmiddle Z[C2]\nright quotient\nalpha 2 2 dense 1 1 1 1\n");
  CHECK_THROWS_AS(read_ses_file(dir / "bad.ses"), InvalidSpec);
  write_file(dir / "bad2.ses", "group C2\nleft Z\nmiddle Z[C2]\nsideways Z\n");
  CHECK_THROWS_AS(read_ses_file(dir / "bad2.ses"), InvalidSpec);
}
