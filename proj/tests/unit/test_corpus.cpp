#include <fstream>

#include "doctest.h"
#include "torinv/corpus.hpp"
#include "torinv/errors.hpp"
#include "torinv/koszul.hpp"

using namespace torinv;

TEST_CASE("Q8 sequence is left multiplication on the units") {
  auto ses = build_q8_sequence();
  const auto& g = ses.left.target.group();
  const std::vector<std::string> units{"1", "-1", "i", "-i", "j", "-j", "k", "-k"};
  std::vector<std::size_t> elt;
  for (const auto& u : units) elt.push_back(*g.find_element(u));
  auto basis_of = [&](std::size_t e) { return std::size_t(std::find(elt.begin(), elt.end(), e) - elt.begin()); };
  for (std::size_t a = 0; a < 8; ++a)
    for (std::size_t b = 0; b < 8; ++b) {
      const auto& m = ses.left.target.action(a);
      for (std::size_t r = 0; r < 8; ++r) CHECK(m(r, b) == Integer(r == basis_of(g.mul(a, elt[b])) ? 1 : 0));
    }
  CHECK(ses.left.source.rank() == 4);
  CHECK(ses.right.target.rank() == 4);
  CHECK(verify_short_exact(ses).exact);
  // on classes: i.[e] = [x], i.[x] = [e'] = -[e]
  const auto& t = ses.right.target;
  auto i = *g.find_element("i");
  CHECK(t.action(i)(1, 0) == Integer(1));
  CHECK(t.action(i)(0, 1) == Integer(-1));
  CHECK(t.labels() == std::vector<std::string>{"e", "x", "y", "z"});
}

TEST_CASE("Q8 module checks") {
  auto b = verify_q8_module_structure();
  // the ten printed generators span a proper sublattice of S^2(T^)
  CHECK_FALSE(b.get("decomposition basis").pass);
  CHECK(b.get("decomposition basis").detail.find("8") != std::string::npos);
  CHECK_FALSE(b.get("printed P_z reading").pass);
  for (const char* name : {"summands stable", "summand ranks", "monomial decomposition", "M permutation",
                           "M = Z[Q8/{1,-1}]", "H^1(Q8, M) = 0", "N_x sequence exact", "N_x character",
                           "N_x quotient character", "N_y, N_z characters", "koszul q<=3"}) {
    INFO(name << ": " << b.get(name).detail);
    CHECK(b.get(name).pass);
  }
  CHECK_FALSE(b.pass());
  CHECK_THROWS(b.get("no such check"));
}

TEST_CASE("Koszul ranks for the Q8 sequence") {
  auto v = verify_koszul_quasi_iso(build_q8_sequence(), 3);
  CHECK(v.pass);
  const std::size_t expect[] = {1, 4, 10, 20};
  for (std::size_t q = 0; q <= 3; ++q) CHECK(verify_koszul_quasi_iso(build_q8_sequence(), q).homology[0].free_rank() == expect[q]);
}

TEST_CASE("random lattices are reproducible") {
  for (const char* name : {"C2", "C3", "S3", "Q8"}) {
    auto g = builtin_group(name);
    for (std::uint64_t seed : {1u, 2u, 99u}) {
      auto a = random_lattice(g, 5, seed);
      auto b = random_lattice(g, 5, seed);
      CHECK(a.rank() == 5);
      CHECK(a.same_action(b));
      // the action is a homomorphism
      for (std::size_t x = 0; x < g->order(); ++x)
        for (std::size_t y = 0; y < g->order(); ++y) CHECK(a.action(g->mul(x, y)) == a.action(x) * a.action(y));
    }
  }
  auto g = builtin_group("C3");
  bool differ = false;
  for (std::uint64_t s = 1; s < 6 && !differ; ++s) differ = !random_lattice(g, 4, s).same_action(random_lattice(g, 4, s + 1));
  CHECK(differ);
}

TEST_CASE("random lattices: fast cohomology agrees with cochains") {
  for (const char* name : {"C2", "C3", "C4", "S3"}) {
    auto g = builtin_group(name);
    for (std::uint64_t seed = 100; seed < 106; ++seed) {
      auto l = random_lattice(g, 4, seed);
      for (std::size_t i = 0; i <= 2; ++i) {
        INFO(name << " seed " << seed << " degree " << i);
        CHECK(cohomology(l, i).value == brute_force_cohomology(l, i).value);
      }
    }
  }
}

TEST_CASE("corpus runs clean") {
  auto cases = corpus_list();
  CHECK(cases.size() >= 10);
  bool has_q8 = false;
  for (const auto& c : cases) {
    has_q8 = has_q8 || c.name == "q8";
    auto r = run_case(c);
    for (const auto& f : r.facts) {
      INFO(c.name << ": " << f.fact << " observed " << f.observed);
      CHECK(f.pass);
    }
    CHECK(r.pass);
    for (const auto& f : c.facts) CHECK((f.source.rfind("stated", 0) == 0 || f.source.rfind("oracle", 0) == 0));
  }
  CHECK(has_q8);
}

TEST_CASE("case file errors") {
  auto dir = std::filesystem::temp_directory_path() / "torinv_case_test";
  std::filesystem::create_directories(dir);
  auto write = [&](const std::string& text) {
    auto p = dir / "x.case";
    std::ofstream(p) << text;
    return p;
  };
  CHECK_THROWS_AS(read_case(write("lattice Z\n")), InvalidSpec);
  CHECK_THROWS_AS(read_case(write("name a\n")), InvalidSpec);
  CHECK_THROWS_AS(read_case(write("name a\nlattice Z\nbogus 1\n")), InvalidSpec);
  CHECK_THROWS_AS(read_case(write("name a\nlattice Z\nexpect rank = 1\n")), InvalidSpec);
  CHECK_THROWS_AS(read_case(write("name a\nlattice Z\nexpect rank = 1 | guessed\n")), InvalidSpec);
  CHECK_THROWS_AS(read_case(write("name a\nlattice random C2 3\n")), InvalidSpec);
  auto c = read_case(write("name a\nlattice norm_one(C2)\nexpect rank = 2 | stated: wrong on purpose\n"));
  auto r = run_case(c);
  CHECK_FALSE(r.pass);
  CHECK(r.facts[0].observed == "1");
  auto bad = read_case(write("name a\nlattice norm_one(C2)\nexpect frobnicate = 1 | oracle: none\n"));
  CHECK_FALSE(run_case(bad).pass);
  std::filesystem::remove_all(dir);
}
