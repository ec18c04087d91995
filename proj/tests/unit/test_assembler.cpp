#include <functional>

#include "doctest.h"
#include "torinv/assembler.hpp"
#include "torinv/corpus.hpp"
#include "torinv/errors.hpp"

using namespace torinv;
using nlohmann::json;

namespace {

json golden(const std::string& name) {
  return read_json_file(std::filesystem::path(TORINV_SOURCE_DIR) / "tests" / "golden" / (name + ".json"));
}

void check_shape(const ExactSequenceReport& r, const std::string& name) {
  std::string why;
  INFO(name << ": " << why);
  bool ok = same_shape(r.to_json(), golden(name), &why);
  INFO(why);
  CHECK(ok);
}

std::vector<TorusLattice> sample_tori() {
  return {norm_one_lattice(builtin_group("C2")), norm_one_lattice(builtin_group("C3")),
          norm_one_lattice(builtin_group("S3")), split_torus_lattice(builtin_group("C2"), 2),
          TorusLattice{build_q8_sequence().right.target, {}, {}, {}}};
}

FieldProfile profile(std::optional<std::size_t> cd, bool rel_br = false, bool mu2 = false, bool odd = false) {
  FieldProfile p;
  p.cd_bound = cd;
  p.rel_brauer_trivial = rel_br;
  p.mu2_full = mu2;
  p.odd_part_only = odd;
  return p;
}

bool is_zero_node(const ExactSequenceReport& r, const std::string& id) {
  return r.node(id).simplified->kind == TermKind::zero;
}

void walk_terms(const TermPtr& t, const std::function<void(const Term&)>& f) {
  f(*t);
  for (const auto& c : t->children) walk_terms(c, f);
}

}  // namespace

TEST_CASE("diagram shapes match the hand transcriptions") {
  for (const auto& t : sample_tori()) {
    const FieldProfile p;
    check_shape(hs_weight3_sequence(t, p), "hs_weight3");
    check_shape(assemble_inv4(t, p), "inv4");
    check_shape(assemble_inv5(t, p), "inv5");
  }
  for (const char* g : {"C2", "C3"}) {
    auto [u4, u5] = assemble_unramified(norm_one_lattice(builtin_group(g)), FieldProfile{});
    check_shape(u4, "unramified_inv4");
    check_shape(u5, "unramified_inv5");
  }
  auto cd1 = assemble_inv5(norm_one_lattice(builtin_group("C3")), profile(1));
  REQUIRE(cd1.subreport("inv5_cd1"));
  check_shape(*cd1.subreport("inv5_cd1"), "inv5_cd1");
  CHECK_FALSE(assemble_inv5(norm_one_lattice(builtin_group("C3")), profile(2)).subreport("inv5_cd1"));

  auto t3 = norm_one_lattice(builtin_group("C3"));
  auto reps = special_family_reports(torus_direct_sum(t3, t3), profile(1, true, true, true));
  std::map<std::string, const ExactSequenceReport*> by_kind;
  for (const auto& r : reps) by_kind[r.kind] = &r;
  for (const char* k : {"a2_triangle", "inv4_family", "inv5_cd1", "inv5_family", "hs_splitting"}) {
    REQUIRE(by_kind.count(k));
    check_shape(*by_kind[k], k);
  }
  REQUIRE(by_kind.count("final_odd"));
  check_shape(*by_kind["final_odd"], "final_odd_n2");
}

TEST_CASE("shape comparison is strict") {
  auto j = assemble_inv4(norm_one_lattice(builtin_group("C2")), FieldProfile{}).to_json();
  auto g = golden("inv4");
  CHECK(same_shape(j, g));
  auto dropped = j;
  dropped["arrows"].erase(dropped["arrows"].begin());
  std::string why;
  CHECK_FALSE(same_shape(dropped, g, &why));
  CHECK_FALSE(why.empty());
  auto relabelled = j;
  for (auto& a : relabelled["arrows"])
    if (a["label"] == "gamma") a["label"] = "cup";
  CHECK_FALSE(same_shape(relabelled, g));
  auto reversed = j;
  for (auto& a : reversed["arrows"])
    if (a["label"] == "inj") std::swap(a["from"], a["to"]);
  CHECK_FALSE(same_shape(reversed, g));
  CHECK_FALSE(same_shape(golden("inv4"), golden("unramified_inv4")));
}

TEST_CASE("reports are deterministic and carry anchors") {
  for (const auto& t : sample_tori()) {
    auto p = profile(1, true);
    auto a = assemble_inv5(t, p).to_json().dump();
    auto b = assemble_inv5(t, p).to_json().dump();
    CHECK(a == b);
    for (const auto& r : {assemble_inv4(t, p), assemble_inv5(t, p), hs_weight3_sequence(t, p)}) {
      CHECK_FALSE(r.anchor.empty());
      for (const auto& n : r.nodes) CHECK_FALSE(n.anchor.empty());
      for (const auto& e : r.log) CHECK_FALSE(e.anchor.empty());
      auto j = r.to_json();
      for (const auto& n : j["nodes"]) {
        auto s = n["status"].get<std::string>();
        CHECK((s == "computed" || s == "symbolic" || s == "external-input"));
      }
    }
  }
}

TEST_CASE("E2 page of the slice spectral sequence") {
  auto t = split_torus_lattice(builtin_group("C2"), 3);
  auto cells = e2_page(t, 3, {0, 4}, {0, 4});
  CHECK(cells.size() == 25);
  for (const auto& c : cells) {
    INFO("p = " << c.p << " q = " << c.q);
    if (c.p < c.q) {
      CHECK(c.term->kind == TermKind::zero);
      continue;
    }
    REQUIRE(c.term->kind == TermKind::field_coh);
    CHECK(c.term->degree == std::size_t(c.p - c.q));
    const auto& coeff = c.term->children[0];
    if (c.q == 0) {
      CHECK(coeff->kind == TermKind::atom);
      CHECK(coeff->name == "Z(3)");
    } else {
      REQUIRE(coeff->kind == TermKind::tensor);
      CHECK(coeff->children[0]->lattice->rank() == binomial(3 + c.q - 1, c.q));
      const auto& z = coeff->children[1]->name;
      if (c.q <= 3)
        CHECK(z == "Z(" + std::to_string(3 - c.q) + ")");
      else
        CHECK(z.find("Q/Z(-1)[-1]") != std::string::npos);
    }
  }
  CHECK_THROWS_AS(e2_page(t, 3, {0, 1}, {-1, 1}), InvalidSpec);
}

TEST_CASE("motivic cohomology tables") {
  auto q8 = TorusLattice{build_q8_sequence().right.target, {}, {}, {}};
  auto w3 = motivic_table(q8, 3);
  REQUIRE(w3.size() == 7);
  for (std::size_t i = 0; i <= 2; ++i) CHECK(w3[i].terms[0]->kind == TermKind::zero);
  CHECK(w3[6].terms[0]->kind == TermKind::lattice);
  CHECK(w3[6].terms[0]->lattice->rank() == 20);
  CHECK(w3[5].to_string() == "S^2(T^) (x) F_sep^*");
  auto w4 = motivic_table(q8, 4);
  REQUIRE(w4.size() == 8);
  CHECK(w4[5].extension);
  CHECK(w4[5].terms.size() == 2);
  CHECK(w4[7].to_string() == "S^3(T^) (x) F_sep^*");
  for (const auto& e : w4)
    if (e.degree != 5) CHECK_FALSE(e.extension);
  CHECK_THROWS_AS(motivic_table(q8, 5), InvalidSpec);
}

TEST_CASE("weight-3 sequence over a split torus") {
  auto t = split_torus_lattice(builtin_group("C1"), 2);
  auto r = hs_weight3_sequence(t, profile(0));
  // cd 0: every positive-degree torsion cohomology group dies
  CHECK(is_zero_node(r, "H2T"));
  CHECK(is_zero_node(r, "H3T"));
  CHECK_FALSE(is_zero_node(r, "H5"));
  // H^1(F, S^2(T^) (x) F_sep^*) dies by Hilbert 90 on the split lattice
  CHECK(is_zero_node(r, "H1S2F"));
  auto j = r.to_json();
  for (const auto& n : j["nodes"])
    if (n["id"] == "S2F") CHECK(n["lattices"][0]["rank"] == 3);
}

TEST_CASE("degree-4 diagram under profiles") {
  auto t = norm_one_lattice(builtin_group("C3"));
  auto general = assemble_inv4(t, FieldProfile{});
  CHECK_FALSE(is_zero_node(general, "H3T"));
  auto cd1 = assemble_inv4(t, profile(1));
  CHECK(is_zero_node(cd1, "H3T"));
  CHECK(is_zero_node(cd1, "H2T"));
  // family datum: CH^3(BT)_tors and I vanish
  CHECK(is_zero_node(general, "I"));
  CHECK(is_zero_node(general, "CH3"));
  auto q8 = assemble_inv4(TorusLattice{build_q8_sequence().right.target, {}, {}, {}}, FieldProfile{});
  CHECK(q8.node("I").simplified->status() == NodeStatus::external_input);
  CHECK(q8.node("CH3").simplified->status() == NodeStatus::external_input);
}

TEST_CASE("degree-5 diagram, split torus, cd 0") {
  auto t = split_torus_lattice(builtin_group("C1"), 1);
  auto r = assemble_inv5(t, profile(0));
  CHECK(is_zero_node(r, "H3TH1"));
  CHECK(is_zero_node(r, "H4TH1"));
  CHECK_FALSE(is_zero_node(r, "Inv5"));
  // H^{6-q} and H^{7-q} over uniquely divisible coefficients vanish
  std::size_t e2 = 0;
  for (const auto& [k, v] : r.facts)
    if (k.rfind("E2 term", 0) == 0) {
      ++e2;
      CHECK(v == "0");
    }
  CHECK(e2 == 4);
  const auto& h2p = r.node("H2p");
  CHECK_FALSE(h2p.definition.empty());
  CHECK_FALSE(h2p.alternative_definition.empty());
}

TEST_CASE("unramified diagrams") {
  // split S: T^ = 0 and every lattice node vanishes
  auto [u4, u5] = assemble_unramified(split_torus_lattice(builtin_group("C2"), 1), FieldProfile{});
  CHECK(u4.fact("resolution exact") == "yes");
  CHECK(u4.fact("P^ permutation") == "yes");
  CHECK(is_zero_node(u4, "H2T"));
  CHECK(is_zero_node(u5, "S3F"));
  CHECK(u4.find_label("Hbar^4_nr(F(S), Q/Z(3))"));
  CHECK_FALSE(u4.find_label("Inv^4(T, Q/Z(3))_norm"));
  CHECK(u5.find_label("Hbar^5_nr(F(S), Q/Z(4))"));

  auto sign = norm_one_lattice(builtin_group("C2"));
  auto [s4, s5] = assemble_unramified(sign, FieldProfile{});
  CHECK(s4.fact("resolution exact") == "yes");
  CHECK(s5.fact("flasque certificate").size() > 0);
  int relabelled = 0;
  for (const auto& n : s4.nodes) relabelled += n.label.find("_nr(F(S)") != std::string::npos;
  CHECK(relabelled == 2);
}

TEST_CASE("special family reports") {
  CHECK_THROWS_AS(special_family_reports(TorusLattice{build_q8_sequence().right.target, {}, {}, {}}, FieldProfile{}),
                  FamilyDatumMissing);

  auto c2 = norm_one_lattice(builtin_group("C2"));
  auto reps = special_family_reports(c2, profile(1, true, true, true));
  std::map<std::string, const ExactSequenceReport*> k;
  for (const auto& r : reps) k[r.kind] = &r;
  REQUIRE(k.count("inv3"));
  CHECK(k["inv3"]->find_label("Br(L/F)"));
  CHECK(is_zero_node(*k["inv3"], "Br"));
  REQUIRE(k.count("koszul2"));
  CHECK(k["koszul2"]->fact("exact") == "yes");
  CHECK(k["koszul2"]->fact("S^2(P^) -> P^ (x) P^ -> S^2(P^) is 2") == "yes");
  // n = 1: no correction terms
  REQUIRE(k.count("final_odd"));
  CHECK(k["final_odd"]->nodes.size() == 4);
  REQUIRE(k.count("chow"));
  CHECK(is_zero_node(*k["chow"], "S2Dec"));
  CHECK(is_zero_node(*k["chow"], "CH3tors"));

  // n = 2 over C3: H^3(C3, Q/Z) = Z/3 and H^4(C3, Q/Z) = 0
  auto t3 = norm_one_lattice(builtin_group("C3"));
  auto two = special_family_reports(torus_direct_sum(t3, t3), profile(1, true, true, true));
  const ExactSequenceReport* fo = nullptr;
  for (const auto& r : two)
    if (r.kind == "final_odd") fo = &r;
  REQUIRE(fo);
  CHECK(evaluate_term(fo->node("C3").simplified) == AbelianGroupStructure{0, {Integer(3)}});
  CHECK(fo->node("C4").simplified->kind == TermKind::zero);
  int crosschecks = 0;
  for (const auto& [key, v] : fo->facts)
    if (key.find("away from 2") != std::string::npos) {
      ++crosschecks;
      CHECK(v.rfind("yes", 0) == 0);
    }
  CHECK(crosschecks == 2);

  // without odd_part_only there is no final_odd report
  for (const auto& r : special_family_reports(t3, profile(1))) CHECK(r.kind != "final_odd");
}

TEST_CASE("special family: CH groups are the invariants") {
  // CH^i(BT) = S^i(T^)^Gamma; compare ranks with an invariant count on the symmetric powers
  for (const char* g : {"C2", "C3", "S3"}) {
    auto t = norm_one_lattice(builtin_group(g));
    auto reps = special_family_reports(t, FieldProfile{});
    const auto& chow = reps.front();
    REQUIRE(chow.kind == "chow");
    for (std::size_t i = 1; i <= 3; ++i) {
      auto v = evaluate_term(chow.node("CH" + std::to_string(i)).simplified);
      REQUIRE(v);
      CHECK(v->free_rank() == invariants_sublattice(sym_power(t.lattice, i)).cols());
    }
  }
}

TEST_CASE("computed lattice cohomology agrees with independent oracles") {
  // Trivial Z over a cyclic group of order m: H^i = Z/m for even i > 0, 0 for odd i.
  // With Q/Z coefficients the degree shifts by one.
  std::size_t checked = 0;
  auto t3 = norm_one_lattice(builtin_group("C3"));
  auto t5 = norm_one_lattice(builtin_group("C5"));
  for (const auto& t : {torus_direct_sum(t3, t3), torus_direct_sum(t5, torus_direct_sum(t5, t5))}) {
    const auto m = t.lattice.group().order();
    for (const auto& r : special_family_reports(t, profile(1, true, true, true)))
      for (const auto& n : r.nodes)
        walk_terms(n.term, [&](const Term& x) {
          if (x.kind != TermKind::lattice_coh || x.name != "Z") return;
          const std::size_t shifted = x.degree + (x.token == CoefficientToken::qz ? 1 : 0);
          auto expect = shifted % 2 == 0 ? AbelianGroupStructure{0, {Integer(long(m))}} : AbelianGroupStructure::zero();
          CHECK(x.value == expect);
          ++checked;
        });
  }
  CHECK(checked >= 4);
  // H^1(M (x) Q/Z) = H^2(M), against the brute-force cochain computation
  for (const auto& l : {t3.lattice, sym_power(t3.lattice, 2), norm_one_lattice(builtin_group("S3")).lattice}) {
    auto t = lattice_coh("L", l, CoefficientToken::qz, 1);
    CHECK(t->value == brute_force_cohomology(l, 2).value);
    for (std::size_t i = 0; i <= 2; ++i)
      CHECK(lattice_coh("L", l, CoefficientToken::z, i)->value == brute_force_cohomology(l, i).value);
  }
}

TEST_CASE("Q8 conclusion truth table") {
  for (unsigned mask = 0; mask < 16; ++mask) {
    FieldProfile p;
    p.characteristic = (mask & 1) ? 0 : 3;
    p.normalize();
    p.rel_brauer_trivial = mask & 2;
    p.cd_bound = (mask & 4) ? std::optional<std::size_t>(1) : std::nullopt;
    const bool flag = mask & 8;
    auto r = q8_conclusion(p, flag);
    INFO("mask " << mask);
    CHECK(r.find_label("Br(K_1/F) (+) Br(K_2/F) (+) Br(K_3/F)"));
    CHECK(r.subreport("q8_summands"));
    CHECK(r.subreport("inv4"));
    if (mask == 15)
      CHECK(r.fact("conclusion") == kQ8Conclusion);
    else
      CHECK(r.fact("conclusion").rfind("inconclusive: missing ", 0) == 0);
  }
  auto r = q8_conclusion(profile(1, true), true);
  CHECK(r.fact("check decomposition basis").rfind("FAIL", 0) == 0);
  CHECK(r.fact("check monomial decomposition").rfind("pass", 0) == 0);
  CHECK(is_zero_node(r, "Br1"));
  CHECK(is_zero_node(r, "Br2"));
  auto cd2 = profile(2, true);
  CHECK(q8_conclusion(cd2, true).fact("conclusion").find("cd_bound = 1") != std::string::npos);
}
