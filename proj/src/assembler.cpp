#include "torinv/assembler.hpp"

#include <algorithm>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include "torinv/corpus.hpp"
#include "torinv/errors.hpp"
#include "torinv/koszul.hpp"

namespace torinv {

using nlohmann::json;

// ---------------------------------------------------------------- report basics

const ReportNode& ExactSequenceReport::node(const std::string& id) const {
  for (const auto& n : nodes)
    if (n.id == id) return n;
  throw InvalidSpec("report " + kind + " has no node " + id);
}

const ReportNode* ExactSequenceReport::find_label(const std::string& label) const {
  for (const auto& n : nodes)
    if (n.label == label) return &n;
  return nullptr;
}

std::string ExactSequenceReport::fact(const std::string& key) const {
  for (const auto& [k, v] : facts)
    if (k == key) return v;
  return "";
}

const ExactSequenceReport* ExactSequenceReport::subreport(const std::string& k) const {
  for (const auto& s : subreports)
    if (s.kind == k) return &s;
  return nullptr;
}

std::optional<AbelianGroupStructure> evaluate_term(const TermPtr& t) {
  switch (t->kind) {
    case TermKind::zero: return AbelianGroupStructure::zero();
    case TermKind::group:
    case TermKind::lattice_coh:
      if (t->divisible_rank) return std::nullopt;
      return t->value;
    case TermKind::lattice: return AbelianGroupStructure::free(t->lattice->rank());
    case TermKind::invariants:
      if (t->children[0]->kind == TermKind::lattice)
        return AbelianGroupStructure::free(invariants_sublattice(*t->children[0]->lattice).cols());
      return std::nullopt;
    case TermKind::power: {
      auto v = evaluate_term(t->children[0]);
      if (!v) return std::nullopt;
      return v->power(t->degree);
    }
    case TermKind::sum: {
      AbelianGroupStructure acc;
      for (const auto& c : t->children) {
        auto v = evaluate_term(c);
        if (!v) return std::nullopt;
        acc = acc.direct_sum(*v);
      }
      return acc;
    }
    case TermKind::torsion_part: {
      auto v = evaluate_term(t->children[0]);
      if (!v) return std::nullopt;
      return v->torsion_part();
    }
    default: return std::nullopt;
  }
}

namespace {

std::optional<std::string> structure_string(const TermPtr& t) {
  if ((t->kind == TermKind::group || t->kind == TermKind::lattice_coh) && t->divisible_rank) {
    CohomologyResult r;
    r.value = t->value;
    r.divisible_rank = t->divisible_rank;
    return r.value_string();
  }
  if (auto v = evaluate_term(t)) return v->to_string();
  return std::nullopt;
}

void collect_lattices(const TermPtr& t, std::map<std::string, GLattice>& out) {
  if (t->kind == TermKind::lattice) out.emplace(t->name, *t->lattice);
  for (const auto& c : t->children) collect_lattices(c, out);
}

}  // namespace

json ExactSequenceReport::to_json() const {
  json j;
  j["kind"] = kind;
  j["title"] = title;
  j["anchor"] = anchor;
  j["nodes"] = json::array();
  for (const auto& n : nodes) {
    json o;
    o["id"] = n.id;
    o["label"] = n.label;
    o["status"] = to_string(n.simplified->status());
    o["anchor"] = n.anchor;
    if (auto s = structure_string(n.simplified)) o["structure"] = *s;
    auto simplified = n.simplified->to_string();
    if (simplified != n.term->to_string()) o["simplified"] = simplified;
    if (!n.definition.empty()) o["definition"] = n.definition;
    if (!n.alternative_definition.empty()) o["alternative_definition"] = n.alternative_definition;
    std::map<std::string, GLattice> lats;
    collect_lattices(n.term, lats);
    for (const auto& [name, l] : lats)
      o["lattices"].push_back({{"name", name},
                               {"rank", l.rank()},
                               {"invariant_rank", invariants_sublattice(l).cols()},
                               {"group", l.group().name()}});
    j["nodes"].push_back(o);
  }
  j["arrows"] = json::array();
  for (const auto& a : arrows) j["arrows"].push_back({{"from", a.from}, {"to", a.to}, {"label", a.label}, {"exact_at", a.exact_at}});
  j["simplification_log"] = json::array();
  for (const auto& e : log)
    j["simplification_log"].push_back({{"rule", e.rule}, {"anchor", e.anchor}, {"before", e.before}, {"after", e.after}});
  if (!notes.empty()) j["notes"] = notes;
  if (!facts.empty()) {
    j["facts"] = json::array();
    for (const auto& [k, v] : facts) j["facts"].push_back({{"key", k}, {"value", v}});
  }
  if (!subreports.empty()) {
    j["subreports"] = json::array();
    for (const auto& s : subreports) j["subreports"].push_back(s.to_json());
  }
  return j;
}

std::string ExactSequenceReport::to_text() const {
  std::ostringstream os;
  os << "== " << title << " [" << kind << "]\n";
  for (const auto& n : nodes) {
    os << "  " << n.id << ": " << n.label << "  <" << to_string(n.simplified->status()) << ">";
    auto simplified = n.simplified->to_string();
    if (simplified != n.term->to_string()) os << "  => " << simplified;
    if (auto s = structure_string(n.simplified); s && n.simplified->kind != TermKind::zero) os << "  = " << *s;
    os << "\n";
    if (!n.definition.empty()) os << "      := " << n.definition << "\n";
    if (!n.alternative_definition.empty()) os << "      or " << n.alternative_definition << "\n";
  }
  if (!arrows.empty()) os << "  arrows:\n";
  for (const auto& a : arrows) {
    os << "    " << a.from << " -> " << a.to;
    if (!a.label.empty()) os << " [" << a.label << "]";
    if (!a.exact_at.empty()) os << " (" << a.exact_at << ")";
    os << "\n";
  }
  if (!log.empty()) os << "  simplifications:\n";
  for (const auto& e : log) os << "    " << e.rule << ": " << e.before << "  ~>  " << e.after << "\n";
  for (const auto& [k, v] : facts) os << "  " << k << ": " << v << "\n";
  for (const auto& n : notes) os << "  note: " << n << "\n";
  for (const auto& s : subreports) {
    std::istringstream in(s.to_text());
    std::string line;
    while (std::getline(in, line)) os << "  " << line << "\n";
  }
  return os.str();
}

// ---------------------------------------------------------------- shape comparison

bool same_shape(const json& a, const json& b, std::string* why) {
  auto fail = [&](const std::string& w) {
    if (why) *why = w;
    return false;
  };
  const auto& na = a.at("nodes");
  const auto& nb = b.at("nodes");
  if (na.size() != nb.size()) return fail("node counts differ: " + std::to_string(na.size()) + " vs " + std::to_string(nb.size()));
  std::vector<std::string> la, lb;
  std::map<std::string, std::size_t> ia, ib;
  for (const auto& n : na) {
    ia[n.at("id").get<std::string>()] = la.size();
    la.push_back(n.at("label").get<std::string>());
  }
  for (const auto& n : nb) {
    ib[n.at("id").get<std::string>()] = lb.size();
    lb.push_back(n.at("label").get<std::string>());
  }
  {
    auto sa = la, sb = lb;
    std::sort(sa.begin(), sa.end());
    std::sort(sb.begin(), sb.end());
    if (sa != sb) {
      std::vector<std::string> only;
      std::set_symmetric_difference(sa.begin(), sa.end(), sb.begin(), sb.end(), std::back_inserter(only));
      return fail("node labels differ, e.g. '" + only.front() + "'");
    }
  }
  using Edge = std::tuple<std::size_t, std::size_t, std::string>;
  auto edges = [](const json& arrows, const std::map<std::string, std::size_t>& idx, std::vector<Edge>& out) {
    for (const auto& e : arrows) {
      auto f = idx.find(e.at("from").get<std::string>()), t = idx.find(e.at("to").get<std::string>());
      if (f == idx.end() || t == idx.end()) return false;
      out.emplace_back(f->second, t->second, e.value("label", ""));
    }
    return true;
  };
  std::vector<Edge> ea, eb;
  if (!edges(a.at("arrows"), ia, ea) || !edges(b.at("arrows"), ib, eb)) return fail("arrow endpoint is not a node");
  if (ea.size() != eb.size()) return fail("arrow counts differ");
  std::multiset<Edge> target(eb.begin(), eb.end());

  // backtracking over label-preserving bijections; only repeated labels branch
  const std::size_t n = la.size();
  std::vector<std::size_t> map(n, n);
  std::vector<bool> used(n, false);
  std::function<bool(std::size_t)> go = [&](std::size_t k) -> bool {
    if (k == n) {
      std::multiset<Edge> img;
      for (const auto& [f, t, l] : ea) img.emplace(map[f], map[t], l);
      return img == target;
    }
    for (std::size_t c = 0; c < n; ++c) {
      if (used[c] || lb[c] != la[k]) continue;
      used[c] = true;
      map[k] = c;
      if (go(k + 1)) return true;
      used[c] = false;
    }
    return false;
  };
  if (!go(0)) return fail("arrows do not match under any label-preserving bijection");
  return true;
}

json read_json_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw InvalidSpec("cannot open " + path.string());
  try {
    return json::parse(in);
  } catch (const json::exception& e) {
    throw InvalidSpec(path.string() + ": " + e.what());
  }
}

// ---------------------------------------------------------------- vocabulary

std::string sym_name(std::size_t q, const std::string& base) {
  if (q == 0) return "";
  if (q == 1) return base;
  return "S^" + std::to_string(q) + "(" + base + ")";
}

namespace {

AtomTraits external() {
  AtomTraits a;
  a.external = true;
  return a;
}
AtomTraits uniquely_divisible() {
  AtomTraits a;
  a.uniquely_divisible = true;
  return a;
}
AtomTraits divisible_torsion() {
  AtomTraits a;
  a.divisible_torsion = true;
  return a;
}
AtomTraits units() {
  AtomTraits a;
  a.units = true;
  return a;
}
AtomTraits brauer() {
  AtomTraits a;
  a.relative_brauer = true;
  return a;
}

TermPtr fsep() { return atom_term("F_sep^*", units()); }
TermPtr fstar() { return atom_term("F^*"); }
// K_2 of a separably closed perfect field is uniquely divisible
TermPtr k2sep() { return atom_term("K^M_2(F_sep)", uniquely_divisible()); }
TermPtr k2f() { return atom_term("K^M_2(F)"); }
// divisible with torsion Q/Z(2), quotient uniquely divisible
TermPtr h1sep_z3() { return atom_term("H^1(F_sep, Z(3))", divisible_torsion()); }

CoefficientToken qz2(const FieldProfile& p) { return p.p_inverted ? CoefficientToken::qz2_p : CoefficientToken::qz2; }

struct Lattices {
  TermPtr T, S2, S3;
  GLattice t, s2, s3;
  explicit Lattices(const TorusLattice& tl) : t(tl.lattice), s2(sym_power(t, 2)), s3(sym_power(t, 3)) {
    T = lattice_term("T^", t);
    S2 = lattice_term("S^2(T^)", s2);
    S3 = lattice_term("S^3(T^)", s3);
  }
};

class Builder {
 public:
  Builder(std::string kind, std::string title, std::string anchor, const FieldProfile& p, SimplifyOptions opts = {})
      : p_(p), opts_(std::move(opts)) {
    r_.kind = std::move(kind);
    r_.title = std::move(title);
    r_.anchor = std::move(anchor);
  }

  ReportNode& node(const std::string& id, TermPtr term, std::string label = {}) {
    ReportNode n;
    n.id = id;
    n.label = label.empty() ? term->to_string() : std::move(label);
    n.simplified = simplify_term(term, p_, &r_.log, opts_);
    n.term = std::move(term);
    n.anchor = n.term->status() == NodeStatus::external_input ? "external-input" : r_.anchor;
    r_.nodes.push_back(std::move(n));
    return r_.nodes.back();
  }
  void arrow(const std::string& from, const std::string& to, std::string label = {}, std::string exact_at = {}) {
    r_.arrows.push_back({from, to, std::move(label), std::move(exact_at)});
  }
  /// Consecutive arrows along one exact sequence.
  void chain(const std::vector<std::string>& ids, const std::string& seq) {
    for (std::size_t k = 0; k + 1 < ids.size(); ++k) arrow(ids[k], ids[k + 1], "", seq);
  }
  ExactSequenceReport& report() { return r_; }
  const FieldProfile& profile() const { return p_; }

  ExactSequenceReport finish() {
    std::vector<SimplificationEntry> unique;
    std::set<std::tuple<std::string, std::string, std::string>> seen;
    for (auto& e : r_.log)
      if (seen.emplace(e.rule, e.before, e.after).second) unique.push_back(std::move(e));
    r_.log = std::move(unique);
    return std::move(r_);
  }

 private:
  ExactSequenceReport r_;
  const FieldProfile& p_;
  SimplifyOptions opts_;
};

SimplifyOptions family_options(const TorusLattice& t) {
  SimplifyOptions o;
  o.special_family = t.family.has_value();
  return o;
}

void note_char_p(Builder& b) {
  if (b.profile().characteristic != 0)
    b.report().notes.push_back("characteristic " + std::to_string(b.profile().characteristic) +
                               ": Q/Z(2) in Galois cohomology of F replaced by Q/Z(2)[1/p]");
}

}  // namespace

// ---------------------------------------------------------------- tables

std::vector<E2Cell> e2_page(const TorusLattice& t, int n, std::pair<int, int> p_range, std::pair<int, int> q_range) {
  if (q_range.first < 0) throw InvalidSpec("e2_page: q must be nonnegative");
  std::vector<E2Cell> out;
  for (int q = q_range.first; q <= q_range.second; ++q) {
    TermPtr lat;
    if (q > 0) lat = lattice_term(sym_name(q), sym_power(t.lattice, q));
    const int w = n - q;
    // Z(w) for w < 0 is Q/Z(w)[-1]; kept as a marked symbol
    TermPtr coeff = atom_term(w >= 0 ? "Z(" + std::to_string(w) + ")" : "Z(" + std::to_string(w) + ") = Q/Z(" + std::to_string(w) + ")[-1]");
    for (int p = p_range.first; p <= p_range.second; ++p) {
      E2Cell c{p, q, nullptr};
      if (p < q)
        c.term = zero_term();
      else
        c.term = field_coh(p - q, lat ? tensor_term({lat, coeff}) : coeff);
      out.push_back(std::move(c));
    }
  }
  return out;
}

std::string MotivicEntry::to_string() const {
  if (!extension) return terms[0]->to_string();
  return "0 -> " + terms[0]->to_string() + " -> Hbar^" + std::to_string(degree) + " -> " + terms[1]->to_string() + " -> 0";
}

std::vector<MotivicEntry> motivic_table(const TorusLattice& t, int weight) {
  Lattices L(t);
  std::vector<MotivicEntry> out;
  auto add = [&](std::size_t i, TermPtr term) { out.push_back({i, {std::move(term)}, false}); };
  if (weight == 3) {
    for (std::size_t i = 0; i <= 2; ++i) add(i, zero_term());
    add(3, tensor_term({L.T, atom_term("K_3(F_sep)_ind", divisible_torsion())}));
    add(4, tensor_term({L.T, k2sep()}));
    add(5, tensor_term({L.S2, fsep()}));
    add(6, L.S3);
  } else if (weight == 4) {
    add(0, zero_term());
    add(1, zero_term());
    for (std::size_t i = 2; i <= 4; ++i) {
      auto h = "H^" + std::to_string(i - 2) + "(F_sep, Z(3))";
      add(i, tensor_term({L.T, i == 3 ? h1sep_z3() : atom_term(h, uniquely_divisible())}));
    }
    out.push_back({5,
                   {tensor_term({L.T, atom_term("K^M_3(F_sep)")}),
                    tensor_term({L.S2, atom_term("K_3(F_sep)_ind", divisible_torsion())})},
                   true});
    add(6, tensor_term({L.S2, k2sep()}));
    add(7, tensor_term({L.S3, fsep()}));
  } else {
    throw InvalidSpec("motivic_table: weight must be 3 or 4");
  }
  return out;
}

// ---------------------------------------------------------------- weight 3 sequence

ExactSequenceReport hs_weight3_sequence(const TorusLattice& t, const FieldProfile& profile) {
  Lattices L(t);
  Builder b("hs_weight3", "Hochschild-Serre sequence in weight 3", "weight-3 Hochschild-Serre sequence", profile,
            family_options(t));
  const auto c = token_term(qz2(profile));
  b.node("TK2", invariants_term(tensor_term({L.T, k2sep()})));
  b.node("H2T", field_coh(2, tensor_term({L.T, c})));
  b.node("H5", atom_term("Hbar^5(X, Z(3))"));
  b.node("S2F", invariants_term(tensor_term({L.S2, fsep()})));
  b.node("H3T", field_coh(3, tensor_term({L.T, c})));
  b.node("K6", kernel_term(atom_term("Hbar^6(X, Z(3))"), invariants_term(L.S3)));
  b.node("H1S2F", field_coh(1, tensor_term({L.S2, fsep()})));
  b.chain({"TK2", "H2T", "H5", "S2F", "H3T", "K6", "H1S2F"}, "weight-3 sequence");
  note_char_p(b);
  return b.finish();
}

// ---------------------------------------------------------------- degree 4

namespace {

struct Inv4Labels {
  std::string inv4 = "Inv^4(T, Q/Z(3))_norm";
  std::string inv3 = "Inv^3(T, Q/Z(2))_norm";
};

ExactSequenceReport build_inv4(const TorusLattice& t, const FieldProfile& profile, const std::string& kind,
                               const std::string& title, const std::string& anchor, const Inv4Labels& names) {
  Lattices L(t);
  Builder b(kind, title, anchor, profile, family_options(t));
  const auto c = token_term(qz2(profile));
  AtomTraits ext = external();
  ext.vanishes_in_family = true;

  b.node("TK2", invariants_term(tensor_term({L.T, k2sep()})));
  b.node("H2T", field_coh(2, tensor_term({L.T, c})));
  b.node("A2", atom_term("A^2(BT, K^M_3)"));
  b.node("H5", atom_term("Hbar^5(BT, Z(3))"));
  b.node("S2F", invariants_term(tensor_term({L.S2, fsep()})));
  b.node("Inv4", atom_term(names.inv4));
  b.node("H3T", field_coh(3, tensor_term({L.T, c})));
  b.node("Inv3F", tensor_term({atom_term(names.inv3), fstar()}));
  b.node("Z0", zero_term());
  b.node("I", atom_term("I", ext));
  b.node("Z1", zero_term());
  b.node("CH3", atom_term("CH^3(BT)_tors", ext));
  b.node("K6", kernel_term(atom_term("Hbar^6(BT, Z(3))"), invariants_term(L.S3)));
  b.node("H1S2F", field_coh(1, tensor_term({L.S2, fsep()})));

  const std::string row = "middle row", col = "column", turn = "turning column";
  b.arrow("A2", "H5", "inj", row);
  b.arrow("H5", "Inv4", "", row);
  b.arrow("Inv4", "I", "", row);
  b.arrow("I", "Z1", "", row);
  b.chain({"TK2", "H2T", "H5", "S2F", "H3T"}, col);
  b.arrow("H3T", "K6", "", turn);
  b.arrow("Z0", "I", "", turn);
  b.arrow("I", "CH3", "", turn);
  b.arrow("CH3", "K6", "", turn);
  b.arrow("K6", "H1S2F", "", turn);
  b.arrow("Inv3F", "H5", "gamma");
  b.arrow("Inv3F", "Inv4", "cup");
  b.report().notes.push_back("gamma and cup are not evaluated");
  note_char_p(b);
  if (t.family)
    b.report().notes.push_back("special family: CH^3(BT) = S^3(T^)^Gamma is torsion-free, so CH^3(BT)_tors and I vanish");
  return b.finish();
}

}  // namespace

ExactSequenceReport assemble_inv4(const TorusLattice& t, const FieldProfile& profile) {
  return build_inv4(t, profile, "inv4", "Degree 4 normalized invariants", "degree-4 invariant diagram", {});
}

// ---------------------------------------------------------------- degree 5

namespace {

ExactSequenceReport reduced_inv5(const TorusLattice& t, const FieldProfile& profile, const std::string& inv5_label) {
  Lattices L(t);
  Builder b("inv5_cd1", "Degree 5 diagram over a field of cohomological dimension <= 1", "degree-5 diagram, cd <= 1",
            profile, family_options(t));
  b.node("H1S2", field_coh(1, tensor_term({L.S2, token_term(qz2(profile))})));
  b.node("A2", atom_term("A^2(BT, K^M_4)"));
  b.node("H6", atom_term("Hbar^6(BT, Z(4))"));
  b.node("Inv5", atom_term(inv5_label));
  b.node("S2K2", invariants_term(tensor_term({L.S2, k2sep()})));
  b.arrow("H1S2", "H6", "inj", "column");
  b.arrow("H6", "S2K2", "surj", "column");
  b.arrow("A2", "H6", "inj", "row");
  b.arrow("H6", "Inv5", "surj", "row");
  return b.finish();
}

struct Inv5Labels {
  std::string inv5 = "Inv^5(T, Q/Z(4))_norm";
  /// Which placement of the quotient in H^2(...)' is primary.
  bool quotient_inside = false;
};

ExactSequenceReport build_inv5(const TorusLattice& t, const FieldProfile& profile, const std::string& kind,
                               const std::string& title, const std::string& anchor, const Inv5Labels& names) {
  Lattices L(t);
  Builder b(kind, title, anchor, profile, family_options(t));
  const auto c = token_term(qz2(profile));
  auto th1 = tensor_term({L.T, h1sep_z3()});
  auto h1s2 = field_coh(1, tensor_term({L.S2, c}));
  auto h2s2 = field_coh(2, tensor_term({L.S2, c}));
  auto s2k2 = invariants_term(tensor_term({L.S2, k2sep()}));

  b.node("H3TH1", field_coh(3, th1));
  b.node("H4TH1", field_coh(4, th1));
  b.node("A2", atom_term("A^2(BT, K^M_4)"));
  b.node("H6", atom_term("Hbar^6(BT, Z(4))"));
  b.node("Inv5", atom_term(names.inv5));
  b.node("A3", atom_term("A^3(BT, K^M_4)"));
  b.node("H7", atom_term("Hbar^7(BT, Z(4))"));
  auto h1p = kernel_term(h1s2, field_coh(4, th1));
  b.node("H1p", h1p, "H^1(F, S^2(T^) (x) " + to_string(qz2(profile)) + ")'").definition = h1p->to_string();
  b.node("Q", atom_term("Q"));
  b.node("S2K2", s2k2);
  // the quotient by (S^2(T^) (x) K^M_2(F_sep))^Gamma sits outside the kernel
  // in one reading and inside it in the other
  auto outside = quotient_term(kernel_term(h2s2, field_coh(5, th1)), s2k2);
  auto inside = kernel_term(quotient_term(h2s2, s2k2), field_coh(5, th1));
  auto& h2p = b.node("H2p", names.quotient_inside ? inside : outside,
                     "H^2(F, S^2(T^) (x) " + to_string(qz2(profile)) + ")'");
  h2p.definition = (names.quotient_inside ? inside : outside)->to_string();
  h2p.alternative_definition = (names.quotient_inside ? outside : inside)->to_string();
  b.node("R", atom_term("R"));
  b.node("S3F", invariants_term(tensor_term({L.S3, fsep()})));
  b.node("Z0", zero_term());
  b.node("Z1", zero_term());

  b.arrow("A2", "H6", "inj", "row");
  b.chain({"H6", "Inv5", "A3", "H7"}, "row");
  b.chain({"H3TH1", "H6", "Q", "Z0"}, "left column");
  b.chain({"H4TH1", "H7", "R", "Z1"}, "right column");
  b.arrow("H1p", "Q", "inj", "lower left row");
  b.arrow("Q", "S2K2", "", "lower left row");
  b.arrow("H2p", "R", "inj", "lower right row");
  b.arrow("R", "S3F", "", "lower right row");

  auto& r = b.report();
  r.notes.push_back("Q and R are opaque: only their arrows are known");
  r.notes.push_back("H^2(F, S^2(T^) (x) Q/Z(2))' has two readings (quotient outside or inside the kernel); both are recorded");
  note_char_p(b);

  // Hochschild-Serre terms of weight 4 that never reach the diagram: the
  // coefficients H^0 and H^2(F_sep, Z(3)) are uniquely divisible.
  for (std::size_t q : {2u, 4u}) {
    auto coeff = tensor_term({L.T, atom_term("H^" + std::to_string(q - 2) + "(F_sep, Z(3))", uniquely_divisible())});
    for (std::size_t total : {6u, 7u}) {
      auto term = field_coh(total - q, coeff);
      auto s = simplify_term(term, profile, &r.log, family_options(t));
      r.facts.emplace_back("E2 term " + term->to_string(), s->to_string());
    }
  }
  if (profile.cd_bound && *profile.cd_bound <= 1) r.subreports.push_back(reduced_inv5(t, profile, names.inv5));
  return b.finish();
}

}  // namespace

ExactSequenceReport assemble_inv5(const TorusLattice& t, const FieldProfile& profile) {
  return build_inv5(t, profile, "inv5", "Degree 5 normalized invariants", "degree-5 invariant diagram", {});
}

// ---------------------------------------------------------------- unramified

namespace {

bool free_module(const GLattice& l) {
  if (!is_permutation_in_basis(l).holds) return false;
  const std::size_t n = l.group().order();
  if (l.rank() % n) return false;
  // a permutation basis is a free basis iff every basis vector has trivial stabilizer
  for (std::size_t b = 0; b < l.rank(); ++b)
    for (std::size_t g = 1; g < n; ++g)
      if (l.action(g)(b, b) == 1) return false;
  return true;
}

}  // namespace

std::pair<ExactSequenceReport, ExactSequenceReport> assemble_unramified(const TorusLattice& s,
                                                                        const FieldProfile& profile) {
  auto res = flasque_resolution(s.lattice);
  TorusLattice t;
  t.lattice = res.ses.right.target;
  t.provenance = TorusProvenance::quotient;
  t.expression = "flasque quotient of " + (s.expression.empty() ? std::string("S^") : s.expression);
  // S split makes 1 -> T -> P -> S -> 1 an instance of the special family
  bool s_trivial = true;
  for (std::size_t g = 0; g < s.lattice.group().order(); ++g)
    s_trivial = s_trivial && s.lattice.action(g) == IntMatrix::identity(s.lattice.rank());
  if (s_trivial) t.family = FamilyDatum{s.lattice.rank(), res.ses.left.target, res.ses.left.matrix, free_module(res.ses.left.target)};

  Inv4Labels l4{"Hbar^4_nr(F(S), Q/Z(3))", "Hbar^3_nr(F(S), Q/Z(2))"};
  auto r4 = build_inv4(t, profile, "unramified_inv4", "Unramified cohomology in degree 4", "unramified degree-4 diagram", l4);
  Inv5Labels l5{"Hbar^5_nr(F(S), Q/Z(4))", true};
  auto r5 = build_inv5(t, profile, "unramified_inv5", "Unramified cohomology in degree 5", "unramified degree-5 diagram", l5);
  for (auto* r : {&r4, &r5}) {
    r->facts.emplace_back("resolution", "0 -> S^ (rank " + std::to_string(res.ses.left.source.rank()) + ") -> P^ (rank " +
                                            std::to_string(res.ses.left.target.rank()) + ") -> T^ (rank " +
                                            std::to_string(t.lattice.rank()) + ") -> 0");
    r->facts.emplace_back("resolution exact", res.exactness.exact ? "yes" : "no: " + res.exactness.detail);
    r->facts.emplace_back("P^ permutation", is_permutation_in_basis(res.ses.left.target).holds ? "yes" : "no");
    r->facts.emplace_back("flasque certificate", res.certificate.to_string());
    r->facts.emplace_back("P^", format_lattice(res.ses.left.target));
    r->facts.emplace_back("T^", format_lattice(t.lattice));
  }
  return {std::move(r4), std::move(r5)};
}

// ---------------------------------------------------------------- special family

std::vector<ExactSequenceReport> special_family_reports(const TorusLattice& t, const FieldProfile& profile) {
  if (!t.family) throw FamilyDatumMissing("special family reports need 1 -> T -> P -> G_m^n -> 1 (a family datum)");
  const FamilyDatum& fam = *t.family;
  const SimplifyOptions opts = family_options(t);
  Lattices L(t);
  const auto c = token_term(qz2(profile));
  const auto& g = t.lattice.group_ptr();
  std::vector<ExactSequenceReport> out;

  {  // Chow groups
    Builder b("chow", "Chow groups of BT", "Chow groups of the special family", profile, opts);
    for (std::size_t i = 1; i <= 3; ++i) {
      auto l = lattice_term(sym_name(i), sym_power(t.lattice, i));
      b.node("CH" + std::to_string(i), invariants_term(l), "CH^" + std::to_string(i) + "(BT)").definition =
          invariants_term(l)->to_string();
    }
    AtomTraits dec = external();
    dec.decomposable = true;
    b.node("S2Dec", quotient_term(invariants_term(L.S2), atom_term("Dec", dec)));
    AtomTraits ext = external();
    ext.vanishes_in_family = true;
    b.node("CH3tors", atom_term("CH^3(BT)_tors", ext));
    b.node("I", atom_term("I", ext));
    b.report().facts.emplace_back("A^i(BT, K^M_j)", "S^i(T^)^Gamma (x) K^M_{j-i}(F)");
    out.push_back(b.finish());
  }

  {  // degree 3
    Builder b("inv3", "Degree 3 normalized invariants", "degree-3 invariants of the special family", profile, opts);
    b.node("Inv3", atom_term("Inv^3(T, Q/Z(2))_norm"));
    b.node("H1T0", atom_term("H^1(F, T^o)"));
    b.arrow("Inv3", "H1T0", "iso");
    if (t.provenance == TorusProvenance::norm_one) {
      b.node("Br", atom_term("Br(L/F)", brauer()));
      b.arrow("H1T0", "Br", "iso");
    }
    out.push_back(b.finish());
  }

  {  // A^2 inside Hbar^5
    Builder b("a2_triangle", "A^2(BT, K^M_3) inside Hbar^5(BT, Z(3))", "degree-4 invariants of the special family", profile, opts);
    b.node("A2", tensor_term({invariants_term(L.S2), fstar()}), "S^2(T^)^Gamma (x) F^* = A^2(BT, K^M_3)");
    b.node("H5", atom_term("Hbar^5(BT, Z(3))"));
    b.node("S2F", invariants_term(tensor_term({L.S2, fsep()})));
    b.arrow("A2", "H5", "inj");
    b.arrow("H5", "S2F");
    b.arrow("A2", "S2F", "inj");
    out.push_back(b.finish());
  }

  {  // degree 4 sequence
    Builder b("inv4_family", "Degree 4 invariants of the special family", "degree-4 sequence of the special family",
              profile, opts);
    b.node("Z0", zero_term());
    b.node("H2q", quotient_term(field_coh(2, tensor_term({L.T, c})), invariants_term(tensor_term({L.T, k2sep()}))));
    b.node("Inv4", atom_term("Inv^4(T, Q/Z(3))_norm"));
    // printed with F_sep^* in the subgroup; A^2(BT, K^M_3) is S^2(T^)^Gamma (x) F^*
    b.node("S2q", quotient_term(invariants_term(tensor_term({L.S2, fsep()})), tensor_term({invariants_term(L.S2), fsep()})));
    b.node("H3T", field_coh(3, tensor_term({L.T, c})));
    b.chain({"Z0", "H2q", "Inv4", "S2q", "H3T"}, "degree-4 sequence");
    b.report().notes.push_back("the subgroup S^2(T^)^Gamma (x) F_sep^* is transcribed as displayed; it is the image of "
                               "A^2(BT, K^M_3) = S^2(T^)^Gamma (x) F^*");
    out.push_back(b.finish());
  }

  const bool cd1 = profile.cd_bound && *profile.cd_bound <= 1;
  {  // degree 5 over cd <= 1
    auto r = reduced_inv5(t, profile, "Inv^5(T, Q/Z(4))_norm");
    if (!cd1) r.notes.push_back("hypothesis cd(F) <= 1 is not in the profile");
    out.push_back(std::move(r));

    Builder b("inv5_family", "Degree 5 invariants of the special family", "degree-5 sequence of the special family",
              profile, opts);
    b.node("Z0", zero_term());
    b.node("Kk", kernel_term(tensor_term({invariants_term(L.S2), k2f()}), tensor_term({L.S2, k2sep()})));
    b.node("H1S2", field_coh(1, tensor_term({L.S2, c})));
    b.node("Inv5", atom_term("Inv^5(T, Q/Z(4))_norm"));
    b.node("S2K2q", quotient_term(invariants_term(tensor_term({L.S2, k2sep()})), tensor_term({invariants_term(L.S2), k2f()})));
    b.node("Z1", zero_term());
    b.chain({"Z0", "Kk", "H1S2", "Inv5", "S2K2q", "Z1"}, "degree-5 sequence");
    if (!cd1) b.report().notes.push_back("hypothesis cd(F) <= 1 is not in the profile");
    out.push_back(b.finish());
  }

  {  // H^1(F, S^2(T^) (x) Q/Z(2)) through the splitting field
    Builder b("hs_splitting", "H^1(F, S^2(T^) (x) Q/Z(2)) from the splitting field", "Hochschild-Serre for the splitting field",
              profile, opts);
    auto g_coh = [&](std::size_t i, const std::string& lname, const GLattice& l) -> TermPtr {
      if (profile.mu2_full) return lattice_coh(lname, l, CoefficientToken::qz, i);
      return atom_term("H^" + std::to_string(i) + "(G, " + lname + " (x) Q/Z(2)^Gamma_K)");
    };
    auto label = [](std::size_t i) { return "H^" + std::to_string(i) + "(G, S^2(T^) (x) Q/Z(2)^Gamma_K)"; };
    b.node("Z0", zero_term());
    b.node("G1", g_coh(1, "S^2(T^)", L.s2), label(1));
    b.node("H1S2", field_coh(1, tensor_term({L.S2, c})));
    b.node("K1", invariants_term(field_coh(1, tensor_term({L.S2, c}))), "H^1(K, S^2(T^) (x) Q/Z(2))^G");
    b.node("G2", g_coh(2, "S^2(T^)", L.s2), label(2));
    b.node("Z1", zero_term());
    b.chain({"Z0", "G1", "H1S2", "K1", "G2", "Z1"}, "splitting-field sequence");
    if (!cd1) b.report().notes.push_back("hypothesis cd(F) <= 1 is not in the profile");
    out.push_back(b.finish());
  }

  // 0 -> Lambda^2 Z^n -> Z^n (x) P^ -> S^2(P^) -> S^2(T^) -> 0
  LatticeMorphism alpha{trivial_lattice(g, fam.n), fam.phat, fam.inclusion};
  auto [tq, beta] = quotient_lattice(alpha);
  ShortExactSequence ses{alpha, beta};
  {
    Builder b("koszul2", "Koszul resolution of S^2(T^)", "Koszul complex in degree 2", profile, opts);
    auto k = build_koszul(ses, 2);
    auto v = verify_koszul_quasi_iso(ses, 2);
    b.node("Z0", zero_term());
    b.node("W2", lattice_term("Lambda^2(Z^n)", k.term(2)));
    b.node("ZP", lattice_term("Z^n (x) P^", k.term(1)));
    b.node("S2P", lattice_term("S^2(P^)", k.term(0)));
    b.node("S2T", lattice_term("S^2(T^)", sym_power(tq, 2)));
    b.node("Z1", zero_term());
    b.chain({"Z0", "W2", "ZP", "S2P", "S2T", "Z1"}, "Koszul sequence");
    b.report().facts.emplace_back("exact", v.pass ? "yes" : "no: " + v.detail);
    const std::size_t r = fam.phat.rank();
    const IntMatrix id = IntMatrix::identity(binomial(r + 1, 2));
    const bool times2 = symmetric_projection_matrix(r) * symmetrization_matrix(r) == id + id;
    b.report().facts.emplace_back("S^2(P^) -> P^ (x) P^ -> S^2(P^) is 2", times2 ? "yes" : "no");
    out.push_back(b.finish());
  }

  if (profile.odd_part_only && fam.phat_free) {
    Builder b("final_odd", "H^1(F, S^2(T^) (x) Q/Z(2)) away from 2", "odd part with free P^", profile, opts);
    const std::size_t m = fam.n * (fam.n - 1) / 2;
    auto corr = [&](std::size_t i) -> TermPtr {
      if (profile.mu2_full) return power_term(lattice_coh("Z", trivial_lattice(g, 1), CoefficientToken::qz, i), m);
      return power_term(atom_term("H^" + std::to_string(i) + "(G, Q/Z(2)^Gamma_K)"), m);
    };
    auto corr_label = [&](std::size_t i) {
      return "H^" + std::to_string(i) + "(G, Q/Z(2)^Gamma_K)^{+" + std::to_string(m) + "}";
    };
    std::vector<std::string> ids{"Z0"};
    b.node("Z0", zero_term());
    if (m) {
      b.node("C3", corr(3), corr_label(3));
      ids.push_back("C3");
    }
    b.node("H1S2", field_coh(1, tensor_term({L.S2, c})));
    b.node("KG", invariants_term(tensor_term({L.S2, atom_term("H^1(K, Q/Z(2))")})));
    ids.insert(ids.end(), {"H1S2", "KG"});
    if (m) {
      b.node("C4", corr(4), corr_label(4));
      ids.push_back("C4");
    }
    b.node("Z1", zero_term());
    ids.push_back("Z1");
    b.chain(ids, "odd-part sequence");
    if (!cd1) b.report().notes.push_back("hypothesis cd(F) <= 1 is not in the profile");

    if (profile.mu2_full) {
      // The vanishing that drives the shift: H^i(G, S^2(P^) (x) Q/Z) is killed by 2
      auto& r = b.report();
      auto s2p = sym_power(fam.phat, 2);
      for (std::size_t i = 1; i <= 2; ++i) {
        auto h = lattice_coh("S^2(P^)", s2p, CoefficientToken::qz, i);
        auto s = simplify_term(h, profile, &r.log, opts);
        r.facts.emplace_back(h->to_string() + ", odd part", s->to_string());
        auto direct = lattice_coh("S^2(T^)", L.s2, CoefficientToken::qz, i);
        auto shifted = lattice_coh("Z", trivial_lattice(g, 1), CoefficientToken::qz, i + 2);
        auto lhs = direct->value.odd_part(), rhs = shifted->value.odd_part().power(m);
        r.facts.emplace_back("H^" + std::to_string(i) + "(G, S^2(T^) (x) Q/Z) = H^" + std::to_string(i + 2) +
                                 "(G, Q/Z)^{+" + std::to_string(m) + "} away from 2",
                             lhs == rhs ? "yes (" + lhs.to_string() + ")" : "no: " + lhs.to_string() + " vs " + rhs.to_string());
      }
    }
    out.push_back(b.finish());
  }
  return out;
}

// ---------------------------------------------------------------- Q8

ExactSequenceReport q8_conclusion(const FieldProfile& profile, bool ch3_tors_nonzero) {
  auto ses = build_q8_sequence();
  TorusLattice t;
  t.lattice = ses.right.target;
  t.provenance = TorusProvenance::quotient;
  t.expression = "Z[Q8] / Z[Q8/{1,-1}]";

  Builder b("q8", "A degree 4 invariant of a Q8 torus", "Q8 torus with nontrivial CH^3(BT)_tors", profile);
  Lattices L(t);
  auto brsum = [&] {
    return sum_term({atom_term("Br(K_1/F)", brauer()), atom_term("Br(K_2/F)", brauer()), atom_term("Br(K_3/F)", brauer())});
  };
  b.node("Z0", zero_term());
  b.node("Br1", brsum());
  b.node("H1S2F", field_coh(1, tensor_term({L.S2, fsep()})));
  b.node("Br2", brsum());
  b.chain({"Z0", "Br1", "H1S2F", "Br2"}, "Brauer bound");

  auto bundle = verify_q8_module_structure();
  auto& r = b.report();
  for (const auto& v : bundle.verdicts) r.facts.emplace_back("check " + v.name, (v.pass ? "pass" : "FAIL") + (v.detail.empty() ? "" : ": " + v.detail));

  // summand sequences feeding the bound
  {
    auto [m, incl] = sub_lattice(L.s2, [] {
      IntMatrix basis(10, 4);
      // ee, xx, yy, zz sit at monomial indices 0, 4, 7, 9
      basis(0, 0) = basis(4, 1) = basis(7, 2) = basis(9, 3) = 1;
      return basis;
    }());
    Builder s("q8_summands", "Brauer groups from the summands", "Shapiro's lemma and Hilbert 90 on the summands", profile);
    s.node("H1M", field_coh(1, tensor_term({lattice_term("M", m), atom_term("L^*", units())})));
    for (const auto& [x, kk, kq] : {std::tuple{"x", "K_2", "K_3"}, {"y", "K_3", "K_1"}, {"z", "K_1", "K_2"}}) {
      const std::string X = x;
      auto br_sub = atom_term("Br(" + std::string(kk) + "/F)", brauer());
      auto br_q = atom_term("Br(" + std::string(kq) + "/F)", brauer());
      s.node("Z" + X, zero_term());
      s.node("Bs" + X, br_sub);
      s.node("P" + X, field_coh(1, tensor_term({atom_term("P_" + X), atom_term("L^*", units())})));
      s.node("Bq" + X, br_q);
      s.chain({"Z" + X, "Bs" + X, "P" + X, "Bq" + X}, "P_" + X + " sequence");
    }
    s.report().notes.push_back("P_x sits between Br(K_2/F) and Br(K_3/F); P_y and P_z by the symmetry x -> y -> z");
    r.subreports.push_back(s.finish());
  }
  r.subreports.push_back(assemble_inv4(t, profile));

  std::vector<std::string> missing;
  if (profile.characteristic != 0) missing.push_back("characteristic 0");
  if (!profile.rel_brauer_trivial) missing.push_back("rel_brauer_trivial (the Brauer bound nodes Br(K_i/F) stay symbolic)");
  if (!(profile.cd_bound && *profile.cd_bound == 1)) missing.push_back("cd_bound = 1");
  if (!ch3_tors_nonzero) missing.push_back("external input CH^3(BT)_tors != 0");
  for (const char* name : {"summands stable", "monomial decomposition", "M = Z[Q8/{1,-1}]", "N_x character",
                           "N_x sequence exact", "N_x quotient character", "H^1(Q8, M) = 0"})
    if (!bundle.get(name).pass) missing.push_back("module check '" + std::string(name) + "'");

  if (profile.rel_brauer_trivial)
    r.facts.emplace_back("H^1(F, S^2(T^) (x) F_sep^*)", "0 (between two vanishing Brauer sums)");
  if (missing.empty()) {
    r.facts.emplace_back("conclusion", kQ8Conclusion);
  } else {
    std::string why;
    for (const auto& m : missing) why += (why.empty() ? "" : "; ") + m;
    r.facts.emplace_back("conclusion", "inconclusive: missing " + why);
  }
  r.notes.push_back("CH^3(BT)_tors != 0 is an external input; Q8 is assumed to be a Galois group over F");
  return b.finish();
}

}  // namespace torinv
