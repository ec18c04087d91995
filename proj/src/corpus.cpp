#include "torinv/corpus.hpp"

#include <algorithm>
#include <chrono>
#include <cstdlib>
#include <fstream>
#include <map>
#include <random>
#include <sstream>

#include "torinv/assembler.hpp"
#include "torinv/errors.hpp"
#include "torinv/expr.hpp"
#include "torinv/koszul.hpp"

#ifndef TORINV_DATA_DIR
#define TORINV_DATA_DIR "data"
#endif

namespace torinv {

// ---------------------------------------------------------------- Q8

ShortExactSequence build_q8_sequence() {
  auto g = builtin_group("Q8");
  const std::vector<std::string> units{"1", "-1", "i", "-i", "j", "-j", "k", "-k"};
  const std::vector<std::string> labels{"e", "e'", "x", "x'", "y", "y'", "z", "z'"};
  std::vector<std::size_t> elem, pos(g->order());
  for (std::size_t u = 0; u < units.size(); ++u) {
    elem.push_back(*g->find_element(units[u]));
    pos[elem.back()] = u;
  }
  std::vector<IntMatrix> action;
  for (std::size_t a = 0; a < g->order(); ++a) {
    IntMatrix m(8, 8);
    for (std::size_t u = 0; u < 8; ++u) m(pos[g->mul(a, elem[u])], u) = 1;
    action.push_back(std::move(m));
  }
  GLattice qhat(g, std::move(action), labels);

  const auto h = parse_subgroup(*g, "{1,-1}");
  GLattice phat = permutation_lattice(g, h);
  // cosets in the order permutation_lattice uses: by smallest element index
  std::vector<ElementSet> cosets;
  for (std::size_t a = 0; a < g->order(); ++a) {
    ElementSet c;
    for (auto x : h) c.push_back(g->mul(a, x));
    std::sort(c.begin(), c.end());
    if (std::find(cosets.begin(), cosets.end(), c) == cosets.end()) cosets.push_back(c);
  }
  IntMatrix alpha(8, cosets.size());
  for (std::size_t c = 0; c < cosets.size(); ++c)
    for (auto x : cosets[c]) alpha(pos[x], c) = 1;
  LatticeMorphism left{phat, qhat, alpha};
  auto [t, beta] = quotient_lattice(left);
  return {left, beta};
}

bool VerdictBundle::pass() const {
  return std::all_of(verdicts.begin(), verdicts.end(), [](const Verdict& v) { return v.pass; });
}

const Verdict& VerdictBundle::get(const std::string& name) const {
  for (const auto& v : verdicts)
    if (v.name == name) return v;
  throw InvalidSpec("no verdict named " + name);
}

namespace {

// Monomials of S^2 of a rank-4 lattice with basis e, x, y, z.
std::size_t mono(char a, char b) {
  static const std::string names = "exyz";
  std::size_t i = names.find(a), j = names.find(b);
  if (i > j) std::swap(i, j);
  auto basis = sym_basis(4, 2);
  for (std::size_t k = 0; k < basis.size(); ++k)
    if (basis[k] == std::vector<std::size_t>{i, j}) return k;
  throw InvalidSpec("bad monomial");
}

// "ex+yz" style vectors in S^2(T^)
std::vector<Integer> vec(const std::string& text) {
  std::vector<Integer> v(10);
  int sign = 1;
  for (std::size_t k = 0; k < text.size();) {
    if (text[k] == '+' || text[k] == '-') {
      sign = text[k] == '-' ? -1 : 1;
      ++k;
      continue;
    }
    v[mono(text[k], text[k + 1])] += sign;
    k += 2;
    sign = 1;
  }
  return v;
}

IntMatrix columns(const std::vector<std::string>& texts) {
  IntMatrix m(10, texts.size());
  for (std::size_t c = 0; c < texts.size(); ++c) {
    auto v = vec(texts[c]);
    for (std::size_t r = 0; r < 10; ++r) m(r, c) = v[r];
  }
  return m;
}

IntMatrix hcat(const std::vector<IntMatrix>& parts) {
  std::size_t cols = 0;
  for (const auto& p : parts) cols += p.cols();
  IntMatrix out(parts.front().rows(), cols);
  std::size_t at = 0;
  for (const auto& p : parts) {
    for (std::size_t r = 0; r < p.rows(); ++r)
      for (std::size_t c = 0; c < p.cols(); ++c) out(r, at + c) = p(r, c);
    at += p.cols();
  }
  return out;
}

std::optional<GLattice> stable_sub(const GLattice& l, const IntMatrix& basis, std::string* why) {
  try {
    return sub_lattice(l, basis).first;
  } catch (const InvalidSpec& e) {
    if (why) *why = e.what();
    return std::nullopt;
  }
}

// Sign by which each listed element acts on a rank-1 lattice.
std::string character(const GLattice& l, const std::vector<std::string>& elements) {
  std::string out;
  for (const auto& name : elements) {
    auto a = *l.group().find_element(name);
    out += (out.empty() ? "" : ", ") + name + " -> " + l.action(a)(0, 0).to_string();
  }
  return out;
}

// Action of g on a vector of S^2(T^), compared with +-v.
int eigen_sign(const GLattice& s2, const std::string& g, const std::vector<Integer>& v) {
  const auto& m = s2.action(*s2.group().find_element(g));
  std::vector<Integer> w(v.size());
  for (std::size_t r = 0; r < v.size(); ++r)
    for (std::size_t c = 0; c < v.size(); ++c) w[r] += m(r, c) * v[c];
  if (w == v) return 1;
  std::vector<Integer> neg(v.size());
  for (std::size_t k = 0; k < v.size(); ++k) neg[k] = -v[k];
  return w == neg ? -1 : 0;
}

}  // namespace

VerdictBundle verify_q8_module_structure() {
  VerdictBundle out;
  auto add = [&](std::string name, bool pass, std::string detail = {}) {
    out.verdicts.push_back({std::move(name), pass, std::move(detail)});
  };
  auto ses = build_q8_sequence();
  const GLattice& t = ses.right.target;
  const GLattice s2 = sym_power(t, 2);

  const std::vector<std::string> m_vecs{"ee", "xx", "yy", "zz"};
  const std::vector<std::vector<std::string>> p_vecs{{"ex+yz", "ex-yz"}, {"ey+xz", "ey-xz"}, {"ez+xy", "ez-xy"}};
  const std::vector<std::string> names{"M", "P_x", "P_y", "P_z"};

  // (1) the listed vectors, with P_z read as ez+-xy
  std::vector<IntMatrix> blocks{columns(m_vecs)};
  for (const auto& p : p_vecs) blocks.push_back(columns(p));
  const IntMatrix all = hcat(blocks);
  const Integer det = intlin::determinant(all);
  add("decomposition basis", det == Integer(1) || det == Integer(-1),
      "determinant " + det.to_string() + (det.is_zero() ? "" : ", the ten vectors span a sublattice of index " + (det < Integer(0) ? -det : det).to_string()));

  bool stable = true;
  std::string ranks, why;
  std::vector<GLattice> summands;
  for (std::size_t k = 0; k < blocks.size(); ++k) {
    auto sub = stable_sub(s2, blocks[k], &why);
    stable = stable && sub.has_value();
    if (sub) summands.push_back(*sub);
    ranks += (ranks.empty() ? "" : ",") + std::to_string(blocks[k].cols());
  }
  add("summands stable", stable, stable ? "M, P_x, P_y, P_z are G-stable" : why);
  add("summand ranks", ranks == "4,2,2,2", "(" + ranks + ")");

  {  // the printed reading ez+-xz
    auto printed = hcat({columns(m_vecs), columns(p_vecs[0]), columns(p_vecs[1]), columns({"ez+xz", "ez-xz"})});
    std::string detail = "rank " + std::to_string(intlin::rank(printed)) + " of 10";
    std::string w;
    if (!stable_sub(s2, columns({"ez+xz", "ez-xz"}), &w)) detail += "; span of ez+-xz is not G-stable";
    add("printed P_z reading", intlin::rank(printed) == 10 && intlin::is_unimodular(printed), detail);
  }

  {  // monomial pairs: M + <ex,yz> + <ey,xz> + <ez,xy>
    bool ok = true;
    std::string detail;
    for (const auto& pair : std::vector<std::vector<std::string>>{{"ex", "yz"}, {"ey", "xz"}, {"ez", "xy"}}) {
      ok = ok && stable_sub(s2, columns(pair), nullptr).has_value();
    }
    detail = "M + <ex,yz> + <ey,xz> + <ez,xy> is a G-stable splitting of the monomial basis; each printed P has index 2 in it";
    add("monomial decomposition", ok, ok ? detail : "a monomial pair is not G-stable");
  }

  // (2) M and Z[Q8/{1,-1}]
  if (!summands.empty()) {
    const GLattice& m = summands[0];
    add("M permutation", is_permutation_in_basis(m).holds);
    // [g] -> g.ee sends [1], [i], [j], [k] to ee, xx, yy, zz
    const GLattice p = permutation_lattice(t.group_ptr(), parse_subgroup(t.group(), "{1,-1}"));
    LatticeMorphism iso{p, m, IntMatrix::identity(4)};
    auto eq = verify_equivariant_map(iso);
    add("M = Z[Q8/{1,-1}]", eq.equivariant && intlin::is_unimodular(iso.matrix),
        eq.equivariant ? "stored morphism [1],[i],[j],[k] -> ee,xx,yy,zz" : eq.to_string(t.group()));

    // (4)
    auto h1 = cohomology(m, 1).value;
    auto h1b = brute_force_cohomology(m, 1).value;
    add("H^1(Q8, M) = 0", h1.is_zero() && h1b.is_zero(), "cochains " + h1.to_string() + ", brute force " + h1b.to_string());
  }

  // (3) N_x inside P_x
  {
    auto px = stable_sub(s2, columns(p_vecs[0]), &why);
    if (!px) {
      add("N_x sequence exact", false, why);
    } else {
      IntMatrix nb(2, 1);
      nb(1, 0) = 1;  // ex - yz is the second basis vector of P_x
      auto [nx, incl] = sub_lattice(*px, nb);
      auto [nbar, proj] = quotient_lattice(incl);
      auto ex = verify_short_exact({incl, proj});
      add("N_x sequence exact", ex.exact && nx.rank() == 1 && nbar.rank() == 1, ex.detail);
      const std::vector<std::string> ijk{"i", "j", "k"};
      auto cx = character(nx, ijk);
      add("N_x character", cx == "i -> -1, j -> 1, k -> -1", cx);
      auto cq = character(nbar, ijk);
      add("N_x quotient character", cq == "i -> -1, j -> -1, k -> 1", cq);
    }
    // by the cyclic symmetry i -> j -> k: N_y = Z(ey-xz) trivial on k, N_z = Z(ez-xy) trivial on i
    auto signs = [&](const std::string& v) {
      auto w = vec(v);
      return std::to_string(eigen_sign(s2, "i", w)) + "," + std::to_string(eigen_sign(s2, "j", w)) + "," +
             std::to_string(eigen_sign(s2, "k", w));
    };
    auto sy = signs("ey-xz"), sz = signs("ez-xy");
    add("N_y, N_z characters", sy == "-1,-1,1" && sz == "1,-1,-1", "ey-xz: " + sy + "; ez-xy: " + sz);
  }

  // (5)
  {
    bool ok = true;
    std::string ranks_seen;
    for (std::size_t q = 0; q <= 3; ++q) {
      auto v = verify_koszul_quasi_iso(ses, q);
      ok = ok && v.pass;
      ranks_seen += (q ? "," : "") + std::to_string(v.homology[0].free_rank());
    }
    add("koszul q<=3", ok && ranks_seen == "1,4,10,20", "H_0 ranks (" + ranks_seen + ")");
  }
  return out;
}

// ---------------------------------------------------------------- random lattices

GLattice random_lattice(const GroupPtr& g, std::size_t rank, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::vector<GLattice> blocks{trivial_lattice(g, 1), regular_lattice(g)};
  if (g->order() > 1) {
    auto t = norm_one_lattice(g).lattice;
    blocks.push_back(t);
    blocks.push_back(dual_lattice(t));
  }
  std::vector<GLattice> parts;
  std::size_t left = rank;
  while (left > 0) {
    std::vector<std::size_t> fit;
    for (std::size_t b = 0; b < blocks.size(); ++b)
      if (blocks[b].rank() <= left) fit.push_back(b);
    const auto& pick = blocks[fit[rng() % fit.size()]];
    parts.push_back(pick);
    left -= pick.rank();
  }
  GLattice sum = parts.size() == 1 ? parts[0] : direct_sum(parts);

  // random unimodular change of basis from elementary operations
  IntMatrix u = IntMatrix::identity(rank);
  for (std::size_t step = 0; rank > 1 && step < 3 * rank; ++step) {
    std::size_t r = rng() % rank, s = rng() % rank;
    if (r == s) continue;
    long long f = static_cast<long long>(rng() % 5) - 2;
    for (std::size_t c = 0; c < rank; ++c) u(r, c) += Integer(f) * u(s, c);
  }
  IntMatrix uinv = intlin::inverse_unimodular(u);
  std::vector<IntMatrix> action;
  for (const auto& a : sum.actions()) action.push_back(u * a * uinv);
  return GLattice(g, std::move(action));
}

// ---------------------------------------------------------------- corpus files

std::string CorpusFact::to_string() const {
  std::string s = kind;
  for (const auto& a : args) s += " " + a;
  return s + " = " + expected;
}

std::filesystem::path default_corpus_dir() {
  if (const char* env = std::getenv("TORINV_CORPUS_DIR")) return env;
  return std::filesystem::path(TORINV_DATA_DIR) / "corpus";
}

namespace {

std::string trim(const std::string& s) {
  auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

std::vector<std::string> words(const std::string& s) {
  std::istringstream in(s);
  std::vector<std::string> out;
  for (std::string w; in >> w;) out.push_back(w);
  return out;
}

}  // namespace

CorpusCase read_case(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw InvalidSpec("cannot open " + path.string());
  CorpusCase c;
  c.file = path;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    line = trim(line);
    if (line.empty() || line[0] == '#') continue;
    auto sp = line.find(' ');
    std::string key = line.substr(0, sp), rest = sp == std::string::npos ? "" : trim(line.substr(sp));
    auto where = path.filename().string() + ":" + std::to_string(lineno);
    if (key == "name") {
      c.name = rest;
    } else if (key == "description") {
      c.description = rest;
    } else if (key == "lattice") {
      c.lattice = rest;
      auto w = words(rest);
      if (!w.empty() && w[0] == "random") {
        if (w.size() != 4) throw InvalidSpec(where + ": expected 'lattice random G rank seed'");
        c.seed = std::stoull(w[3]);
      }
    } else if (key == "ses") {
      c.ses = rest;
    } else if (key == "expect") {
      auto bar = rest.find('|');
      // the last '=' before the source; verdict names may contain '='
      auto eq = bar == std::string::npos ? std::string::npos : rest.rfind('=', bar);
      if (eq == std::string::npos)
        throw InvalidSpec(where + ": expected 'expect <kind> <args> = <value> | <source>'");
      CorpusFact f;
      auto lhs = words(rest.substr(0, eq));
      if (lhs.empty()) throw InvalidSpec(where + ": missing fact kind");
      f.kind = lhs[0];
      f.args.assign(lhs.begin() + 1, lhs.end());
      f.expected = trim(rest.substr(eq + 1, bar - eq - 1));
      f.source = trim(rest.substr(bar + 1));
      if (f.source.rfind("stated", 0) != 0 && f.source.rfind("oracle", 0) != 0)
        throw InvalidSpec(where + ": a fact's source starts with 'stated' or 'oracle'");
      c.facts.push_back(std::move(f));
    } else {
      throw InvalidSpec(where + ": unknown directive '" + key + "'");
    }
  }
  if (c.name.empty()) throw InvalidSpec(path.string() + ": missing name");
  if (c.lattice.empty() && c.ses.empty()) throw InvalidSpec(path.string() + ": needs a lattice or a ses");
  return c;
}

std::vector<CorpusCase> corpus_list(const std::filesystem::path& dir) {
  std::vector<std::filesystem::path> files;
  if (!std::filesystem::is_directory(dir)) throw InvalidSpec("corpus directory not found: " + dir.string());
  for (const auto& e : std::filesystem::directory_iterator(dir))
    if (e.path().extension() == ".case") files.push_back(e.path());
  std::sort(files.begin(), files.end());
  std::vector<CorpusCase> out;
  for (const auto& f : files) out.push_back(read_case(f));
  return out;
}

TorusLattice case_lattice(const CorpusCase& c) {
  ExprContext ctx;
  ctx.base_dir = c.file.parent_path();
  if (c.seed) {
    auto w = words(c.lattice);
    TorusLattice t;
    t.lattice = random_lattice(builtin_group(w[1]), std::stoul(w[2]), *c.seed);
    t.expression = c.lattice;
    return t;
  }
  if (!c.lattice.empty()) return parse_lattice_expr(c.lattice, ctx);
  auto ses = read_ses_file(ctx.base_dir / c.ses, ctx);
  TorusLattice t;
  t.lattice = ses.right.target;
  t.provenance = TorusProvenance::quotient;
  t.expression = "quotient of " + c.ses;
  return t;
}

namespace {

std::string yes_no(bool b) { return b ? "yes" : "no"; }

ShortExactSequence case_sequence(const CorpusCase& c, const TorusLattice& t) {
  if (!c.ses.empty()) {
    ExprContext ctx;
    ctx.base_dir = c.file.parent_path();
    return read_ses_file(ctx.base_dir / c.ses, ctx);
  }
  if (!t.family) throw InvalidSpec("case " + c.name + " has neither a ses file nor a family datum");
  LatticeMorphism alpha{trivial_lattice(t.lattice.group_ptr(), t.family->n), t.family->phat, t.family->inclusion};
  auto [q, beta] = quotient_lattice(alpha);
  return {alpha, beta};
}

std::string resolution_verdict(const ResolutionResult& r) {
  const bool perm = is_permutation_in_basis(r.ses.left.target).holds;
  if (r.exactness.exact && perm && r.certificate.holds) return "certified";
  return std::string("not certified:") + (r.exactness.exact ? "" : " not exact") + (perm ? "" : " middle not permutation") +
         (r.certificate.holds ? "" : " " + r.certificate.to_string());
}

FieldProfile family_profile() {
  FieldProfile p;
  p.cd_bound = 1;
  p.mu2_full = true;
  p.odd_part_only = true;
  return p;
}

std::string observe(const CorpusCase& c, const TorusLattice& t, const CorpusFact& f) {
  const GLattice& l = t.lattice;
  auto arg = [&](std::size_t k) -> const std::string& {
    if (k >= f.args.size()) throw InvalidSpec("fact '" + f.to_string() + "' is missing an argument");
    return f.args[k];
  };
  if (f.kind == "rank") return std::to_string(l.rank());
  if (f.kind == "cohomology") return cohomology(l, std::stoul(arg(0))).value_string();
  if (f.kind == "tate_h0") return tate_h0(l).to_string();
  if (f.kind == "oracle") {
    const std::size_t top = std::stoul(arg(0));
    for (std::size_t i = 0; i <= top; ++i) {
      auto a = cohomology(l, i).value, b = brute_force_cohomology(l, i).value;
      if (a != b) return "disagree in degree " + std::to_string(i) + ": " + a.to_string() + " vs " + b.to_string();
    }
    return "agree";
  }
  if (f.kind == "koszul") {
    auto v = verify_koszul_quasi_iso(case_sequence(c, t), std::stoul(arg(0)));
    return v.pass ? "pass" : v.detail;
  }
  if (f.kind == "h0_rank") return std::to_string(verify_koszul_quasi_iso(case_sequence(c, t), std::stoul(arg(0))).homology[0].free_rank());
  if (f.kind == "flasque_resolution") return resolution_verdict(flasque_resolution(l));
  if (f.kind == "coflasque_resolution") return resolution_verdict(coflasque_resolution(l));
  if (f.kind == "flasque") return yes_no(flasqueness(l, FlasqueKind::flasque).holds);
  if (f.kind == "coflasque") return yes_no(flasqueness(l, FlasqueKind::coflasque).holds);
  if (f.kind == "permutation") return yes_no(is_permutation_in_basis(l).holds);
  if (f.kind == "same_as") {
    std::string expr;
    for (const auto& a : f.args) expr += (expr.empty() ? "" : " ") + a;
    ExprContext ctx;
    ctx.group = l.group_ptr();
    return yes_no(parse_lattice_expr(expr, ctx).lattice.same_action(l));
  }
  if (f.kind == "family_n") return t.family ? std::to_string(t.family->n) : "none";
  if (f.kind == "inv3_node") {
    auto reports = special_family_reports(t, family_profile());
    const auto& r = *std::find_if(reports.begin(), reports.end(), [](const auto& r) { return r.kind == "inv3"; });
    return r.nodes.back().label;
  }
  if (f.kind == "final_odd") {
    auto reports = special_family_reports(t, family_profile());
    auto it = std::find_if(reports.begin(), reports.end(), [](const auto& r) { return r.kind == "final_odd"; });
    if (it == reports.end()) return "no final sequence";
    for (const auto& n : it->nodes)
      if (n.id == "C" + arg(0)) {
        auto v = evaluate_term(n.simplified);
        return v ? v->to_string() : "symbolic";
      }
    return "absent";
  }
  if (f.kind == "q8_check") {
    std::string name;
    for (const auto& a : f.args) name += (name.empty() ? "" : " ") + a;
    static const VerdictBundle bundle = verify_q8_module_structure();
    return bundle.get(name).pass ? "pass" : "FAIL";
  }
  throw InvalidSpec("unknown fact kind '" + f.kind + "'");
}

}  // namespace

CaseResult run_case(const CorpusCase& c) {
  auto start = std::chrono::steady_clock::now();
  CaseResult r;
  r.name = c.name;
  r.pass = true;
  TorusLattice t;
  try {
    t = case_lattice(c);
  } catch (const Error& e) {
    r.pass = false;
    r.facts.push_back({"build " + c.lattice, false, e.what()});
    return r;
  }
  for (const auto& f : c.facts) {
    FactResult fr;
    fr.fact = f.to_string();
    try {
      fr.observed = observe(c, t, f);
      fr.pass = fr.observed == f.expected;
    } catch (const Error& e) {
      fr.observed = std::string("error: ") + e.what();
    }
    r.pass = r.pass && fr.pass;
    r.facts.push_back(std::move(fr));
  }
  r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return r;
}

}  // namespace torinv
