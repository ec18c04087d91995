#include "torinv/term.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

#include "torinv/errors.hpp"
#include "torinv/expr.hpp"
#include "torinv/tori.hpp"

namespace torinv {

std::string to_string(NodeStatus s) {
  switch (s) {
    case NodeStatus::computed: return "computed";
    case NodeStatus::symbolic: return "symbolic";
    case NodeStatus::external_input: return "external-input";
  }
  return "?";
}

std::string to_string(CoefficientToken c) {
  switch (c) {
    case CoefficientToken::z: return "Z";
    case CoefficientToken::qz: return "Q/Z";
    case CoefficientToken::qz2: return "Q/Z(2)";
    case CoefficientToken::qz2_p: return "Q/Z(2)[1/p]";
    case CoefficientToken::qz3: return "Q/Z(3)";
    case CoefficientToken::qz4: return "Q/Z(4)";
  }
  return "?";
}

bool is_torsion(CoefficientToken c) { return c != CoefficientToken::z; }

// ---------------------------------------------------------------- profile

namespace {

std::string trim(const std::string& s) {
  auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

bool parse_flag(const std::string& key, const std::string& v) {
  if (v == "true" || v == "1" || v == "yes") return true;
  if (v == "false" || v == "0" || v == "no") return false;
  throw InvalidSpec("profile: " + key + " expects true or false, got '" + v + "'");
}

bool is_prime(unsigned long p) {
  if (p < 2) return false;
  for (unsigned long d = 2; d * d <= p; ++d)
    if (p % d == 0) return false;
  return true;
}

}  // namespace

void FieldProfile::normalize() {
  if (characteristic != 0 && !is_prime(characteristic))
    throw InvalidSpec("profile: characteristic must be 0 or a prime, got " + std::to_string(characteristic));
  if (characteristic != 0) p_inverted = true;
}

std::string FieldProfile::to_string() const {
  std::ostringstream os;
  os << "characteristic=" << characteristic << "\n";
  os << "cd_bound=" << (cd_bound ? std::to_string(*cd_bound) : "unknown") << "\n";
  if (splitting_group) os << "splitting_group=" << splitting_group->name() << "\n";
  os << "rel_brauer_trivial=" << (rel_brauer_trivial ? "true" : "false") << "\n";
  os << "mu2_full=" << (mu2_full ? "true" : "false") << "\n";
  os << "odd_part_only=" << (odd_part_only ? "true" : "false") << "\n";
  os << "p_inverted=" << (p_inverted ? "true" : "false") << "\n";
  return os.str();
}

FieldProfile parse_profile(const std::string& text, GroupRegistry* registry) {
  FieldProfile p;
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) {
    line = trim(line);
    if (line.empty() || line[0] == '#') continue;
    auto eq = line.find('=');
    if (eq == std::string::npos) throw InvalidSpec("profile: expected key=value, got '" + line + "'");
    auto key = trim(line.substr(0, eq)), val = trim(line.substr(eq + 1));
    if (key == "characteristic") {
      try {
        std::size_t used = 0;
        p.characteristic = std::stoul(val, &used);
        if (used != val.size()) throw std::invalid_argument(val);
      } catch (const std::logic_error&) {
        throw InvalidSpec("profile: bad characteristic '" + val + "'");
      }
    } else if (key == "cd_bound") {
      if (val == "unknown") {
        p.cd_bound.reset();
      } else {
        try {
          std::size_t used = 0;
          p.cd_bound = std::stoul(val, &used);
          if (used != val.size()) throw std::invalid_argument(val);
        } catch (const std::logic_error&) {
          throw InvalidSpec("profile: bad cd_bound '" + val + "'");
        }
      }
    } else if (key == "splitting_group") {
      p.splitting_group = registry ? registry->get(val) : parse_group(val);
    } else if (key == "rel_brauer_trivial") {
      p.rel_brauer_trivial = parse_flag(key, val);
    } else if (key == "mu2_full") {
      p.mu2_full = parse_flag(key, val);
    } else if (key == "odd_part_only") {
      p.odd_part_only = parse_flag(key, val);
    } else if (key == "p_inverted") {
      p.p_inverted = parse_flag(key, val);
    } else {
      throw InvalidSpec("profile: unknown key '" + key + "'");
    }
  }
  p.normalize();
  return p;
}

FieldProfile read_profile(const std::filesystem::path& path, GroupRegistry* registry) {
  std::ifstream in(path);
  if (!in) throw InvalidSpec("cannot open " + path.string());
  std::ostringstream os;
  os << in.rdbuf();
  return parse_profile(os.str(), registry);
}

// ---------------------------------------------------------------- terms

namespace {

TermPtr make(Term t) { return std::make_shared<const Term>(std::move(t)); }

bool composite(const Term& t) {
  return t.kind == TermKind::sum || t.kind == TermKind::tensor || t.kind == TermKind::quotient;
}

std::string wrap(const TermPtr& t) {
  auto s = t->to_string();
  return composite(*t) ? "(" + s + ")" : s;
}

std::string join(const std::vector<TermPtr>& parts, const std::string& sep) {
  std::string out;
  for (std::size_t k = 0; k < parts.size(); ++k) out += (k ? sep : "") + wrap(parts[k]);
  return out;
}

NodeStatus worst(NodeStatus a, NodeStatus b) { return static_cast<int>(a) > static_cast<int>(b) ? a : b; }

std::string group_string(const AbelianGroupStructure& v, std::size_t divisible) {
  CohomologyResult r;
  r.value = v;
  r.divisible_rank = divisible;
  return r.value_string();
}

}  // namespace

NodeStatus Term::status() const {
  switch (kind) {
    case TermKind::zero:
    case TermKind::group:
    case TermKind::lattice:
    case TermKind::token:
    case TermKind::lattice_coh:
      return NodeStatus::computed;
    case TermKind::atom:
      return traits.external ? NodeStatus::external_input : NodeStatus::symbolic;
    default:
      break;
  }
  NodeStatus s = kind == TermKind::field_coh ? NodeStatus::symbolic : NodeStatus::computed;
  for (const auto& c : children) s = worst(s, c->status());
  return s;
}

std::string Term::to_string() const {
  switch (kind) {
    case TermKind::zero: return "0";
    case TermKind::group: return name.empty() ? group_string(value, divisible_rank) : name;
    case TermKind::lattice: return name;
    case TermKind::token: return torinv::to_string(token);
    case TermKind::atom: return name;
    case TermKind::field_coh: return "H^" + std::to_string(degree) + "(F, " + children[0]->to_string() + ")";
    case TermKind::lattice_coh: {
      std::string coeff = name;
      if (token != CoefficientToken::z) coeff = name == "Z" ? torinv::to_string(token) : name + " (x) " + torinv::to_string(token);
      return "H^" + std::to_string(degree) + "(" + lattice->group().name() + ", " + coeff + ")";
    }
    case TermKind::sum: return join(children, " (+) ");
    case TermKind::tensor: return join(children, " (x) ");
    case TermKind::quotient: return wrap(children[0]) + " / " + wrap(children[1]);
    case TermKind::kernel: return "ker(" + children[0]->to_string() + " -> " + children[1]->to_string() + ")";
    case TermKind::invariants: {
      auto s = children[0]->to_string();
      bool bare = (children[0]->kind == TermKind::lattice || children[0]->kind == TermKind::atom) && s.back() != '^';
      return (bare ? s : "(" + s + ")") + "^Gamma";
    }
    case TermKind::torsion_part: return "(" + children[0]->to_string() + ")_tors";
    case TermKind::power: return wrap(children[0]) + "^{+" + std::to_string(degree) + "}";
  }
  return "?";
}

bool Term::operator==(const Term& o) const {
  if (kind != o.kind || name != o.name || degree != o.degree || token != o.token || value != o.value ||
      divisible_rank != o.divisible_rank || induced_from != o.induced_from || odd_only != o.odd_only ||
      children.size() != o.children.size() || lattice.has_value() != o.lattice.has_value())
    return false;
  if (lattice && !(lattice->rank() == o.lattice->rank() && lattice->same_action(*o.lattice))) return false;
  for (std::size_t k = 0; k < children.size(); ++k)
    if (!(*children[k] == *o.children[k])) return false;
  return true;
}

TermPtr zero_term() { return make(Term{}); }

TermPtr group_term(AbelianGroupStructure value, std::size_t divisible_rank, std::string name) {
  Term t;
  t.kind = TermKind::group;
  t.value = std::move(value);
  t.divisible_rank = divisible_rank;
  t.name = std::move(name);
  return make(std::move(t));
}

TermPtr lattice_term(std::string name, GLattice l) {
  Term t;
  t.kind = TermKind::lattice;
  t.name = std::move(name);
  t.lattice = std::move(l);
  return make(std::move(t));
}

TermPtr token_term(CoefficientToken c) {
  Term t;
  t.kind = TermKind::token;
  t.token = c;
  return make(std::move(t));
}

TermPtr atom_term(std::string name, AtomTraits traits) {
  Term t;
  t.kind = TermKind::atom;
  t.name = std::move(name);
  t.traits = traits;
  return make(std::move(t));
}

TermPtr field_coh(std::size_t degree, TermPtr coefficient) {
  Term t;
  t.kind = TermKind::field_coh;
  t.degree = degree;
  t.children = {std::move(coefficient)};
  return make(std::move(t));
}

TermPtr lattice_coh(std::string lattice_name, GLattice l, CoefficientToken c, std::size_t degree,
                    std::optional<ElementSet> induced_from, const CohomologyOptions& opts) {
  if (c != CoefficientToken::z && c != CoefficientToken::qz)
    throw InvalidSpec("group cohomology is computed with Z or Q/Z coefficients only");
  auto r = c == CoefficientToken::z ? cohomology(l, degree, opts) : cohomology_qz(l, degree, opts);
  Term t;
  t.kind = TermKind::lattice_coh;
  t.name = std::move(lattice_name);
  t.lattice = std::move(l);
  t.token = c;
  t.degree = degree;
  t.value = r.value;
  t.divisible_rank = r.divisible_rank;
  t.induced_from = std::move(induced_from);
  return make(std::move(t));
}

namespace {
TermPtr node(TermKind k, std::vector<TermPtr> kids, std::size_t degree = 0) {
  Term t;
  t.kind = k;
  t.children = std::move(kids);
  t.degree = degree;
  return make(std::move(t));
}
}  // namespace

TermPtr sum_term(std::vector<TermPtr> parts) { return node(TermKind::sum, std::move(parts)); }
TermPtr tensor_term(std::vector<TermPtr> parts) { return node(TermKind::tensor, std::move(parts)); }
TermPtr quotient_term(TermPtr a, TermPtr b) { return node(TermKind::quotient, {std::move(a), std::move(b)}); }
TermPtr kernel_term(TermPtr s, TermPtr t) { return node(TermKind::kernel, {std::move(s), std::move(t)}); }
TermPtr invariants_term(TermPtr t) { return node(TermKind::invariants, {std::move(t)}); }
TermPtr torsion_term(TermPtr t) { return node(TermKind::torsion_part, {std::move(t)}); }
TermPtr power_term(TermPtr t, std::size_t copies) { return node(TermKind::power, {std::move(t)}, copies); }

// ---------------------------------------------------------------- rules

std::string to_string(Rule r) {
  switch (r) {
    case Rule::zero: return "zero";
    case Rule::cd: return "cd";
    case Rule::h90: return "H90";
    case Rule::shapiro: return "Shapiro";
    case Rule::br: return "Br";
    case Rule::div: return "div";
    case Rule::two_torsion: return "2tors";
    case Rule::family: return "family";
  }
  return "?";
}

const std::vector<Rule>& all_rules() {
  static const std::vector<Rule> rules{Rule::zero, Rule::cd,  Rule::h90,         Rule::shapiro,
                                       Rule::br,   Rule::div, Rule::two_torsion, Rule::family};
  return rules;
}

namespace {

const char* anchor_of(Rule r) {
  switch (r) {
    case Rule::zero: return "additivity: a term built from 0 is 0";
    case Rule::cd: return "torsion Galois cohomology vanishes above the cohomological dimension";
    case Rule::h90: return "Shapiro's lemma and Hilbert 90";
    case Rule::shapiro: return "Shapiro's lemma H^i(G, Z[G/H]) = H^i(H, Z)";
    case Rule::br: return "relative Brauer groups of the profile are trivial";
    case Rule::div: return "uniquely divisible modules have no higher Galois cohomology";
    case Rule::two_torsion: return "S^2(P^) -> P^ (x) P^ -> S^2(P^) is multiplication by 2; work away from 2";
    case Rule::family: return "CH^i(BT) = S^i(T^)^Gamma for 1 -> T -> P -> G_m^n -> 1";
  }
  return "";
}

bool is_zero(const TermPtr& t) { return t->kind == TermKind::zero; }

// Coefficients whose Galois cohomology in degree >= 1 is that of a torsion module.
bool torsion_coefficient(const Term& t) {
  switch (t.kind) {
    case TermKind::token: return is_torsion(t.token);
    case TermKind::atom: return t.traits.divisible_torsion;
    case TermKind::tensor:
      return std::any_of(t.children.begin(), t.children.end(), [](const TermPtr& c) { return torsion_coefficient(*c); });
    case TermKind::sum:
    case TermKind::power:
      return std::all_of(t.children.begin(), t.children.end(), [](const TermPtr& c) { return torsion_coefficient(*c); });
    default: return false;
  }
}

bool uniquely_divisible(const Term& t) {
  if (t.kind == TermKind::atom) return t.traits.uniquely_divisible;
  if (t.kind != TermKind::tensor) return false;
  bool any = false;
  for (const auto& c : t.children) {
    if (c->kind == TermKind::lattice) continue;
    if (c->kind != TermKind::atom || !c->traits.uniquely_divisible) return false;
    any = true;
  }
  return any;
}

bool permutation_units(const Term& t) {
  if (t.kind == TermKind::atom) return t.traits.units;
  if (t.kind != TermKind::tensor || t.children.size() != 2) return false;
  const Term& l = *t.children[0];
  const Term& u = *t.children[1];
  return l.kind == TermKind::lattice && u.kind == TermKind::atom && u.traits.units &&
         is_permutation_in_basis(*l.lattice).holds;
}

std::optional<TermPtr> apply(Rule r, const TermPtr& tp, const FieldProfile& p, const SimplifyOptions& opts) {
  const Term& t = *tp;
  switch (r) {
    case Rule::zero: {
      switch (t.kind) {
        case TermKind::lattice:
          if (t.lattice->rank() == 0) return zero_term();
          break;
        case TermKind::group:
        case TermKind::lattice_coh:
          if (t.value.is_zero() && t.divisible_rank == 0) return zero_term();
          break;
        case TermKind::sum: {
          std::vector<TermPtr> kept;
          for (const auto& c : t.children)
            if (!is_zero(c)) kept.push_back(c);
          if (kept.size() == t.children.size()) break;
          if (kept.empty()) return zero_term();
          if (kept.size() == 1) return kept[0];
          return sum_term(kept);
        }
        case TermKind::tensor:
          if (std::any_of(t.children.begin(), t.children.end(), is_zero)) return zero_term();
          break;
        case TermKind::field_coh:
        case TermKind::invariants:
        case TermKind::torsion_part:
          if (is_zero(t.children[0])) return zero_term();
          break;
        case TermKind::power:
          if (is_zero(t.children[0]) || t.degree == 0) return zero_term();
          break;
        case TermKind::quotient:
        case TermKind::kernel:
          if (is_zero(t.children[0])) return zero_term();
          if (is_zero(t.children[1])) return t.children[0];
          break;
        default: break;
      }
      return std::nullopt;
    }
    case Rule::cd:
      if (t.kind == TermKind::field_coh && p.cd_bound && t.degree > *p.cd_bound && torsion_coefficient(*t.children[0]))
        return zero_term();
      return std::nullopt;
    case Rule::h90:
      if (t.kind == TermKind::field_coh && t.degree == 1 && permutation_units(*t.children[0])) return zero_term();
      return std::nullopt;
    case Rule::shapiro: {
      if (t.kind != TermKind::lattice_coh || !t.induced_from) return std::nullopt;
      const auto& g = t.lattice->group();
      auto h = std::make_shared<const FiniteGroup>(g.subgroup_group(*t.induced_from, g.subgroup_name(*t.induced_from)));
      auto out = lattice_coh("Z", trivial_lattice(h, 1), t.token, t.degree);
      return out;
    }
    case Rule::br:
      if (t.kind == TermKind::atom && t.traits.relative_brauer && p.rel_brauer_trivial) return zero_term();
      return std::nullopt;
    case Rule::div:
      if (t.kind == TermKind::field_coh && t.degree >= 1 && uniquely_divisible(*t.children[0])) return zero_term();
      return std::nullopt;
    case Rule::two_torsion: {
      if (!p.odd_part_only || t.odd_only || (t.kind != TermKind::group && t.kind != TermKind::lattice_coh))
        return std::nullopt;
      Term u = t;
      u.value = t.value.odd_part();
      u.odd_only = true;
      return make(std::move(u));
    }
    case Rule::family:
      if (!opts.special_family) return std::nullopt;
      if (t.kind == TermKind::atom && t.traits.vanishes_in_family) return zero_term();
      if (t.kind == TermKind::quotient && t.children[1]->kind == TermKind::atom && t.children[1]->traits.decomposable)
        return zero_term();
      return std::nullopt;
  }
  return std::nullopt;
}

TermPtr rebuild(const TermPtr& t, std::vector<TermPtr> kids) {
  Term u = *t;
  u.children = std::move(kids);
  return make(std::move(u));
}

TermPtr simplify_rec(const TermPtr& t, const FieldProfile& p, std::vector<SimplificationEntry>* log,
                     const SimplifyOptions& opts) {
  TermPtr cur = t;
  if (!cur->children.empty()) {
    std::vector<TermPtr> kids;
    bool changed = false;
    for (const auto& c : cur->children) {
      kids.push_back(simplify_rec(c, p, log, opts));
      changed = changed || kids.back() != c;
    }
    if (changed) cur = rebuild(cur, std::move(kids));
  }
  for (Rule r : opts.order) {
    auto next = apply(r, cur, p, opts);
    if (!next) continue;
    if (log) {
      auto before = cur->to_string(), after = (*next)->to_string();
      // flags alone (an already odd group) are not worth a log line
      if (before != after || r != Rule::two_torsion) log->push_back({to_string(r), anchor_of(r), before, after});
    }
    return simplify_rec(*next, p, log, opts);
  }
  return cur;
}

}  // namespace

TermPtr simplify_term(const TermPtr& t, const FieldProfile& profile, std::vector<SimplificationEntry>* log,
                      const SimplifyOptions& opts) {
  return simplify_rec(t, profile, log, opts);
}

}  // namespace torinv
