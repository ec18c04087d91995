#include "torinv/group.hpp"

#include <algorithm>
#include <deque>
#include <fstream>
#include <map>
#include <mutex>
#include <set>
#include <sstream>

#include "torinv/errors.hpp"

namespace torinv {

namespace {

/// Breadth-first closure of a generating set. Returns the elements in
/// discovery order plus, for each element, the parent and generator used.
template <class Elem, class Mul>
struct Closure {
  std::vector<Elem> elements;
  std::vector<std::size_t> parent;
  std::vector<std::size_t> parent_gen;
  std::vector<std::size_t> generator_index;
  std::vector<std::vector<std::size_t>> table;

  Closure(const Elem& id, const std::vector<Elem>& gens, Mul mul, std::size_t cap) {
    std::map<Elem, std::size_t> index;
    elements.push_back(id);
    parent.push_back(0);
    parent_gen.push_back(0);
    index.emplace(id, 0);
    for (std::size_t head = 0; head < elements.size(); ++head)
      for (std::size_t s = 0; s < gens.size(); ++s) {
        Elem prod = mul(elements[head], gens[s]);
        if (index.contains(prod)) continue;
        if (elements.size() >= cap)
          throw ClosureCapExceeded("group closure exceeds the cap of " + std::to_string(cap) + " elements");
        index.emplace(prod, elements.size());
        elements.push_back(std::move(prod));
        parent.push_back(head);
        parent_gen.push_back(s);
      }
    for (const auto& g : gens) generator_index.push_back(index.at(g));
    const std::size_t n = elements.size();
    table.assign(n, std::vector<std::size_t>(n));
    for (std::size_t a = 0; a < n; ++a)
      for (std::size_t b = 0; b < n; ++b) table[a][b] = index.at(mul(elements[a], elements[b]));
  }
};

Permutation compose(const Permutation& p, const Permutation& q) {
  Permutation r(q.size());
  for (std::size_t x = 0; x < q.size(); ++x) r[x] = p[q[x]];
  return r;
}

std::string trim(const std::string& s) {
  auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

/// Splits on a separator character at parenthesis depth zero.
std::vector<std::string> split_top_level(const std::string& text, const std::string& seps) {
  std::vector<std::string> out;
  std::string cur;
  int depth = 0;
  for (char c : text) {
    if (c == '(' || c == '<' || c == '{' || c == '[') ++depth;
    if (c == ')' || c == '>' || c == '}' || c == ']') --depth;
    if (depth == 0 && seps.find(c) != std::string::npos) {
      out.push_back(trim(cur));
      cur.clear();
    } else {
      cur += c;
    }
  }
  out.push_back(trim(cur));
  return out;
}

std::vector<std::pair<int, int>> quaternion_product_table() {
  // basis 0:1, 1:i, 2:j, 3:k; entry = (sign, basis) of a*b
  return {{1, 0},  {1, 1},  {1, 2},  {1, 3},  {1, 1},  {-1, 0}, {1, 3},  {-1, 2},
          {1, 2},  {-1, 3}, {-1, 0}, {1, 1},  {1, 3},  {1, 2},  {-1, 1}, {-1, 0}};
}

std::shared_ptr<FiniteGroup> make_builtin(const std::string& name, std::size_t cap) {
  auto perms = [&](const std::vector<std::string>& cycles, std::size_t degree) {
    std::vector<Permutation> gens;
    for (const auto& c : cycles) gens.push_back(parse_cycles(c, degree));
    return std::make_shared<FiniteGroup>(FiniteGroup::from_permutations(gens, cap, name));
  };
  if (name.size() >= 2 && name[0] == 'C' && std::all_of(name.begin() + 1, name.end(), ::isdigit)) {
    std::size_t n = std::stoul(name.substr(1));
    if (n == 0 || n > 64) throw InvalidSpec("cyclic builtins are C1..C64");
    std::vector<Permutation> gens;
    if (n > 1) {
      Permutation p(n);
      for (std::size_t x = 0; x < n; ++x) p[x] = (x + 1) % n;
      gens.push_back(p);
    }
    FiniteGroup g = FiniteGroup::from_permutations(gens, cap, name);
    std::vector<std::string> names{"1"};
    for (std::size_t k = 1; k < n; ++k) names.push_back(k == 1 ? "g" : "g^" + std::to_string(k));
    std::vector<std::size_t> gen_idx;
    for (std::size_t s : g.generators()) gen_idx.push_back(s);
    return std::make_shared<FiniteGroup>(FiniteGroup::from_table(g.table(), gen_idx, names, name));
  }
  if (name == "C2xC2") return perms({"(1,2)", "(3,4)"}, 4);
  if (name == "C2xC4") return perms({"(1,2)", "(3,4,5,6)"}, 6);
  if (name == "C2xC2xC2") return perms({"(1,2)", "(3,4)", "(5,6)"}, 6);
  if (name == "S3") return perms({"(1,2,3)", "(1,2)"}, 3);
  if (name == "S4") return perms({"(1,2,3,4)", "(1,2)"}, 4);
  if (name == "D4") return perms({"(1,2,3,4)", "(2,4)"}, 4);
  if (name == "Q8") {
    static const char* unit_names[] = {"1", "-1", "i", "-i", "j", "-j", "k", "-k"};
    const auto prod = quaternion_product_table();
    // unit index 2*b + (sign < 0); left multiplication by a basis unit.
    auto left_mult = [&](int b) {
      Permutation p(8);
      for (int u = 0; u < 8; ++u) {
        auto [s, c] = prod[b * 4 + u / 2];
        int sign = (u % 2 ? -1 : 1) * s;
        p[u] = 2 * c + (sign < 0 ? 1 : 0);
      }
      return p;
    };
    FiniteGroup g = FiniteGroup::from_permutations({left_mult(1), left_mult(2)}, cap, name);
    // An element is named by the unit it sends 1 to; rebuild each permutation from its BFS word.
    std::vector<std::string> names(g.order());
    std::vector<Permutation> as_perm(g.order());
    as_perm[0] = parse_cycles("", 8);
    const Permutation gens[] = {left_mult(1), left_mult(2)};
    for (std::size_t a = 1; a < g.order(); ++a)
      as_perm[a] = compose(as_perm[g.word_parent(a)], gens[g.word_generator(a)]);
    for (std::size_t a = 0; a < g.order(); ++a) names[a] = unit_names[as_perm[a][0]];
    return std::make_shared<FiniteGroup>(FiniteGroup::from_table(g.table(), g.generators(), names, name));
  }
  throw InvalidSpec("unknown group '" + name + "'");
}

}  // namespace

FiniteGroup FiniteGroup::from_permutations(const std::vector<Permutation>& gens, std::size_t cap, std::string name) {
  std::size_t degree = 0;
  for (const auto& p : gens) degree = std::max(degree, p.size());
  std::vector<Permutation> padded;
  for (auto p : gens) {
    std::vector<char> seen(p.size(), 0);
    for (std::size_t x : p) {
      if (x >= p.size() || seen[x]) throw InvalidSpec("generator is not a permutation");
      seen[x] = 1;
    }
    for (std::size_t x = p.size(); x < degree; ++x) p.push_back(x);
    padded.push_back(std::move(p));
  }
  Permutation id(degree);
  for (std::size_t x = 0; x < degree; ++x) id[x] = x;
  Closure<Permutation, decltype(&compose)> c(id, padded, &compose, cap);

  FiniteGroup g;
  g.name_ = std::move(name);
  g.table_ = std::move(c.table);
  g.generators_ = std::move(c.generator_index);
  for (const auto& e : c.elements) g.element_names_.push_back(format_cycles(e));
  g.finish();
  return g;
}

FiniteGroup FiniteGroup::from_matrices(const std::vector<intlin::IntMatrix>& gens, std::size_t cap, std::string name) {
  std::size_t n = gens.empty() ? 0 : gens[0].rows();
  for (const auto& m : gens) {
    if (m.rows() != n || m.cols() != n) throw InvalidSpec("matrix generators must be square of a common size");
    if (!intlin::is_unimodular(m)) throw NotInvertible("matrix generator is not unimodular: " + m.to_string());
  }
  // Keyed by the flattened entries so std::map can order them.
  using Key = std::pair<std::vector<Integer>, std::size_t>;
  auto key_of = [n](const intlin::IntMatrix& m) {
    std::vector<Integer> v;
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j) v.push_back(m(i, j));
    return Key{v, n};
  };
  auto mul = [](const Key& a, const Key& b) {
    const std::size_t k = a.second;
    Key out{std::vector<Integer>(k * k), k};
    for (std::size_t i = 0; i < k; ++i)
      for (std::size_t l = 0; l < k; ++l) {
        const Integer& x = a.first[i * k + l];
        if (x.is_zero()) continue;
        for (std::size_t j = 0; j < k; ++j) out.first[i * k + j] += x * b.first[l * k + j];
      }
    return out;
  };
  std::vector<Key> keys;
  for (const auto& m : gens) keys.push_back(key_of(m));
  Closure<Key, decltype(mul)> c(key_of(intlin::IntMatrix::identity(n)), keys, mul, cap);

  FiniteGroup g;
  g.name_ = std::move(name);
  g.table_ = std::move(c.table);
  g.generators_ = std::move(c.generator_index);
  g.element_names_.assign(g.table_.size(), "");
  g.finish();
  // Words in the generators a, b, c, ...
  g.element_names_[0] = "1";
  for (std::size_t a = 1; a < g.order(); ++a) {
    std::string letter(1, static_cast<char>('a' + g.parent_gen_[a] % 26));
    const std::string& prefix = g.element_names_[g.parent_[a]];
    g.element_names_[a] = prefix == "1" ? letter : prefix + letter;
  }
  return g;
}

FiniteGroup FiniteGroup::from_table(std::vector<std::vector<std::size_t>> table, std::vector<std::size_t> generators,
                                    std::vector<std::string> element_names, std::string name) {
  FiniteGroup g;
  g.name_ = std::move(name);
  g.table_ = std::move(table);
  g.generators_ = std::move(generators);
  g.element_names_ = std::move(element_names);
  g.finish();
  return g;
}

void FiniteGroup::finish() {
  const std::size_t n = table_.size();
  if (n == 0) throw InvalidSpec("empty group table");
  for (std::size_t a = 0; a < n; ++a)
    if (table_[0][a] != a || table_[a][0] != a) throw InvalidSpec("element 0 is not the identity");
  inverse_.assign(n, n);
  for (std::size_t a = 0; a < n; ++a)
    for (std::size_t b = 0; b < n; ++b)
      if (table_[a][b] == 0) inverse_[a] = b;
  for (std::size_t a = 0; a < n; ++a)
    if (inverse_[a] == n || table_[inverse_[a]][a] != 0) throw InvalidSpec("group table lacks inverses");
  for (std::size_t a = 0; a < n; ++a)
    for (std::size_t b = 0; b < n; ++b)
      for (std::size_t c = 0; c < n; ++c)
        if (table_[table_[a][b]][c] != table_[a][table_[b][c]]) throw InvalidSpec("group table is not associative");

  parent_.assign(n, n);
  parent_gen_.assign(n, 0);
  parent_[0] = 0;
  std::deque<std::size_t> queue{0};
  std::size_t reached = 1;
  while (!queue.empty()) {
    std::size_t a = queue.front();
    queue.pop_front();
    for (std::size_t s = 0; s < generators_.size(); ++s) {
      std::size_t b = table_[a][generators_[s]];
      if (b == 0 || parent_[b] != n) continue;
      parent_[b] = a;
      parent_gen_[b] = s;
      ++reached;
      queue.push_back(b);
    }
  }
  if (reached != n) throw InvalidSpec("generators do not generate the group");
  if (element_names_.size() != n) element_names_.assign(n, "");
}

std::size_t FiniteGroup::element_order(std::size_t a) const {
  std::size_t k = 1;
  for (std::size_t x = a; x != 0; x = mul(x, a)) ++k;
  return k;
}

std::optional<std::size_t> FiniteGroup::find_element(const std::string& element_name) const {
  for (std::size_t a = 0; a < order(); ++a)
    if (element_names_[a] == element_name) return a;
  return std::nullopt;
}

bool FiniteGroup::is_abelian() const {
  for (std::size_t a = 0; a < order(); ++a)
    for (std::size_t b = 0; b < a; ++b)
      if (mul(a, b) != mul(b, a)) return false;
  return true;
}

std::optional<std::size_t> FiniteGroup::cyclic_generator() const {
  for (std::size_t a = 0; a < order(); ++a)
    if (element_order(a) == order()) return a;
  return std::nullopt;
}

ElementSet FiniteGroup::closure(const std::vector<std::size_t>& elements) const {
  std::vector<char> in(order(), 0);
  std::vector<std::size_t> found{0};
  in[0] = 1;
  for (std::size_t head = 0; head < found.size(); ++head)
    for (std::size_t s : elements) {
      std::size_t b = mul(found[head], s);
      if (!in[b]) {
        in[b] = 1;
        found.push_back(b);
      }
    }
  std::sort(found.begin(), found.end());
  return found;
}

bool FiniteGroup::is_subgroup(const ElementSet& elements) const {
  if (elements.empty() || !std::is_sorted(elements.begin(), elements.end())) return false;
  return closure(elements) == elements;
}

const std::vector<ElementSet>& FiniteGroup::subgroups() const {
  if (subgroups_) return *subgroups_;
  std::set<ElementSet> seen{{0}};
  std::vector<ElementSet> queue{{0}};
  for (std::size_t head = 0; head < queue.size(); ++head) {
    const ElementSet h = queue[head];
    for (std::size_t g = 0; g < order(); ++g) {
      if (std::binary_search(h.begin(), h.end(), g)) continue;
      std::vector<std::size_t> gens = h;
      gens.push_back(g);
      ElementSet k = closure(gens);
      if (seen.insert(k).second) queue.push_back(std::move(k));
    }
  }
  auto all = std::make_shared<std::vector<ElementSet>>(seen.begin(), seen.end());
  std::sort(all->begin(), all->end(), [](const ElementSet& a, const ElementSet& b) {
    return a.size() != b.size() ? a.size() < b.size() : a < b;
  });
  subgroups_ = all;
  return *subgroups_;
}

namespace {

// A single generator when the subgroup is cyclic, otherwise greedy in index order.
std::vector<std::size_t> greedy_generators(const FiniteGroup& g, const ElementSet& elements) {
  for (std::size_t e : elements)
    if (g.element_order(e) == elements.size() && elements.size() > 1) return {e};
  std::vector<std::size_t> gens;
  ElementSet cur{0};
  for (std::size_t e : elements) {
    if (std::binary_search(cur.begin(), cur.end(), e)) continue;
    gens.push_back(e);
    cur = g.closure(gens);
  }
  return gens;
}

}  // namespace

FiniteGroup FiniteGroup::subgroup_group(const ElementSet& elements, std::string name) const {
  if (!is_subgroup(elements)) throw InvalidSpec("element set is not a subgroup");
  const std::size_t n = elements.size();
  std::vector<std::size_t> local(order(), order());
  for (std::size_t k = 0; k < n; ++k) local[elements[k]] = k;
  std::vector<std::vector<std::size_t>> table(n, std::vector<std::size_t>(n));
  for (std::size_t a = 0; a < n; ++a)
    for (std::size_t b = 0; b < n; ++b) table[a][b] = local[mul(elements[a], elements[b])];
  std::vector<std::size_t> gens;
  for (std::size_t e : greedy_generators(*this, elements)) gens.push_back(local[e]);
  std::vector<std::string> names;
  for (std::size_t e : elements) names.push_back(element_names_[e]);
  if (name.empty()) name = subgroup_name(elements);
  return from_table(std::move(table), std::move(gens), std::move(names), std::move(name));
}

std::string FiniteGroup::subgroup_name(const ElementSet& elements) const {
  if (elements.size() == 1) return "1";
  if (elements.size() == order() && !name_.empty()) return name_;
  std::string out = "<";
  auto gens = greedy_generators(*this, elements);
  for (std::size_t k = 0; k < gens.size(); ++k) out += (k ? "," : "") + element_names_[gens[k]];
  return out + ">";
}

// ----------------------------------------------------------------- parsing

Permutation parse_cycles(const std::string& text, std::size_t degree) {
  std::vector<std::vector<std::size_t>> cycles;
  std::size_t pos = 0;
  std::size_t max_point = 0;
  while (pos < text.size()) {
    char c = text[pos];
    if (std::isspace(static_cast<unsigned char>(c))) {
      ++pos;
      continue;
    }
    if (c != '(') throw InvalidSpec("cycle notation: expected '(' in '" + text + "'");
    auto close = text.find(')', pos);
    if (close == std::string::npos) throw InvalidSpec("cycle notation: unbalanced '(' in '" + text + "'");
    std::string body = text.substr(pos + 1, close - pos - 1);
    for (char& ch : body)
      if (ch == ',') ch = ' ';
    std::istringstream in(body);
    std::vector<std::size_t> cycle;
    long long v;
    while (in >> v) {
      if (v < 1) throw InvalidSpec("cycle notation: points are 1-based");
      cycle.push_back(static_cast<std::size_t>(v - 1));
      max_point = std::max(max_point, static_cast<std::size_t>(v));
    }
    if (!in.eof()) throw InvalidSpec("cycle notation: bad point in '" + text + "'");
    cycles.push_back(cycle);
    pos = close + 1;
  }
  degree = std::max(degree, max_point);
  Permutation p(degree);
  for (std::size_t x = 0; x < degree; ++x) p[x] = x;
  // Apply the rightmost cycle first.
  for (auto it = cycles.rbegin(); it != cycles.rend(); ++it) {
    const auto& cyc = *it;
    std::set<std::size_t> distinct(cyc.begin(), cyc.end());
    if (distinct.size() != cyc.size()) throw InvalidSpec("cycle notation: repeated point in '" + text + "'");
    Permutation step(degree);
    for (std::size_t x = 0; x < degree; ++x) step[x] = x;
    for (std::size_t k = 0; k < cyc.size(); ++k) step[cyc[k]] = cyc[(k + 1) % cyc.size()];
    p = compose(step, p);
  }
  return p;
}

std::string format_cycles(const Permutation& p) {
  std::string out;
  std::vector<char> seen(p.size(), 0);
  for (std::size_t x = 0; x < p.size(); ++x) {
    if (seen[x] || p[x] == x) continue;
    out += "(";
    std::size_t y = x;
    bool first = true;
    while (!seen[y]) {
      seen[y] = 1;
      out += (first ? "" : ",") + std::to_string(y + 1);
      first = false;
      y = p[y];
    }
    out += ")";
  }
  return out.empty() ? "()" : out;
}

GroupPtr builtin_group(const std::string& name, std::size_t cap) {
  static std::mutex mutex;
  static std::map<std::pair<std::string, std::size_t>, GroupPtr> cache;
  std::lock_guard lock(mutex);
  auto key = std::make_pair(name, cap);
  if (auto it = cache.find(key); it != cache.end()) return it->second;
  GroupPtr g = make_builtin(name, cap);
  cache.emplace(key, g);
  return g;
}

std::vector<std::string> builtin_group_names() {
  return {"C1", "C2", "C3", "C4", "C5", "C6", "C7", "C8", "C2xC2", "C2xC4", "C2xC2xC2", "S3", "D4", "Q8", "S4"};
}

GroupPtr parse_group(const std::string& text, std::size_t cap) {
  const std::string t = trim(text);
  if (t.empty()) throw InvalidSpec("empty group specification");
  if (t.find('(') != std::string::npos) {
    std::vector<Permutation> gens;
    for (const auto& part : split_top_level(t, ";,"))
      if (!part.empty()) gens.push_back(parse_cycles(part));
    return std::make_shared<FiniteGroup>(FiniteGroup::from_permutations(gens, cap, t));
  }
  std::ifstream file(t);
  if (!file) return builtin_group(t, cap);

  std::vector<Permutation> perms;
  std::vector<intlin::IntMatrix> mats;
  std::string name = t, word;
  while (file >> word) {
    if (word == "perm") {
      std::string line;
      std::getline(file, line);
      perms.push_back(parse_cycles(line));
    } else if (word == "matrix") {
      mats.push_back(intlin::read_matrix(file));
    } else if (word == "name") {
      file >> name;
    } else if (word.starts_with("#")) {
      std::string rest;
      std::getline(file, rest);
    } else {
      throw InvalidSpec("group file: unexpected token '" + word + "'");
    }
  }
  if (!perms.empty() && !mats.empty()) throw InvalidSpec("group file mixes permutations and matrices");
  if (!mats.empty()) return std::make_shared<FiniteGroup>(FiniteGroup::from_matrices(mats, cap, name));
  return std::make_shared<FiniteGroup>(FiniteGroup::from_permutations(perms, cap, name));
}

ElementSet parse_subgroup(const FiniteGroup& g, const std::string& text) {
  const std::string t = trim(text);
  if (t == "1") return {0};
  if (t == g.name() || t == "G") {
    ElementSet all(g.order());
    for (std::size_t a = 0; a < g.order(); ++a) all[a] = a;
    return all;
  }
  if (t.starts_with("#")) {
    std::size_t k = 0;
    try {
      k = std::stoul(t.substr(1));
    } catch (const std::exception&) {
      throw InvalidSpec("bad subgroup index '" + t + "'");
    }
    const auto& subs = g.subgroups();
    if (k >= subs.size()) throw InvalidSpec("subgroup index out of range: " + t);
    return subs[k];
  }
  const bool generated = t.starts_with("<") && t.ends_with(">");
  const bool listed = t.starts_with("{") && t.ends_with("}");
  if (!generated && !listed) throw InvalidSpec("bad subgroup '" + t + "'");
  std::vector<std::size_t> elems;
  for (const auto& part : split_top_level(t.substr(1, t.size() - 2), ",")) {
    if (part.empty()) continue;
    auto e = g.find_element(part);
    if (!e) throw InvalidSpec("unknown element '" + part + "' of " + g.name());
    elems.push_back(*e);
  }
  ElementSet closed = g.closure(elems);
  if (listed) {
    std::sort(elems.begin(), elems.end());
    elems.erase(std::unique(elems.begin(), elems.end()), elems.end());
    if (std::find(elems.begin(), elems.end(), 0) == elems.end()) elems.insert(elems.begin(), 0);
    if (closed != elems) throw InvalidSpec("element set " + t + " is not a subgroup");
  }
  return closed;
}

}  // namespace torinv
