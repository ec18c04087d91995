#include "torinv/expr.hpp"

#include <cctype>
#include <fstream>
#include <memory>
#include <sstream>

#include "torinv/errors.hpp"

namespace torinv {

namespace {

std::string trim(const std::string& s) {
  auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

std::string read_text_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw InvalidSpec("cannot open " + path.string());
  std::ostringstream os;
  std::string line;
  while (std::getline(in, line)) {
    auto t = trim(line);
    if (t.empty() || t[0] == '#') continue;
    os << line << "\n";
  }
  return os.str();
}

struct Node {
  enum Kind { Z, Perm, Dual, Sym, Wedge, Sum, Tensor, NormOne, Explicit } kind;
  std::size_t n = 1;
  std::string group_text;
  std::string sub_text;
  std::string path;
  std::vector<std::unique_ptr<Node>> kids;
};
using NodePtr = std::unique_ptr<Node>;

class Parser {
 public:
  explicit Parser(const std::string& text) : s_(text) {}

  NodePtr parse() {
    auto n = sum();
    skip();
    if (p_ != s_.size()) fail("unexpected '" + s_.substr(p_, 10) + "'");
    return n;
  }

 private:
  [[noreturn]] void fail(const std::string& why) const {
    throw InvalidSpec("lattice expression: " + why + " at offset " + std::to_string(p_) + " in '" + s_ + "'");
  }
  void skip() {
    while (p_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[p_]))) ++p_;
  }
  bool peek_word(const std::string& w) {
    skip();
    return s_.compare(p_, w.size(), w) == 0;
  }
  bool eat(const std::string& w) {
    if (!peek_word(w)) return false;
    p_ += w.size();
    return true;
  }
  void expect(const std::string& w) {
    if (!eat(w)) fail("expected '" + w + "'");
  }
  std::size_t number() {
    skip();
    std::size_t start = p_;
    while (p_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[p_]))) ++p_;
    if (start == p_) fail("expected a number");
    return std::stoul(s_.substr(start, p_ - start));
  }
  // Text up to the first depth-0 character in `stops`; brackets of all kinds nest.
  std::string balanced(const std::string& stops) {
    skip();
    std::size_t start = p_;
    int depth = 0;
    for (; p_ < s_.size(); ++p_) {
      char c = s_[p_];
      if (depth == 0 && stops.find(c) != std::string::npos) break;
      if (c == '(' || c == '[' || c == '{' || c == '<') ++depth;
      if (c == ')' || c == ']' || c == '}' || c == '>') --depth;
    }
    if (p_ == s_.size()) fail("unbalanced brackets");
    std::string out = trim(s_.substr(start, p_ - start));
    if (out.empty()) fail("empty argument");
    return out;
  }

  NodePtr make(Node::Kind k) {
    auto n = std::make_unique<Node>();
    n->kind = k;
    return n;
  }

  NodePtr sum() {
    auto left = tensor();
    while (eat("(+)")) {
      auto n = make(Node::Sum);
      n->kids.push_back(std::move(left));
      n->kids.push_back(tensor());
      left = std::move(n);
    }
    return left;
  }

  NodePtr tensor() {
    auto left = atom();
    while (eat("(x)")) {
      auto n = make(Node::Tensor);
      n->kids.push_back(std::move(left));
      n->kids.push_back(atom());
      left = std::move(n);
    }
    return left;
  }

  NodePtr unary(Node::Kind k, bool with_degree) {
    expect("(");
    auto n = make(k);
    n->kids.push_back(sum());
    if (with_degree) {
      expect(",");
      n->n = number();
    }
    expect(")");
    return n;
  }

  NodePtr atom() {
    skip();
    if (eat("Z[")) {
      auto n = make(Node::Perm);
      n->group_text = balanced("/]");
      if (eat("/")) n->sub_text = balanced("]");
      expect("]");
      return n;
    }
    if (eat("Z^")) {
      auto n = make(Node::Z);
      n->n = number();
      return n;
    }
    if (eat("Z")) return make(Node::Z);
    if (eat("dual")) return unary(Node::Dual, false);
    if (eat("sym")) return unary(Node::Sym, true);
    if (eat("wedge")) return unary(Node::Wedge, true);
    if (eat("norm_one")) {
      expect("(");
      auto n = make(Node::NormOne);
      n->group_text = balanced(")");
      expect(")");
      return n;
    }
    if (eat("explicit")) {
      expect("(");
      auto n = make(Node::Explicit);
      n->path = balanced(")");
      expect(")");
      return n;
    }
    if (eat("(")) {
      auto n = sum();
      expect(")");
      return n;
    }
    fail("expected a lattice");
  }

  const std::string& s_;
  std::size_t p_ = 0;
};

struct Evaluator {
  ExprContext ctx;
  GroupRegistry& registry;
  GroupPtr group;

  void adopt(const GroupPtr& g) {
    if (!group) {
      group = g;
      return;
    }
    if (!same_group(*group, *g))
      throw InvalidSpec("lattice expression mixes the groups " + group->name() + " and " + g->name());
  }

  void find_group(const Node& n) {
    if (n.kind == Node::Perm || n.kind == Node::NormOne) adopt(registry.get(n.group_text));
    for (const auto& k : n.kids) find_group(*k);
  }

  // Same-structure groups from different spellings are unified onto one object.
  GroupPtr resolve(const std::string& text) {
    GroupPtr g = registry.get(text);
    adopt(g);
    return group;
  }

  TorusLattice plain(GLattice l, TorusProvenance p = TorusProvenance::explicit_lattice) {
    TorusLattice t;
    t.lattice = std::move(l);
    t.provenance = p;
    return t;
  }

  TorusLattice eval(const Node& n) {
    switch (n.kind) {
      case Node::Z:
        return split_torus_lattice(need_group(), n.n);
      case Node::Perm: {
        GroupPtr g = resolve(n.group_text);
        ElementSet h = n.sub_text.empty() ? ElementSet{0} : parse_subgroup(*g, n.sub_text);
        return weil_restriction_lattice(g, h);
      }
      case Node::NormOne:
        return norm_one_lattice(resolve(n.group_text));
      case Node::Dual:
        return plain(dual_lattice(eval(*n.kids[0]).lattice));
      case Node::Sym:
        return plain(sym_power(eval(*n.kids[0]).lattice, n.n, ctx.rank_cap));
      case Node::Wedge:
        return plain(wedge_power(eval(*n.kids[0]).lattice, n.n, ctx.rank_cap));
      case Node::Sum: {
        // Left to right, so an explicit file on the left can fix the group of a Z on the right.
        auto a = eval(*n.kids[0]);
        auto t = torus_direct_sum(a, eval(*n.kids[1]));
        if (t.lattice.rank() > ctx.rank_cap) throw RankOverflow("direct sum exceeds the rank cap");
        return t;
      }
      case Node::Tensor: {
        auto a = eval(*n.kids[0]);
        return plain(tensor_product(a.lattice, eval(*n.kids[1]).lattice, ctx.rank_cap));
      }
      case Node::Explicit: {
        ExprContext sub = ctx;
        sub.group = group;
        sub.registry = &registry;
        std::filesystem::path p = n.path;
        if (p.is_relative()) p = ctx.base_dir / p;
        GLattice l = read_explicit_lattice(p, sub);
        adopt(l.group_ptr());
        return plain(l);
      }
    }
    throw InvalidSpec("lattice expression: unknown node");
  }

  GroupPtr need_group() {
    if (!group) throw InvalidSpec("lattice expression: 'Z' needs a group; none is given or named in the expression");
    return group;
  }
};

}  // namespace

GroupPtr GroupRegistry::get(const std::string& text) {
  auto key = trim(text);
  auto it = groups_.find(key);
  if (it != groups_.end()) return it->second;
  GroupPtr g = parse_group(key, cap_);
  groups_[key] = g;
  return g;
}

TorusLattice parse_lattice_expr(const std::string& text, const ExprContext& ctx) {
  GroupRegistry local;
  GroupRegistry& registry = ctx.registry ? *ctx.registry : local;
  NodePtr root = Parser(text).parse();
  Evaluator ev{ctx, registry, ctx.group};
  ev.find_group(*root);
  TorusLattice t = ev.eval(*root);
  t.expression = trim(text);
  return t;
}

GLattice read_explicit_lattice(const std::filesystem::path& path, const ExprContext& ctx) {
  std::istringstream in(read_text_file(path));
  GroupRegistry local;
  GroupRegistry& registry = ctx.registry ? *ctx.registry : local;
  GroupPtr group = ctx.group;
  std::optional<std::size_t> rank;
  std::vector<std::string> labels;
  std::string word;
  while (true) {
    auto pos = in.tellg();
    if (!(in >> word)) break;
    if (word == "group") {
      std::string rest;
      std::getline(in, rest);
      GroupPtr g = registry.get(rest);
      if (group && !same_group(*group, *g))
        throw InvalidSpec(path.string() + ": group " + g->name() + " does not match " + group->name());
      if (!group) group = g;
    } else if (word == "rank") {
      std::size_t r;
      if (!(in >> r)) throw InvalidSpec(path.string() + ": bad rank line");
      rank = r;
    } else if (word == "labels") {
      std::string rest, l;
      std::getline(in, rest);
      std::istringstream ls(rest);
      while (ls >> l) labels.push_back(l);
    } else {
      in.clear();
      in.seekg(pos);
      break;
    }
  }
  if (!group) throw InvalidSpec(path.string() + ": no group given");
  if (!rank) throw InvalidSpec(path.string() + ": missing 'rank' line");
  std::vector<IntMatrix> images;
  for (std::size_t k = 0; k < group->generators().size(); ++k) {
    IntMatrix m = intlin::read_matrix(in);
    if (m.rows() != *rank || m.cols() != *rank)
      throw InvalidSpec(path.string() + ": generator matrix " + std::to_string(k + 1) + " is not " +
                        std::to_string(*rank) + " x " + std::to_string(*rank));
    images.push_back(std::move(m));
  }
  if (in >> word) throw InvalidSpec(path.string() + ": trailing data '" + word + "'");
  if (!labels.empty() && labels.size() != *rank) throw InvalidSpec(path.string() + ": label count differs from rank");
  return GLattice::from_generator_images(group, images, labels);
}

std::string format_explicit_lattice(const GLattice& l, const std::string& group_text) {
  return "group " + group_text + "\n" + format_lattice(l);
}

ShortExactSequence read_ses_file(const std::filesystem::path& path, const ExprContext& ctx) {
  std::istringstream in(read_text_file(path));
  GroupRegistry local;
  GroupRegistry& registry = ctx.registry ? *ctx.registry : local;
  ExprContext sub = ctx;
  sub.registry = &registry;
  sub.base_dir = path.parent_path().empty() ? std::filesystem::path(".") : path.parent_path();
  std::string left, middle, right, word;
  std::optional<IntMatrix> alpha, beta;
  while (in >> word) {
    if (word == "group" || word == "left" || word == "middle" || word == "right") {
      std::string rest;
      std::getline(in, rest);
      rest = trim(rest);
      if (word == "group") {
        GroupPtr g = registry.get(rest);
        if (sub.group && !same_group(*sub.group, *g))
          throw InvalidSpec(path.string() + ": group " + g->name() + " does not match " + sub.group->name());
        if (!sub.group) sub.group = g;
      } else {
        (word == "left" ? left : word == "middle" ? middle : right) = rest;
      }
    } else if (word == "alpha") {
      alpha = intlin::read_matrix(in);
    } else if (word == "beta") {
      beta = intlin::read_matrix(in);
    } else {
      throw InvalidSpec(path.string() + ": unknown keyword '" + word + "'");
    }
  }
  if (left.empty() || middle.empty() || right.empty() || !alpha)
    throw InvalidSpec(path.string() + ": needs left, middle, right and alpha");
  GLattice l = parse_lattice_expr(left, sub).lattice;
  if (!sub.group) sub.group = l.group_ptr();
  GLattice m = parse_lattice_expr(middle, sub).lattice;
  if (alpha->rows() != m.rank() || alpha->cols() != l.rank())
    throw InvalidSpec(path.string() + ": alpha must be " + std::to_string(m.rank()) + " x " + std::to_string(l.rank()));
  LatticeMorphism a{l, m, *alpha};
  if (right == "quotient") {
    if (beta) throw InvalidSpec(path.string() + ": 'right quotient' takes no beta");
    auto [t, proj] = quotient_lattice(a);
    return {a, proj};
  }
  if (!beta) throw InvalidSpec(path.string() + ": missing beta");
  GLattice r = parse_lattice_expr(right, sub).lattice;
  if (beta->rows() != r.rank() || beta->cols() != m.rank())
    throw InvalidSpec(path.string() + ": beta must be " + std::to_string(r.rank()) + " x " + std::to_string(m.rank()));
  return {a, {m, r, *beta}};
}

}  // namespace torinv
