#include "torinv/lattice.hpp"

#include <algorithm>
#include <map>
#include <sstream>

#include "torinv/errors.hpp"

namespace torinv {

namespace {

std::vector<std::string> default_labels(std::size_t rank) {
  std::vector<std::string> out;
  for (std::size_t i = 0; i < rank; ++i) out.push_back("b" + std::to_string(i + 1));
  return out;
}

void check_rank(std::size_t rank, std::size_t cap, const char* what) {
  if (rank > cap)
    throw RankOverflow(std::string(what) + " would have rank " + std::to_string(rank) + ", above the cap of " +
                       std::to_string(cap));
}

void require_same_group(const GLattice& a, const GLattice& b, const char* what) {
  if (!same_group(a.group(), b.group())) throw InvalidSpec(std::string(what) + ": lattices over different groups");
}

/// Joins labels of a product basis element; single characters concatenate
/// ("e","x" -> "ex"), longer ones get a separator.
std::string join_labels(const std::vector<std::string>& parts, const std::string& sep) {
  bool short_labels = std::all_of(parts.begin(), parts.end(), [](const std::string& s) { return s.size() == 1; });
  std::string out;
  for (std::size_t k = 0; k < parts.size(); ++k) out += (k && !short_labels ? sep : "") + parts[k];
  return out;
}

using Tuple = std::vector<std::size_t>;

std::map<Tuple, std::size_t> tuple_index(const std::vector<Tuple>& basis) {
  std::map<Tuple, std::size_t> idx;
  for (std::size_t k = 0; k < basis.size(); ++k) idx.emplace(basis[k], k);
  return idx;
}

std::vector<std::vector<std::pair<std::size_t, Integer>>> column_entries(const IntMatrix& f) {
  std::vector<std::vector<std::pair<std::size_t, Integer>>> cols(f.cols());
  for (std::size_t i = 0; i < f.rows(); ++i)
    for (std::size_t j = 0; j < f.cols(); ++j)
      if (!f(i, j).is_zero()) cols[j].emplace_back(i, f(i, j));
  return cols;
}

}  // namespace

// ------------------------------------------------------------------ GLattice

GLattice::GLattice(GroupPtr group, std::vector<IntMatrix> action, std::vector<std::string> labels) {
  if (!group) throw InvalidSpec("lattice without a group");
  const FiniteGroup& g = *group;
  if (action.size() != g.order()) throw InvalidSpec("lattice needs one action matrix per group element");
  const std::size_t r = action.empty() ? 0 : action[0].rows();
  for (const auto& m : action)
    if (m.rows() != r || m.cols() != r) throw InvalidSpec("action matrices must be square of a common size");
  if (!action[0].is_identity()) throw InvalidSpec("identity element does not act trivially");
  // rho(a) rho(s) = rho(a s) for every a and generator s, together with
  // rho(1) = 1, forces rho(a) rho(b) = rho(ab) by induction on word length.
  for (std::size_t a = 0; a < g.order(); ++a)
    for (std::size_t s : g.generators())
      if (action[a] * action[s] != action[g.mul(a, s)])
        throw InvalidSpec("action is not a homomorphism at (" + g.element_name(a) + ", " + g.element_name(s) + ")");
  if (labels.empty()) labels = default_labels(r);
  if (labels.size() != r) throw InvalidSpec("label count does not match the rank");
  auto d = std::make_shared<Data>();
  d->group = std::move(group);
  d->rank = r;
  d->action = std::move(action);
  d->labels = std::move(labels);
  data_ = std::move(d);
}

GLattice GLattice::from_generator_images(GroupPtr group, const std::vector<IntMatrix>& images,
                                         std::vector<std::string> labels) {
  const FiniteGroup& g = *group;
  if (images.size() != g.generators().size())
    throw InvalidSpec("expected " + std::to_string(g.generators().size()) + " generator matrices, got " +
                      std::to_string(images.size()));
  std::size_t r = images.empty() ? labels.size() : images[0].rows();
  std::vector<IntMatrix> action(g.order());
  action[0] = IntMatrix::identity(r);
  // BFS order guarantees parents come first.
  std::vector<char> done(g.order(), 0);
  done[0] = 1;
  for (std::size_t pass = 0; pass < g.order(); ++pass)
    for (std::size_t a = 1; a < g.order(); ++a) {
      if (done[a] || !done[g.word_parent(a)]) continue;
      const IntMatrix& img = images[g.word_generator(a)];
      if (img.rows() != r || img.cols() != r) throw InvalidSpec("generator matrices must be square of a common size");
      action[a] = action[g.word_parent(a)] * img;
      done[a] = 1;
    }
  // The generator images themselves must be what the words produce.
  for (std::size_t s = 0; s < images.size(); ++s)
    if (action[g.generators()[s]] != images[s])
      throw InvalidSpec("generator images are inconsistent with the group (generator " + std::to_string(s + 1) + ")");
  return GLattice(std::move(group), std::move(action), std::move(labels));
}

bool GLattice::same_action(const GLattice& other) const {
  return same_group(group(), other.group()) && data_->action == other.data_->action;
}

GLattice GLattice::with_labels(std::vector<std::string> labels) const {
  if (labels.size() != rank()) throw InvalidSpec("label count does not match the rank");
  auto d = std::make_shared<Data>(*data_);
  d->labels = std::move(labels);
  GLattice out;
  out.data_ = std::move(d);
  return out;
}

bool same_group(const FiniteGroup& a, const FiniteGroup& b) { return &a == &b || a.same_structure(b); }

std::string EquivarianceVerdict::to_string(const FiniteGroup& g) const {
  if (equivariant) return "equivariant";
  std::ostringstream os;
  os << "not equivariant at g = " << g.element_name(element) << ", entry (" << row << ", " << col << ")";
  return os.str();
}

EquivarianceVerdict verify_equivariant_map(const LatticeMorphism& f) {
  EquivarianceVerdict v;
  if (!same_group(f.source.group(), f.target.group()))
    throw InvalidSpec("morphism between lattices over different groups");
  if (f.matrix.rows() != f.target.rank() || f.matrix.cols() != f.source.rank())
    throw InvalidSpec("morphism matrix has the wrong shape");
  const FiniteGroup& g = f.source.group();
  for (std::size_t a = 0; a < g.order(); ++a) {
    IntMatrix lhs = f.matrix * f.source.action(a);
    IntMatrix rhs = f.target.action(a) * f.matrix;
    for (std::size_t i = 0; i < lhs.rows(); ++i)
      for (std::size_t j = 0; j < lhs.cols(); ++j)
        if (lhs(i, j) != rhs(i, j)) {
          v.equivariant = false;
          v.element = a;
          v.row = i;
          v.col = j;
          return v;
        }
  }
  return v;
}

ExactnessVerdict verify_short_exact(const ShortExactSequence& ses) {
  const auto& l = ses.left;
  const auto& r = ses.right;
  auto fail = [](std::string why) { return ExactnessVerdict{false, std::move(why)}; };
  if (l.matrix.rows() != l.target.rank() || l.matrix.cols() != l.source.rank()) return fail("left map has wrong shape");
  if (r.matrix.rows() != r.target.rank() || r.matrix.cols() != r.source.rank()) return fail("right map has wrong shape");
  if (l.target.rank() != r.source.rank()) return fail("middle terms differ in rank");
  if (!l.target.same_action(r.source)) return fail("middle terms carry different actions");
  if (auto v = verify_equivariant_map(l); !v.equivariant) return fail("left map " + v.to_string(l.source.group()));
  if (auto v = verify_equivariant_map(r); !v.equivariant) return fail("right map " + v.to_string(r.source.group()));
  if (!(r.matrix * l.matrix).is_zero()) return fail("composite is not zero");
  const std::size_t n = l.target.rank();
  auto inv_l = intlin::smith_invariants(l.matrix);
  if (inv_l.rank != l.source.rank()) return fail("left map is not injective");
  if (!inv_l.nonunit_factors().empty()) return fail("image of the left map is not saturated");
  auto coker_r = intlin::cokernel_structure(r.matrix);
  if (!coker_r.is_zero()) return fail("right map is not surjective (cokernel " + coker_r.to_string() + ")");
  if (inv_l.rank != n - r.target.rank()) return fail("image of the left map is smaller than the kernel");
  return {true, "exact"};
}

// ------------------------------------------------------------ constructions

GLattice trivial_lattice(GroupPtr g, std::size_t rank) {
  std::vector<IntMatrix> action(g->order(), IntMatrix::identity(rank));
  return GLattice(std::move(g), std::move(action));
}

GLattice permutation_lattice(GroupPtr g, const ElementSet& h) {
  if (!g->is_subgroup(h)) throw InvalidSpec("permutation lattice needs a subgroup");
  const std::size_t n = g->order();
  std::vector<std::size_t> coset_of(n, n);
  std::vector<std::size_t> reps;
  for (std::size_t a = 0; a < n; ++a) {
    if (coset_of[a] != n) continue;
    for (std::size_t x : h) coset_of[g->mul(a, x)] = reps.size();
    reps.push_back(a);
  }
  const std::size_t r = reps.size();
  std::vector<IntMatrix> action;
  for (std::size_t a = 0; a < n; ++a) {
    IntMatrix m(r, r);
    for (std::size_t j = 0; j < r; ++j) m(coset_of[g->mul(a, reps[j])], j) = 1;
    action.push_back(std::move(m));
  }
  std::vector<std::string> labels;
  for (std::size_t rep : reps) labels.push_back(h.size() == 1 ? g->element_name(rep) : "[" + g->element_name(rep) + "]");
  return GLattice(std::move(g), std::move(action), std::move(labels));
}

GLattice regular_lattice(GroupPtr g) { return permutation_lattice(g, {0}); }

GLattice dual_lattice(const GLattice& l) {
  const FiniteGroup& g = l.group();
  std::vector<IntMatrix> action;
  for (std::size_t a = 0; a < g.order(); ++a) action.push_back(l.action(g.inverse(a)).transpose());
  std::vector<std::string> labels;
  for (const auto& s : l.labels()) labels.push_back(s.ends_with("*") ? s.substr(0, s.size() - 1) : s + "*");
  return GLattice(l.group_ptr(), std::move(action), std::move(labels));
}

GLattice direct_sum(const GLattice& a, const GLattice& b, std::size_t rank_cap) { return direct_sum({a, b}, rank_cap); }

GLattice direct_sum(const std::vector<GLattice>& parts, std::size_t rank_cap) {
  if (parts.empty()) throw InvalidSpec("direct sum of nothing");
  std::size_t r = 0;
  for (const auto& p : parts) {
    require_same_group(parts[0], p, "direct sum");
    r += p.rank();
  }
  check_rank(r, rank_cap, "direct sum");
  const FiniteGroup& g = parts[0].group();
  std::vector<IntMatrix> action;
  for (std::size_t a = 0; a < g.order(); ++a) {
    IntMatrix m(r, r);
    std::size_t off = 0;
    for (const auto& p : parts) {
      const IntMatrix& pa = p.action(a);
      for (std::size_t i = 0; i < p.rank(); ++i)
        for (std::size_t j = 0; j < p.rank(); ++j) m(off + i, off + j) = pa(i, j);
      off += p.rank();
    }
    action.push_back(std::move(m));
  }
  // Repeated labels get a summand suffix so they stay distinguishable.
  std::vector<std::string> labels;
  std::map<std::string, int> count;
  for (const auto& p : parts)
    for (const auto& s : p.labels()) ++count[s];
  for (std::size_t k = 0; k < parts.size(); ++k)
    for (const auto& s : parts[k].labels()) labels.push_back(count[s] > 1 ? s + "_" + std::to_string(k + 1) : s);
  return GLattice(parts[0].group_ptr(), std::move(action), std::move(labels));
}

GLattice tensor_product(const GLattice& a, const GLattice& b, std::size_t rank_cap) {
  require_same_group(a, b, "tensor product");
  const std::size_t r1 = a.rank(), r2 = b.rank();
  check_rank(r1 * r2, rank_cap, "tensor product");
  const FiniteGroup& g = a.group();
  std::vector<IntMatrix> action;
  for (std::size_t x = 0; x < g.order(); ++x) {
    const IntMatrix& A = a.action(x);
    const IntMatrix& B = b.action(x);
    IntMatrix m(r1 * r2, r1 * r2);
    for (std::size_t i = 0; i < r1; ++i)
      for (std::size_t k = 0; k < r1; ++k) {
        if (A(i, k).is_zero()) continue;
        for (std::size_t j = 0; j < r2; ++j)
          for (std::size_t l = 0; l < r2; ++l)
            if (!B(j, l).is_zero()) m(i * r2 + j, k * r2 + l) = A(i, k) * B(j, l);
      }
    action.push_back(std::move(m));
  }
  std::vector<std::string> labels;
  for (std::size_t i = 0; i < r1; ++i)
    for (std::size_t j = 0; j < r2; ++j) labels.push_back(a.label(i) + "." + b.label(j));
  return GLattice(a.group_ptr(), std::move(action), std::move(labels));
}

std::size_t binomial(std::size_t n, std::size_t k) {
  if (k > n) return 0;
  std::size_t r = 1;
  for (std::size_t i = 1; i <= k; ++i) r = r * (n - k + i) / i;
  return r;
}

std::vector<Tuple> sym_basis(std::size_t rank, std::size_t q) {
  std::vector<Tuple> out;
  if (rank == 0) {
    if (q == 0) out.emplace_back();
    return out;
  }
  Tuple t(q, 0);
  for (;;) {
    out.push_back(t);
    // Next nondecreasing tuple in lexicographic order.
    std::size_t k = q;
    while (k > 0 && t[k - 1] == rank - 1) --k;
    if (k == 0) break;
    std::size_t v = t[k - 1] + 1;
    for (std::size_t m = k - 1; m < q; ++m) t[m] = v;
  }
  return out;
}

std::vector<Tuple> wedge_basis(std::size_t rank, std::size_t q) {
  std::vector<Tuple> out;
  if (q > rank) return out;
  Tuple t(q);
  for (std::size_t k = 0; k < q; ++k) t[k] = k;
  for (;;) {
    out.push_back(t);
    std::size_t k = q;
    while (k > 0 && t[k - 1] == rank - q + k - 1) --k;
    if (k == 0) break;
    ++t[k - 1];
    for (std::size_t m = k; m < q; ++m) t[m] = t[m - 1] + 1;
  }
  return out;
}

IntMatrix sym_power_matrix(const IntMatrix& f, std::size_t q) {
  auto src = sym_basis(f.cols(), q);
  auto dst = sym_basis(f.rows(), q);
  auto idx = tuple_index(dst);
  auto cols = column_entries(f);
  IntMatrix out(dst.size(), src.size());
  for (std::size_t c = 0; c < src.size(); ++c) {
    std::map<Tuple, Integer> poly{{Tuple{}, Integer(1)}};
    for (std::size_t var : src[c]) {
      std::map<Tuple, Integer> next;
      for (const auto& [mono, coef] : poly)
        for (const auto& [l, v] : cols[var]) {
          Tuple m = mono;
          m.insert(std::upper_bound(m.begin(), m.end(), l), l);
          next[m] += coef * v;
        }
      poly = std::move(next);
    }
    for (const auto& [mono, coef] : poly)
      if (!coef.is_zero()) out(idx.at(mono), c) = coef;
  }
  return out;
}

IntMatrix wedge_power_matrix(const IntMatrix& f, std::size_t q) {
  auto src = wedge_basis(f.cols(), q);
  auto dst = wedge_basis(f.rows(), q);
  auto idx = tuple_index(dst);
  auto cols = column_entries(f);
  IntMatrix out(dst.size(), src.size());
  for (std::size_t c = 0; c < src.size(); ++c) {
    std::map<Tuple, Integer> form{{Tuple{}, Integer(1)}};
    for (std::size_t var : src[c]) {
      std::map<Tuple, Integer> next;
      for (const auto& [wedge, coef] : form)
        for (const auto& [l, v] : cols[var]) {
          if (std::binary_search(wedge.begin(), wedge.end(), l)) continue;
          // u ^ e_l: move e_l left past every factor larger than l.
          auto pos = std::upper_bound(wedge.begin(), wedge.end(), l);
          std::size_t passes = static_cast<std::size_t>(wedge.end() - pos);
          Tuple w = wedge;
          w.insert(w.begin() + (pos - wedge.begin()), l);
          Integer term = coef * v;
          if (passes % 2) term = -term;
          next[w] += term;
        }
      form = std::move(next);
    }
    for (const auto& [w, coef] : form)
      if (!coef.is_zero()) out(idx.at(w), c) = coef;
  }
  return out;
}

IntMatrix symmetrization_matrix(std::size_t rank) {
  auto basis = sym_basis(rank, 2);
  IntMatrix out(rank * rank, basis.size());
  for (std::size_t c = 0; c < basis.size(); ++c) {
    std::size_t i = basis[c][0], j = basis[c][1];
    out(i * rank + j, c) += 1;
    out(j * rank + i, c) += 1;
  }
  return out;
}

IntMatrix symmetric_projection_matrix(std::size_t rank) {
  auto basis = sym_basis(rank, 2);
  auto idx = tuple_index(basis);
  IntMatrix out(basis.size(), rank * rank);
  for (std::size_t i = 0; i < rank; ++i)
    for (std::size_t j = 0; j < rank; ++j) out(idx.at(Tuple{std::min(i, j), std::max(i, j)}), i * rank + j) = 1;
  return out;
}

GLattice sym_power(const GLattice& l, std::size_t q, std::size_t rank_cap) {
  check_rank(binomial(l.rank() + q - (q > 0 ? 1 : 0), q), rank_cap, "symmetric power");
  const FiniteGroup& g = l.group();
  std::vector<IntMatrix> action;
  for (std::size_t a = 0; a < g.order(); ++a) action.push_back(sym_power_matrix(l.action(a), q));
  std::vector<std::string> labels;
  for (const auto& t : sym_basis(l.rank(), q)) {
    std::vector<std::string> parts;
    for (std::size_t i : t) parts.push_back(l.label(i));
    labels.push_back(t.empty() ? "1" : join_labels(parts, "*"));
  }
  return GLattice(l.group_ptr(), std::move(action), std::move(labels));
}

GLattice wedge_power(const GLattice& l, std::size_t q, std::size_t rank_cap) {
  check_rank(binomial(l.rank(), q), rank_cap, "exterior power");
  const FiniteGroup& g = l.group();
  std::vector<IntMatrix> action;
  for (std::size_t a = 0; a < g.order(); ++a) action.push_back(wedge_power_matrix(l.action(a), q));
  std::vector<std::string> labels;
  for (const auto& t : wedge_basis(l.rank(), q)) {
    std::vector<std::string> parts;
    for (std::size_t i : t) parts.push_back(l.label(i));
    std::string s;
    for (std::size_t k = 0; k < parts.size(); ++k) s += (k ? "^" : "") + parts[k];
    labels.push_back(t.empty() ? "1" : s);
  }
  return GLattice(l.group_ptr(), std::move(action), std::move(labels));
}

GLattice restrict_lattice(const GLattice& l, const ElementSet& h) {
  auto sub = std::make_shared<const FiniteGroup>(l.group().subgroup_group(h));
  std::vector<IntMatrix> action;
  for (std::size_t x : h) action.push_back(l.action(x));
  return GLattice(std::move(sub), std::move(action), l.labels());
}

std::pair<GLattice, LatticeMorphism> sub_lattice(const GLattice& l, const IntMatrix& basis,
                                                 std::vector<std::string> labels) {
  if (basis.rows() != l.rank()) throw InvalidSpec("sublattice basis has the wrong length");
  if (intlin::rank(basis) != basis.cols()) throw InvalidSpec("sublattice basis vectors are dependent");
  const FiniteGroup& g = l.group();
  std::vector<IntMatrix> images;
  for (std::size_t s : g.generators()) {
    auto x = intlin::solve(basis, l.action(s) * basis);
    if (!x) throw InvalidSpec("span is not stable under " + g.element_name(s));
    images.push_back(std::move(*x));
  }
  if (labels.empty()) labels = default_labels(basis.cols());
  GLattice sub = GLattice::from_generator_images(l.group_ptr(), images, std::move(labels));
  return {sub, LatticeMorphism{sub, l, basis}};
}

std::pair<GLattice, LatticeMorphism> quotient_lattice(const LatticeMorphism& incl) {
  const IntMatrix& B = incl.matrix;
  const std::size_t n = incl.target.rank(), k = incl.source.rank();
  if (B.rows() != n || B.cols() != k) throw InvalidSpec("inclusion matrix has the wrong shape");
  auto inv = intlin::smith_invariants(B);
  if (inv.rank != k) throw NotInjective("map is not injective (rank " + std::to_string(inv.rank) + " < " +
                                        std::to_string(k) + ")");
  if (auto t = inv.nonunit_factors(); !t.empty()) {
    std::string factors = intlin::AbelianGroupStructure(0, t).to_string();
    throw NotSaturated("image is not saturated; the cokernel has torsion " + factors, factors);
  }

  // Complete B to a unimodular matrix M whose first k columns are B.
  IntMatrix M = B;
  std::vector<std::size_t> chosen;
  for (std::size_t j = 0; j < n && chosen.size() < n - k; ++j) {
    IntMatrix e(n, 1);
    e(j, 0) = 1;
    IntMatrix cand = M.hstack(e);
    auto ci = intlin::smith_invariants(cand);
    if (ci.rank == cand.cols() && ci.nonunit_factors().empty()) {
      M = std::move(cand);
      chosen.push_back(j);
    }
  }
  std::vector<std::string> labels;
  if (chosen.size() == n - k) {
    for (std::size_t j : chosen) labels.push_back(incl.target.label(j));
  } else {
    M = intlin::inverse_unimodular(intlin::smith_decompose(B).U);
    labels = default_labels(n - k);
  }
  IntMatrix Minv = intlin::inverse_unimodular(M);
  IntMatrix proj = Minv.row_block(k, n - k);
  IntMatrix section = M.columns(k, n - k);

  const FiniteGroup& g = incl.target.group();
  std::vector<IntMatrix> images;
  for (std::size_t s : g.generators()) images.push_back(proj * incl.target.action(s) * section);
  GLattice quotient = GLattice::from_generator_images(incl.target.group_ptr(), images, std::move(labels));
  LatticeMorphism projection{incl.target, quotient, proj};
  if (!verify_equivariant_map(projection).equivariant)
    throw InvalidSpec("sublattice is not G-stable, so the quotient carries no action");
  return {quotient, projection};
}

IntMatrix invariants_sublattice(const GLattice& l) {
  const FiniteGroup& g = l.group();
  const std::size_t r = l.rank();
  IntMatrix stacked(0, r);
  for (std::size_t s : g.generators()) stacked = stacked.vstack(l.action(s) - IntMatrix::identity(r));
  if (stacked.rows() == 0) return IntMatrix::identity(r);
  return intlin::kernel_basis(stacked);
}

std::string format_lattice(const GLattice& l) {
  std::ostringstream os;
  os << "rank " << l.rank() << "\nlabels";
  for (const auto& s : l.labels()) os << " " << s;
  os << "\n";
  for (std::size_t s : l.group().generators()) os << intlin::format_dense(l.action(s));
  return os.str();
}

}  // namespace torinv
