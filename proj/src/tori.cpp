#include "torinv/tori.hpp"

#include <sstream>

#include "torinv/errors.hpp"

namespace torinv {

namespace {

IntMatrix ones_column(std::size_t n) {
  IntMatrix m(n, 1);
  for (std::size_t k = 0; k < n; ++k) m(k, 0) = 1;
  return m;
}

IntMatrix block_diagonal(const IntMatrix& a, const IntMatrix& b) {
  IntMatrix m(a.rows() + b.rows(), a.cols() + b.cols());
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < a.cols(); ++j) m(i, j) = a(i, j);
  for (std::size_t i = 0; i < b.rows(); ++i)
    for (std::size_t j = 0; j < b.cols(); ++j) m(a.rows() + i, a.cols() + j) = b(i, j);
  return m;
}

}  // namespace

std::string to_string(TorusProvenance p) {
  switch (p) {
    case TorusProvenance::norm_one: return "norm_one";
    case TorusProvenance::weil_restriction: return "weil_restriction";
    case TorusProvenance::quotient: return "quotient";
    case TorusProvenance::explicit_lattice: return "explicit";
  }
  return "explicit";
}

TorusLattice norm_one_lattice(const GroupPtr& g) {
  GLattice reg = regular_lattice(g);
  IntMatrix norm = ones_column(g->order());
  auto [q, proj] = quotient_lattice({trivial_lattice(g, 1), reg, norm});
  TorusLattice t;
  t.lattice = q;
  t.provenance = TorusProvenance::norm_one;
  t.family = FamilyDatum{1, reg, norm, true};
  t.expression = "norm_one(" + g->name() + ")";
  return t;
}

TorusLattice weil_restriction_lattice(const GroupPtr& g, const ElementSet& h) {
  TorusLattice t;
  t.lattice = permutation_lattice(g, h);
  t.provenance = TorusProvenance::weil_restriction;
  t.family = FamilyDatum{0, t.lattice, IntMatrix(t.lattice.rank(), 0), h.size() == 1};
  t.expression = "Z[" + g->name() + "/" + g->subgroup_name(h) + "]";
  return t;
}

TorusLattice split_torus_lattice(const GroupPtr& g, std::size_t r) {
  TorusLattice t;
  t.lattice = trivial_lattice(g, r);
  t.provenance = TorusProvenance::quotient;
  IntMatrix incl(2 * r, r);
  for (std::size_t k = 0; k < r; ++k) incl(r + k, k) = 1;
  t.family = FamilyDatum{r, trivial_lattice(g, 2 * r), incl, g->order() == 1};
  t.expression = r == 1 ? "Z" : "Z^" + std::to_string(r);
  return t;
}

TorusLattice torus_direct_sum(const TorusLattice& a, const TorusLattice& b) {
  TorusLattice t;
  t.lattice = direct_sum(a.lattice, b.lattice);
  t.provenance = a.provenance == b.provenance ? a.provenance : TorusProvenance::explicit_lattice;
  if (a.family && b.family)
    t.family = FamilyDatum{a.family->n + b.family->n, direct_sum(a.family->phat, b.family->phat),
                           block_diagonal(a.family->inclusion, b.family->inclusion),
                           a.family->phat_free && b.family->phat_free};
  t.expression = a.expression + " (+) " + b.expression;
  return t;
}

PermutationVerdict is_permutation_in_basis(const GLattice& l) {
  const std::size_t r = l.rank();
  for (std::size_t a = 0; a < l.group().order(); ++a) {
    const IntMatrix& m = l.action(a);
    for (std::size_t j = 0; j < r; ++j) {
      std::size_t ones = 0;
      bool ok = true;
      for (std::size_t i = 0; i < r; ++i) {
        if (m(i, j).is_one())
          ++ones;
        else if (!m(i, j).is_zero())
          ok = false;
      }
      if (!ok || ones != 1) return {false, a};
    }
  }
  return {};
}

std::string FlasquenessVerdict::to_string() const {
  std::ostringstream os;
  os << (kind == FlasqueKind::flasque ? "flasque" : "coflasque") << ": " << (holds ? "yes" : "no");
  for (const auto& c : certificate) os << "\n  H^1(" << c.name << ", -) = " << c.h1.to_string();
  return os.str();
}

FlasquenessVerdict flasqueness(const GLattice& l, FlasqueKind kind, const CohomologyOptions& opts) {
  FlasquenessVerdict v;
  v.kind = kind;
  GLattice target = kind == FlasqueKind::flasque ? dual_lattice(l) : l;
  const FiniteGroup& g = l.group();
  for (const auto& h : g.subgroups()) {
    GLattice res = restrict_lattice(target, h);
    auto h1 = cohomology(res, 1, opts).value;
    if (!h1.is_zero()) v.holds = false;
    v.certificate.push_back({h, g.subgroup_name(h), h1});
  }
  return v;
}

ResolutionResult coflasque_resolution(const GLattice& m, const CohomologyOptions& opts) {
  const GroupPtr& g = m.group_ptr();
  ResolutionResult out;
  if (is_permutation_in_basis(m).holds) {
    GLattice zero = trivial_lattice(g, 0);
    out.ses = {{zero, m, IntMatrix(m.rank(), 0)}, {m, m, IntMatrix::identity(m.rank())}};
  } else {
    std::vector<GLattice> parts;
    IntMatrix eval(m.rank(), 0);
    for (const auto& h : g->subgroups()) {
      IntMatrix fixed = invariants_sublattice(restrict_lattice(m, h));
      if (fixed.cols() == 0) continue;
      GLattice p = permutation_lattice(g, h);
      // Coset representatives in the order permutation_lattice uses.
      std::vector<std::size_t> reps;
      std::vector<bool> seen(g->order(), false);
      for (std::size_t a = 0; a < g->order(); ++a) {
        if (seen[a]) continue;
        for (std::size_t x : h) seen[g->mul(a, x)] = true;
        reps.push_back(a);
      }
      for (std::size_t c = 0; c < fixed.cols(); ++c) {
        IntMatrix v = fixed.column(c);
        IntMatrix block(m.rank(), reps.size());
        for (std::size_t k = 0; k < reps.size(); ++k) {
          IntMatrix img = m.action(reps[k]) * v;
          for (std::size_t i = 0; i < m.rank(); ++i) block(i, k) = img(i, 0);
        }
        eval = eval.hstack(block);
        parts.push_back(p);
      }
    }
    GLattice P = direct_sum(parts);
    LatticeMorphism right{P, m, eval};
    IntMatrix kernel = intlin::kernel_basis(eval);
    auto [c, incl] = sub_lattice(P, kernel);
    out.ses = {incl, right};
  }
  out.exactness = verify_short_exact(out.ses);
  out.certificate = flasqueness(out.ses.left.source, FlasqueKind::coflasque, opts);
  return out;
}

ResolutionResult flasque_resolution(const GLattice& s, const CohomologyOptions& opts) {
  ResolutionResult co = coflasque_resolution(dual_lattice(s), opts);
  const auto& [incl, proj] = co.ses;
  GLattice pdual = dual_lattice(incl.target);
  GLattice t = dual_lattice(incl.source);
  ResolutionResult out;
  out.ses = {{s, pdual, proj.matrix.transpose()}, {pdual, t, incl.matrix.transpose()}};
  out.exactness = verify_short_exact(out.ses);
  out.certificate = flasqueness(t, FlasqueKind::flasque, opts);
  return out;
}

AbelianGroupStructure tate_h0(const GLattice& l) {
  const FiniteGroup& g = l.group();
  IntMatrix fixed = invariants_sublattice(l);
  IntMatrix norm(l.rank(), l.rank());
  for (std::size_t a = 0; a < g.order(); ++a) norm = norm + l.action(a);
  auto coords = intlin::solve(fixed, norm);
  if (!coords) throw Error("norms are not invariant");
  return intlin::cokernel_structure(*coords);
}

}  // namespace torinv
