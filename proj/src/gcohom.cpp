#include "torinv/gcohom.hpp"

#include <cmath>
#include <map>
#include <memory>
#include <mutex>
#include <tuple>

#include "torinv/errors.hpp"

namespace torinv {

using intlin::SparseMatrix;

namespace {

using Triple = std::tuple<std::size_t, std::size_t, Integer>;

std::size_t ipow(std::size_t base, std::size_t e) {
  std::size_t out = 1;
  while (e--) out *= base;
  return out;
}

// Tuples of length len over an alphabet of size k, decoded most significant first.
void decode(std::size_t code, std::size_t k, std::vector<std::size_t>& out) {
  for (std::size_t p = out.size(); p-- > 0;) {
    out[p] = code % k;
    code /= k;
  }
}

std::size_t encode(const std::vector<std::size_t>& t, std::size_t first, std::size_t last, std::size_t k) {
  std::size_t code = 0;
  for (std::size_t p = first; p < last; ++p) code = code * k + t[p];
  return code;
}

void add_block(std::vector<Triple>& out, std::size_t row0, std::size_t col0, const IntMatrix& block, int sign) {
  for (std::size_t a = 0; a < block.rows(); ++a)
    for (std::size_t b = 0; b < block.cols(); ++b)
      if (!block(a, b).is_zero()) out.emplace_back(row0 + a, col0 + b, sign < 0 ? -block(a, b) : block(a, b));
}

void add_identity(std::vector<Triple>& out, std::size_t row0, std::size_t col0, std::size_t r, int sign) {
  for (std::size_t a = 0; a < r; ++a) out.emplace_back(row0 + a, col0 + a, Integer(sign));
}

// Shared by the normalized and the unnormalized complex. With `normalized`
// the alphabet is G \ {1} (letter x stands for element x + 1) and faces that
// produce the identity are dropped.
SparseMatrix bar_differential(const GLattice& m, std::size_t i, bool normalized) {
  const FiniteGroup& g = m.group();
  const std::size_t r = m.rank();
  const std::size_t shift = normalized ? 1 : 0;
  const std::size_t k = g.order() - shift;
  const std::size_t rows = ipow(k, i + 1) * r, cols = ipow(k, i) * r;
  std::vector<Triple> triples;
  std::vector<std::size_t> t(i + 1);
  std::vector<std::size_t> merged(i);
  for (std::size_t code = 0; code < ipow(k, i + 1); ++code) {
    decode(code, k, t);
    const std::size_t row0 = code * r;
    // g_1 . f(g_2, ..., g_{i+1})
    add_block(triples, row0, encode(t, 1, i + 1, k) * r, m.action(t[0] + shift), 1);
    // (-1)^j f(..., g_j g_{j+1}, ...)
    for (std::size_t j = 1; j <= i; ++j) {
      std::size_t prod = g.mul(t[j - 1] + shift, t[j] + shift);
      if (normalized && prod == 0) continue;
      for (std::size_t p = 0, q = 0; p <= i; ++p) {
        if (p == j) continue;
        merged[q++] = p == j - 1 ? prod - shift : t[p];
      }
      add_identity(triples, row0, encode(merged, 0, i, k) * r, r, j % 2 ? -1 : 1);
    }
    // (-1)^{i+1} f(g_1, ..., g_i)
    add_identity(triples, row0, encode(t, 0, i, k) * r, r, (i + 1) % 2 ? -1 : 1);
  }
  return SparseMatrix::from_triples(rows, cols, std::move(triples));
}

// Differentials keyed by lattice identity and degree. The weak pointer guards
// against a new lattice reusing the address of an expired one.
struct CacheEntry {
  std::weak_ptr<const void> owner;
  std::shared_ptr<const SparseMatrix> matrix;
};
std::mutex cache_mutex;
std::map<std::pair<const void*, std::size_t>, CacheEntry> cache;

std::shared_ptr<const SparseMatrix> cached_differential(const GLattice& m, std::size_t i) {
  auto id = m.identity();
  std::pair<const void*, std::size_t> key{id.get(), i};
  {
    std::lock_guard lock(cache_mutex);
    auto it = cache.find(key);
    if (it != cache.end()) {
      if (auto owner = it->second.owner.lock(); owner == id) return it->second.matrix;
      cache.erase(it);
    }
  }
  auto d = std::make_shared<const SparseMatrix>(normalized_differential(m, i));
  std::lock_guard lock(cache_mutex);
  // Sweep expired entries now and then so the map does not grow without bound.
  if (cache.size() > 256)
    std::erase_if(cache, [](const auto& kv) { return kv.second.owner.expired(); });
  cache[key] = CacheEntry{id, d};
  return d;
}

std::string describe(const GLattice& m) { return "lattice of rank " + std::to_string(m.rank()); }

CohomologyResult make_result(const GLattice& m, std::size_t i, AbelianGroupStructure value) {
  CohomologyResult out;
  out.group = m.group().name();
  out.coefficient = describe(m);
  out.degree = i;
  out.value = std::move(value);
  return out;
}

AbelianGroupStructure cyclic_cohomology(const GLattice& m, std::size_t gen, std::size_t i, std::stop_token stop) {
  const FiniteGroup& g = m.group();
  const std::size_t r = m.rank();
  IntMatrix T = m.action(gen) - IntMatrix::identity(r);
  if (i == 0) return AbelianGroupStructure::free(r - intlin::rank(T));
  IntMatrix N(r, r);
  for (std::size_t x = 0, a = 0; x < g.order(); ++x, a = g.mul(a, gen)) N = N + m.action(a);
  SparseMatrix t(T), n(N);
  return i % 2 ? intlin::homology_structure(n, t, stop) : intlin::homology_structure(t, n, stop);
}

}  // namespace

std::size_t default_degree_cap(const FiniteGroup& g) {
  if (g.cyclic_generator()) return kUncapped;
  return (!g.is_abelian() && g.order() >= 8) ? 3 : 5;
}

std::string CohomologyResult::value_string() const {
  if (divisible_rank == 0) return value.to_string();
  std::string out = divisible_rank == 1 ? "Q/Z" : "(Q/Z)^" + std::to_string(divisible_rank);
  if (!value.is_zero()) out += " + " + value.to_string();
  return out;
}

std::size_t normalized_cochain_rank(const GLattice& m, std::size_t i) {
  return ipow(m.group().order() - 1, i) * m.rank();
}

SparseMatrix normalized_differential(const GLattice& m, std::size_t i) { return bar_differential(m, i, true); }

CohomologyResult cohomology(const GLattice& m, std::size_t i, const CohomologyOptions& opts) {
  const FiniteGroup& g = m.group();
  if (auto gen = g.cyclic_generator()) return make_result(m, i, cyclic_cohomology(m, *gen, i, opts.stop));

  const std::size_t cap = opts.degree_cap.value_or(default_degree_cap(g));
  if (i > cap) {
    double estimate = std::pow(double(g.order() - 1), double(i + 1)) * double(m.rank());
    throw DegreeCapExceeded("degree " + std::to_string(i) + " exceeds the cap " + std::to_string(cap) + " for " +
                                g.name() + " (about " + std::to_string(static_cast<long long>(estimate)) +
                                " cochain coordinates)",
                            estimate);
  }
  auto di = cached_differential(m, i);
  std::shared_ptr<const SparseMatrix> prev;
  if (i == 0)
    prev = std::make_shared<const SparseMatrix>(m.rank(), 0);
  else
    prev = cached_differential(m, i - 1);
  return make_result(m, i, intlin::homology_structure(*di, *prev, opts.stop));
}

CohomologyResult cohomology_qz(const GLattice& m, std::size_t i, const CohomologyOptions& opts) {
  CohomologyResult out;
  if (i == 0) {
    out = cohomology(m, 1, opts);
    out.divisible_rank = invariants_sublattice(m).cols();
  } else {
    out = cohomology(m, i + 1, opts);
  }
  out.degree = i;
  out.coefficient = describe(m) + " (x) Q/Z";
  return out;
}

CohomologyResult brute_force_cohomology(const GLattice& m, std::size_t i) {
  const std::size_t n = m.group().order(), r = m.rank();
  if (i > 2) throw SizeExceeded("brute-force cohomology is limited to degree 2");
  if (ipow(n, i + 1) * r > kBruteForceSizeCap)
    throw SizeExceeded("brute-force cohomology needs |G|^(i+1) * rank <= 100000");

  IntMatrix d = bar_differential(m, i, false).to_dense();
  IntMatrix Z = intlin::kernel_basis(d);
  const std::size_t k = Z.cols();
  if (k == 0) return make_result(m, i, AbelianGroupStructure::zero());
  if (i == 0) return make_result(m, i, AbelianGroupStructure::free(k));

  // Z is saturated, so U Z V = [I; 0] and L = V * U[0..k) is a left inverse.
  auto snf = intlin::smith_decompose(Z);
  IntMatrix L = snf.V * snf.U.row_block(0, k);
  IntMatrix boundaries = L * bar_differential(m, i - 1, false).to_dense();
  return make_result(m, i, intlin::cokernel_structure(boundaries));
}

ShapiroVerdict shapiro_compare(const GroupPtr& g, const ElementSet& h, std::size_t i, const CohomologyOptions& opts) {
  ShapiroVerdict v;
  v.induced = cohomology(permutation_lattice(g, h), i, opts);
  v.induced.coefficient = "Z[" + g->name() + "/" + g->subgroup_name(h) + "]";
  auto sub = std::make_shared<const FiniteGroup>(g->subgroup_group(h, g->subgroup_name(h)));
  v.restricted = cohomology(trivial_lattice(sub, 1), i, opts);
  v.restricted.coefficient = "Z";
  v.equal = v.induced.value == v.restricted.value;
  return v;
}

void clear_cohomology_cache() {
  std::lock_guard lock(cache_mutex);
  cache.clear();
}

}  // namespace torinv
