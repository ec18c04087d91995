#include "torinv/intlin.hpp"

#include <algorithm>
#include <istream>
#include <queue>
#include <sstream>
#include <tuple>

#include "torinv/errors.hpp"

namespace torinv::intlin {

// ---------------------------------------------------------------- IntMatrix

IntMatrix::IntMatrix(std::initializer_list<std::initializer_list<long long>> rows) {
  rows_ = rows.size();
  cols_ = rows_ ? rows.begin()->size() : 0;
  data_.reserve(rows_ * cols_);
  for (const auto& r : rows) {
    if (r.size() != cols_) throw std::invalid_argument("ragged matrix literal");
    for (long long v : r) data_.emplace_back(v);
  }
}

IntMatrix IntMatrix::identity(std::size_t n) {
  IntMatrix m(n, n);
  for (std::size_t i = 0; i < n; ++i) m(i, i) = 1;
  return m;
}

bool IntMatrix::is_zero() const {
  return std::all_of(data_.begin(), data_.end(), [](const Integer& v) { return v.is_zero(); });
}

bool IntMatrix::is_identity() const {
  if (rows_ != cols_) return false;
  for (std::size_t i = 0; i < rows_; ++i)
    for (std::size_t j = 0; j < cols_; ++j)
      if ((*this)(i, j) != Integer(i == j ? 1 : 0)) return false;
  return true;
}

IntMatrix IntMatrix::transpose() const {
  IntMatrix t(cols_, rows_);
  for (std::size_t i = 0; i < rows_; ++i)
    for (std::size_t j = 0; j < cols_; ++j) t(j, i) = (*this)(i, j);
  return t;
}

IntMatrix IntMatrix::column(std::size_t j) const { return columns(j, 1); }

IntMatrix IntMatrix::columns(std::size_t first, std::size_t count) const {
  IntMatrix out(rows_, count);
  for (std::size_t i = 0; i < rows_; ++i)
    for (std::size_t j = 0; j < count; ++j) out(i, j) = (*this)(i, first + j);
  return out;
}

IntMatrix IntMatrix::row_block(std::size_t first, std::size_t count) const {
  IntMatrix out(count, cols_);
  for (std::size_t i = 0; i < count; ++i)
    for (std::size_t j = 0; j < cols_; ++j) out(i, j) = (*this)(first + i, j);
  return out;
}

IntMatrix IntMatrix::hstack(const IntMatrix& other) const {
  if (other.rows_ != rows_) throw std::invalid_argument("hstack: row mismatch");
  IntMatrix out(rows_, cols_ + other.cols_);
  for (std::size_t i = 0; i < rows_; ++i) {
    for (std::size_t j = 0; j < cols_; ++j) out(i, j) = (*this)(i, j);
    for (std::size_t j = 0; j < other.cols_; ++j) out(i, cols_ + j) = other(i, j);
  }
  return out;
}

IntMatrix IntMatrix::vstack(const IntMatrix& other) const {
  if (other.cols_ != cols_) throw std::invalid_argument("vstack: column mismatch");
  IntMatrix out(rows_ + other.rows_, cols_);
  for (std::size_t i = 0; i < rows_; ++i)
    for (std::size_t j = 0; j < cols_; ++j) out(i, j) = (*this)(i, j);
  for (std::size_t i = 0; i < other.rows_; ++i)
    for (std::size_t j = 0; j < cols_; ++j) out(rows_ + i, j) = other(i, j);
  return out;
}

void IntMatrix::swap_rows(std::size_t a, std::size_t b) {
  if (a == b) return;
  for (std::size_t j = 0; j < cols_; ++j) std::swap((*this)(a, j), (*this)(b, j));
}

void IntMatrix::swap_cols(std::size_t a, std::size_t b) {
  if (a == b) return;
  for (std::size_t i = 0; i < rows_; ++i) std::swap((*this)(i, a), (*this)(i, b));
}

void IntMatrix::row_submul(std::size_t a, const Integer& f, std::size_t b) {
  if (f.is_zero()) return;
  for (std::size_t j = 0; j < cols_; ++j) {
    const Integer& v = (*this)(b, j);
    if (!v.is_zero()) (*this)(a, j).submul(f, v);
  }
}

void IntMatrix::col_submul(std::size_t a, const Integer& f, std::size_t b) {
  if (f.is_zero()) return;
  for (std::size_t i = 0; i < rows_; ++i) {
    const Integer& v = (*this)(i, b);
    if (!v.is_zero()) (*this)(i, a).submul(f, v);
  }
}

void IntMatrix::negate_row(std::size_t a) {
  for (std::size_t j = 0; j < cols_; ++j) (*this)(a, j) = -(*this)(a, j);
}

void IntMatrix::negate_col(std::size_t a) {
  for (std::size_t i = 0; i < rows_; ++i) (*this)(i, a) = -(*this)(i, a);
}

IntMatrix IntMatrix::operator*(const IntMatrix& o) const {
  if (cols_ != o.rows_) throw std::invalid_argument("matrix product: dimension mismatch");
  IntMatrix out(rows_, o.cols_);
  // Skip zero entries on both sides: action matrices are mostly permutation-like.
  std::vector<std::vector<std::size_t>> nz(o.rows_);
  for (std::size_t k = 0; k < o.rows_; ++k)
    for (std::size_t j = 0; j < o.cols_; ++j)
      if (!o(k, j).is_zero()) nz[k].push_back(j);
  for (std::size_t i = 0; i < rows_; ++i)
    for (std::size_t k = 0; k < cols_; ++k) {
      const Integer& a = (*this)(i, k);
      if (a.is_zero()) continue;
      for (std::size_t j : nz[k]) out(i, j) += a * o(k, j);
    }
  return out;
}

IntMatrix IntMatrix::operator+(const IntMatrix& o) const {
  if (rows_ != o.rows_ || cols_ != o.cols_) throw std::invalid_argument("matrix sum: dimension mismatch");
  IntMatrix out = *this;
  for (std::size_t k = 0; k < data_.size(); ++k) out.data_[k] += o.data_[k];
  return out;
}

IntMatrix IntMatrix::operator-(const IntMatrix& o) const {
  if (rows_ != o.rows_ || cols_ != o.cols_) throw std::invalid_argument("matrix difference: dimension mismatch");
  IntMatrix out = *this;
  for (std::size_t k = 0; k < data_.size(); ++k) out.data_[k] -= o.data_[k];
  return out;
}

IntMatrix IntMatrix::scaled(const Integer& f) const {
  IntMatrix out = *this;
  for (auto& v : out.data_) v *= f;
  return out;
}

std::string IntMatrix::to_string() const {
  std::ostringstream os;
  os << "[";
  for (std::size_t i = 0; i < rows_; ++i) {
    os << (i ? ", [" : "[");
    for (std::size_t j = 0; j < cols_; ++j) os << (j ? ", " : "") << (*this)(i, j);
    os << "]";
  }
  os << "]";
  return os.str();
}

bool operator==(const IntMatrix& a, const SparseMatrix& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) return false;
  for (std::size_t i = 0; i < a.rows(); ++i) {
    const SparseRow& r = b.row(i);
    std::size_t k = 0;
    for (std::size_t j = 0; j < a.cols(); ++j) {
      if (k < r.size() && r[k].first == j) {
        if (a(i, j) != r[k].second) return false;
        ++k;
      } else if (!a(i, j).is_zero()) {
        return false;
      }
    }
  }
  return true;
}

// ------------------------------------------------------------- SparseMatrix

SparseMatrix::SparseMatrix(const IntMatrix& dense) : cols_(dense.cols()), rows_(dense.rows()) {
  for (std::size_t i = 0; i < dense.rows(); ++i)
    for (std::size_t j = 0; j < dense.cols(); ++j)
      if (!dense(i, j).is_zero()) rows_[i].emplace_back(j, dense(i, j));
}

SparseMatrix SparseMatrix::from_triples(std::size_t rows, std::size_t cols,
                                        std::vector<std::tuple<std::size_t, std::size_t, Integer>> triples) {
  SparseMatrix m(rows, cols);
  std::vector<SparseRow> buckets(rows);
  for (auto& [r, c, v] : triples) {
    if (r >= rows || c >= cols) throw InvalidSpec("sparse entry outside matrix bounds");
    buckets[r].emplace_back(c, std::move(v));
  }
  for (std::size_t i = 0; i < rows; ++i) m.set_row(i, std::move(buckets[i]));
  return m;
}

std::size_t SparseMatrix::nonzeros() const {
  std::size_t n = 0;
  for (const auto& r : rows_) n += r.size();
  return n;
}

void SparseMatrix::set_row(std::size_t i, SparseRow entries) {
  std::stable_sort(entries.begin(), entries.end(), [](const auto& a, const auto& b) { return a.first < b.first; });
  SparseRow merged;
  merged.reserve(entries.size());
  for (auto& e : entries) {
    if (e.first >= cols_) throw InvalidSpec("sparse entry outside matrix bounds");
    if (!merged.empty() && merged.back().first == e.first)
      merged.back().second += e.second;
    else
      merged.push_back(std::move(e));
  }
  std::erase_if(merged, [](const SparseEntry& e) { return e.second.is_zero(); });
  rows_[i] = std::move(merged);
}

Integer SparseMatrix::at(std::size_t i, std::size_t j) const {
  const SparseRow& r = rows_[i];
  auto it = std::lower_bound(r.begin(), r.end(), j, [](const SparseEntry& e, std::size_t c) { return e.first < c; });
  if (it != r.end() && it->first == j) return it->second;
  return Integer(0);
}

IntMatrix SparseMatrix::to_dense() const {
  IntMatrix d(rows(), cols_);
  for (std::size_t i = 0; i < rows(); ++i)
    for (const auto& [j, v] : rows_[i]) d(i, j) = v;
  return d;
}

SparseMatrix SparseMatrix::transpose() const {
  SparseMatrix t(cols_, rows());
  for (std::size_t i = 0; i < rows(); ++i)
    for (const auto& [j, v] : rows_[i]) t.rows_[j].emplace_back(i, v);
  return t;
}

SparseMatrix SparseMatrix::operator*(const SparseMatrix& other) const {
  if (cols_ != other.rows()) throw std::invalid_argument("sparse product: dimension mismatch");
  SparseMatrix out(rows(), other.cols());
  for (std::size_t i = 0; i < rows(); ++i) {
    SparseRow acc;
    for (const auto& [k, a] : rows_[i])
      for (const auto& [j, b] : other.rows_[k]) acc.emplace_back(j, a * b);
    out.set_row(i, std::move(acc));
  }
  return out;
}

bool SparseMatrix::is_zero() const {
  return std::all_of(rows_.begin(), rows_.end(), [](const SparseRow& r) { return r.empty(); });
}

// ---------------------------------------------------- AbelianGroupStructure

namespace {

/// Turns arbitrary nonzero diagonal entries into the invariant factors of diag(d).
std::vector<Integer> normalize_diagonal(std::vector<Integer> d) {
  for (auto& v : d) v = abs(v);
  std::erase_if(d, [](const Integer& v) { return v.is_one(); });
  for (std::size_t i = 0; i < d.size(); ++i)
    for (std::size_t j = i + 1; j < d.size(); ++j) {
      if (divides(d[i], d[j])) continue;
      Integer g = gcd(d[i], d[j]);
      Integer l = div_exact(d[i], g) * d[j];
      d[i] = std::move(g);
      d[j] = std::move(l);
    }
  std::erase_if(d, [](const Integer& v) { return v.is_one(); });
  return d;
}

}  // namespace

AbelianGroupStructure::AbelianGroupStructure(std::size_t free_rank, std::vector<Integer> torsion) : free_rank_(free_rank) {
  for (const auto& t : torsion)
    if (t.is_zero()) ++free_rank_;
  std::erase_if(torsion, [](const Integer& t) { return t.is_zero(); });
  torsion_ = normalize_diagonal(std::move(torsion));
  std::sort(torsion_.begin(), torsion_.end());
}

AbelianGroupStructure AbelianGroupStructure::cyclic(long long n) {
  return AbelianGroupStructure(0, {Integer(n)});
}

Integer AbelianGroupStructure::torsion_order() const {
  Integer o(1);
  for (const auto& t : torsion_) o *= t;
  return o;
}

AbelianGroupStructure AbelianGroupStructure::direct_sum(const AbelianGroupStructure& other) const {
  std::vector<Integer> t = torsion_;
  t.insert(t.end(), other.torsion_.begin(), other.torsion_.end());
  return AbelianGroupStructure(free_rank_ + other.free_rank_, std::move(t));
}

AbelianGroupStructure AbelianGroupStructure::power(std::size_t copies) const {
  AbelianGroupStructure out;
  for (std::size_t k = 0; k < copies; ++k) out = out.direct_sum(*this);
  return out;
}

AbelianGroupStructure AbelianGroupStructure::odd_part() const {
  std::vector<Integer> t;
  for (Integer v : torsion_) {
    while (divides(Integer(2), v)) v = div_exact(v, Integer(2));
    t.push_back(std::move(v));
  }
  return AbelianGroupStructure(free_rank_, std::move(t));
}

std::string AbelianGroupStructure::to_string() const {
  if (is_zero()) return "0";
  std::ostringstream os;
  bool first = true;
  if (free_rank_ > 0) {
    os << "Z";
    if (free_rank_ > 1) os << "^" << free_rank_;
    first = false;
  }
  for (const auto& t : torsion_) {
    os << (first ? "" : " + ") << "Z/" << t;
    first = false;
  }
  return os.str();
}

std::vector<Integer> SmithDecomposition::diagonal() const {
  std::vector<Integer> d;
  for (std::size_t i = 0; i < std::min(S.rows(), S.cols()); ++i) d.push_back(S(i, i));
  return d;
}

std::size_t SmithDecomposition::rank() const {
  std::size_t r = 0;
  for (std::size_t i = 0; i < std::min(S.rows(), S.cols()); ++i)
    if (!S(i, i).is_zero()) ++r;
  return r;
}

std::vector<Integer> SmithInvariants::nonunit_factors() const {
  std::vector<Integer> out;
  for (const auto& f : factors)
    if (!f.is_one()) out.push_back(f);
  return out;
}

// ------------------------------------------------------------- Smith (dense)

SmithDecomposition smith_decompose(const IntMatrix& A) {
  const std::size_t m = A.rows(), n = A.cols();
  IntMatrix S = A;
  IntMatrix U = IntMatrix::identity(m);
  IntMatrix V = IntMatrix::identity(n);

  auto smaller = [](const Integer& a, const Integer& b) { return abs_compare(a, b) == std::strong_ordering::less; };

  for (std::size_t t = 0; t < std::min(m, n); ++t) {
    // Minimal nonzero |entry| in the trailing block; ties go to the lowest (row, col).
    std::size_t pr = m, pc = n;
    for (std::size_t i = t; i < m; ++i)
      for (std::size_t j = t; j < n; ++j)
        if (!S(i, j).is_zero() && (pr == m || smaller(S(i, j), S(pr, pc)))) {
          pr = i;
          pc = j;
        }
    if (pr == m) break;
    S.swap_rows(t, pr);
    U.swap_rows(t, pr);
    S.swap_cols(t, pc);
    V.swap_cols(t, pc);

    for (;;) {
      bool remainder = false;
      for (std::size_t i = t + 1; i < m; ++i) {
        if (S(i, t).is_zero()) continue;
        Integer q = div_round(S(i, t), S(t, t));
        S.row_submul(i, q, t);
        U.row_submul(i, q, t);
        if (!S(i, t).is_zero()) remainder = true;
      }
      if (remainder) {
        std::size_t best = t;
        for (std::size_t i = t + 1; i < m; ++i)
          if (!S(i, t).is_zero() && smaller(S(i, t), S(best, t))) best = i;
        S.swap_rows(t, best);
        U.swap_rows(t, best);
        continue;
      }
      for (std::size_t j = t + 1; j < n; ++j) {
        if (S(t, j).is_zero()) continue;
        Integer q = div_round(S(t, j), S(t, t));
        S.col_submul(j, q, t);
        V.col_submul(j, q, t);
        if (!S(t, j).is_zero()) remainder = true;
      }
      if (remainder) {
        std::size_t best = t;
        for (std::size_t j = t + 1; j < n; ++j)
          if (!S(t, j).is_zero() && smaller(S(t, j), S(t, best))) best = j;
        S.swap_cols(t, best);
        V.swap_cols(t, best);
        continue;
      }
      // Row and column are clear; enforce divisibility of the trailing block.
      bool fixed = false;
      for (std::size_t i = t + 1; i < m && !fixed; ++i)
        for (std::size_t j = t + 1; j < n && !fixed; ++j)
          if (!divides(S(t, t), S(i, j))) {
            S.row_submul(t, Integer(-1), i);
            U.row_submul(t, Integer(-1), i);
            fixed = true;
          }
      if (!fixed) break;
    }
    if (S(t, t).sign() < 0) {
      S.negate_row(t);
      U.negate_row(t);
    }
  }
  return {std::move(S), std::move(U), std::move(V)};
}

// ------------------------------------------------------------ Smith (sparse)

namespace {

class SparseEliminator {
 public:
  SparseEliminator(const SparseMatrix& A, std::stop_token stop)
      : rows_(A.rows()), row_active_(A.rows(), 1), col_rows_(A.cols()), col_count_(A.cols(), 0), stop_(stop) {
    for (std::size_t i = 0; i < A.rows(); ++i) {
      rows_[i] = A.row(i);
      for (const auto& e : rows_[i]) {
        col_rows_[e.first].push_back(i);
        ++col_count_[e.first];
      }
    }
  }

  SmithInvariants run() {
    unit_phase();
    general_phase();
    SmithInvariants out;
    out.rank = units_ + pivots_.size();
    std::vector<Integer> nonunit = normalize_diagonal(std::move(pivots_));
    out.factors.assign(out.rank - nonunit.size(), Integer(1));
    out.factors.insert(out.factors.end(), nonunit.begin(), nonunit.end());
    return out;
  }

 private:
  static const Integer* find(const SparseRow& r, std::size_t c) {
    auto it = std::lower_bound(r.begin(), r.end(), c, [](const SparseEntry& e, std::size_t col) { return e.first < col; });
    return (it != r.end() && it->first == c) ? &it->second : nullptr;
  }

  void check_stop() const {
    if (stop_.stop_requested()) throw Cancelled();
  }

  /// rows_[i] -= f * rows_[p], maintaining column occupancy.
  void axpy(std::size_t i, const Integer& f, std::size_t p) {
    const SparseRow& a = rows_[i];
    const SparseRow& b = rows_[p];
    SparseRow out;
    out.reserve(a.size() + b.size());
    std::size_t x = 0, y = 0;
    while (x < a.size() || y < b.size()) {
      if (y == b.size() || (x < a.size() && a[x].first < b[y].first)) {
        out.push_back(a[x++]);
      } else if (x == a.size() || b[y].first < a[x].first) {
        Integer v(0);
        v.submul(f, b[y].second);
        ++col_count_[b[y].first];
        col_rows_[b[y].first].push_back(i);
        out.emplace_back(b[y].first, std::move(v));
        ++y;
      } else {
        Integer v = a[x].second;
        v.submul(f, b[y].second);
        if (v.is_zero())
          --col_count_[a[x].first];
        else
          out.emplace_back(a[x].first, std::move(v));
        ++x;
        ++y;
      }
    }
    rows_[i] = std::move(out);
  }

  /// Active rows that currently hold an entry in column c, excluding `skip`.
  std::vector<std::size_t> rows_in_column(std::size_t c, std::size_t skip) {
    std::vector<std::size_t>& list = col_rows_[c];
    std::sort(list.begin(), list.end());
    list.erase(std::unique(list.begin(), list.end()), list.end());
    std::vector<std::size_t> live;
    std::vector<std::size_t> keep;
    for (std::size_t i : list) {
      if (!row_active_[i] || !find(rows_[i], c)) continue;
      keep.push_back(i);
      if (i != skip) live.push_back(i);
    }
    list = std::move(keep);
    return live;
  }

  void retire(std::size_t p, std::size_t c) {
    for (const auto& e : rows_[p]) --col_count_[e.first];
    rows_[p].clear();
    row_active_[p] = 0;
    col_rows_[c].clear();
  }

  void unit_phase() {
    using Key = std::pair<std::size_t, std::size_t>;  // (row length, row)
    std::priority_queue<Key, std::vector<Key>, std::greater<>> heap;
    for (std::size_t i = 0; i < rows_.size(); ++i)
      if (!rows_[i].empty()) heap.emplace(rows_[i].size(), i);

    while (!heap.empty()) {
      check_stop();
      auto [len, p] = heap.top();
      heap.pop();
      if (!row_active_[p] || rows_[p].size() != len || len == 0) continue;
      // Markowitz tie-break: among unit entries of the shortest row, the sparsest column.
      const SparseEntry* pivot = nullptr;
      for (const auto& e : rows_[p])
        if (e.second.is_unit() && (!pivot || col_count_[e.first] < col_count_[pivot->first])) pivot = &e;
      if (!pivot) continue;
      const std::size_t c = pivot->first;
      const Integer u = pivot->second;
      for (std::size_t i : rows_in_column(c, p)) {
        Integer f = *find(rows_[i], c) * u;
        axpy(i, f, p);
        if (!rows_[i].empty()) heap.emplace(rows_[i].size(), i);
      }
      retire(p, c);
      ++units_;
    }
  }

  void general_phase() {
    for (;;) {
      check_stop();
      // Global minimal |entry|, then Markowitz cost, then lowest (row, col).
      std::size_t p = rows_.size(), c = 0;
      std::size_t best_cost = 0;
      for (std::size_t i = 0; i < rows_.size(); ++i) {
        if (!row_active_[i]) continue;
        for (const auto& e : rows_[i]) {
          std::size_t cost = (rows_[i].size() - 1) * (col_count_[e.first] - 1);
          if (p == rows_.size()) {
            p = i, c = e.first, best_cost = cost;
            continue;
          }
          auto cmp = abs_compare(e.second, *find(rows_[p], c));
          if (cmp == std::strong_ordering::less || (cmp == std::strong_ordering::equal && cost < best_cost)) {
            p = i, c = e.first, best_cost = cost;
          }
        }
      }
      if (p == rows_.size()) return;
      eliminate_at(p, c);
    }
  }

  void eliminate_at(std::size_t p, std::size_t c) {
    for (;;) {
      check_stop();
      Integer pivot = *find(rows_[p], c);
      bool remainder = false;
      for (std::size_t i : rows_in_column(c, p)) {
        Integer q = div_round(*find(rows_[i], c), pivot);
        axpy(i, q, p);
        if (find(rows_[i], c)) remainder = true;
      }
      if (remainder) {
        std::size_t best = p;
        for (std::size_t i : rows_in_column(c, rows_.size()))
          if (abs_compare(*find(rows_[i], c), *find(rows_[best], c)) == std::strong_ordering::less) best = i;
        p = best;
        continue;
      }
      // Column c holds only the pivot, so column operations below touch row p alone.
      SparseRow& row = rows_[p];
      bool moved = false;
      for (auto& e : row) {
        if (e.first == c || divides(pivot, e.second)) continue;
        Integer q = div_round(e.second, pivot);
        e.second.submul(q, pivot);
        moved = true;
      }
      if (!moved) {
        pivots_.push_back(abs(pivot));
        retire(p, c);
        return;
      }
      // Continue from the smallest remainder in row p.
      const SparseEntry* best = nullptr;
      for (const auto& e : row)
        if (e.first != c && !divides(pivot, e.second) &&
            (!best || abs_compare(e.second, best->second) == std::strong_ordering::less))
          best = &e;
      c = best->first;
    }
  }

  std::vector<SparseRow> rows_;
  std::vector<char> row_active_;
  std::vector<std::vector<std::size_t>> col_rows_;
  std::vector<std::size_t> col_count_;
  std::size_t units_ = 0;
  std::vector<Integer> pivots_;
  std::stop_token stop_;
};

}  // namespace

SmithInvariants smith_invariants(const SparseMatrix& A, std::stop_token stop) {
  return SparseEliminator(A, stop).run();
}

SmithInvariants smith_invariants(const IntMatrix& A) { return smith_invariants(SparseMatrix(A)); }

std::size_t rank(const IntMatrix& A) { return smith_invariants(A).rank; }

AbelianGroupStructure cokernel_structure(const SparseMatrix& A) {
  SmithInvariants inv = smith_invariants(A);
  return AbelianGroupStructure(A.rows() - inv.rank, inv.nonunit_factors());
}

AbelianGroupStructure cokernel_structure(const IntMatrix& A) { return cokernel_structure(SparseMatrix(A)); }

AbelianGroupStructure homology_structure(const SparseMatrix& A, const SparseMatrix& B, std::stop_token stop) {
  if (A.cols() != B.rows()) throw std::invalid_argument("homology_structure: maps are not composable");
  const std::size_t n = A.cols();
  const std::size_t rank_a = A.rows() == 0 ? 0 : smith_invariants(A, stop).rank;
  SmithInvariants inv_b = B.cols() == 0 ? SmithInvariants{} : smith_invariants(B, stop);
  // ker A is saturated and contains im B, so its torsion is that of Z^n / im B.
  return AbelianGroupStructure(n - rank_a - inv_b.rank, inv_b.nonunit_factors());
}

bool is_saturated(const IntMatrix& A) { return smith_invariants(A).nonunit_factors().empty(); }

// ------------------------------------------------------------ kernel / HNF

HermiteDecomposition hermite_decompose(const IntMatrix& A) {
  const std::size_t m = A.rows(), n = A.cols();
  IntMatrix H = A;
  IntMatrix U = IntMatrix::identity(m);
  std::size_t k = 0;
  for (std::size_t c = 0; c < n && k < m; ++c) {
    for (;;) {
      std::size_t best = m;
      for (std::size_t i = k; i < m; ++i)
        if (!H(i, c).is_zero() && (best == m || abs_compare(H(i, c), H(best, c)) == std::strong_ordering::less))
          best = i;
      if (best == m) break;
      H.swap_rows(k, best);
      U.swap_rows(k, best);
      bool remainder = false;
      for (std::size_t i = k + 1; i < m; ++i) {
        if (H(i, c).is_zero()) continue;
        Integer q = div_round(H(i, c), H(k, c));
        H.row_submul(i, q, k);
        U.row_submul(i, q, k);
        if (!H(i, c).is_zero()) remainder = true;
      }
      if (!remainder) break;
    }
    if (H(k, c).is_zero()) continue;
    if (H(k, c).sign() < 0) {
      H.negate_row(k);
      U.negate_row(k);
    }
    for (std::size_t i = 0; i < k; ++i) {
      Integer q = div_floor(H(i, c), H(k, c));
      H.row_submul(i, q, k);
      U.row_submul(i, q, k);
    }
    ++k;
  }
  return {std::move(H), std::move(U)};
}

IntMatrix kernel_basis(const IntMatrix& A) {
  const std::size_t m = A.rows(), n = A.cols();
  // Column operations on A are row operations on A^T; V^T is tracked alongside.
  IntMatrix T = A.transpose();
  IntMatrix W = IntMatrix::identity(n);
  std::size_t k = 0;
  for (std::size_t r = 0; r < m && k < n; ++r) {
    for (;;) {
      std::size_t best = n;
      for (std::size_t i = k; i < n; ++i)
        if (!T(i, r).is_zero() && (best == n || abs_compare(T(i, r), T(best, r)) == std::strong_ordering::less))
          best = i;
      if (best == n) break;
      T.swap_rows(k, best);
      W.swap_rows(k, best);
      bool remainder = false;
      for (std::size_t i = k + 1; i < n; ++i) {
        if (T(i, r).is_zero()) continue;
        Integer q = div_round(T(i, r), T(k, r));
        T.row_submul(i, q, k);
        W.row_submul(i, q, k);
        if (!T(i, r).is_zero()) remainder = true;
      }
      if (!remainder) {
        ++k;
        break;
      }
    }
  }
  if (k == n) return IntMatrix(n, 0);
  IntMatrix basis_rows = W.row_block(k, n - k);
  return hermite_decompose(basis_rows).H.transpose();
}

Integer determinant(const IntMatrix& A) {
  if (A.rows() != A.cols()) throw std::invalid_argument("determinant of a non-square matrix");
  const std::size_t n = A.rows();
  if (n == 0) return Integer(1);
  IntMatrix M = A;
  Integer prev(1);
  int sign = 1;
  for (std::size_t k = 0; k + 1 < n; ++k) {
    if (M(k, k).is_zero()) {
      std::size_t s = k + 1;
      while (s < n && M(s, k).is_zero()) ++s;
      if (s == n) return Integer(0);
      M.swap_rows(k, s);
      sign = -sign;
    }
    for (std::size_t i = k + 1; i < n; ++i)
      for (std::size_t j = k + 1; j < n; ++j) {
        Integer v = M(i, j) * M(k, k);
        v.submul(M(i, k), M(k, j));
        M(i, j) = div_exact(v, prev);
      }
    prev = M(k, k);
  }
  Integer d = M(n - 1, n - 1);
  return sign < 0 ? -d : d;
}

bool is_unimodular(const IntMatrix& A) { return A.rows() == A.cols() && determinant(A).is_unit(); }

IntMatrix inverse_unimodular(const IntMatrix& A) {
  if (A.rows() != A.cols()) throw std::invalid_argument("inverse of a non-square matrix");
  HermiteDecomposition h = hermite_decompose(A);
  if (!h.H.is_identity()) throw std::invalid_argument("matrix is not unimodular");
  return h.U;
}

std::optional<IntMatrix> solve(const IntMatrix& A, const IntMatrix& B) {
  if (A.rows() != B.rows()) throw std::invalid_argument("solve: row mismatch");
  SmithDecomposition sd = smith_decompose(A);
  IntMatrix C = sd.U * B;
  const std::size_t r = sd.rank();
  IntMatrix Y(A.cols(), B.cols());
  for (std::size_t i = 0; i < C.rows(); ++i)
    for (std::size_t j = 0; j < C.cols(); ++j) {
      if (i < r) {
        if (!divides(sd.S(i, i), C(i, j))) return std::nullopt;
        Y(i, j) = div_exact(C(i, j), sd.S(i, i));
      } else if (!C(i, j).is_zero()) {
        return std::nullopt;
      }
    }
  return sd.V * Y;
}

// ------------------------------------------------------------- text format

IntMatrix read_matrix(std::istream& in) {
  long long rows = -1, cols = -1;
  std::string kind;
  if (!(in >> rows >> cols >> kind) || rows < 0 || cols < 0)
    throw InvalidSpec("matrix: expected 'rows cols' followed by 'dense' or 'sparse'");
  IntMatrix m(static_cast<std::size_t>(rows), static_cast<std::size_t>(cols));
  std::string tok;
  if (kind == "dense") {
    for (long long i = 0; i < rows; ++i)
      for (long long j = 0; j < cols; ++j) {
        if (!(in >> tok)) throw InvalidSpec("matrix: too few dense entries");
        try {
          m(i, j) = Integer::parse(tok);
        } catch (const std::invalid_argument& e) {
          throw InvalidSpec(std::string("matrix: ") + e.what());
        }
      }
  } else if (kind == "sparse") {
    // Triples run until the next three tokens are not all integers (another
    // matrix header, a keyword, or the end of the input).
    std::vector<std::tuple<std::size_t, std::size_t, Integer>> triples;
    while (true) {
      auto pos = in.tellg();
      std::string a, b, c;
      if (!(in >> a)) break;
      in >> b >> c;
      std::optional<Integer> r, col, v;
      try {
        r = Integer::parse(a);
        col = Integer::parse(b);
        v = Integer::parse(c);
      } catch (const std::invalid_argument&) {
      }
      if (!v) {
        in.clear();
        in.seekg(pos);
        break;
      }
      if (r->sign() < 0 || col->sign() < 0 || *r >= Integer(rows) || *col >= Integer(cols))
        throw InvalidSpec("matrix: sparse entry outside bounds");
      if (v->is_zero()) throw InvalidSpec("matrix: sparse form stores no explicit zeros");
      triples.emplace_back(r->small_value(), col->small_value(), std::move(*v));
    }
    m = SparseMatrix::from_triples(rows, cols, std::move(triples)).to_dense();
  } else {
    throw InvalidSpec("matrix: unknown storage kind '" + kind + "'");
  }
  return m;
}

IntMatrix parse_matrix(const std::string& text) {
  std::istringstream in(text);
  return read_matrix(in);
}

std::string format_dense(const IntMatrix& A) {
  std::ostringstream os;
  os << A.rows() << " " << A.cols() << "\ndense\n";
  for (std::size_t i = 0; i < A.rows(); ++i) {
    for (std::size_t j = 0; j < A.cols(); ++j) os << (j ? " " : "") << A(i, j);
    os << "\n";
  }
  return os.str();
}

std::string format_sparse(const IntMatrix& A) {
  SparseMatrix s(A);
  std::ostringstream os;
  os << A.rows() << " " << A.cols() << "\nsparse\n";
  for (std::size_t i = 0; i < s.rows(); ++i)
    for (const auto& [j, v] : s.row(i)) os << i << " " << j << " " << v << "\n";
  return os.str();
}

}  // namespace torinv::intlin
