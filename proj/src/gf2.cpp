#include "floer/gf2.hpp"

#include <stdexcept>

namespace floer {
namespace gf2 {

std::vector<std::size_t> BitVector::support() const {
  std::vector<std::size_t> out;
  for (std::size_t w = 0; w < words_.size(); ++w) {
    std::uint64_t x = words_[w];
    while (x) {
      out.push_back(w * 64 + std::size_t(__builtin_ctzll(x)));
      x &= x - 1;
    }
  }
  return out;
}

bool BitMatrix::is_zero() const {
  for (const auto& r : data_)
    if (!r.is_zero()) return false;
  return true;
}

BitMatrix BitMatrix::transpose() const {
  BitMatrix t(cols_, rows_);
  for (std::size_t r = 0; r < rows_; ++r)
    for (std::size_t c : data_[r].support()) t.set(c, r, true);
  return t;
}

BitVector BitMatrix::apply(const BitVector& v) const {
  if (v.length() != cols_)
    throw std::invalid_argument("BitMatrix::apply: vector length mismatch");
  BitVector out(rows_);
  for (std::size_t r = 0; r < rows_; ++r) {
    bool bit = false;
    for (std::size_t w = 0; w < data_[r].words_.size(); ++w)
      bit ^= (__builtin_popcountll(data_[r].words_[w] & v.words_[w]) & 1) != 0;
    out.set(r, bit);
  }
  return out;
}

BitMatrix BitMatrix::multiply(const BitMatrix& o) const {
  if (cols_ != o.rows_) throw std::invalid_argument("BitMatrix::multiply: dimension mismatch");
  BitMatrix out(rows_, o.cols_);
  for (std::size_t r = 0; r < rows_; ++r)
    for (std::size_t k : data_[r].support()) out.data_[r] ^= o.data_[k];
  return out;
}

BitMatrix BitMatrix::add(const BitMatrix& o) const {
  if (rows_ != o.rows_ || cols_ != o.cols_)
    throw std::invalid_argument("BitMatrix::add: dimension mismatch");
  BitMatrix out = *this;
  for (std::size_t r = 0; r < rows_; ++r) out.data_[r] ^= o.data_[r];
  return out;
}

BitMatrix BitMatrix::identity(std::size_t n) {
  BitMatrix m(n, n);
  for (std::size_t i = 0; i < n; ++i) m.set(i, i, true);
  return m;
}

namespace {

// Row reduction in place. Returns pivot columns (ascending). Leftmost
// nonzero column, lowest remaining row.
std::vector<std::size_t> reduce(std::vector<BitVector>& rows,
                                std::size_t cols) {
  std::vector<std::size_t> pivots;
  std::size_t next_row = 0;
  for (std::size_t c = 0; c < cols && next_row < rows.size(); ++c) {
    std::size_t p = next_row;
    while (p < rows.size() && !rows[p].get(c)) ++p;
    if (p == rows.size()) continue;
    std::swap(rows[next_row], rows[p]);
    for (std::size_t r = 0; r < rows.size(); ++r)
      if (r != next_row && rows[r].get(c)) rows[r] ^= rows[next_row];
    pivots.push_back(c);
    ++next_row;
  }
  return pivots;
}

std::vector<BitVector> rows_of(const BitMatrix& m) {
  std::vector<BitVector> rows;
  rows.reserve(m.rows());
  for (std::size_t r = 0; r < m.rows(); ++r) rows.push_back(m.row(r));
  return rows;
}

}  // namespace

std::size_t rank(const BitMatrix& m) {
  auto rows = rows_of(m);
  return reduce(rows, m.cols()).size();
}

std::vector<BitVector> kernel_basis(const BitMatrix& m) {
  auto rows = rows_of(m);
  auto pivots = reduce(rows, m.cols());
  std::vector<bool> is_pivot(m.cols(), false);
  for (auto c : pivots) is_pivot[c] = true;

  std::vector<BitVector> basis;
  for (std::size_t c = 0; c < m.cols(); ++c) {
    if (is_pivot[c]) continue;
    BitVector v(m.cols());
    v.set(c, true);
    for (std::size_t i = 0; i < pivots.size(); ++i)
      if (rows[i].get(c)) v.set(pivots[i], true);
    basis.push_back(v);
  }
  return basis;
}

std::optional<BitVector> solve(const BitMatrix& m, const BitVector& b) {
  if (b.length() != m.rows())
    throw std::invalid_argument("gf2::solve: right-hand side length mismatch");
  // Augment with b as an extra column.
  std::vector<BitVector> rows;
  rows.reserve(m.rows());
  for (std::size_t r = 0; r < m.rows(); ++r) {
    BitVector v(m.cols() + 1);
    for (std::size_t c : m.row(r).support()) v.set(c, true);
    if (b.get(r)) v.set(m.cols(), true);
    rows.push_back(v);
  }
  auto pivots = reduce(rows, m.cols() + 1);
  for (auto c : pivots)
    if (c == m.cols()) return std::nullopt;  // inconsistent system
  BitVector x(m.cols());
  for (std::size_t i = 0; i < pivots.size(); ++i)
    if (rows[i].get(m.cols())) x.set(pivots[i], true);
  return x;
}

std::vector<BitVector> row_space_basis(const BitMatrix& m) {
  auto rows = rows_of(m);
  auto pivots = reduce(rows, m.cols());
  rows.resize(pivots.size());
  return rows;
}

bool span_contained(const std::vector<BitVector>& sub,
                    const std::vector<BitVector>& sup, std::size_t cols) {
  auto rows = sup;
  std::size_t base = reduce(rows, cols).size();
  rows.resize(base);
  for (const auto& v : sub) {
    auto probe = rows;
    probe.push_back(v);
    if (reduce(probe, cols).size() > base) return false;
  }
  return true;
}

std::size_t span_rank(const std::vector<BitVector>& vecs, std::size_t cols) {
  auto rows = vecs;
  return reduce(rows, cols).size();
}

}  // namespace gf2
}  // namespace floer
