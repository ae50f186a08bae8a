#pragma once

#include <cstdint>
#include <cstddef>
#include <optional>
#include <vector>

namespace floer {
namespace gf2 {

// Vector over the two-element field, bit-packed into 64-bit words.
class BitVector {
 public:
  BitVector() : length_(0) {}
  explicit BitVector(std::size_t length)
      : length_(length), words_((length + 63) / 64, 0) {}

  std::size_t length() const { return length_; }

  bool get(std::size_t i) const {
    return (words_[i >> 6] >> (i & 63)) & 1u;
  }
  void set(std::size_t i, bool v) {
    std::uint64_t mask = std::uint64_t(1) << (i & 63);
    if (v)
      words_[i >> 6] |= mask;
    else
      words_[i >> 6] &= ~mask;
  }
  void flip(std::size_t i) { words_[i >> 6] ^= std::uint64_t(1) << (i & 63); }

  void operator^=(const BitVector& o) {
    for (std::size_t w = 0; w < words_.size(); ++w) words_[w] ^= o.words_[w];
  }

  bool is_zero() const {
    for (auto w : words_)
      if (w) return false;
    return true;
  }

  // Positions holding 1, ascending.
  std::vector<std::size_t> support() const;

  bool operator==(const BitVector& o) const {
    return length_ == o.length_ && words_ == o.words_;
  }

 private:
  friend class BitMatrix;
  std::size_t length_;
  std::vector<std::uint64_t> words_;
};

// Dense bit-packed matrix over GF(2). Rows are BitVectors; elimination is
// word-parallel XOR. Pivoting is leftmost nonzero column, lowest remaining
// row, so reduced forms (and the bases derived from them) are reproducible.
class BitMatrix {
 public:
  BitMatrix() : rows_(0), cols_(0) {}
  BitMatrix(std::size_t rows, std::size_t cols)
      : rows_(rows), cols_(cols), data_(rows, BitVector(cols)) {}

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }

  bool get(std::size_t r, std::size_t c) const { return data_[r].get(c); }
  void set(std::size_t r, std::size_t c, bool v) { data_[r].set(c, v); }
  void flip(std::size_t r, std::size_t c) { data_[r].flip(c); }

  const BitVector& row(std::size_t r) const { return data_[r]; }
  BitVector& row(std::size_t r) { return data_[r]; }

  bool is_zero() const;
  BitMatrix transpose() const;

  // Matrix-vector product m*v (v indexed by columns).
  BitVector apply(const BitVector& v) const;
  // this * o.
  BitMatrix multiply(const BitMatrix& o) const;
  // this + o (entrywise XOR).
  BitMatrix add(const BitMatrix& o) const;

  static BitMatrix identity(std::size_t n);

  bool operator==(const BitMatrix& o) const {
    return rows_ == o.rows_ && cols_ == o.cols_ && data_ == o.data_;
  }

 private:
  std::size_t rows_, cols_;
  std::vector<BitVector> data_;
};

// GF(2) row rank.
std::size_t rank(const BitMatrix& m);

// Basis of { v : m v = 0 }. Vectors are independent and their count is
// cols - rank(m).
std::vector<BitVector> kernel_basis(const BitMatrix& m);

// Some solution v of m v = b, or nullopt when none exists.
// b.length() must equal m.rows().
std::optional<BitVector> solve(const BitMatrix& m, const BitVector& b);

// Row-space basis of m in reduced row echelon form (pivot order as in rank).
std::vector<BitVector> row_space_basis(const BitMatrix& m);

// Given spanning sets (as rows), decide whether span(sub) is contained in
// span(sup); both over the same column count.
bool span_contained(const std::vector<BitVector>& sub,
                    const std::vector<BitVector>& sup, std::size_t cols);

std::size_t span_rank(const std::vector<BitVector>& vecs, std::size_t cols);

}  // namespace gf2
}  // namespace floer
