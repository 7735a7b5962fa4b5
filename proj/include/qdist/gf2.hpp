#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace qdist {

/// A fixed-length vector over GF(2), packed into 64-bit words.
/// Bit 0 is the least-significant bit of word 0; all bits at positions
/// >= len() are kept zero. Length 0 is legal.
class BitString {
  public:
    BitString() = default;
    explicit BitString(size_t len) : len_(len), words_(word_count(len), 0) {}

    /// Parse "1101q0..." style strings; character i gives bit i.
    static BitString from_bits(std::string_view bits);
    /// Parse a hex rendering where bit 0 is the LSB of the integer value.
    /// Rejects set bits at positions >= len.
    static BitString from_hex(std::string_view hex, size_t len);

    size_t len() const { return len_; }
    bool get(size_t i) const;
    void set(size_t i, bool v);

    bool operator==(const BitString &) const = default;

    BitString &operator^=(const BitString &rhs);
    BitString operator^(const BitString &rhs) const;
    BitString operator&(const BitString &rhs) const;
    BitString operator|(const BitString &rhs) const;

    size_t popcount() const;
    bool is_zero() const;
    /// Index of the lowest set bit, or nullopt.
    std::optional<size_t> lowest_set() const;

    /// Minimal hex digits, LSB = position 0 ("0" for the zero vector).
    std::string to_hex() const;
    /// "0110..." with position 0 first.
    std::string to_bits() const;

    std::span<const uint64_t> words() const { return words_; }

    /// Concatenation: bits of `rhs` follow bits of *this.
    BitString concat(const BitString &rhs) const;
    /// Bits [start, start+count).
    BitString slice(size_t start, size_t count) const;

  private:
    static size_t word_count(size_t len) { return (len + 63) / 64; }
    void check_same_len(const BitString &rhs) const;
    void trim();

    size_t len_ = 0;
    std::vector<uint64_t> words_;
};

/// Parity of the AND of two equal-length bit strings.
int dot(const BitString &u, const BitString &v);

/// Number of qubits where (x_i, z_i) != (0, 0), i.e. popcount(x | z).
size_t pauli_union_weight(const BitString &x, const BitString &z);

/// A dense GF(2) matrix stored as one BitString per row. Shapes with zero
/// rows or zero columns are legal. Treat values as immutable once built;
/// the elimination routines all work on internal copies.
class Gf2Matrix {
  public:
    Gf2Matrix() = default;
    Gf2Matrix(size_t rows, size_t cols)
        : rows_(rows), cols_(cols), data_(rows, BitString(cols)) {}

    static Gf2Matrix from_rows(std::vector<BitString> rows);
    /// Rows given as "0110..." strings (char j = column j).
    static Gf2Matrix from_strings(const std::vector<std::string> &rows);
    static Gf2Matrix from_hex_rows(const std::vector<std::string> &rows, size_t cols);
    static Gf2Matrix identity(size_t n);

    size_t rows() const { return rows_; }
    size_t cols() const { return cols_; }
    const BitString &row(size_t i) const { return data_.at(i); }
    bool get(size_t i, size_t j) const { return data_.at(i).get(j); }
    void set(size_t i, size_t j, bool v) { data_.at(i).set(j, v); }

    bool operator==(const Gf2Matrix &) const = default;

    Gf2Matrix transposed() const;
    /// [*this | rhs] column-wise concatenation.
    Gf2Matrix hconcat(const Gf2Matrix &rhs) const;
    std::vector<std::string> to_hex_rows() const;

  private:
    size_t rows_ = 0, cols_ = 0;
    std::vector<BitString> data_;
};

/// Reduced row echelon form of a matrix, built once and then queried.
/// Rows are the nonzero RREF rows; pivot_cols()[i] is row i's pivot column.
class Gf2Rref {
  public:
    explicit Gf2Rref(const Gf2Matrix &m);

    size_t rank() const { return rows_.size(); }
    const std::vector<size_t> &pivot_cols() const { return pivot_cols_; }
    const std::vector<BitString> &rows() const { return rows_; }

    /// True iff v is a GF(2) combination of the original matrix's rows.
    bool contains(const BitString &v) const;
    /// Reduce v modulo the row space; result is zero iff contained.
    BitString reduce(const BitString &v) const;

  private:
    size_t cols_;
    std::vector<BitString> rows_;
    std::vector<size_t> pivot_cols_;
};

/// GF(2) row rank by Gaussian elimination.
size_t rank(const Gf2Matrix &m);

/// Canonical kernel basis: the RREF free-variable basis with free columns
/// taken in ascending order. Returns a (cols - rank) x cols matrix whose
/// rows are independent and span {v : M v = 0}.
Gf2Matrix kernel_basis(const Gf2Matrix &m);

/// True iff v lies in the row space of m. v.len() must equal m.cols().
bool row_space_contains(const Gf2Matrix &m, const BitString &v);

/// True iff every row of m1 is orthogonal to every row of m2.
bool mutually_orth(const Gf2Matrix &m1, const Gf2Matrix &m2);

/// Flatten to a single rows*cols bit string: bit i*cols + j = M[i][j].
BitString flatten(const Gf2Matrix &m);
Gf2Matrix unflatten(const BitString &bits, size_t rows, size_t cols);

} // namespace qdist
