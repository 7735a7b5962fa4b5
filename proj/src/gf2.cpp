#include "qdist/gf2.hpp"

#include <algorithm>
#include <bit>
#include <stdexcept>

#include "qdist/error.hpp"

namespace qdist {

BitString BitString::from_bits(std::string_view bits) {
    BitString out(bits.size());
    for (size_t i = 0; i < bits.size(); i++) {
        char c = bits[i];
        if (c == '1') {
            out.set(i, true);
        } else if (c != '0') {
            throw std::invalid_argument("BitString::from_bits: expected only 0/1");
        }
    }
    return out;
}

static int hex_digit(char c) {
    if (c >= '0' && c <= '9') return c - '0';
    if (c >= 'a' && c <= 'f') return c - 'a' + 10;
    if (c >= 'A' && c <= 'F') return c - 'A' + 10;
    return -1;
}

BitString BitString::from_hex(std::string_view hex, size_t len) {
    if (hex.starts_with("0x") || hex.starts_with("0X")) hex.remove_prefix(2);
    if (hex.empty()) throw std::invalid_argument("BitString::from_hex: empty string");
    BitString out(len);
    // hex[0] is the most significant digit
    for (size_t d = 0; d < hex.size(); d++) {
        int v = hex_digit(hex[hex.size() - 1 - d]);
        if (v < 0) throw std::invalid_argument("BitString::from_hex: bad hex digit");
        for (int b = 0; b < 4; b++) {
            if (!((v >> b) & 1)) continue;
            size_t pos = d * 4 + static_cast<size_t>(b);
            if (pos >= len)
                throw std::invalid_argument("BitString::from_hex: set bit beyond length");
            out.set(pos, true);
        }
    }
    return out;
}

bool BitString::get(size_t i) const {
    if (i >= len_) throw std::out_of_range("BitString::get: index out of range");
    return (words_[i / 64] >> (i % 64)) & 1;
}

void BitString::set(size_t i, bool v) {
    if (i >= len_) throw std::out_of_range("BitString::set: index out of range");
    uint64_t mask = uint64_t(1) << (i % 64);
    if (v)
        words_[i / 64] |= mask;
    else
        words_[i / 64] &= ~mask;
}

void BitString::check_same_len(const BitString &rhs) const {
    if (len_ != rhs.len_)
        throw std::invalid_argument("BitString: length mismatch (" + std::to_string(len_) +
                                    " vs " + std::to_string(rhs.len_) + ")");
}

void BitString::trim() {
    if (len_ % 64 != 0 && !words_.empty())
        words_.back() &= (uint64_t(1) << (len_ % 64)) - 1;
}

BitString &BitString::operator^=(const BitString &rhs) {
    check_same_len(rhs);
    for (size_t w = 0; w < words_.size(); w++) words_[w] ^= rhs.words_[w];
    return *this;
}

BitString BitString::operator^(const BitString &rhs) const {
    BitString out = *this;
    out ^= rhs;
    return out;
}

BitString BitString::operator&(const BitString &rhs) const {
    check_same_len(rhs);
    BitString out = *this;
    for (size_t w = 0; w < words_.size(); w++) out.words_[w] &= rhs.words_[w];
    return out;
}

BitString BitString::operator|(const BitString &rhs) const {
    check_same_len(rhs);
    BitString out = *this;
    for (size_t w = 0; w < words_.size(); w++) out.words_[w] |= rhs.words_[w];
    return out;
}

size_t BitString::popcount() const {
    size_t n = 0;
    for (uint64_t w : words_) n += static_cast<size_t>(std::popcount(w));
    return n;
}

bool BitString::is_zero() const {
    return std::all_of(words_.begin(), words_.end(), [](uint64_t w) { return w == 0; });
}

std::optional<size_t> BitString::lowest_set() const {
    for (size_t w = 0; w < words_.size(); w++)
        if (words_[w]) return w * 64 + static_cast<size_t>(std::countr_zero(words_[w]));
    return std::nullopt;
}

std::string BitString::to_hex() const {
    std::string out;
    size_t digits = (len_ + 3) / 4;
    bool seen = false;
    for (size_t d = digits; d-- > 0;) {
        int v = 0;
        for (int b = 3; b >= 0; b--) {
            size_t pos = d * 4 + static_cast<size_t>(b);
            v = (v << 1) | (pos < len_ && get(pos) ? 1 : 0);
        }
        if (v != 0) seen = true;
        if (seen) out.push_back("0123456789abcdef"[v]);
    }
    if (out.empty()) out = "0";
    return out;
}

std::string BitString::to_bits() const {
    std::string out(len_, '0');
    for (size_t i = 0; i < len_; i++)
        if (get(i)) out[i] = '1';
    return out;
}

BitString BitString::concat(const BitString &rhs) const {
    BitString out(len_ + rhs.len_);
    for (size_t i = 0; i < len_; i++) out.set(i, get(i));
    for (size_t i = 0; i < rhs.len_; i++) out.set(len_ + i, rhs.get(i));
    return out;
}

BitString BitString::slice(size_t start, size_t count) const {
    if (start + count > len_) throw std::out_of_range("BitString::slice: out of range");
    BitString out(count);
    for (size_t i = 0; i < count; i++) out.set(i, get(start + i));
    return out;
}

int dot(const BitString &u, const BitString &v) {
    if (u.len() != v.len())
        throw std::invalid_argument("dot: length mismatch");
    uint64_t acc = 0;
    auto uw = u.words(), vw = v.words();
    for (size_t w = 0; w < uw.size(); w++) acc ^= uw[w] & vw[w];
    return std::popcount(acc) & 1;
}

size_t pauli_union_weight(const BitString &x, const BitString &z) {
    if (x.len() != z.len())
        throw std::invalid_argument("pauli_union_weight: length mismatch");
    return (x | z).popcount();
}

Gf2Matrix Gf2Matrix::from_rows(std::vector<BitString> rows) {
    Gf2Matrix out;
    out.rows_ = rows.size();
    out.cols_ = rows.empty() ? 0 : rows[0].len();
    for (const auto &r : rows)
        if (r.len() != out.cols_)
            throw std::invalid_argument("Gf2Matrix::from_rows: ragged rows");
    out.data_ = std::move(rows);
    return out;
}

Gf2Matrix Gf2Matrix::from_strings(const std::vector<std::string> &rows) {
    std::vector<BitString> data;
    data.reserve(rows.size());
    for (const auto &s : rows) data.push_back(BitString::from_bits(s));
    return from_rows(std::move(data));
}

Gf2Matrix Gf2Matrix::from_hex_rows(const std::vector<std::string> &rows, size_t cols) {
    std::vector<BitString> data;
    data.reserve(rows.size());
    for (const auto &s : rows) data.push_back(BitString::from_hex(s, cols));
    Gf2Matrix out = from_rows(std::move(data));
    out.cols_ = cols; // preserve cols for zero-row matrices
    return out;
}

Gf2Matrix Gf2Matrix::identity(size_t n) {
    Gf2Matrix out(n, n);
    for (size_t i = 0; i < n; i++) out.set(i, i, true);
    return out;
}

Gf2Matrix Gf2Matrix::transposed() const {
    Gf2Matrix out(cols_, rows_);
    for (size_t i = 0; i < rows_; i++)
        for (size_t j = 0; j < cols_; j++)
            if (get(i, j)) out.set(j, i, true);
    return out;
}

Gf2Matrix Gf2Matrix::hconcat(const Gf2Matrix &rhs) const {
    if (rows_ != rhs.rows_)
        throw std::invalid_argument("Gf2Matrix::hconcat: row count mismatch");
    std::vector<BitString> data;
    data.reserve(rows_);
    for (size_t i = 0; i < rows_; i++) data.push_back(row(i).concat(rhs.row(i)));
    Gf2Matrix out = from_rows(std::move(data));
    out.cols_ = cols_ + rhs.cols_;
    out.rows_ = rows_;
    return out;
}

std::vector<std::string> Gf2Matrix::to_hex_rows() const {
    std::vector<std::string> out;
    out.reserve(rows_);
    for (size_t i = 0; i < rows_; i++) out.push_back(row(i).to_hex());
    return out;
}

Gf2Rref::Gf2Rref(const Gf2Matrix &m) : cols_(m.cols()) {
    std::vector<BitString> work;
    work.reserve(m.rows());
    for (size_t i = 0; i < m.rows(); i++) work.push_back(m.row(i));

    size_t r = 0;
    for (size_t c = 0; c < cols_ && r < work.size(); c++) {
        size_t piv = r;
        while (piv < work.size() && !work[piv].get(c)) piv++;
        if (piv == work.size()) continue;
        std::swap(work[r], work[piv]);
        for (size_t i = 0; i < work.size(); i++)
            if (i != r && work[i].get(c)) work[i] ^= work[r];
        pivot_cols_.push_back(c);
        r++;
    }
    work.resize(r);
    rows_ = std::move(work);
}

BitString Gf2Rref::reduce(const BitString &v) const {
    if (v.len() != cols_)
        throw std::invalid_argument("Gf2Rref::reduce: length mismatch");
    BitString acc = v;
    for (size_t i = 0; i < rows_.size(); i++)
        if (acc.get(pivot_cols_[i])) acc ^= rows_[i];
    return acc;
}

bool Gf2Rref::contains(const BitString &v) const { return reduce(v).is_zero(); }

size_t rank(const Gf2Matrix &m) { return Gf2Rref(m).rank(); }

Gf2Matrix kernel_basis(const Gf2Matrix &m) {
    Gf2Rref rref(m);
    size_t n = m.cols();
    std::vector<bool> is_pivot(n, false);
    for (size_t c : rref.pivot_cols()) is_pivot[c] = true;

    std::vector<BitString> basis;
    basis.reserve(n - rref.rank());
    for (size_t f = 0; f < n; f++) {
        if (is_pivot[f]) continue;
        BitString v(n);
        v.set(f, true);
        for (size_t i = 0; i < rref.rank(); i++)
            if (rref.rows()[i].get(f)) v.set(rref.pivot_cols()[i], true);
        basis.push_back(std::move(v));
    }
    Gf2Matrix out = Gf2Matrix::from_rows(std::move(basis));
    if (out.rows() == 0) out = Gf2Matrix(0, n);
    return out;
}

bool row_space_contains(const Gf2Matrix &m, const BitString &v) {
    if (v.len() != m.cols())
        throw std::invalid_argument("row_space_contains: length mismatch");
    return Gf2Rref(m).contains(v);
}

bool mutually_orth(const Gf2Matrix &m1, const Gf2Matrix &m2) {
    if (m1.cols() != m2.cols())
        throw std::invalid_argument("mutually_orth: column count mismatch");
    for (size_t i = 0; i < m1.rows(); i++)
        for (size_t j = 0; j < m2.rows(); j++)
            if (dot(m1.row(i), m2.row(j))) return false;
    return true;
}

BitString flatten(const Gf2Matrix &m) {
    BitString out(m.rows() * m.cols());
    for (size_t i = 0; i < m.rows(); i++)
        for (size_t j = 0; j < m.cols(); j++)
            if (m.get(i, j)) out.set(i * m.cols() + j, true);
    return out;
}

Gf2Matrix unflatten(const BitString &bits, size_t rows, size_t cols) {
    if (bits.len() != rows * cols)
        throw std::invalid_argument("unflatten: bit count does not match shape");
    Gf2Matrix out(rows, cols);
    for (size_t i = 0; i < rows; i++)
        for (size_t j = 0; j < cols; j++)
            if (bits.get(i * cols + j)) out.set(i, j, true);
    return out;
}

} // namespace qdist
