#pragma once

#include <array>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "qdist/gf2.hpp"
#include "qdist/pauli.hpp"

namespace qdist {

/// A stabilizer generating set in binary symplectic form: row i of X and
/// row i of Z together encode the i-th generator.
struct BinSympMatrix {
    Gf2Matrix X, Z;

    BinSympMatrix() = default;
    BinSympMatrix(Gf2Matrix x, Gf2Matrix z);

    size_t rows() const { return X.rows(); }
    size_t qubits() const { return X.cols(); }
    BinSympPauli row(size_t i) const { return {X.row(i), Z.row(i)}; }
    /// Rows as 2n-bit (x|z) vectors, for row-space arguments.
    Gf2Matrix combined() const { return X.hconcat(Z); }
};

/// True iff every pair of rows has symplectic product 0.
bool is_commuting(const BinSympMatrix &b);

/// Assemble the CSS stabilizer matrix: first the Z-type rows (hz in the
/// Z-component), then the X-type rows (hx in the X-component).
BinSympMatrix css_bsm(const Gf2Matrix &hx, const Gf2Matrix &hz);

/// Commutes with every row and lies outside the row space of combined().
bool undetectable(const BinSympMatrix &b, const BinSympPauli &e);

struct ClaimedParams {
    int k = 0;
    int d = 0;
    bool operator==(const ClaimedParams &) const = default;
};

/// A CSS code given by its two parity-check matrices, with optional
/// certified kernel bases and optional parameters claimed by the source.
struct CssCode {
    std::string name;
    size_t n = 0;
    Gf2Matrix hx, hz;
    std::optional<Gf2Matrix> ker_hx, ker_hz;
    std::optional<ClaimedParams> claimed;

    BinSympMatrix to_bsm() const { return css_bsm(hx, hz); }
};

/// Bivariate bicycle instance: x = S_l (x) I_m, y = I_l (x) S_m, and each
/// check polynomial is a three-term sum of monomials x^i y^j.
struct BbSpec {
    size_t l = 1, m = 1;
    std::array<std::pair<unsigned, unsigned>, 3> a_monomials{};
    std::array<std::pair<unsigned, unsigned>, 3> b_monomials{};
};

/// Build hx = [A | B], hz = [B^T | A^T] on n = 2*l*m qubits. The result is
/// mutually orthogonal by construction (A and B commute).
CssCode bb_build(const BbSpec &spec, const std::string &name = "");

/// n - rank(hx) - rank(hz). Requires mutually_orth(hx, hz).
size_t compute_k(const CssCode &c);

struct KernelCertificate {
    size_t matrix_rank_bound = 0; // r1
    size_t kernel_rank_bound = 0; // r2
    bool certified = false;
    std::string reason; // empty when certified; else the failed conjunct
};

/// Rank-nullity certificate that rowspace(m2) is exactly ker(m1):
/// r1 + r2 = n, rank(m1) >= r1, rank(m2) >= r2, and mutual orthogonality.
KernelCertificate certify_kernel(const Gf2Matrix &m1, const Gf2Matrix &m2, size_t r1, size_t r2);

/// Greedy selection of r independent row indices, or nullopt if rank < r.
std::optional<std::vector<size_t>> independent_row_subset(const Gf2Matrix &m, size_t r);

} // namespace qdist
