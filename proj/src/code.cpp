#include "qdist/code.hpp"

#include <stdexcept>

#include "qdist/error.hpp"

namespace qdist {

BinSympMatrix::BinSympMatrix(Gf2Matrix x, Gf2Matrix z) : X(std::move(x)), Z(std::move(z)) {
    if (X.rows() != Z.rows() || X.cols() != Z.cols())
        throw std::invalid_argument("BinSympMatrix: X and Z must have identical shape");
}

bool is_commuting(const BinSympMatrix &b) {
    for (size_t i = 0; i < b.rows(); i++) {
        BinSympPauli ri = b.row(i);
        for (size_t j = i + 1; j < b.rows(); j++)
            if (symplectic_prod(ri, b.row(j))) return false;
    }
    return true;
}

BinSympMatrix css_bsm(const Gf2Matrix &hx, const Gf2Matrix &hz) {
    if (hx.cols() != hz.cols())
        throw std::invalid_argument("css_bsm: hx and hz must have the same column count");
    size_t n = hx.cols();
    std::vector<BitString> xs, zs;
    xs.reserve(hz.rows() + hx.rows());
    zs.reserve(hz.rows() + hx.rows());
    for (size_t i = 0; i < hz.rows(); i++) {
        xs.push_back(BitString(n));
        zs.push_back(hz.row(i));
    }
    for (size_t i = 0; i < hx.rows(); i++) {
        xs.push_back(hx.row(i));
        zs.push_back(BitString(n));
    }
    Gf2Matrix X = Gf2Matrix::from_rows(std::move(xs));
    Gf2Matrix Z = Gf2Matrix::from_rows(std::move(zs));
    if (X.rows() == 0) return {Gf2Matrix(0, n), Gf2Matrix(0, n)};
    return {std::move(X), std::move(Z)};
}

bool undetectable(const BinSympMatrix &b, const BinSympPauli &e) {
    if (e.n() != b.qubits())
        throw std::invalid_argument("undetectable: length mismatch");
    for (size_t i = 0; i < b.rows(); i++)
        if (symplectic_prod(b.row(i), e)) return false;
    return !row_space_contains(b.combined(), e.combined());
}

CssCode bb_build(const BbSpec &spec, const std::string &name) {
    if (spec.l < 1 || spec.m < 1)
        throw std::invalid_argument("bb_build: l and m must be >= 1");
    size_t l = spec.l, m = spec.m, lm = l * m;

    // x^i y^j acts on index (u, v) -> (u+i mod l, v+j mod m); row u*m+v of the
    // monomial matrix has its single 1 at column ((u+i)%l)*m + (v+j)%m.
    auto add_monomial = [&](Gf2Matrix &acc, unsigned i, unsigned j) {
        for (size_t u = 0; u < l; u++)
            for (size_t v = 0; v < m; v++) {
                size_t r = u * m + v;
                size_t c = ((u + i) % l) * m + ((v + j) % m);
                acc.set(r, c, !acc.get(r, c));
            }
    };

    Gf2Matrix a(lm, lm), b(lm, lm);
    for (auto [i, j] : spec.a_monomials) add_monomial(a, i % l, j % m);
    for (auto [i, j] : spec.b_monomials) add_monomial(b, i % l, j % m);

    CssCode code;
    code.name = name;
    code.n = 2 * lm;
    code.hx = a.hconcat(b);
    code.hz = b.transposed().hconcat(a.transposed());
    return code;
}

size_t compute_k(const CssCode &c) {
    if (c.hx.cols() != c.n || c.hz.cols() != c.n)
        throw InvalidCodeError("compute_k: parity-check width disagrees with n");
    if (!mutually_orth(c.hx, c.hz))
        throw InvalidCodeError("compute_k: hx and hz are not mutually orthogonal");
    return c.n - rank(c.hx) - rank(c.hz);
}

KernelCertificate certify_kernel(const Gf2Matrix &m1, const Gf2Matrix &m2, size_t r1, size_t r2) {
    if (m1.cols() != m2.cols())
        throw std::invalid_argument("certify_kernel: column count mismatch");
    KernelCertificate cert;
    cert.matrix_rank_bound = r1;
    cert.kernel_rank_bound = r2;
    size_t n = m1.cols();
    if (r1 + r2 != n) {
        cert.reason = "rank-sum: r1 + r2 != n";
        return cert;
    }
    if (rank(m1) < r1) {
        cert.reason = "rank bound: rank(M1) < r1";
        return cert;
    }
    if (rank(m2) < r2) {
        cert.reason = "rank bound: rank(M2) < r2";
        return cert;
    }
    if (!mutually_orth(m1, m2)) {
        cert.reason = "orthogonality: some row of M1 is not orthogonal to some row of M2";
        return cert;
    }
    cert.certified = true;
    return cert;
}

std::optional<std::vector<size_t>> independent_row_subset(const Gf2Matrix &m, size_t r) {
    if (r > m.rows())
        throw std::invalid_argument("independent_row_subset: r exceeds row count");
    std::vector<size_t> picked;
    std::vector<BitString> basis;      // reduced representatives of picked rows
    std::vector<size_t> basis_pivots;  // lowest set bit of each representative
    for (size_t i = 0; i < m.rows() && picked.size() < r; i++) {
        BitString v = m.row(i);
        for (size_t b = 0; b < basis.size(); b++)
            if (v.get(basis_pivots[b])) v ^= basis[b];
        auto low = v.lowest_set();
        if (!low) continue; // dependent on earlier picks
        // keep representatives reduced against the new vector
        for (size_t b = 0; b < basis.size(); b++)
            if (basis[b].get(*low)) basis[b] ^= v;
        basis.push_back(std::move(v));
        basis_pivots.push_back(*low);
        picked.push_back(i);
    }
    if (picked.size() < r) return std::nullopt;
    return picked;
}

} // namespace qdist
