#pragma once

// Shared test matrices: the Steane, Shor, and Golay parity checks, plus
// small generators for randomized property tests.

#include <cstdint>
#include <random>
#include <vector>

#include "qdist/code.hpp"
#include "qdist/gf2.hpp"

namespace qdist::testing {

inline Gf2Matrix steane_matrix() {
    return Gf2Matrix::from_strings({
        "1001011",
        "0101101",
        "0010111",
    });
}

// The paper's kernel listing for the Steane matrix (4 x 7).
inline Gf2Matrix steane_kernel() {
    return Gf2Matrix::from_strings({
        "1101000",
        "0110100",
        "1010010",
        "1110001",
    });
}

inline Gf2Matrix shor_hz() {
    return Gf2Matrix::from_strings({
        "110000000",
        "011000000",
        "000110000",
        "000011000",
        "000000110",
        "000000011",
    });
}

inline Gf2Matrix shor_hx() {
    return Gf2Matrix::from_strings({
        "111111000",
        "000111111",
    });
}

// Kernel generators of shor_hx as printed alongside the worked example.
inline Gf2Matrix shor_gx() {
    return Gf2Matrix::from_strings({
        "110000000",
        "101000000",
        "000110000",
        "000101000",
        "100100100",
        "100100010",
        "100100001",
    });
}

inline CssCode steane_code() {
    CssCode c;
    c.name = "steane";
    c.n = 7;
    c.hx = steane_matrix();
    c.hz = steane_matrix();
    c.claimed = ClaimedParams{1, 3};
    return c;
}

inline CssCode shor_code() {
    CssCode c;
    c.name = "shor";
    c.n = 9;
    c.hx = shor_hx();
    c.hz = shor_hz();
    c.claimed = ClaimedParams{1, 3};
    return c;
}

// Parity check of the [23,12,7] binary Golay code: cyclic shifts of the
// reversed check polynomial (x^23 - 1) / g(x), g = x^11+x^10+x^6+x^5+x^4+x^2+1.
inline Gf2Matrix golay_matrix() {
    // h~(x) reversed coefficients as bits: positions of ones per shifted row
    const uint32_t base = 0x149f; // row 0, LSB = column 0
    std::vector<BitString> rows;
    for (int i = 0; i < 11; i++) {
        BitString r(23);
        for (int j = 0; j < 13; j++)
            if ((base >> j) & 1) r.set((i + j) % 23, true);
        rows.push_back(r);
    }
    return Gf2Matrix::from_rows(rows);
}

inline CssCode golay_code() {
    CssCode c;
    c.name = "golay";
    c.n = 23;
    c.hx = golay_matrix();
    c.hz = golay_matrix();
    c.claimed = ClaimedParams{1, 7};
    return c;
}

inline BbSpec bb90_spec() {
    BbSpec s;
    s.l = 15;
    s.m = 3;
    s.a_monomials = {{{9, 0}, {0, 1}, {0, 2}}};
    s.b_monomials = {{{0, 0}, {2, 0}, {7, 0}}};
    return s;
}

inline Gf2Matrix random_matrix(std::mt19937_64 &rng, size_t rows, size_t cols, double density = 0.5) {
    Gf2Matrix m(rows, cols);
    std::bernoulli_distribution bit(density);
    for (size_t i = 0; i < rows; i++)
        for (size_t j = 0; j < cols; j++)
            if (bit(rng)) m.set(i, j, true);
    return m;
}

// A random valid CSS pair: hz rows drawn from the kernel of hx.
inline CssCode random_css(std::mt19937_64 &rng, size_t n, size_t kx, size_t kz) {
    CssCode c;
    c.name = "random";
    c.n = n;
    c.hx = random_matrix(rng, kx, n);
    Gf2Matrix ker = kernel_basis(c.hx);
    Gf2Matrix hz(kz, n);
    std::bernoulli_distribution coin(0.5);
    for (size_t i = 0; i < kz; i++)
        for (size_t r = 0; r < ker.rows(); r++)
            if (coin(rng))
                for (size_t j = 0; j < n; j++)
                    if (ker.get(r, j)) hz.set(i, j, !hz.get(i, j));
    c.hz = hz;
    return c;
}

} // namespace qdist::testing
