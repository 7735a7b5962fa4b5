#include <doctest.h>

#include <random>
#include <stdexcept>

#include "qdist/code.hpp"
#include "qdist/error.hpp"
#include "support/fixtures.hpp"

using namespace qdist;
using namespace qdist::testing;

TEST_CASE("css_bsm block layout matches the Shor generator table") {
    BinSympMatrix b = css_bsm(shor_hx(), shor_hz());
    REQUIRE(b.rows() == 8);
    REQUIRE(b.qubits() == 9);
    // M1..M6 phase-flip (Z-type), M7..M8 bit-flip (X-type)
    for (size_t i = 0; i < 6; i++) {
        CHECK(b.row(i).x.is_zero());
        CHECK(b.row(i).z == shor_hz().row(i));
    }
    for (size_t i = 0; i < 2; i++) {
        CHECK(b.row(6 + i).x == shor_hx().row(i));
        CHECK(b.row(6 + i).z.is_zero());
    }
    CHECK(is_commuting(b));
}

TEST_CASE("css_bsm edge cases") {
    BinSympMatrix empty = css_bsm(Gf2Matrix(0, 4), Gf2Matrix(0, 4));
    CHECK(empty.rows() == 0);
    CHECK(empty.qubits() == 4);
    CHECK(is_commuting(empty));

    BinSympMatrix steane = css_bsm(steane_matrix(), steane_matrix());
    CHECK(steane.rows() == 6);
    CHECK(is_commuting(steane));

    CHECK_THROWS_AS(css_bsm(Gf2Matrix(1, 3), Gf2Matrix(1, 4)), std::invalid_argument);
}

TEST_CASE("is_commuting detects anticommuting rows") {
    // row 1: X on qubit 0; row 2: Z on qubit 0
    Gf2Matrix x = Gf2Matrix::from_strings({"10", "00"});
    Gf2Matrix z = Gf2Matrix::from_strings({"00", "10"});
    CHECK_FALSE(is_commuting(BinSympMatrix{x, z}));
    Gf2Matrix x1 = Gf2Matrix::from_strings({"11"});
    Gf2Matrix z1 = Gf2Matrix::from_strings({"01"});
    CHECK(is_commuting(BinSympMatrix{x1, z1})); // single row always commutes with itself
}

TEST_CASE("css_bsm commutes iff parity checks are mutually orthogonal") {
    std::mt19937_64 rng(31);
    for (int it = 0; it < 200; it++) {
        size_t n = 2 + rng() % 9;
        Gf2Matrix hx = random_matrix(rng, 1 + rng() % 4, n);
        Gf2Matrix hz = random_matrix(rng, 1 + rng() % 4, n);
        CHECK(is_commuting(css_bsm(hx, hz)) == mutually_orth(hx, hz));
    }
}

TEST_CASE("bb_build trivial spec") {
    BbSpec s; // l = m = 1, all monomials (0,0)
    CssCode c = bb_build(s, "toy");
    CHECK(c.n == 2);
    CHECK(c.hx.rows() == 1);
    CHECK(c.hx.row(0).to_bits() == "11");
    CHECK(c.hz.row(0).to_bits() == "11");
    CHECK(mutually_orth(c.hx, c.hz));
    CHECK(compute_k(c) == 0);
}

TEST_CASE("bb_build is mutually orthogonal for random specs") {
    std::mt19937_64 rng(37);
    for (int it = 0; it < 50; it++) {
        BbSpec s;
        s.l = 1 + rng() % 6;
        s.m = 1 + rng() % 6;
        for (int i = 0; i < 3; i++) {
            s.a_monomials[i] = {unsigned(rng() % 12), unsigned(rng() % 12)};
            s.b_monomials[i] = {unsigned(rng() % 12), unsigned(rng() % 12)};
        }
        CssCode c = bb_build(s);
        CHECK(c.n == 2 * s.l * s.m);
        CHECK(mutually_orth(c.hx, c.hz));
        CHECK(compute_k(c) % 2 == 0); // rank hx = rank hz by the transpose symmetry
    }
}

TEST_CASE("bb [[90,8,10]] parameters") {
    CssCode c = bb_build(bb90_spec(), "bb90");
    CHECK(c.n == 90);
    CHECK(c.hx.rows() == 45);
    CHECK(rank(c.hx) == 41);
    CHECK(rank(c.hz) == 41);
    CHECK(compute_k(c) == 8);
}

TEST_CASE("compute_k on the named codes") {
    CHECK(compute_k(steane_code()) == 1);
    CHECK(compute_k(shor_code()) == 1);
    CHECK(compute_k(golay_code()) == 1);
    CssCode bad;
    bad.n = 2;
    bad.hx = Gf2Matrix::from_strings({"10"});
    bad.hz = Gf2Matrix::from_strings({"10"});
    CHECK_THROWS_AS(compute_k(bad), InvalidCodeError);
}

TEST_CASE("undetectable") {
    BinSympMatrix b = css_bsm(steane_matrix(), steane_matrix());
    // rows of B are never undetectable
    for (size_t i = 0; i < b.rows(); i++) CHECK_FALSE(undetectable(b, b.row(i)));
    CHECK_FALSE(undetectable(b, BinSympPauli(7))); // zero is in every row space
    // Z-only error on a weight-3 Hamming codeword: in ker(hx), but outside the
    // stabilizer row space (every nonzero simplex-code word has weight 4)
    BinSympPauli e(BitString(7), BitString::from_bits("1101000"));
    CHECK(undetectable(b, e));
}

TEST_CASE("undetectable is stable under adding stabilizer rows") {
    std::mt19937_64 rng(41);
    for (int it = 0; it < 100; it++) {
        size_t n = 3 + rng() % 5;
        CssCode c = random_css(rng, n, 1 + rng() % 3, 1 + rng() % 2);
        BinSympMatrix b = c.to_bsm();
        if (b.rows() == 0) continue;
        Gf2Matrix probe = random_matrix(rng, 2, 2 * n);
        for (size_t p = 0; p < probe.rows(); p++) {
            BinSympPauli e(probe.row(p).slice(0, n), probe.row(p).slice(n, n));
            size_t ri = rng() % b.rows();
            BinSympPauli shifted = e ^ b.row(ri);
            CHECK(undetectable(b, e) == undetectable(b, shifted));
        }
    }
}

TEST_CASE("certify_kernel on the Steane pair") {
    KernelCertificate cert = certify_kernel(steane_matrix(), steane_kernel(), 3, 4);
    CHECK(cert.certified);
    CHECK(cert.reason.empty());

    KernelCertificate bad_sum = certify_kernel(steane_matrix(), steane_kernel(), 3, 3);
    CHECK_FALSE(bad_sum.certified);
    CHECK(bad_sum.reason.find("rank-sum") != std::string::npos);

    // flip one bit so a kernel row stops being orthogonal
    Gf2Matrix broken = steane_kernel();
    broken.set(2, 0, !broken.get(2, 0));
    KernelCertificate bad_orth = certify_kernel(steane_matrix(), broken, 3, 4);
    CHECK_FALSE(bad_orth.certified);
    CHECK(bad_orth.reason.find("orthogonality") != std::string::npos);

    CHECK_THROWS_AS(certify_kernel(steane_matrix(), Gf2Matrix(1, 6), 3, 4),
                    std::invalid_argument);
}

TEST_CASE("certified kernels really span the kernel") {
    std::mt19937_64 rng(43);
    for (int it = 0; it < 150; it++) {
        size_t rows = 1 + rng() % 6, cols = 1 + rng() % 10;
        Gf2Matrix m = random_matrix(rng, rows, cols);
        Gf2Matrix ker = kernel_basis(m);
        size_t r = rank(m);
        KernelCertificate cert = certify_kernel(m, ker, r, cols - r);
        CHECK(cert.certified);
        // bidirectional row-space membership with the canonical kernel
        Gf2Matrix ker2 = kernel_basis(m);
        for (size_t i = 0; i < ker.rows(); i++) CHECK(row_space_contains(ker2, ker.row(i)));
        for (size_t i = 0; i < ker2.rows(); i++) CHECK(row_space_contains(ker, ker2.row(i)));
    }
}

TEST_CASE("independent_row_subset") {
    CssCode bb = bb_build(bb90_spec());
    auto ok = independent_row_subset(bb.hx, 41);
    REQUIRE(ok.has_value());
    CHECK(ok->size() == 41);
    // the returned rows really are independent
    std::vector<BitString> picked;
    for (size_t i : *ok) picked.push_back(bb.hx.row(i));
    CHECK(rank(Gf2Matrix::from_rows(picked)) == 41);
    CHECK_FALSE(independent_row_subset(bb.hx, 42).has_value());
    CHECK_FALSE(independent_row_subset(bb.hz, 42).has_value());

    auto all = independent_row_subset(Gf2Matrix::identity(6), 6);
    REQUIRE(all.has_value());
    CHECK(all->size() == 6);
    CHECK_FALSE(independent_row_subset(Gf2Matrix(3, 5), 1).has_value());
    CHECK_THROWS_AS(independent_row_subset(Gf2Matrix(2, 2), 3), std::invalid_argument);
}
