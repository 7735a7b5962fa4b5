#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "qdist/gf2.hpp"

namespace qdist {

enum class PauliLetter : uint8_t { I = 0, X = 1, Y = 2, Z = 3 };

char letter_char(PauliLetter p);
PauliLetter letter_from_char(char c);

/// A global phase i^exponent with exponent mod 4, so {1, i, -1, -i}.
/// Multiplication of phases is addition of exponents.
struct Phase {
    uint8_t exponent = 0;

    static Phase one() { return {0}; }
    Phase operator*(Phase rhs) const { return {static_cast<uint8_t>((exponent + rhs.exponent) % 4)}; }
    bool operator==(const Phase &) const = default;
    /// "+", "+i", "-", "-i"
    std::string str() const;
};

/// The anti-commutation indicator: 0 iff p = I, q = I, or p = q; else 1.
/// Satisfies PQ = (-1)^phi(P,Q) QP for the concrete 2x2 matrices.
int phi(PauliLetter p, PauliLetter q);

/// A phased symbolic Pauli operator: phase * (letters[0] x letters[1] x ...).
struct PauliOp {
    Phase phase;
    std::vector<PauliLetter> letters;

    size_t n() const { return letters.size(); }
    static PauliOp identity(size_t n) { return {Phase::one(), std::vector<PauliLetter>(n, PauliLetter::I)}; }
    bool operator==(const PauliOp &) const = default;

    /// "+XXZIY", "-iYZI": phase prefix in {+, -, +i, -i}, then letters.
    std::string str() const;
    static PauliOp from_str(std::string_view s);
};

/// Phaseless binary symplectic form: X -> (1|0), Z -> (0|1), Y -> (1|1).
struct BinSympPauli {
    BitString x, z;

    BinSympPauli() = default;
    BinSympPauli(BitString x_, BitString z_);
    explicit BinSympPauli(size_t n) : x(n), z(n) {}

    size_t n() const { return x.len(); }
    bool operator==(const BinSympPauli &) const = default;
    BinSympPauli operator^(const BinSympPauli &rhs) const { return {x ^ rhs.x, z ^ rhs.z}; }
    size_t weight() const { return pauli_union_weight(x, z); }
    /// Hamming weight of x plus Hamming weight of z (over-counts Y positions).
    size_t binary_weight() const { return x.popcount() + z.popcount(); }
    /// The 2n-bit (x|z) concatenation.
    BitString combined() const { return x.concat(z); }
};

/// Component-wise product with global phase accumulation.
PauliOp pauli_mul(const PauliOp &p, const PauliOp &q);

/// True iff the XOR over qubits of phi(P_i, Q_i) is 0.
bool commutes(const PauliOp &p, const PauliOp &q);

/// Letter-wise encoding; drops the phase.
BinSympPauli to_binsymp(const PauliOp &p);
/// Decodes with phase exponent 0.
PauliOp from_binsymp(const BinSympPauli &b);

/// dot(b1.x, b2.z) XOR dot(b1.z, b2.x); 0 means commute.
int symplectic_prod(const BinSympPauli &b1, const BinSympPauli &b2);

/// Count of non-I letters.
size_t pauli_weight(const PauliOp &p);

} // namespace qdist
