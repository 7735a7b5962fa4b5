#include "qdist/pauli.hpp"

#include <array>
#include <stdexcept>

namespace qdist {

char letter_char(PauliLetter p) { return "IXYZ"[static_cast<int>(p)]; }

PauliLetter letter_from_char(char c) {
    switch (c) {
        case 'I': return PauliLetter::I;
        case 'X': return PauliLetter::X;
        case 'Y': return PauliLetter::Y;
        case 'Z': return PauliLetter::Z;
        default: throw std::invalid_argument(std::string("not a Pauli letter: ") + c);
    }
}

std::string Phase::str() const {
    static const char *names[4] = {"+", "+i", "-", "-i"};
    return names[exponent % 4];
}

int phi(PauliLetter p, PauliLetter q) {
    if (p == PauliLetter::I || q == PauliLetter::I || p == q) return 0;
    return 1;
}

namespace {

// Single-qubit products, derived from the 2x2 matrices: entry [p][q] is the
// letter of p*q and the exponent e with p*q = i^e * letter. Validated against
// the exact matrix oracle in the test suite (e.g. XZ = -iY, ZX = +iY).
constexpr PauliLetter kMulLetter[4][4] = {
    /* I */ {PauliLetter::I, PauliLetter::X, PauliLetter::Y, PauliLetter::Z},
    /* X */ {PauliLetter::X, PauliLetter::I, PauliLetter::Z, PauliLetter::Y},
    /* Y */ {PauliLetter::Y, PauliLetter::Z, PauliLetter::I, PauliLetter::X},
    /* Z */ {PauliLetter::Z, PauliLetter::Y, PauliLetter::X, PauliLetter::I},
};
constexpr uint8_t kMulPhaseExp[4][4] = {
    /* I */ {0, 0, 0, 0},
    /* X */ {0, 0, 1, 3}, // XY = iZ, XZ = -iY
    /* Y */ {0, 3, 0, 1}, // YX = -iZ, YZ = iX
    /* Z */ {0, 1, 3, 0}, // ZX = iY, ZY = -iX
};

} // namespace

PauliOp pauli_mul(const PauliOp &p, const PauliOp &q) {
    if (p.n() != q.n())
        throw std::invalid_argument("pauli_mul: length mismatch");
    PauliOp out;
    out.phase = p.phase * q.phase;
    out.letters.reserve(p.n());
    for (size_t i = 0; i < p.n(); i++) {
        int a = static_cast<int>(p.letters[i]), b = static_cast<int>(q.letters[i]);
        out.letters.push_back(kMulLetter[a][b]);
        out.phase = out.phase * Phase{kMulPhaseExp[a][b]};
    }
    return out;
}

bool commutes(const PauliOp &p, const PauliOp &q) {
    if (p.n() != q.n())
        throw std::invalid_argument("commutes: length mismatch");
    int acc = 0;
    for (size_t i = 0; i < p.n(); i++) acc ^= phi(p.letters[i], q.letters[i]);
    return acc == 0;
}

BinSympPauli::BinSympPauli(BitString x_, BitString z_) : x(std::move(x_)), z(std::move(z_)) {
    if (x.len() != z.len())
        throw std::invalid_argument("BinSympPauli: x/z length mismatch");
}

BinSympPauli to_binsymp(const PauliOp &p) {
    BinSympPauli out(p.n());
    for (size_t i = 0; i < p.n(); i++) {
        switch (p.letters[i]) {
            case PauliLetter::I: break;
            case PauliLetter::X: out.x.set(i, true); break;
            case PauliLetter::Z: out.z.set(i, true); break;
            case PauliLetter::Y: out.x.set(i, true); out.z.set(i, true); break;
        }
    }
    return out;
}

PauliOp from_binsymp(const BinSympPauli &b) {
    PauliOp out = PauliOp::identity(b.n());
    for (size_t i = 0; i < b.n(); i++) {
        bool xi = b.x.get(i), zi = b.z.get(i);
        if (xi && zi)
            out.letters[i] = PauliLetter::Y;
        else if (xi)
            out.letters[i] = PauliLetter::X;
        else if (zi)
            out.letters[i] = PauliLetter::Z;
    }
    return out;
}

int symplectic_prod(const BinSympPauli &b1, const BinSympPauli &b2) {
    if (b1.n() != b2.n())
        throw std::invalid_argument("symplectic_prod: length mismatch");
    return dot(b1.x, b2.z) ^ dot(b1.z, b2.x);
}

size_t pauli_weight(const PauliOp &p) {
    size_t w = 0;
    for (PauliLetter l : p.letters)
        if (l != PauliLetter::I) w++;
    return w;
}

std::string PauliOp::str() const {
    std::string out = phase.str();
    for (PauliLetter l : letters) out.push_back(letter_char(l));
    return out;
}

PauliOp PauliOp::from_str(std::string_view s) {
    PauliOp out;
    if (s.starts_with("+i")) {
        out.phase = {1};
        s.remove_prefix(2);
    } else if (s.starts_with("-i")) {
        out.phase = {3};
        s.remove_prefix(2);
    } else if (s.starts_with("+")) {
        s.remove_prefix(1);
    } else if (s.starts_with("-")) {
        out.phase = {2};
        s.remove_prefix(1);
    }
    out.letters.reserve(s.size());
    for (char c : s) out.letters.push_back(letter_from_char(c));
    return out;
}

} // namespace qdist
