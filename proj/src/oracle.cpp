#include "qdist/oracle.hpp"

#include <algorithm>
#include <set>
#include <stdexcept>

#include "qdist/error.hpp"

namespace qdist {

namespace {

// Visit weight-w support index combinations in lexicographic order.
// Returns false once the visitor asks to stop.
template <typename F>
bool for_each_combination(size_t n, size_t w, F &&visit) {
    if (w > n) return true;
    std::vector<size_t> idx(w);
    for (size_t i = 0; i < w; i++) idx[i] = i;
    for (;;) {
        if (!visit(idx)) return false;
        size_t i = w;
        bool advanced = false;
        while (i-- > 0) {
            if (idx[i] + (w - i) <= n - 1) {
                idx[i]++;
                for (size_t j = i + 1; j < w; j++) idx[j] = idx[j - 1] + 1;
                advanced = true;
                break;
            }
        }
        if (!advanced) return true;
    }
}

} // namespace

DistanceResult exact_distance_bsm(const BinSympMatrix &b) {
    size_t n = b.qubits();
    if (n > 12)
        throw std::invalid_argument("exact_distance_bsm: capped at n <= 12");
    if (!is_commuting(b))
        throw InvalidCodeError("exact_distance_bsm: generators do not commute");

    Gf2Rref rowspace(b.combined());
    std::vector<BinSympPauli> rows;
    for (size_t i = 0; i < b.rows(); i++) rows.push_back(b.row(i));

    for (size_t w = 1; w <= n; w++) {
        DistanceResult found;
        bool stop = !for_each_combination(n, w, [&](const std::vector<size_t> &supp) {
            // letters per support position: 0 = X, 1 = Y, 2 = Z
            std::vector<int> letter(w, 0);
            for (;;) {
                BinSympPauli e(n);
                for (size_t i = 0; i < w; i++) {
                    if (letter[i] != 2) e.x.set(supp[i], true); // X or Y
                    if (letter[i] != 0) e.z.set(supp[i], true); // Y or Z
                }
                bool ok = true;
                for (const auto &r : rows)
                    if (symplectic_prod(r, e)) {
                        ok = false;
                        break;
                    }
                if (ok && !rowspace.contains(e.combined())) {
                    found.value = w;
                    found.witness_pauli = e;
                    return false;
                }
                size_t i = w;
                while (i-- > 0) {
                    if (++letter[i] < 3) break;
                    letter[i] = 0;
                    if (i == 0) return true; // letters exhausted for this support
                }
            }
        });
        if (stop) return found;
    }
    DistanceResult out;
    out.value = n + 1;
    out.sentinel = true;
    return out;
}

DistanceResult exact_sector_distance(const Gf2Matrix &stab, const Gf2Matrix &excl_space,
                                     size_t max_weight) {
    if (stab.cols() != excl_space.cols())
        throw std::invalid_argument("exact_sector_distance: column mismatch");
    size_t n = stab.cols();
    if (n > 30)
        throw std::invalid_argument("exact_sector_distance: capped at n <= 30");

    Gf2Rref excl(excl_space);
    size_t cap = std::min(max_weight, n);
    for (size_t w = 1; w <= cap; w++) {
        DistanceResult found;
        bool stop = !for_each_combination(n, w, [&](const std::vector<size_t> &supp) {
            BitString e(n);
            for (size_t i : supp) e.set(i, true);
            for (size_t r = 0; r < stab.rows(); r++)
                if (dot(stab.row(r), e)) return true;
            if (excl.contains(e)) return true;
            found.value = w;
            found.witness_vector = e;
            return false;
        });
        if (stop) return found;
    }
    DistanceResult out;
    out.value = n + 1;
    out.sentinel = true;
    return out;
}

size_t pauli_level_distance(const BinSympMatrix &b) {
    size_t n = b.qubits();
    if (n > 3)
        throw std::invalid_argument("pauli_level_distance: capped at n <= 3");

    std::vector<PauliOp> gens;
    for (size_t i = 0; i < b.rows(); i++) gens.push_back(from_binsymp(b.row(i)));

    // closure of the generated group, tracked by letter strings only
    std::set<std::vector<PauliLetter>> group_letters;
    std::vector<PauliOp> frontier{PauliOp::identity(n)};
    group_letters.insert(frontier[0].letters);
    while (!frontier.empty()) {
        PauliOp cur = std::move(frontier.back());
        frontier.pop_back();
        for (const auto &g : gens) {
            PauliOp next = pauli_mul(cur, g);
            if (group_letters.insert(next.letters).second) frontier.push_back(next);
        }
    }

    size_t best = n + 1;
    std::vector<PauliLetter> letters(n, PauliLetter::I);
    for (;;) {
        PauliOp e{Phase::one(), letters};
        bool in_normalizer = true;
        for (const auto &g : gens)
            if (!commutes(e, g)) {
                in_normalizer = false;
                break;
            }
        if (in_normalizer && !group_letters.count(e.letters))
            best = std::min(best, pauli_weight(e));

        size_t i = n;
        bool done = true;
        while (i-- > 0) {
            int next = (static_cast<int>(letters[i]) + 1) % 4;
            letters[i] = static_cast<PauliLetter>(next);
            if (next != 0) {
                done = false;
                break;
            }
        }
        if (done) break;
    }
    return best;
}

} // namespace qdist
