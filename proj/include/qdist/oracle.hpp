#pragma once

#include <optional>

#include "qdist/code.hpp"
#include "qdist/gf2.hpp"
#include "qdist/pauli.hpp"

namespace qdist {

struct DistanceResult {
    size_t value = 0;
    bool sentinel = false; // value == n+1, no undetectable error exists
    std::optional<BinSympPauli> witness_pauli;
    std::optional<BitString> witness_vector;
};

/// Exact distance by weight-ordered enumeration over all Pauli errors:
/// supports in lexicographic order, letters X < Y < Z per qubit. Requires
/// is_commuting(b) and n <= 12 (the scan is 3^w * C(n,w) per weight).
DistanceResult exact_distance_bsm(const BinSympMatrix &b);

/// Exact sector distance: the minimum Hamming weight of a binary E with
/// stab * E = 0 that lies outside the row space of excl_space. Enumerates
/// by increasing weight up to max_weight; n <= 30 enforced.
DistanceResult exact_sector_distance(const Gf2Matrix &stab, const Gf2Matrix &excl_space,
                                     size_t max_weight = SIZE_MAX);

/// Distance recomputed at the symbolic Pauli level (normalizer minus the
/// letters of the generated row group), for n <= 3. Returns n+1 when the
/// undetectable set is empty. Must agree with exact_distance_bsm.
size_t pauli_level_distance(const BinSympMatrix &b);

} // namespace qdist
