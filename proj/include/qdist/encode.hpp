#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "qdist/gf2.hpp"

namespace qdist {

/// A CNF clause database. Literals are nonzero ints, 1-based variables,
/// sign = polarity. Clauses may not be empty or tautological.
struct Cnf {
    int num_vars = 0;
    std::vector<std::vector<int>> clauses;

    int new_var() { return ++num_vars; }
    void add_clause(std::vector<int> lits);

    bool operator==(const Cnf &) const = default;
};

/// "Does an undetectable sector error of weight <= weight_bound exist?"
/// Every stab row must have dot product 0 with E; at least one excl
/// generator must have dot product 1 (E outside the excluded row space).
struct DistanceQuery {
    size_t n = 0;
    Gf2Matrix stab_rows;
    Gf2Matrix excl_gens;
    size_t weight_bound = 1;

    void validate() const;
};

/// Where each semantic variable landed in the CNF. Variables >= first_aux
/// are auxiliaries; everything before is the deterministic role layout.
struct VarMap {
    enum class Encoding { PerBit, Location };

    Encoding encoding = Encoding::PerBit;
    size_t n = 0;
    size_t w = 0;
    size_t loc_bits = 0;                 // location encoding only
    std::vector<int> error_vars;         // per-bit: E_j, j = 0..n-1
    std::vector<std::vector<int>> loc_vars; // location: [slot][bit], LSB first
    std::vector<int> flag_vars;          // location: first-occurrence flags
    std::vector<int> excl_selectors;     // t_g, one per exclusion generator
    int first_aux = 0;

    /// The encoding's independent variables: n for per-bit, w*loc_bits for
    /// location (flags and selectors are determined by these).
    size_t independent_var_count() const;
};

struct EncodedQuery {
    Cnf cnf;
    VarMap vm;
    /// Set when the query has no exclusion generators: nothing can pass the
    /// empty disjunction, so the CNF is a stock unsatisfiable placeholder.
    bool trivially_unsat = false;
};

/// Append CNF equisatisfiable with "XOR of lits = parity". Literal lists of
/// size <= 3 expand directly (<= 4 clauses); longer chains introduce one
/// fresh auxiliary per 3-input XOR gadget.
void xor_clauses(Cnf &cnf, std::vector<int> lits, int parity);

/// Sequential-counter at-most-k over the given literals.
void at_most_k(Cnf &cnf, std::span<const int> lits, size_t k);

/// One Boolean per qubit: E_1..E_n, stabilizer XOR rows, exclusion
/// selectors t_g with their disjunction, and a cardinality bound.
EncodedQuery encode_perbit(const DistanceQuery &q);

struct LocationOptions {
    /// Rows with support up to this size use equality-based support
    /// enumeration for s[L_i]; denser rows use a Shannon mux over L_i's bits.
    size_t support_threshold = 16;
    /// Emit the L_i <= L_{i+1} symmetry-breaking clauses. Turning this off
    /// never changes satisfiability; it exists so that claim can be tested.
    bool sort_slots = true;
};

/// Location-indexed encoding: weight_bound sorted location slots of
/// ceil(log2 n) bits each, first-occurrence flags, and per-row XOR over
/// slot contributions. Requires n >= 1.
EncodedQuery encode_location(const DistanceQuery &q, const LocationOptions &opt = {});

/// Variables c_1..c_k; satisfiable iff the rows of m are linearly dependent.
Cnf encode_independence(const Gf2Matrix &m);

std::string write_dimacs(const Cnf &c);
Cnf parse_dimacs(std::string_view text);

} // namespace qdist
