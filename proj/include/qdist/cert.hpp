#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

#include "qdist/encode.hpp"

namespace qdist {

/// One LRAT proof step. Additions carry the new clause and its
/// unit-propagation hints (negative hint ids open RAT resolvent groups);
/// deletions drop clauses from the live set.
struct LratLine {
    enum class Kind { Add, Delete };
    Kind kind = Kind::Add;
    int64_t id = 0;
    std::vector<int> clause;         // Add only
    std::vector<int64_t> hints;      // Add only; signed
    std::vector<int64_t> delete_ids; // Delete only
};

struct LratProof {
    std::vector<LratLine> lines;
};

/// Parse textual LRAT. Addition grammar "<id> <lit>* 0 <hint>* 0",
/// deletion grammar "<id> d <id>* 0". Checks syntax and strictly
/// increasing addition ids; throws ParseError with the line number.
LratProof parse_lrat(std::string_view text);

/// As above, and also validates that every hint and deletion references a
/// clause id that exists and has not been deleted, given that ids
/// 1..num_original_clauses name the formula's clauses.
LratProof parse_lrat(std::string_view text, size_t num_original_clauses);

struct CertCheckResult {
    bool accepted = false;
    std::string reason;   // empty when accepted
    int64_t line_id = 0;  // offending addition id when rejected mid-proof
    size_t clauses_added = 0;
    size_t clauses_deleted = 0;
};

/// Replay the proof against the formula: every addition must be derivable
/// by hint-guided unit propagation (RUP, with the RAT extension per the
/// LRAT format), and some addition must introduce the empty clause.
/// Acceptance implies the formula is unsatisfiable. Hints are mandatory;
/// the checker is strict: every positive hint must be unit when processed
/// and the final hint of a propagation must yield the conflict.
CertCheckResult check_lrat(const Cnf &c, const LratProof &p);

/// Same semantics, parsing and checking one line at a time, so proofs far
/// larger than memory can be replayed straight from disk.
CertCheckResult check_lrat_stream(const Cnf &c, std::istream &in);

/// Canonical single-space rendering; parse(render(p)) == p.
std::string render_lrat(const LratProof &p);

} // namespace qdist
