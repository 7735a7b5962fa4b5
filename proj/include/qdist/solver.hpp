#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "qdist/encode.hpp"
#include "qdist/gf2.hpp"

namespace qdist {

struct SolverConfig {
    enum class Backend { Internal, External };

    Backend backend = Backend::Internal;
    std::string external_path;              // solver executable
    std::vector<std::string> external_args; // extra args before the CNF path
    double timeout_seconds = 0;             // 0 = no limit
    bool produce_proof = false;
    uint64_t seed = 0;
};

struct SolveOutcome {
    enum class Status { Sat, Unsat, Unknown };
    enum class UnknownReason { Timeout, SolverError };

    Status status = Status::Unknown;
    /// Sat only: model[v] for v in 1..num_vars (index 0 unused).
    std::vector<bool> model;
    /// Unsat only: LRAT text when the backend produced a proof.
    std::string proof;
    /// Unsat only: set instead of `proof` when an external proof is too
    /// large to hold in memory. The caller owns (and removes) the file.
    std::string proof_path;
    UnknownReason reason = UnknownReason::SolverError;
    std::string detail;

    bool is_sat() const { return status == Status::Sat; }
    bool is_unsat() const { return status == Status::Unsat; }
};

/// Solve with the configured backend. Sat models are verified against the
/// CNF before being returned; the backends are never trusted blindly.
///
/// The internal backend is a conflict-driven solver (watched literals,
/// first-UIP learning, activity-based branching with decay, Luby restarts)
/// that can emit LRAT proofs directly. The external backend writes DIMACS
/// to a temp file, runs the executable, and parses the standard
/// "s SATISFIABLE"/"s UNSATISFIABLE" + "v ..." output; with produce_proof
/// the proof file path is passed as the final argument.
SolveOutcome solve(const Cnf &c, const SolverConfig &cfg);

/// True iff every clause has at least one true literal. The model must
/// assign all variables (model.size() == num_vars + 1).
bool verify_model(const Cnf &c, const std::vector<bool> &model);

/// Reconstruct the error vector from a verified model and re-check it
/// directly against the query (weight in [1, w], orthogonal to every stab
/// row, dot 1 with some exclusion generator). A failed re-check throws
/// SoundnessError: it would mean the encoder and solver disagree.
BitString decode_witness(const std::vector<bool> &model, const VarMap &vm,
                         const DistanceQuery &q);

} // namespace qdist
