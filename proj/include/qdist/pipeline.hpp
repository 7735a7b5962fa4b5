#pragma once

#include <optional>
#include <string>

#include "qdist/code.hpp"
#include "qdist/encode.hpp"
#include "qdist/json_io.hpp"
#include "qdist/solver.hpp"

namespace qdist {

/// CLI exit-code contract.
enum class ExitCode : int {
    Proven = 0, // proven / accepted / validated
    Refuted = 1,
    Unknown = 2,
    InvalidInput = 3,
    SoundnessFault = 4,
};

struct PipelineOptions {
    enum class EncodingChoice { Auto, PerBit, Location };

    EncodingChoice encoding = EncodingChoice::Auto;
    SolverConfig solver;
    bool check_certificates = false; // solve with proofs and re-check them
    std::string cache_dir;           // empty disables the on-disk cache
    std::string method = "auto";     // exact: "sat", "oracle", or "auto"
    bool parallel_sectors = true;
};

/// Per-sector solver verdict, as reported.
struct SectorRun {
    char sector = 'x';
    size_t weight_bound = 0;
    std::string outcome; // "sat" | "unsat" | "unknown"
    std::string backend; // "internal" | "external" | "cache"
    double wall_seconds = 0;
    std::string cert_path;
    std::string cert_status; // "accepted" | "rejected: ..." | "" (unchecked)
    std::optional<BitString> witness;
    std::string detail;
};

struct Report {
    std::string code_name;
    size_t n = 0;
    std::optional<size_t> k;
    std::optional<ClaimedParams> claimed;
    json validation = json::object();
    std::vector<SectorRun> sectors;
    std::string status; // "validated"|"proven-lower-bound"|"exact"|"refuted"|"unknown"|"invalid"
    std::optional<size_t> distance_value;
    bool sentinel = false;
    json toolchain = json::object();

    json to_json() const;
    ExitCode exit_code() const;
};

/// The sector query: X errors check against hz rows and must escape the
/// row space of hx (via its kernel generators); symmetrically for Z.
DistanceQuery sector_query(const CssCode &code, char sector, size_t weight_bound);

/// Pick per the options: Auto = per-bit at n <= 40, location above.
EncodedQuery encode_query(const DistanceQuery &q, PipelineOptions::EncodingChoice choice);

/// Orthogonality, ranks, k, kernel certification (computing kernels when
/// the file does not supply them), claimed-parameter consistency.
Report run_validate(const CssCode &code);

/// Prove distance >= d (UNSAT at w = d-1 on both sectors), or refute with
/// a re-checked witness.
Report run_distance(const CssCode &code, size_t d, const PipelineOptions &opt);

/// Ascending scan bracketing the exact distance; oracle route for tiny n.
Report run_exact(const CssCode &code, const PipelineOptions &opt);

/// Solve one encoded query, using the content-addressed cache when enabled.
SectorRun solve_sector(const EncodedQuery &enc, const DistanceQuery &q, char sector,
                       const PipelineOptions &opt);

/// FNV-1a over the DIMACS bytes; the cache key.
std::string cnf_cache_key(const std::string &dimacs);

} // namespace qdist
