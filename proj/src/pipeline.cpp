#include "qdist/pipeline.hpp"

#include <chrono>
#include <filesystem>
#include <fstream>
#include <future>
#include <sstream>

#include "qdist/cert.hpp"
#include "qdist/error.hpp"
#include "qdist/oracle.hpp"

namespace qdist {

namespace fs = std::filesystem;

json Report::to_json() const {
    json j;
    j["code"] = {{"name", code_name}, {"n", n}};
    if (k) j["code"]["k"] = *k;
    if (claimed) j["code"]["claimed"] = {{"k", claimed->k}, {"d", claimed->d}};
    if (!validation.empty()) j["validation"] = validation;
    json runs = json::array();
    for (const auto &s : sectors) {
        json r{{"sector", std::string(1, s.sector)},
               {"weight_bound", s.weight_bound},
               {"outcome", s.outcome},
               {"backend", s.backend},
               {"wall_seconds", s.wall_seconds}};
        if (!s.cert_path.empty()) r["certificate"] = s.cert_path;
        if (!s.cert_status.empty()) r["certificate_status"] = s.cert_status;
        if (s.witness) r["witness"] = s.witness->to_hex();
        if (!s.detail.empty()) r["detail"] = s.detail;
        runs.push_back(std::move(r));
    }
    if (!runs.empty()) j["sectors"] = runs;
    j["distance"] = json{{"status", status}};
    if (distance_value) {
        j["distance"]["value"] = *distance_value;
        j["distance"]["sentinel"] = sentinel;
    }
    if (!toolchain.empty()) j["toolchain"] = toolchain;
    return j;
}

ExitCode Report::exit_code() const {
    if (status == "validated" || status == "proven-lower-bound" || status == "exact")
        return ExitCode::Proven;
    if (status == "refuted") return ExitCode::Refuted;
    if (status == "invalid") return ExitCode::InvalidInput;
    return ExitCode::Unknown;
}

namespace {

// Certified kernel generators for the sector's excluded row space.
Gf2Matrix sector_kernel(const Gf2Matrix &m, const std::optional<Gf2Matrix> &supplied,
                        const char *label) {
    Gf2Matrix ker = supplied ? *supplied : kernel_basis(m);
    size_t r = rank(m);
    KernelCertificate cert = certify_kernel(m, ker, r, m.cols() - r);
    if (!cert.certified) {
        if (supplied)
            throw InvalidCodeError(std::string("supplied kernel for ") + label +
                                   " failed certification: " + cert.reason);
        throw SoundnessError(std::string("computed kernel for ") + label +
                             " failed certification: " + cert.reason);
    }
    return ker;
}

} // namespace

DistanceQuery sector_query(const CssCode &code, char sector, size_t weight_bound) {
    DistanceQuery q;
    q.n = code.n;
    q.weight_bound = weight_bound;
    if (sector == 'x') {
        q.stab_rows = code.hz;
        q.excl_gens = sector_kernel(code.hx, code.ker_hx, "hx");
    } else if (sector == 'z') {
        q.stab_rows = code.hx;
        q.excl_gens = sector_kernel(code.hz, code.ker_hz, "hz");
    } else {
        throw std::invalid_argument("sector must be 'x' or 'z'");
    }
    return q;
}

EncodedQuery encode_query(const DistanceQuery &q, PipelineOptions::EncodingChoice choice) {
    using EC = PipelineOptions::EncodingChoice;
    if (choice == EC::PerBit || (choice == EC::Auto && q.n <= 40)) return encode_perbit(q);
    return encode_location(q);
}

std::string cnf_cache_key(const std::string &dimacs) {
    uint64_t h = 1469598103934665603ULL;
    for (unsigned char c : dimacs) {
        h ^= c;
        h *= 1099511628211ULL;
    }
    char buf[32];
    snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return std::string(buf) + "-" + std::to_string(dimacs.size());
}

SectorRun solve_sector(const EncodedQuery &enc, const DistanceQuery &q, char sector,
                       const PipelineOptions &opt) {
    SectorRun run;
    run.sector = sector;
    run.weight_bound = q.weight_bound;
    auto t0 = std::chrono::steady_clock::now();

    std::string dimacs = write_dimacs(enc.cnf);
    fs::path entry;
    if (!opt.cache_dir.empty()) {
        entry = fs::path(opt.cache_dir) / cnf_cache_key(dimacs);
        fs::path outcome_file = entry / "outcome.json";
        if (fs::exists(outcome_file)) {
            json j = read_json_file(outcome_file.string());
            run.backend = "cache";
            run.outcome = j.at("status").get<std::string>();
            if (run.outcome == "sat") {
                std::vector<bool> model(enc.cnf.num_vars + 1, false);
                for (int lit : j.at("model").get<std::vector<int>>())
                    if (lit > 0 && lit <= enc.cnf.num_vars) model[lit] = true;
                if (!verify_model(enc.cnf, model))
                    throw SoundnessError("cached model fails verification");
                run.witness = decode_witness(model, enc.vm, q);
            } else if (run.outcome == "unsat" && j.contains("proof")) {
                run.cert_path = (entry / j.at("proof").get<std::string>()).string();
                if (opt.check_certificates) {
                    std::ifstream pf(run.cert_path);
                    auto res = check_lrat_stream(enc.cnf, pf);
                    run.cert_status = res.accepted ? "accepted" : "rejected: " + res.reason;
                    if (!res.accepted)
                        throw SoundnessError("cached certificate rejected: " + res.reason);
                }
            }
            run.wall_seconds =
                std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
            return run;
        }
    }

    SolverConfig cfg = opt.solver;
    if (opt.check_certificates) cfg.produce_proof = true;
    SolveOutcome outcome = solve(enc.cnf, cfg);
    run.backend = cfg.backend == SolverConfig::Backend::External ? "external" : "internal";

    switch (outcome.status) {
        case SolveOutcome::Status::Sat: {
            run.outcome = "sat";
            run.witness = decode_witness(outcome.model, enc.vm, q);
            break;
        }
        case SolveOutcome::Status::Unsat: {
            run.outcome = "unsat";
            if (opt.check_certificates) {
                if (outcome.proof.empty() && outcome.proof_path.empty()) {
                    run.cert_status = "missing";
                } else {
                    CertCheckResult res;
                    if (!outcome.proof_path.empty()) {
                        std::ifstream pf(outcome.proof_path);
                        res = check_lrat_stream(enc.cnf, pf);
                    } else {
                        std::istringstream ps(outcome.proof);
                        res = check_lrat_stream(enc.cnf, ps);
                    }
                    run.cert_status = res.accepted ? "accepted" : "rejected: " + res.reason;
                    if (!res.accepted)
                        throw SoundnessError("solver certificate rejected: " + res.reason);
                }
            }
            break;
        }
        case SolveOutcome::Status::Unknown: {
            run.outcome = "unknown";
            run.detail = outcome.detail;
            break;
        }
    }

    if (!entry.empty() && run.outcome != "unknown") {
        fs::create_directories(entry);
        write_file_atomic((entry / "query.cnf").string(), dimacs);
        write_file_atomic((entry / "varmap.json").string(), varmap_to_json(enc.vm).dump(2) + "\n");
        json oj{{"status", run.outcome}};
        if (run.outcome == "sat") {
            std::vector<int> lits;
            for (int v = 1; v <= enc.cnf.num_vars; v++)
                if (outcome.model[v]) lits.push_back(v);
            oj["model"] = lits;
        } else if (!outcome.proof.empty()) {
            write_file_atomic((entry / "proof.lrat").string(), outcome.proof);
            oj["proof"] = "proof.lrat";
            run.cert_path = (entry / "proof.lrat").string();
        } else if (!outcome.proof_path.empty()) {
            fs::path dest = entry / "proof.lrat";
            std::error_code ec;
            fs::rename(outcome.proof_path, dest, ec);
            if (ec) { // cross-device: fall back to copy
                fs::copy_file(outcome.proof_path, dest, fs::copy_options::overwrite_existing);
                fs::remove(outcome.proof_path);
            }
            outcome.proof_path.clear();
            oj["proof"] = "proof.lrat";
            run.cert_path = dest.string();
        }
        write_file_atomic((entry / "outcome.json").string(), oj.dump(2) + "\n");
    }
    if (!outcome.proof_path.empty()) fs::remove(outcome.proof_path);

    run.wall_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return run;
}

namespace {

json toolchain_json(const PipelineOptions &opt) {
    using EC = PipelineOptions::EncodingChoice;
    return json{{"seed", opt.solver.seed},
                {"backend",
                 opt.solver.backend == SolverConfig::Backend::External ? "external" : "internal"},
                {"encoding", opt.encoding == EC::PerBit     ? "perbit"
                             : opt.encoding == EC::Location ? "location"
                                                            : "auto"},
                {"certificates", opt.check_certificates}};
}

// Run both sector queries at one weight bound, optionally in parallel.
std::pair<SectorRun, SectorRun> run_sector_pair(const CssCode &code, size_t w,
                                                const PipelineOptions &opt) {
    DistanceQuery qx = sector_query(code, 'x', w);
    DistanceQuery qz = sector_query(code, 'z', w);
    EncodedQuery ex = encode_query(qx, opt.encoding);
    EncodedQuery ez = encode_query(qz, opt.encoding);
    if (opt.parallel_sectors) {
        auto fx = std::async(std::launch::async,
                             [&] { return solve_sector(ex, qx, 'x', opt); });
        SectorRun rz = solve_sector(ez, qz, 'z', opt);
        SectorRun rx = fx.get();
        return {std::move(rx), std::move(rz)};
    }
    return {solve_sector(ex, qx, 'x', opt), solve_sector(ez, qz, 'z', opt)};
}

} // namespace

Report run_validate(const CssCode &code) {
    Report rep;
    rep.code_name = code.name;
    rep.n = code.n;
    rep.claimed = code.claimed;
    rep.status = "validated";

    json &v = rep.validation;
    bool orth = mutually_orth(code.hx, code.hz);
    v["mutually_orth"] = orth;
    if (!orth) {
        rep.status = "invalid";
        return rep;
    }
    size_t rx = rank(code.hx), rz = rank(code.hz);
    v["rank_hx"] = rx;
    v["rank_hz"] = rz;
    v["hx_flat"] = flatten(code.hx).to_hex();
    v["hz_flat"] = flatten(code.hz).to_hex();
    rep.k = code.n - rx - rz;

    auto check_kernel = [&](const Gf2Matrix &m, const std::optional<Gf2Matrix> &supplied,
                            size_t r, const char *label) {
        Gf2Matrix ker = supplied ? *supplied : kernel_basis(m);
        KernelCertificate cert = certify_kernel(m, ker, r, code.n - r);
        v[std::string("kernel_") + label] =
            json{{"supplied", supplied.has_value()},
                 {"rows", ker.rows()},
                 {"certified", cert.certified},
                 {"r1", cert.matrix_rank_bound},
                 {"r2", cert.kernel_rank_bound}};
        if (!cert.certified) {
            v[std::string("kernel_") + label]["reason"] = cert.reason;
            if (!supplied)
                throw SoundnessError(std::string("computed kernel for ") + label +
                                     " failed certification: " + cert.reason);
            rep.status = "invalid";
        }
    };
    check_kernel(code.hx, code.ker_hx, rx, "hx");
    check_kernel(code.hz, code.ker_hz, rz, "hz");

    if (code.claimed && code.claimed->k >= 0 && size_t(code.claimed->k) != *rep.k) {
        v["claimed_k_matches"] = false;
        rep.status = "invalid";
    } else if (code.claimed) {
        v["claimed_k_matches"] = true;
    }
    return rep;
}

Report run_distance(const CssCode &code, size_t d, const PipelineOptions &opt) {
    Report rep;
    rep.code_name = code.name;
    rep.n = code.n;
    rep.claimed = code.claimed;
    rep.toolchain = toolchain_json(opt);
    if (d < 1) throw std::invalid_argument("distance bound must be >= 1");
    if (d == 1) {
        // undetectable errors have weight >= 1, so distance >= 1 always
        rep.status = "proven-lower-bound";
        rep.distance_value = 1;
        return rep;
    }

    auto [rx, rz] = run_sector_pair(code, d - 1, opt);
    rep.sectors = {rx, rz};
    if (rx.outcome == "sat" || rz.outcome == "sat") {
        rep.status = "refuted";
        const SectorRun &sat_run = rx.outcome == "sat" ? rx : rz;
        rep.distance_value = sat_run.witness ? sat_run.witness->popcount() : d - 1;
    } else if (rx.outcome == "unsat" && rz.outcome == "unsat") {
        rep.status = "proven-lower-bound";
        rep.distance_value = d;
    } else {
        rep.status = "unknown";
    }
    return rep;
}

Report run_exact(const CssCode &code, const PipelineOptions &opt) {
    Report rep;
    rep.code_name = code.name;
    rep.n = code.n;
    rep.claimed = code.claimed;
    rep.toolchain = toolchain_json(opt);

    bool use_oracle = opt.method == "oracle";
    std::optional<size_t> oracle_value;
    if (opt.method != "sat" && code.n <= 12) {
        // sector distances: X errors check against hz, excluded by hx rowspace
        DistanceResult dx = exact_sector_distance(code.hz, code.hx, SIZE_MAX);
        DistanceResult dz = exact_sector_distance(code.hx, code.hz, SIZE_MAX);
        oracle_value = std::min(dx.value, dz.value);
    }
    if (use_oracle) {
        if (!oracle_value)
            throw std::invalid_argument("oracle method needs n <= 12");
        rep.status = "exact";
        rep.distance_value = *oracle_value;
        rep.sentinel = *oracle_value == code.n + 1;
        rep.toolchain["method"] = "oracle";
        return rep;
    }

    for (size_t w = 1; w <= code.n; w++) {
        auto [rx, rz] = run_sector_pair(code, w, opt);
        rep.sectors.push_back(rx);
        rep.sectors.push_back(rz);
        if (rx.outcome == "unknown" || rz.outcome == "unknown") {
            rep.status = "unknown";
            return rep;
        }
        if (rx.outcome == "sat" || rz.outcome == "sat") {
            rep.status = "exact";
            rep.distance_value = w;
            if (oracle_value && *oracle_value != w)
                throw SoundnessError("SAT-bracketed distance " + std::to_string(w) +
                                     " disagrees with oracle " + std::to_string(*oracle_value));
            return rep;
        }
    }
    rep.status = "exact";
    rep.distance_value = code.n + 1;
    rep.sentinel = true;
    if (oracle_value && *oracle_value != code.n + 1)
        throw SoundnessError("sentinel disagrees with oracle distance " +
                             std::to_string(*oracle_value));
    return rep;
}

} // namespace qdist
