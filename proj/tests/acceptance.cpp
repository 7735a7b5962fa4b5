// Acceptance suite: one pass/fail line per criterion, nonzero exit on any
// failure. Criterion 7's solver run is an extended test (hours of budget);
// it runs only when QDIST_EXTERNAL_SOLVER or QDIST_RUN_EXTENDED is set and
// reports SKIPPED otherwise.

#include <chrono>
#include <cstdlib>
#include <iostream>
#include <map>
#include <random>
#include <set>
#include <sstream>
#include <vector>

#include "qdist/cert.hpp"
#include "qdist/error.hpp"
#include "qdist/oracle.hpp"
#include "qdist/pipeline.hpp"
#include "support/enumeration.hpp"
#include "support/fixtures.hpp"
#include "support/gaussian_oracle.hpp"

using namespace qdist;
using namespace qdist::testing;

namespace {

int failures = 0;

class Criterion {
  public:
    Criterion(int number, std::string title)
        : number_(number), title_(std::move(title)), start_(std::chrono::steady_clock::now()) {}

    void check(bool ok, const std::string &what) {
        if (!ok) {
            problems_.push_back(what);
        }
    }

    void finish() {
        double secs =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
        char timing[32];
        snprintf(timing, sizeof timing, "%.2fs", secs);
        if (problems_.empty()) {
            std::cout << "criterion " << number_ << ": PASS — " << title_ << " (" << timing
                      << ")\n";
        } else {
            failures++;
            std::cout << "criterion " << number_ << ": FAIL — " << title_ << " (" << timing
                      << ")\n";
            for (const auto &p : problems_) std::cout << "    " << p << "\n";
        }
    }

  private:
    int number_;
    std::string title_;
    std::chrono::steady_clock::time_point start_;
    std::vector<std::string> problems_;
};

SolveOutcome solve_with_proof(const Cnf &c) {
    SolverConfig cfg;
    cfg.produce_proof = true;
    return solve(c, cfg);
}

bool proof_accepted(const Cnf &c, const std::string &proof) {
    return check_lrat(c, parse_lrat(proof, c.clauses.size())).accepted;
}

// Independent re-implementation of strict hint-guided RUP replay (RUP lines
// only), used to sort mutants into "valid alternative proof" vs "corrupted".
// A single-token mutation occasionally lands on another clause that drives
// the same conflict; such mutants are real proofs and are excluded from the
// must-reject corpus.
bool mini_lrat_valid(const Cnf &cnf, const std::string &text) {
    std::map<long, std::vector<int>> db;
    for (size_t i = 0; i < cnf.clauses.size(); i++) db[long(i) + 1] = cnf.clauses[i];
    long last_add = long(cnf.clauses.size());
    std::istringstream ss(text);
    long id;
    bool empty_added = false;
    while (ss >> id) {
        std::string tok;
        if (!(ss >> tok)) return false;
        if (tok == "d") {
            long del;
            while (ss >> del && del != 0)
                if (!db.erase(del)) return false;
            continue;
        }
        if (id <= last_add) return false;
        std::vector<int> clause;
        long lit = std::strtol(tok.c_str(), nullptr, 10);
        while (lit != 0) {
            clause.push_back(int(lit));
            if (!(ss >> lit)) return false;
        }
        std::map<int, int> assign; // var -> value
        bool contradiction = false;
        for (int l : clause) {
            int v = std::abs(l), want = l > 0 ? -1 : 1;
            auto it = assign.find(v);
            if (it != assign.end() && it->second != want) contradiction = true;
            assign[v] = want;
        }
        if (contradiction) return false;
        long hint;
        bool conflict = false;
        std::vector<long> hints;
        if (!(ss >> hint)) return false;
        while (hint != 0) {
            hints.push_back(hint);
            if (!(ss >> hint)) return false;
        }
        for (size_t hi = 0; hi < hints.size(); hi++) {
            if (hints[hi] < 0) return false; // no RAT lines in this corpus
            auto it = db.find(hints[hi]);
            if (it == db.end()) return false;
            int unassigned = 0, ulit = 0;
            bool sat = false;
            for (int l : it->second) {
                auto a = assign.find(std::abs(l));
                if (a == assign.end()) {
                    unassigned++;
                    ulit = l;
                } else if (a->second == (l > 0 ? 1 : -1)) {
                    sat = true;
                }
            }
            if (sat || unassigned > 1) return false;
            if (unassigned == 0) {
                if (hi + 1 != hints.size()) return false;
                conflict = true;
            } else {
                assign[std::abs(ulit)] = ulit > 0 ? 1 : -1;
            }
        }
        if (!conflict) return false;
        db[id] = clause;
        last_add = id;
        if (clause.empty()) empty_added = true;
        if (empty_added) break;
    }
    return empty_added;
}

// ---------------------------------------------------------------------------

void criterion1() {
    Criterion c(1, "flattening matches the published hex constants");
    c.check(flatten(steane_matrix()).to_hex() == "1d2d69", "steane matrix flatten");
    c.check(flatten(steane_kernel()).to_hex() == "8e94b0b", "steane kernel flatten");
    c.check(kernel_basis(steane_matrix()) == steane_kernel(),
            "canonical kernel equals the published one");
    c.finish();
}

void criterion2() {
    Criterion c(2, "steane end-to-end: validation, certificates, exact distance 3");
    CssCode code = steane_code();
    Report vr = run_validate(code);
    c.check(vr.status == "validated", "validation failed");
    c.check(certify_kernel(code.hx, steane_kernel(), 3, 4).certified,
            "kernel certification r1=3 r2=4");

    for (char sector : {'x', 'z'}) {
        DistanceQuery q2 = sector_query(code, sector, 2);
        EncodedQuery enc = encode_query(q2, PipelineOptions::EncodingChoice::Auto);
        SolveOutcome out = solve_with_proof(enc.cnf);
        c.check(out.is_unsat(), std::string(1, sector) + "-sector w=2 should be UNSAT");
        c.check(!out.proof.empty() && proof_accepted(enc.cnf, out.proof),
                std::string(1, sector) + "-sector w=2 LRAT not accepted");

        DistanceQuery q3 = sector_query(code, sector, 3);
        EncodedQuery enc3 = encode_query(q3, PipelineOptions::EncodingChoice::Auto);
        SolveOutcome out3 = solve(enc3.cnf, SolverConfig{});
        c.check(out3.is_sat(), std::string(1, sector) + "-sector w=3 should be SAT");
        if (out3.is_sat()) {
            BitString witness = decode_witness(out3.model, enc3.vm, q3);
            c.check(witness.popcount() == 3, "witness weight should be 3");
        }
    }

    PipelineOptions opt;
    opt.check_certificates = true;
    Report rep = run_exact(code, opt);
    c.check(rep.status == "exact" && rep.distance_value == 3, "exact distance should be 3");
    c.finish();
}

void criterion3() {
    Criterion c(3, "shor: oracle and SAT bracketing give exact distance 3");
    CssCode code = shor_code();
    DistanceResult oracle = exact_distance_bsm(code.to_bsm());
    c.check(oracle.value == 3, "bsm oracle distance");

    PipelineOptions opt;
    Report rep = run_exact(code, opt); // auto method cross-checks the oracle internally
    c.check(rep.status == "exact" && rep.distance_value == 3, "sat bracketing");

    // the worked-example X-sector CNF at w = 2 (kernel generators as printed)
    DistanceQuery q{9, shor_hz(), shor_gx(), 2};
    c.check(solve(encode_perbit(q).cnf, SolverConfig{}).is_unsat(),
            "worked-example CNF should be UNSAT");
    c.finish();
}

void criterion4() {
    Criterion c(4, "golay: UNSAT at w=6, SAT at w=7, exact distance 7");
    CssCode code = golay_code();
    c.check(run_validate(code).status == "validated", "validation");

    for (char sector : {'x', 'z'}) {
        DistanceQuery q6 = sector_query(code, sector, 6);
        EncodedQuery enc = encode_query(q6, PipelineOptions::EncodingChoice::Auto);
        SolveOutcome out = solve_with_proof(enc.cnf);
        c.check(out.is_unsat(), std::string(1, sector) + "-sector w=6 should be UNSAT");
        c.check(!out.proof.empty() && proof_accepted(enc.cnf, out.proof),
                std::string(1, sector) + "-sector w=6 LRAT not accepted");
    }
    DistanceQuery q7 = sector_query(code, 'x', 7);
    EncodedQuery enc7 = encode_query(q7, PipelineOptions::EncodingChoice::Auto);
    SolveOutcome out7 = solve(enc7.cnf, SolverConfig{});
    c.check(out7.is_sat(), "x-sector w=7 should be SAT");
    if (out7.is_sat())
        c.check(decode_witness(out7.model, enc7.vm, q7).popcount() == 7,
                "w=7 witness weight should be 7");
    c.finish();
}

void criterion5() {
    Criterion c(5, "SAT-bracketed distance equals the sector oracle on 200 random codes");
    std::mt19937_64 rng(20260809);
    PipelineOptions opt;
    opt.method = "sat";
    opt.parallel_sectors = false;
    int mismatches = 0, done = 0;
    for (int it = 0; done < 200; it++) {
        size_t n = 4 + rng() % 11; // 4..14
        CssCode code = random_css(rng, n, 1 + rng() % 4, 1 + rng() % 3);
        done++;
        DistanceResult dx = exact_sector_distance(code.hz, code.hx);
        DistanceResult dz = exact_sector_distance(code.hx, code.hz);
        size_t expect = std::min(dx.value, dz.value);
        Report rep = run_exact(code, opt);
        if (!rep.distance_value || *rep.distance_value != expect) mismatches++;
    }
    c.check(mismatches == 0,
            std::to_string(mismatches) + " of 200 codes disagreed with the oracle");
    c.finish();
}

void criterion6() {
    Criterion c(6, "per-bit and location encodings agree; 88 location variables at n=144");
    std::mt19937_64 rng(613);

    // exhaustive model-set equality at n <= 8, w <= 3
    int bad_sets = 0;
    for (int it = 0; it < 60; it++) {
        DistanceQuery q;
        q.n = 2 + rng() % 7; // 2..8
        q.stab_rows = random_matrix(rng, rng() % 4, q.n);
        q.excl_gens = random_matrix(rng, 1 + rng() % 3, q.n);
        q.weight_bound = 1 + rng() % 3;
        auto direct = direct_model_set(q);
        if (perbit_model_set(encode_perbit(q)) != direct) bad_sets++;
        if (location_model_set(encode_location(q), q) != direct) bad_sets++;
    }
    c.check(bad_sets == 0, std::to_string(bad_sets) + " model-set mismatches");

    // randomized SAT/UNSAT agreement up to n = 30
    int bad_verdicts = 0;
    for (int it = 0; it < 40; it++) {
        DistanceQuery q;
        q.n = 9 + rng() % 22; // 9..30
        q.stab_rows = random_matrix(rng, 1 + rng() % 6, q.n, 0.3);
        q.excl_gens = random_matrix(rng, 1 + rng() % 4, q.n, 0.3);
        q.weight_bound = 1 + rng() % 4;
        bool pb = solve(encode_perbit(q).cnf, SolverConfig{}).is_sat();
        bool loc = solve(encode_location(q).cnf, SolverConfig{}).is_sat();
        if (pb != loc) bad_verdicts++;
    }
    c.check(bad_verdicts == 0, std::to_string(bad_verdicts) + " SAT/UNSAT disagreements");

    DistanceQuery gross{144, Gf2Matrix(0, 144), Gf2Matrix::identity(144), 11};
    c.check(encode_location(gross).vm.independent_var_count() == 88,
            "independent variable count at n=144, w=11 should be 88");
    c.finish();
}

void criterion7() {
    Criterion c(7, "bb [[90,8,10]]: k=8 and the dependent-row structure");
    CssCode bb = bb_build(bb90_spec(), "bb90");
    c.check(compute_k(bb) == 8, "k should be 8");
    c.check(independent_row_subset(bb.hx, 41).has_value(), "hx needs 41 independent rows");
    c.check(!independent_row_subset(bb.hx, 42).has_value(), "hx rank must be below 42");
    c.check(independent_row_subset(bb.hz, 41).has_value(), "hz needs 41 independent rows");
    c.check(!independent_row_subset(bb.hz, 42).has_value(), "hz rank must be below 42");
    c.check(solve(encode_independence(bb.hx), SolverConfig{}).is_sat(),
            "dependence query should be SAT (4 dependent rows)");
    c.finish();

    const char *ext = std::getenv("QDIST_EXTERNAL_SOLVER");
    bool run_extended = ext != nullptr || std::getenv("QDIST_RUN_EXTENDED") != nullptr;
    if (!run_extended) {
        std::cout << "criterion 7 (extended): SKIPPED — w=9 solver run not enabled; set "
                     "QDIST_EXTERNAL_SOLVER (or QDIST_RUN_EXTENDED for the internal "
                     "backend) and budget hours\n";
        return;
    }

    Criterion ext_c(7, "bb [[90,8,10]] extended: UNSAT at w=9 on both sectors");
    PipelineOptions opt;
    opt.check_certificates = true;
    if (ext) {
        opt.solver.backend = SolverConfig::Backend::External;
        opt.solver.external_path = ext;
    }
    for (char sector : {'x', 'z'}) {
        DistanceQuery q = sector_query(bb, sector, 9);
        EncodedQuery enc = encode_query(q, opt.encoding);
        SectorRun run = solve_sector(enc, q, sector, opt);
        ext_c.check(run.outcome == "unsat",
                    std::string(1, sector) + "-sector w=9 expected UNSAT, got " + run.outcome);
        ext_c.check(run.cert_status == "accepted" || !opt.check_certificates,
                    std::string(1, sector) + "-sector certificate: " + run.cert_status);
    }
    ext_c.finish();
}

void criterion8() {
    Criterion c(8, "kernel certification property suite, 500 random matrices");
    std::mt19937_64 rng(811);
    int certified = 0, perturbation_escapes = 0, membership_failures = 0;
    for (int it = 0; it < 500; it++) {
        size_t rows = 1 + rng() % 8, cols = 2 + rng() % 11;
        Gf2Matrix m = random_matrix(rng, rows, cols);
        // a zero column would make some single-bit kernel perturbations
        // legitimately certifiable, so re-point one row at it
        for (size_t j = 0; j < cols; j++) {
            bool nonzero = false;
            for (size_t i = 0; i < rows; i++) nonzero = nonzero || m.get(i, j);
            if (!nonzero) m.set(rng() % rows, j, true);
        }
        size_t r = rank(m);
        Gf2Matrix ker = kernel_basis(m);
        KernelCertificate cert = certify_kernel(m, ker, r, cols - r);
        if (cert.certified) certified++;

        for (size_t i = 0; i < ker.rows(); i++)
            for (size_t j = 0; j < cols; j++) {
                Gf2Matrix bad = ker;
                bad.set(i, j, !bad.get(i, j));
                if (certify_kernel(m, bad, r, cols - r).certified) perturbation_escapes++;
            }

        // certified kernels satisfy bidirectional membership with a second basis
        Gf2Rref kr(ker);
        Gf2Matrix ker2 = kernel_basis(m);
        for (size_t i = 0; i < ker2.rows(); i++)
            if (!kr.contains(ker2.row(i))) membership_failures++;
    }
    c.check(certified == 500, std::to_string(500 - certified) + " kernels failed to certify");
    c.check(perturbation_escapes == 0,
            std::to_string(perturbation_escapes) + " single-bit perturbations were accepted");
    c.check(membership_failures == 0, "bidirectional membership failed");
    c.finish();
}

void criterion9() {
    Criterion c(9, "pauli algebra suite against the exact matrix oracle");
    const PauliLetter letters[4] = {PauliLetter::I, PauliLetter::X, PauliLetter::Y,
                                    PauliLetter::Z};
    // phi table against matrix anticommutation
    int bad = 0;
    for (PauliLetter p : letters)
        for (PauliLetter q : letters) {
            GaussianMatrix pq = letter_matrix(p) * letter_matrix(q);
            GaussianMatrix qp = letter_matrix(q) * letter_matrix(p);
            bool anti = !(pq == qp);
            if (anti != (phi(p, q) == 1)) bad++;
        }
    c.check(bad == 0, "phi table disagrees with the matrices");

    // exhaustive n <= 2: homomorphism and commutation iff symplectic zero
    auto enumerate = [&](size_t n) {
        std::vector<PauliOp> out;
        size_t total = 1;
        for (size_t i = 0; i < n; i++) total *= 4;
        for (size_t code = 0; code < total; code++) {
            PauliOp p = PauliOp::identity(n);
            size_t cc = code;
            for (size_t i = 0; i < n; i++) {
                p.letters[i] = letters[cc % 4];
                cc /= 4;
            }
            out.push_back(p);
        }
        return out;
    };
    int hom_bad = 0, comm_bad = 0, oracle_bad = 0;
    for (size_t n = 1; n <= 2; n++) {
        auto ops = enumerate(n);
        for (const auto &p : ops)
            for (const auto &q : ops) {
                if (!(to_binsymp(pauli_mul(p, q)) == (to_binsymp(p) ^ to_binsymp(q)))) hom_bad++;
                bool cm = commutes(p, q);
                if (cm != (symplectic_prod(to_binsymp(p), to_binsymp(q)) == 0)) comm_bad++;
                if (!(pauli_matrix(pauli_mul(p, q)) == pauli_matrix(p) * pauli_matrix(q)))
                    oracle_bad++;
            }
    }
    // n = 3 sampled against the matrix oracle
    auto ops3 = enumerate(3);
    std::mt19937_64 rng(911);
    for (int it = 0; it < 400; it++) {
        const auto &p = ops3[rng() % ops3.size()];
        const auto &q = ops3[rng() % ops3.size()];
        if (!(pauli_matrix(pauli_mul(p, q)) == pauli_matrix(p) * pauli_matrix(q))) oracle_bad++;
        bool cm = commutes(p, q);
        if (cm != (symplectic_prod(to_binsymp(p), to_binsymp(q)) == 0)) comm_bad++;
    }
    c.check(hom_bad == 0, "homomorphism failures");
    c.check(comm_bad == 0, "commutation correspondence failures");
    c.check(oracle_bad == 0, "matrix oracle disagreements");

    // pauli-level distance equals the bsm oracle on sampled commuting BSMs
    int dist_bad = 0, sampled = 0;
    for (int it = 0; it < 4000 && sampled < 200; it++) {
        size_t n = 1 + rng() % 3;
        size_t rows = 1 + rng() % (2 * n);
        Gf2Matrix x = random_matrix(rng, rows, n);
        Gf2Matrix z = random_matrix(rng, rows, n);
        BinSympMatrix b{x, z};
        if (!is_commuting(b)) continue;
        sampled++;
        if (pauli_level_distance(b) != exact_distance_bsm(b).value) dist_bad++;
    }
    c.check(sampled >= 200, "not enough commuting samples");
    c.check(dist_bad == 0, std::to_string(dist_bad) + " pauli-level distance mismatches");
    c.finish();
}

void criterion10() {
    Criterion c(10, "certificate checker: accepts real proofs, rejects 1000+ mutants");
    // a pool of solver-emitted proofs from the named codes
    std::vector<std::pair<Cnf, std::string>> pool;
    for (const CssCode &code : {steane_code(), shor_code(), golay_code()}) {
        for (char sector : {'x', 'z'}) {
            size_t w = code.claimed->d - 1;
            DistanceQuery q = sector_query(code, sector, w);
            EncodedQuery enc = encode_query(q, PipelineOptions::EncodingChoice::Auto);
            SolveOutcome out = solve_with_proof(enc.cnf);
            if (!out.is_unsat() || out.proof.empty()) {
                c.check(false, "expected an UNSAT proof from the fixture runs");
                continue;
            }
            if (!proof_accepted(enc.cnf, out.proof))
                c.check(false, "a solver-emitted proof was rejected");
            pool.emplace_back(enc.cnf, out.proof);
        }
    }

    // single-token mutations that corrupt the certificate must all be
    // rejected; the rare mutation that lands on another valid derivation is
    // sorted out by the independent replayer and redrawn
    std::mt19937_64 rng(1013);
    int accepted_mutants = 0, corpus = 0, redraws = 0;
    while (corpus < 1100) {
        const auto &[cnf, proof] = pool[rng() % pool.size()];
        std::vector<std::string> tokens;
        std::istringstream ss(proof);
        std::string tok;
        while (ss >> tok) tokens.push_back(tok);
        if (tokens.empty()) continue;
        size_t pick = rng() % tokens.size();
        long orig = std::strtol(tokens[pick].c_str(), nullptr, 10);
        long repl;
        switch (rng() % 4) {
            case 0: repl = orig + 1; break;
            case 1: repl = orig - 1; break;
            case 2: repl = -orig; break;
            default: repl = orig + 1 + long(rng() % 5); break;
        }
        if (repl == orig) repl = orig + 2;
        tokens[pick] = std::to_string(repl);
        std::string mutated;
        for (size_t i = 0; i < tokens.size(); i++) {
            mutated += tokens[i];
            mutated += (i + 1 < tokens.size()) ? " " : "\n";
        }
        if (mini_lrat_valid(cnf, mutated)) {
            redraws++;
            continue; // still a valid proof; not a corruption
        }
        corpus++;
        try {
            if (check_lrat(cnf, parse_lrat(mutated, cnf.clauses.size())).accepted)
                accepted_mutants++;
        } catch (const ParseError &) {
            // rejected at parse: fine
        }
    }
    c.check(accepted_mutants == 0,
            std::to_string(accepted_mutants) + " of " + std::to_string(corpus) +
                " corrupted certificates were accepted (" + std::to_string(redraws) +
                " mutants were valid alternative proofs)");
    c.check(redraws < 100, "suspiciously many mutants stayed valid");

    // never accept a proof for a satisfiable CNF (exhaustively checked ground truth)
    int sat_accepts = 0, sat_cases = 0;
    while (sat_cases < 150) {
        int vars = 3 + int(rng() % 10);
        Cnf cnf;
        cnf.num_vars = vars;
        int m = 2 + int(rng() % (2 * vars));
        for (int i = 0; i < m; i++) {
            std::set<int> used;
            std::vector<int> lits;
            int len = 1 + int(rng() % 3);
            for (int j = 0; j < len; j++) {
                int v = 1 + int(rng() % vars);
                if (used.count(v)) continue;
                used.insert(v);
                lits.push_back(rng() % 2 ? v : -v);
            }
            cnf.add_clause(lits);
        }
        bool sat = false;
        for (uint64_t assign = 0; assign < (uint64_t(1) << vars) && !sat; assign++) {
            bool ok = true;
            for (const auto &cl : cnf.clauses) {
                bool cs = false;
                for (int l : cl)
                    if (((assign >> (std::abs(l) - 1)) & 1) == (l > 0)) {
                        cs = true;
                        break;
                    }
                if (!cs) {
                    ok = false;
                    break;
                }
            }
            sat = ok;
        }
        if (!sat) continue;
        sat_cases++;
        const auto &donor = pool[rng() % pool.size()].second;
        try {
            if (check_lrat(cnf, parse_lrat(donor)).accepted) sat_accepts++;
        } catch (const ParseError &) {
        }
        // plus a handcrafted "proof" ending in the empty clause
        std::string fake = std::to_string(cnf.clauses.size() + 1) + " 0 1 2 3 0\n";
        try {
            if (check_lrat(cnf, parse_lrat(fake)).accepted) sat_accepts++;
        } catch (const ParseError &) {
        }
    }
    c.check(sat_accepts == 0, "a satisfiable formula's proof was accepted");
    c.finish();
}

} // namespace

int main() {
    criterion1();
    criterion2();
    criterion3();
    criterion4();
    criterion5();
    criterion6();
    criterion7();
    criterion8();
    criterion9();
    criterion10();
    if (failures) {
        std::cout << failures << " criterion(s) failed\n";
        return 1;
    }
    std::cout << "all criteria passed\n";
    return 0;
}
