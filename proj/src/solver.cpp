#include "qdist/solver.hpp"

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <sys/wait.h>
#include <unistd.h>
#include <fstream>
#include <sstream>

#include "qdist/error.hpp"

namespace qdist {

namespace {

using Clock = std::chrono::steady_clock;

struct Clause {
    std::vector<int> lits;
    int64_t id = 0;
    bool learned = false;
    bool deleted = false;
    double activity = 0.0;
};

class InternalSolver {
  public:
    InternalSolver(const Cnf &cnf, const SolverConfig &cfg) : cfg_(cfg), num_vars_(cnf.num_vars) {
        value_.assign(num_vars_ + 1, 0);
        level_.assign(num_vars_ + 1, 0);
        reason_.assign(num_vars_ + 1, -1);
        seen_.assign(num_vars_ + 1, 0);
        phase_.assign(num_vars_ + 1, 0);
        trail_pos_.assign(num_vars_ + 1, 0);
        activity_.assign(num_vars_ + 1, 0.0);
        // Seed-derived jitter fixes the initial branching order.
        uint64_t s = cfg.seed * 0x9e3779b97f4a7c15ULL + 0x2545f4914f6cdd1dULL;
        for (int v = 1; v <= num_vars_; v++) {
            s ^= s << 13; s ^= s >> 7; s ^= s << 17;
            activity_[v] = double(s % 1024) / (1 << 20);
        }
        watches_.assign(2 * size_t(num_vars_) + 2, {});

        // Number every input clause before any proof line can be emitted:
        // LRAT addition ids must come after the original ids.
        for (const auto &lits : cnf.clauses) {
            int idx = add_clause(lits, false);
            if (pending_conflict_ >= 0) continue;
            if (clauses_[idx].lits.size() == 1) {
                int l = clauses_[idx].lits[0];
                if (val(l) < 0)
                    pending_conflict_ = idx;
                else if (val(l) == 0)
                    enqueue(l, idx);
            }
        }
    }

    SolveOutcome run() {
        SolveOutcome out;
        if (pending_conflict_ >= 0) {
            level0_conflict(pending_conflict_);
            out.status = SolveOutcome::Status::Unsat;
            out.proof = std::move(proof_);
            return out;
        }
        auto start = Clock::now();
        int confl = propagate();
        if (confl >= 0) {
            level0_conflict(confl);
            out.status = SolveOutcome::Status::Unsat;
            out.proof = std::move(proof_);
            return out;
        }

        uint64_t conflicts = 0, restart_count = 0;
        uint64_t restart_limit = luby(restart_count) * 128;
        uint64_t conflicts_at_restart = 0;
        size_t reduce_limit = 4000;

        for (;;) {
            confl = propagate();
            if (confl >= 0) {
                conflicts++;
                if (decision_level() == 0) {
                    level0_conflict(confl);
                    out.status = SolveOutcome::Status::Unsat;
                    out.proof = std::move(proof_);
                    return out;
                }
                std::vector<int> learnt;
                int back_level = 0;
                analyze(confl, learnt, back_level);
                backtrack(back_level);
                int idx = record_learned(learnt);
                enqueue(learnt[0], idx);
                var_decay();
                claus_inc_ *= 1.001;

                if ((conflicts & 1023) == 0 && cfg_.timeout_seconds > 0) {
                    double s = std::chrono::duration<double>(Clock::now() - start).count();
                    if (s > cfg_.timeout_seconds) {
                        out.status = SolveOutcome::Status::Unknown;
                        out.reason = SolveOutcome::UnknownReason::Timeout;
                        out.detail = "internal solver timeout";
                        return out;
                    }
                }
            } else {
                if (conflicts - conflicts_at_restart >= restart_limit) {
                    backtrack(0);
                    restart_count++;
                    conflicts_at_restart = conflicts;
                    restart_limit = luby(restart_count) * 128;
                }
                if (num_learned_ > reduce_limit) {
                    reduce_db();
                    reduce_limit += 1000;
                }
                int next = pick_branch_var();
                if (next == 0) {
                    out.status = SolveOutcome::Status::Sat;
                    out.model.assign(num_vars_ + 1, false);
                    for (int v = 1; v <= num_vars_; v++) out.model[v] = value_[v] > 0;
                    return out;
                }
                trail_lim_.push_back(trail_.size());
                enqueue(phase_[next] ? next : -next, -1);
            }
        }
    }

  private:
    // ---- assignment primitives ----
    int val(int lit) const {
        int v = value_[std::abs(lit)];
        return lit > 0 ? v : -v;
    }
    int decision_level() const { return trail_lim_.size(); }

    void enqueue(int lit, int reason_idx) {
        int v = std::abs(lit);
        value_[v] = lit > 0 ? 1 : -1;
        level_[v] = decision_level();
        reason_[v] = reason_idx;
        trail_pos_[v] = int(trail_.size());
        trail_.push_back(lit);
    }

    void backtrack(int target) {
        if (decision_level() <= target) return;
        size_t bound = trail_lim_[target];
        for (size_t i = trail_.size(); i-- > bound;) {
            int v = std::abs(trail_[i]);
            phase_[v] = value_[v] > 0;
            value_[v] = 0;
            reason_[v] = -1;
            insert_order(v);
        }
        trail_.resize(bound);
        trail_lim_.resize(target);
        qhead_ = std::min(qhead_, trail_.size());
    }

    // ---- clause database ----
    size_t widx(int lit) const { return 2 * size_t(std::abs(lit) - 1) + (lit < 0); }

    int add_clause(const std::vector<int> &lits_in, bool learned) {
        std::vector<int> lits = lits_in;
        if (!learned) {
            std::sort(lits.begin(), lits.end(), [](int a, int b) {
                return std::abs(a) != std::abs(b) ? std::abs(a) < std::abs(b) : a < b;
            });
            lits.erase(std::unique(lits.begin(), lits.end()), lits.end());
        }
        Clause c;
        c.lits = std::move(lits);
        c.id = next_id_++;
        c.learned = learned;
        c.activity = claus_inc_;
        int idx = clauses_.size();
        clauses_.push_back(std::move(c));
        if (clauses_[idx].lits.size() >= 2) {
            watches_[widx(clauses_[idx].lits[0])].push_back(idx);
            watches_[widx(clauses_[idx].lits[1])].push_back(idx);
        }
        if (learned) num_learned_++;
        return idx;
    }

    // ---- propagation ----
    int propagate() {
        while (qhead_ < trail_.size()) {
            int p = trail_[qhead_++];
            auto &ws = watches_[widx(-p)];
            size_t keep = 0;
            for (size_t i = 0; i < ws.size(); i++) {
                int ci = ws[i];
                Clause &c = clauses_[ci];
                if (c.deleted) continue;
                auto &ls = c.lits;
                // ensure the false literal is at position 1
                if (ls[0] == -p) std::swap(ls[0], ls[1]);
                if (val(ls[0]) > 0) {
                    ws[keep++] = ci;
                    continue;
                }
                bool moved = false;
                for (size_t k = 2; k < ls.size(); k++) {
                    if (val(ls[k]) >= 0) {
                        std::swap(ls[1], ls[k]);
                        watches_[widx(ls[1])].push_back(ci);
                        moved = true;
                        break;
                    }
                }
                if (moved) continue;
                ws[keep++] = ci;
                if (val(ls[0]) < 0) {
                    // conflict: restore remaining watchers and bail
                    for (size_t j = i + 1; j < ws.size(); j++) ws[keep++] = ws[j];
                    ws.resize(keep);
                    return ci;
                }
                enqueue(ls[0], ci);
            }
            ws.resize(keep);
        }
        return -1;
    }

    // ---- conflict analysis ----
    void analyze(int confl, std::vector<int> &out_learnt, int &back_level) {
        out_learnt.clear();
        out_learnt.push_back(0); // placeholder for the asserting literal
        chain_.clear();
        cone_.clear();

        int path = 0, p = 0;
        size_t index = trail_.size();
        for (;;) {
            Clause &c = clauses_[confl];
            chain_.push_back(c.id);
            if (c.learned) bump_clause(confl);
            for (int q : c.lits) {
                int v = std::abs(q);
                if (p != 0 && v == std::abs(p)) continue;
                if (seen_[v]) continue;
                if (level_[v] == 0) {
                    if (cfg_.produce_proof) collect_cone(v);
                    continue;
                }
                seen_[v] = 1;
                bump_var(v);
                if (level_[v] >= decision_level())
                    path++;
                else
                    out_learnt.push_back(q);
            }
            while (!seen_[std::abs(trail_[--index])]) {}
            p = trail_[index];
            seen_[std::abs(p)] = 0;
            path--;
            if (path == 0) break;
            confl = reason_[std::abs(p)];
        }
        out_learnt[0] = -p;

        // backjump level = max level among the non-asserting literals
        back_level = 0;
        for (size_t i = 1; i < out_learnt.size(); i++)
            back_level = std::max(back_level, level_[std::abs(out_learnt[i])]);
        // place a max-level literal at position 1 so the watches are sound
        for (size_t i = 2; i < out_learnt.size(); i++)
            if (level_[std::abs(out_learnt[i])] > level_[std::abs(out_learnt[1])])
                std::swap(out_learnt[1], out_learnt[i]);
        for (size_t i = 1; i < out_learnt.size(); i++) seen_[std::abs(out_learnt[i])] = 0;
    }

    // Transitively collect level-0 variables feeding a resolution, so the
    // proof line can derive them by unit propagation.
    void collect_cone(int v) {
        if (seen0_.size() != size_t(num_vars_ + 1)) seen0_.assign(num_vars_ + 1, 0);
        if (seen0_[v]) return;
        seen0_[v] = 1;
        cone_.push_back(v);
        int r = reason_[v];
        if (r >= 0)
            for (int q : clauses_[r].lits)
                if (std::abs(q) != v) collect_cone(std::abs(q));
    }

    int record_learned(const std::vector<int> &learnt) {
        int idx = add_clause(learnt, true);
        if (cfg_.produce_proof) emit_add_line(clauses_[idx].id, learnt);
        return idx;
    }

    void emit_add_line(int64_t id, const std::vector<int> &lits) {
        proof_ += std::to_string(id);
        for (int l : lits) {
            proof_ += ' ';
            proof_ += std::to_string(l);
        }
        proof_ += " 0";
        // hints: level-0 cone in trail order, then the resolution chain reversed
        order_cone_by_trail();
        for (int v : cone_) {
            proof_ += ' ';
            proof_ += std::to_string(clauses_[reason_[v]].id);
        }
        for (size_t i = chain_.size(); i-- > 0;) {
            proof_ += ' ';
            proof_ += std::to_string(chain_[i]);
        }
        proof_ += " 0\n";
        for (int v : cone_) seen0_[v] = 0;
        cone_.clear();
    }

    void order_cone_by_trail() {
        std::sort(cone_.begin(), cone_.end(),
                  [&](int a, int b) { return trail_pos_[a] < trail_pos_[b]; });
    }

    // Conflict with all literals at level 0: derive the empty clause.
    void level0_conflict(int confl) {
        contradiction_ = true;
        if (!cfg_.produce_proof) return;
        chain_.clear();
        cone_.clear();
        for (int q : clauses_[confl].lits) collect_cone(std::abs(q));
        chain_.push_back(clauses_[confl].id);
        emit_add_line(next_id_++, {});
    }

    // ---- learned clause reduction ----
    void reduce_db() {
        std::vector<int> cand;
        for (size_t i = 0; i < clauses_.size(); i++) {
            const Clause &c = clauses_[i];
            if (!c.learned || c.deleted || c.lits.size() <= 2) continue;
            if (is_locked(int(i))) continue;
            cand.push_back(int(i));
        }
        std::stable_sort(cand.begin(), cand.end(), [&](int a, int b) {
            return clauses_[a].activity < clauses_[b].activity;
        });
        size_t drop = cand.size() / 2;
        if (drop == 0) return;
        std::vector<int64_t> dropped_ids;
        for (size_t i = 0; i < drop; i++) {
            clauses_[cand[i]].deleted = true;
            dropped_ids.push_back(clauses_[cand[i]].id);
            num_learned_--;
        }
        if (cfg_.produce_proof) {
            proof_ += std::to_string(next_id_ - 1);
            proof_ += " d";
            for (int64_t id : dropped_ids) {
                proof_ += ' ';
                proof_ += std::to_string(id);
            }
            proof_ += " 0\n";
        }
        // purge watch lists of deleted clauses
        for (auto &ws : watches_) {
            size_t keep = 0;
            for (int ci : ws)
                if (!clauses_[ci].deleted) ws[keep++] = ci;
            ws.resize(keep);
        }
    }

    bool is_locked(int ci) const {
        const Clause &c = clauses_[ci];
        if (c.lits.empty()) return true;
        int v = std::abs(c.lits[0]);
        return value_[v] != 0 && reason_[v] == ci;
    }

    // ---- branching ----
    void bump_var(int v) {
        activity_[v] += var_inc_;
        if (activity_[v] > 1e100) {
            for (int i = 1; i <= num_vars_; i++) activity_[i] *= 1e-100;
            var_inc_ *= 1e-100;
        }
        sift_up(v);
    }
    void var_decay() { var_inc_ /= 0.95; }
    void bump_clause(int ci) { clauses_[ci].activity += claus_inc_; }

    // indexed binary max-heap over activity
    void insert_order(int v) {
        if (heap_pos_.size() != size_t(num_vars_ + 1)) heap_pos_.assign(num_vars_ + 1, -1);
        if (heap_pos_[v] >= 0) return;
        heap_pos_[v] = heap_.size();
        heap_.push_back(v);
        sift_up(v);
    }
    void sift_up(int v) {
        if (heap_pos_.size() != size_t(num_vars_ + 1) || heap_pos_[v] < 0) return;
        int i = heap_pos_[v];
        while (i > 0) {
            int parent = (i - 1) / 2;
            if (activity_[heap_[parent]] >= activity_[v]) break;
            heap_[i] = heap_[parent];
            heap_pos_[heap_[i]] = i;
            i = parent;
        }
        heap_[i] = v;
        heap_pos_[v] = i;
    }
    int pop_max() {
        int v = heap_[0];
        heap_pos_[v] = -1;
        int last = heap_.back();
        heap_.pop_back();
        if (!heap_.empty()) {
            size_t i = 0;
            for (;;) {
                size_t l = 2 * i + 1, r = l + 1, best = i;
                if (l < heap_.size() && activity_[heap_[l]] > activity_[last]) best = l;
                if (r < heap_.size() &&
                    activity_[heap_[r]] > std::max(activity_[last], activity_[heap_[l]]))
                    best = r;
                if (best == i) break;
                heap_[i] = heap_[best];
                heap_pos_[heap_[i]] = i;
                i = best;
            }
            heap_[i] = last;
            heap_pos_[last] = i;
        }
        return v;
    }
    int pick_branch_var() {
        if (heap_pos_.empty()) {
            heap_pos_.assign(num_vars_ + 1, -1);
            for (int v = 1; v <= num_vars_; v++) insert_order(v);
        }
        while (!heap_.empty()) {
            int v = pop_max();
            if (value_[v] == 0) return v;
        }
        return 0;
    }

    // Luby sequence 1 1 2 1 1 2 4 1 1 2 1 1 2 4 8 ...
    static uint64_t luby(uint64_t x) {
        uint64_t size = 1, seq = 0;
        while (size < x + 1) {
            seq++;
            size = 2 * size + 1;
        }
        while (size - 1 != x) {
            size = (size - 1) >> 1;
            seq--;
            x = x % size;
        }
        return uint64_t(1) << seq;
    }

    const SolverConfig &cfg_;
    int num_vars_;
    std::vector<Clause> clauses_;
    std::vector<std::vector<int>> watches_;
    std::vector<int8_t> value_;
    std::vector<int> level_;
    std::vector<int> reason_;
    std::vector<int8_t> seen_, seen0_, phase_;
    std::vector<double> activity_;
    std::vector<int> heap_;
    std::vector<int> heap_pos_;
    std::vector<int> trail_;
    std::vector<int> trail_pos_;
    std::vector<size_t> trail_lim_;
    size_t qhead_ = 0;
    std::vector<int64_t> chain_;
    std::vector<int> cone_;
    int64_t next_id_ = 1;
    size_t num_learned_ = 0;
    double var_inc_ = 1.0, claus_inc_ = 1.0;
    bool contradiction_ = false;
    int pending_conflict_ = -1;
    std::string proof_;
};

} // namespace

bool verify_model(const Cnf &c, const std::vector<bool> &model) {
    if (model.size() != size_t(c.num_vars) + 1)
        throw std::invalid_argument("verify_model: model must assign every variable");
    for (const auto &clause : c.clauses) {
        bool sat = false;
        for (int l : clause) {
            bool v = model[std::abs(l)];
            if ((l > 0) == v) {
                sat = true;
                break;
            }
        }
        if (!sat) return false;
    }
    return true;
}

namespace {

SolveOutcome solve_internal(const Cnf &c, const SolverConfig &cfg) {
    // The constructor numbers input clauses 1..m for the proof; run() does
    // the search.
    InternalSolver s(c, cfg);
    SolveOutcome out = s.run();
    if (out.is_sat() && !verify_model(c, out.model))
        throw SoundnessError("internal solver returned a non-satisfying model");
    return out;
}

std::string shell_quote(const std::string &s) {
    std::string out = "'";
    for (char ch : s) {
        if (ch == '\'')
            out += "'\\''";
        else
            out += ch;
    }
    out += "'";
    return out;
}

SolveOutcome solve_external(const Cnf &c, const SolverConfig &cfg) {
    namespace fs = std::filesystem;
    SolveOutcome out;
    if (!fs::exists(cfg.external_path)) {
        out.detail = "external solver not found: " + cfg.external_path;
        return out;
    }

    fs::path dir = fs::temp_directory_path() /
                   ("qdist-" + std::to_string(::getpid()) + "-" +
                    std::to_string(reinterpret_cast<uintptr_t>(&out)));
    fs::create_directories(dir);
    fs::path cnf_path = dir / "query.cnf";
    fs::path proof_path = dir / "query.lrat";
    {
        std::ofstream f(cnf_path);
        f << write_dimacs(c);
    }

    std::string cmd;
    if (cfg.timeout_seconds > 0)
        cmd += "timeout " + std::to_string(static_cast<long>(cfg.timeout_seconds) + 1) + " ";
    cmd += shell_quote(cfg.external_path);
    for (const auto &a : cfg.external_args) cmd += " " + shell_quote(a);
    cmd += " " + shell_quote(cnf_path.string());
    if (cfg.produce_proof) cmd += " " + shell_quote(proof_path.string());
    cmd += " 2>/dev/null";

    FILE *pipe = ::popen(cmd.c_str(), "r");
    if (!pipe) {
        out.detail = "failed to launch external solver";
        return out;
    }
    std::string text;
    char buf[4096];
    size_t got;
    while ((got = ::fread(buf, 1, sizeof buf, pipe)) > 0) text.append(buf, got);
    int rc = ::pclose(pipe);
    int exit_code = WIFEXITED(rc) ? WEXITSTATUS(rc) : -1;
    if (exit_code == 124) {
        out.reason = SolveOutcome::UnknownReason::Timeout;
        out.detail = "external solver timeout";
        fs::remove_all(dir);
        return out;
    }

    bool sat = false, unsat = false;
    std::vector<int> model_lits;
    std::istringstream lines(text);
    std::string line;
    while (std::getline(lines, line)) {
        if (line.rfind("s SATISFIABLE", 0) == 0) sat = true;
        else if (line.rfind("s UNSATISFIABLE", 0) == 0) unsat = true;
        else if (line.rfind("v ", 0) == 0 || line == "v") {
            std::istringstream ls(line.substr(1));
            int lit;
            while (ls >> lit)
                if (lit != 0) model_lits.push_back(lit);
        }
    }

    if (sat && !unsat) {
        out.model.assign(c.num_vars + 1, false);
        for (int l : model_lits) {
            int v = std::abs(l);
            if (v >= 1 && v <= c.num_vars) out.model[v] = l > 0;
        }
        if (!verify_model(c, out.model)) {
            out.model.clear();
            out.detail = "external model failed verification";
            fs::remove_all(dir);
            return out;
        }
        out.status = SolveOutcome::Status::Sat;
    } else if (unsat && !sat) {
        out.status = SolveOutcome::Status::Unsat;
        if (cfg.produce_proof && fs::exists(proof_path)) {
            constexpr uintmax_t kInMemoryLimit = 64ull << 20;
            if (fs::file_size(proof_path) <= kInMemoryLimit) {
                std::ifstream pf(proof_path);
                std::stringstream ss;
                ss << pf.rdbuf();
                out.proof = ss.str();
            } else {
                // hand the oversized proof file to the caller
                fs::path kept = fs::temp_directory_path() /
                                ("qdist-proof-" + std::to_string(::getpid()) + "-" +
                                 std::to_string(reinterpret_cast<uintptr_t>(&out)) + ".lrat");
                fs::rename(proof_path, kept);
                out.proof_path = kept.string();
            }
        }
    } else {
        out.detail = "unparseable external solver output (exit code " +
                     std::to_string(exit_code) + ")";
    }
    fs::remove_all(dir);
    return out;
}

} // namespace

SolveOutcome solve(const Cnf &c, const SolverConfig &cfg) {
    if (cfg.backend == SolverConfig::Backend::External) return solve_external(c, cfg);
    return solve_internal(c, cfg);
}

BitString decode_witness(const std::vector<bool> &model, const VarMap &vm,
                         const DistanceQuery &q) {
    if (model.size() < size_t(vm.first_aux))
        throw std::invalid_argument("decode_witness: model too small for the varmap");
    BitString e(q.n);
    if (vm.encoding == VarMap::Encoding::PerBit) {
        for (size_t j = 0; j < q.n; j++)
            if (model[vm.error_vars[j]]) e.set(j, true);
    } else {
        // E_j = parity of first-occurrence slots naming j (first occurrence
        // in the adjacent sense, matching the flag constraints)
        size_t prev = SIZE_MAX;
        for (size_t i = 0; i < vm.w; i++) {
            size_t loc = 0;
            for (size_t b = 0; b < vm.loc_bits; b++)
                if (model[vm.loc_vars[i][b]]) loc |= size_t(1) << b;
            if (loc >= q.n)
                throw SoundnessError("decode_witness: location out of range");
            if (i == 0 || loc != prev) e.set(loc, !e.get(loc));
            prev = loc;
        }
    }

    // direct re-check against the query, independent of the CNF
    size_t wt = e.popcount();
    if (wt < 1 || wt > q.weight_bound)
        throw SoundnessError("decode_witness: weight " + std::to_string(wt) +
                             " outside [1, " + std::to_string(q.weight_bound) + "]");
    for (size_t i = 0; i < q.stab_rows.rows(); i++)
        if (dot(q.stab_rows.row(i), e))
            throw SoundnessError("decode_witness: witness anticommutes with stab row " +
                                 std::to_string(i));
    bool excluded = false;
    for (size_t g = 0; g < q.excl_gens.rows(); g++)
        if (dot(q.excl_gens.row(g), e)) {
            excluded = true;
            break;
        }
    if (!excluded)
        throw SoundnessError("decode_witness: witness lies in the excluded row space");
    return e;
}

} // namespace qdist
