#include "qdist/cert.hpp"

#include <algorithm>
#include <charconv>
#include <istream>
#include <unordered_map>
#include <unordered_set>

#include "qdist/error.hpp"

namespace qdist {

namespace {

struct StringTokenizer {
    std::string_view text;
    size_t pos = 0;
    size_t line = 1;

    bool next(std::string &tok) {
        while (pos < text.size() && (text[pos] == ' ' || text[pos] == '\t' ||
                                     text[pos] == '\r' || text[pos] == '\n')) {
            if (text[pos] == '\n') line++;
            pos++;
        }
        if (pos >= text.size()) return false;
        size_t start = pos;
        while (pos < text.size() && text[pos] != ' ' && text[pos] != '\t' &&
               text[pos] != '\r' && text[pos] != '\n')
            pos++;
        tok.assign(text.substr(start, pos - start));
        return true;
    }
};

struct StreamTokenizer {
    std::istream &in;
    size_t line = 1;

    bool next(std::string &tok) {
        tok.clear();
        auto *buf = in.rdbuf();
        int c = buf->sbumpc();
        while (c == ' ' || c == '\t' || c == '\r' || c == '\n') {
            if (c == '\n') line++;
            c = buf->sbumpc();
        }
        if (c == std::char_traits<char>::eof()) return false;
        while (c != std::char_traits<char>::eof() && c != ' ' && c != '\t' && c != '\r' &&
               c != '\n') {
            tok.push_back(char(c));
            c = buf->sbumpc();
        }
        if (c == '\n') line++;
        return true;
    }
};

int64_t to_int(const std::string &tok, size_t line) {
    int64_t v = 0;
    auto [p, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v);
    if (ec != std::errc() || p != tok.data() + tok.size())
        throw ParseError("expected integer, got '" + tok + "'", line);
    return v;
}

// Parse the next proof line from the tokenizer; false at end of input.
template <typename Tok>
bool parse_line(Tok &tz, LratLine &line) {
    std::string tok;
    if (!tz.next(tok)) return false;
    size_t line_no = tz.line;

    line.clause.clear();
    line.hints.clear();
    line.delete_ids.clear();
    line.id = to_int(tok, line_no);
    if (line.id <= 0) throw ParseError("line id must be positive", line_no);

    if (!tz.next(tok)) throw ParseError("truncated line after id", line_no);
    if (tok == "d") {
        line.kind = LratLine::Kind::Delete;
        for (;;) {
            if (!tz.next(tok)) throw ParseError("missing terminator in delete line", line_no);
            int64_t id = to_int(tok, line_no);
            if (id == 0) break;
            if (id < 0) throw ParseError("negative id in delete line", line_no);
            line.delete_ids.push_back(id);
        }
        return true;
    }

    line.kind = LratLine::Kind::Add;
    // literals until 0 (the token in hand is the first literal or 0)
    for (;;) {
        int64_t lit = to_int(tok, line_no);
        if (lit == 0) break;
        if (lit < -(int64_t(1) << 31) || lit > (int64_t(1) << 31))
            throw ParseError("literal out of range", line_no);
        line.clause.push_back(int(lit));
        if (!tz.next(tok)) throw ParseError("missing literal terminator", line_no);
    }
    // hints until 0
    for (;;) {
        if (!tz.next(tok)) throw ParseError("missing hint terminator", line_no);
        int64_t h = to_int(tok, line_no);
        if (h == 0) break;
        line.hints.push_back(h);
    }
    return true;
}

} // namespace

LratProof parse_lrat(std::string_view text) {
    LratProof proof;
    StringTokenizer tz{text};
    int64_t last_add_id = 0;
    LratLine line;
    while (parse_line(tz, line)) {
        if (line.kind == LratLine::Kind::Add) {
            if (line.id <= last_add_id)
                throw ParseError("addition ids must be strictly increasing (" +
                                     std::to_string(line.id) + " after " +
                                     std::to_string(last_add_id) + ")",
                                 tz.line);
            last_add_id = line.id;
        }
        proof.lines.push_back(line);
    }
    return proof;
}

LratProof parse_lrat(std::string_view text, size_t num_original_clauses) {
    LratProof proof;
    StringTokenizer tz{text};
    int64_t last_add_id = int64_t(num_original_clauses);
    std::unordered_set<int64_t> live;
    for (size_t i = 1; i <= num_original_clauses; i++) live.insert(int64_t(i));

    LratLine line;
    while (parse_line(tz, line)) {
        size_t line_no = tz.line;
        if (line.kind == LratLine::Kind::Delete) {
            for (int64_t id : line.delete_ids) {
                if (!live.count(id))
                    throw ParseError("delete of unknown or already-deleted clause " +
                                         std::to_string(id),
                                     line_no);
                live.erase(id);
            }
        } else {
            if (line.id <= last_add_id)
                throw ParseError("addition ids must be strictly increasing (" +
                                     std::to_string(line.id) + " after " +
                                     std::to_string(last_add_id) + ")",
                                 line_no);
            last_add_id = line.id;
            for (int64_t h : line.hints)
                if (!live.count(std::abs(h)))
                    throw ParseError("dangling hint " + std::to_string(h) +
                                         " (no such live clause)",
                                     line_no);
            live.insert(line.id);
        }
        proof.lines.push_back(line);
    }
    return proof;
}

namespace {

// Propagation state reused across proof lines.
class Replayer {
  public:
    explicit Replayer(const Cnf &c) {
        next_db_id_ = 1;
        grow(c.num_vars);
        for (const auto &cl : c.clauses) {
            db_[next_db_id_++] = cl;
            for (int l : cl) grow(std::abs(l));
        }
        num_original_ = next_db_id_ - 1;
    }

    int64_t num_original() const { return num_original_; }
    bool exists(int64_t id) const { return db_.count(id) != 0; }
    const std::vector<int> &clause(int64_t id) const { return db_.at(id); }
    void add(int64_t id, std::vector<int> cl) {
        for (int l : cl) grow(std::abs(l));
        db_[id] = std::move(cl);
    }
    bool erase(int64_t id) { return db_.erase(id) != 0; }

    std::vector<int64_t> live_with_literal(int lit) const {
        std::vector<int64_t> out;
        for (const auto &[id, cl] : db_)
            if (std::find(cl.begin(), cl.end(), lit) != cl.end()) out.push_back(id);
        std::sort(out.begin(), out.end());
        return out;
    }

    // val: 0 unassigned, +1 true, -1 false under current assumptions.
    int val(int lit) const {
        int v = assign_[std::abs(lit)];
        return lit > 0 ? v : -v;
    }
    // Assume lit true. Returns false if it contradicts the current state.
    bool assume(int lit) {
        grow(std::abs(lit));
        int v = val(lit);
        if (v != 0) return v > 0;
        assign_[std::abs(lit)] = lit > 0 ? 1 : -1;
        trail_.push_back(std::abs(lit));
        return true;
    }
    size_t mark() const { return trail_.size(); }
    void rewind(size_t mark) {
        while (trail_.size() > mark) {
            assign_[trail_.back()] = 0;
            trail_.pop_back();
        }
    }

    enum class HintStep { Propagated, Conflict, Rejected };
    // Strict step: the hinted clause must be unit (propagate and return
    // Propagated) or falsified (Conflict). Anything else rejects.
    HintStep step(int64_t id, std::string &why) {
        auto it = db_.find(id);
        if (it == db_.end()) {
            why = "hint " + std::to_string(id) + " references no live clause";
            return HintStep::Rejected;
        }
        int unassigned_lit = 0;
        size_t unassigned = 0;
        for (int l : it->second) {
            int v = val(l);
            if (v > 0) {
                why = "hint " + std::to_string(id) + " is already satisfied";
                return HintStep::Rejected;
            }
            if (v == 0) {
                unassigned++;
                unassigned_lit = l;
            }
        }
        if (unassigned == 0) return HintStep::Conflict;
        if (unassigned > 1) {
            why = "hint " + std::to_string(id) + " is not unit";
            return HintStep::Rejected;
        }
        assume(unassigned_lit);
        return HintStep::Propagated;
    }

  private:
    void grow(int var) {
        if (var >= 0 && size_t(var) >= assign_.size()) assign_.resize(var + 1, 0);
    }

    std::unordered_map<int64_t, std::vector<int>> db_;
    std::vector<int8_t> assign_;
    std::vector<int> trail_;
    int64_t next_db_id_ = 1;
    int64_t num_original_ = 0;
};

bool is_tautology(const std::vector<int> &cl) {
    for (size_t i = 0; i < cl.size(); i++)
        for (size_t j = i + 1; j < cl.size(); j++)
            if (cl[i] == -cl[j]) return true;
    return false;
}

// One-line-at-a-time checker, so proofs never need to sit in memory whole.
class LratReplay {
  public:
    explicit LratReplay(const Cnf &c) : rep_(c), max_id_(rep_.num_original()) {}

    // Returns the final result once the proof is decided (empty clause
    // accepted, or any rejection); nullopt while more lines are welcome.
    std::optional<CertCheckResult> feed(const LratLine &line) {
        if (line.kind == LratLine::Kind::Delete) {
            for (int64_t id : line.delete_ids) {
                if (!rep_.erase(id))
                    return reject(line.id, "delete of unknown or already-deleted clause " +
                                               std::to_string(id));
                res_.clauses_deleted++;
            }
            return std::nullopt;
        }

        if (line.id <= max_id_) return reject(line.id, "addition id not strictly increasing");
        if (is_tautology(line.clause))
            return reject(line.id, "tautological additions are not supported");

        size_t base = rep_.mark();
        bool assume_conflict = false;
        for (int l : line.clause)
            if (!rep_.assume(-l)) assume_conflict = true;
        if (assume_conflict) {
            rep_.rewind(base);
            return reject(line.id, "clause assumes a literal both ways");
        }

        // RUP portion: positive hints up to the first negative hint.
        size_t h = 0;
        bool conflict = false;
        std::string why;
        while (h < line.hints.size() && line.hints[h] > 0) {
            auto step = rep_.step(line.hints[h], why);
            h++;
            if (step == Replayer::HintStep::Rejected) {
                rep_.rewind(base);
                return reject(line.id, why);
            }
            if (step == Replayer::HintStep::Conflict) {
                conflict = true;
                break;
            }
        }

        if (conflict) {
            if (h != line.hints.size()) {
                rep_.rewind(base);
                return reject(line.id, "hints continue after the conflict");
            }
        } else {
            // RUP did not close the line; it must be a RAT step (possibly
            // with zero groups when no live clause has the negated pivot).
            if (line.clause.empty()) {
                rep_.rewind(base);
                return reject(line.id, "unit propagation did not reach a conflict");
            }
            int pivot = line.clause[0];
            size_t rup_end = rep_.mark();
            std::unordered_set<int64_t> covered;

            while (h < line.hints.size()) {
                if (line.hints[h] > 0) {
                    rep_.rewind(base);
                    return reject(line.id, "positive hint outside a resolvent group");
                }
                int64_t rid = -line.hints[h];
                h++;
                if (!rep_.exists(rid)) {
                    rep_.rewind(base);
                    return reject(line.id, "resolvent hint " + std::to_string(rid) +
                                               " references no live clause");
                }
                const auto &rcl = rep_.clause(rid);
                if (std::find(rcl.begin(), rcl.end(), -pivot) == rcl.end()) {
                    rep_.rewind(base);
                    return reject(line.id, "resolvent clause " + std::to_string(rid) +
                                               " does not contain the negated pivot");
                }
                covered.insert(rid);

                // Assume the resolvent's remaining literals false on top of
                // the RUP-propagated state.
                bool group_conflict = false;
                for (int l : rcl) {
                    if (l == -pivot) continue;
                    if (!rep_.assume(-l)) group_conflict = true;
                }
                while (!group_conflict && h < line.hints.size() && line.hints[h] > 0) {
                    auto step = rep_.step(line.hints[h], why);
                    h++;
                    if (step == Replayer::HintStep::Rejected) {
                        rep_.rewind(base);
                        return reject(line.id, why);
                    }
                    if (step == Replayer::HintStep::Conflict) {
                        group_conflict = true;
                        break;
                    }
                }
                if (!group_conflict) {
                    rep_.rewind(base);
                    return reject(line.id, "resolvent group for clause " + std::to_string(rid) +
                                               " does not reach a conflict");
                }
                if (h < line.hints.size() && line.hints[h] > 0) {
                    rep_.rewind(base);
                    return reject(line.id, "hints continue after the group conflict");
                }
                rep_.rewind(rup_end);
            }

            // Every live clause with the negated pivot must be covered or
            // yield a tautological resolvent.
            for (int64_t rid : rep_.live_with_literal(-pivot)) {
                if (covered.count(rid)) continue;
                bool taut = false;
                for (int l : rep_.clause(rid)) {
                    if (l == -pivot) continue;
                    for (int cl : line.clause)
                        if (cl == -l) taut = true;
                }
                if (!taut) {
                    rep_.rewind(base);
                    return reject(line.id, "uncovered resolvent clause " + std::to_string(rid));
                }
            }
        }

        rep_.rewind(base);
        rep_.add(line.id, line.clause);
        max_id_ = line.id;
        res_.clauses_added++;

        if (line.clause.empty()) {
            res_.accepted = true;
            return res_; // refutation complete; later lines are irrelevant
        }
        return std::nullopt;
    }

    CertCheckResult finish() {
        if (res_.accepted) return res_;
        res_.accepted = false;
        res_.line_id = 0;
        res_.reason = "no empty clause was added (incomplete proof)";
        return res_;
    }

  private:
    CertCheckResult reject(int64_t id, const std::string &why) {
        res_.accepted = false;
        res_.line_id = id;
        res_.reason = why;
        return res_;
    }

    Replayer rep_;
    int64_t max_id_;
    CertCheckResult res_;
};

} // namespace

CertCheckResult check_lrat(const Cnf &c, const LratProof &p) {
    LratReplay replay(c);
    for (const auto &line : p.lines)
        if (auto res = replay.feed(line)) return *res;
    return replay.finish();
}

CertCheckResult check_lrat_stream(const Cnf &c, std::istream &in) {
    LratReplay replay(c);
    StreamTokenizer tz{in};
    LratLine line;
    int64_t last_add_id = int64_t(c.clauses.size());
    while (parse_line(tz, line)) {
        if (line.kind == LratLine::Kind::Add) {
            if (line.id <= last_add_id)
                throw ParseError("addition ids must be strictly increasing (" +
                                     std::to_string(line.id) + " after " +
                                     std::to_string(last_add_id) + ")",
                                 tz.line);
            last_add_id = line.id;
        }
        if (auto res = replay.feed(line)) return *res;
    }
    return replay.finish();
}

std::string render_lrat(const LratProof &p) {
    std::string out;
    for (const auto &line : p.lines) {
        out += std::to_string(line.id);
        if (line.kind == LratLine::Kind::Delete) {
            out += " d";
            for (int64_t id : line.delete_ids) {
                out += ' ';
                out += std::to_string(id);
            }
        } else {
            for (int l : line.clause) {
                out += ' ';
                out += std::to_string(l);
            }
            out += " 0";
            for (int64_t h : line.hints) {
                out += ' ';
                out += std::to_string(h);
            }
        }
        out += " 0\n";
    }
    return out;
}

} // namespace qdist
