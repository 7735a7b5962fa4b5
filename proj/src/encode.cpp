#include "qdist/encode.hpp"

#include <algorithm>
#include <array>
#include <charconv>
#include <cstdio>
#include <map>
#include <stdexcept>

#include "qdist/error.hpp"

namespace qdist {

void Cnf::add_clause(std::vector<int> lits) {
    if (lits.empty())
        throw std::invalid_argument("Cnf::add_clause: empty clause");
    for (int l : lits) {
        if (l == 0)
            throw std::invalid_argument("Cnf::add_clause: zero literal");
        if (std::abs(l) > num_vars)
            throw std::invalid_argument("Cnf::add_clause: literal exceeds num_vars");
    }
    for (size_t i = 0; i < lits.size(); i++)
        for (size_t j = i + 1; j < lits.size(); j++)
            if (lits[i] == -lits[j])
                throw std::invalid_argument("Cnf::add_clause: tautological clause");
    clauses.push_back(std::move(lits));
}

void DistanceQuery::validate() const {
    if (stab_rows.cols() != n || excl_gens.cols() != n)
        throw std::invalid_argument("DistanceQuery: matrix widths must equal n");
    if (weight_bound < 1)
        throw std::invalid_argument("DistanceQuery: weight bound must be >= 1");
}

size_t VarMap::independent_var_count() const {
    return encoding == Encoding::PerBit ? n : w * loc_bits;
}

namespace {

// Normalize a literal multiset for XOR: repeated variables cancel mod 2 and
// negative polarities fold into the target parity.
void normalize_xor(std::vector<int> &lits, int &parity) {
    std::map<int, int> count;
    for (int l : lits) {
        if (l < 0) parity ^= 1;
        count[std::abs(l)] ^= 1;
    }
    lits.clear();
    for (auto [v, c] : count)
        if (c) lits.push_back(v);
}

// Direct CNF for "XOR of vars = parity", vars positive and distinct, size <= 4.
void emit_xor_direct(Cnf &cnf, std::span<const int> vars, int parity) {
    size_t k = vars.size();
    for (uint32_t assign = 0; assign < (1u << k); assign++) {
        int x = 0;
        for (size_t i = 0; i < k; i++) x ^= (assign >> i) & 1;
        if (x == parity) continue;
        std::vector<int> clause(k);
        for (size_t i = 0; i < k; i++)
            clause[i] = ((assign >> i) & 1) ? -vars[i] : vars[i];
        cnf.add_clause(std::move(clause));
    }
}

} // namespace

void xor_clauses(Cnf &cnf, std::vector<int> lits, int parity) {
    normalize_xor(lits, parity);
    if (lits.empty()) {
        if (parity) {
            // Unsatisfiable constant; keep the database free of empty clauses.
            int v = cnf.new_var();
            cnf.add_clause({v});
            cnf.add_clause({-v});
        }
        return;
    }
    // Chain: fold the first three literals into a fresh auxiliary until the
    // remainder fits a direct expansion.
    while (lits.size() > 3) {
        int t = cnf.new_var();
        emit_xor_direct(cnf, std::array{lits[0], lits[1], lits[2], t}, 0);
        lits.erase(lits.begin(), lits.begin() + 3);
        lits.insert(lits.begin(), t);
    }
    emit_xor_direct(cnf, lits, parity);
}

void at_most_k(Cnf &cnf, std::span<const int> lits, size_t k) {
    size_t n = lits.size();
    if (k >= n) return;
    if (k == 0) {
        for (int l : lits) cnf.add_clause({-l});
        return;
    }
    // Sinz sequential counter: s[i][j] = "at least j of the first i+1 are true".
    std::vector<std::vector<int>> s(n - 1, std::vector<int>(k));
    for (size_t i = 0; i + 1 < n; i++)
        for (size_t j = 0; j < k; j++) s[i][j] = cnf.new_var();

    cnf.add_clause({-lits[0], s[0][0]});
    for (size_t j = 1; j < k; j++) cnf.add_clause({-s[0][j]});
    for (size_t i = 1; i + 1 < n; i++) {
        cnf.add_clause({-lits[i], s[i][0]});
        cnf.add_clause({-s[i - 1][0], s[i][0]});
        for (size_t j = 1; j < k; j++) {
            cnf.add_clause({-lits[i], -s[i - 1][j - 1], s[i][j]});
            cnf.add_clause({-s[i - 1][j], s[i][j]});
        }
        cnf.add_clause({-lits[i], -s[i - 1][k - 1]});
    }
    cnf.add_clause({-lits[n - 1], -s[n - 2][k - 1]});
}

namespace {

EncodedQuery trivially_unsat_query(VarMap vm) {
    EncodedQuery out;
    out.vm = std::move(vm);
    out.trivially_unsat = true;
    int v = out.cnf.new_var();
    out.cnf.add_clause({v});
    out.cnf.add_clause({-v});
    out.vm.first_aux = 1;
    return out;
}

std::vector<int> row_support_lits(const BitString &row, const std::vector<int> &vars) {
    std::vector<int> lits;
    for (size_t j = 0; j < row.len(); j++)
        if (row.get(j)) lits.push_back(vars[j]);
    return lits;
}

} // namespace

EncodedQuery encode_perbit(const DistanceQuery &q) {
    q.validate();

    VarMap vm;
    vm.encoding = VarMap::Encoding::PerBit;
    vm.n = q.n;
    vm.w = q.weight_bound;
    if (q.excl_gens.rows() == 0) return trivially_unsat_query(std::move(vm));

    EncodedQuery out;
    out.vm = std::move(vm);
    Cnf &cnf = out.cnf;
    VarMap &v = out.vm;

    for (size_t j = 0; j < q.n; j++) v.error_vars.push_back(cnf.new_var());
    for (size_t g = 0; g < q.excl_gens.rows(); g++) v.excl_selectors.push_back(cnf.new_var());
    v.first_aux = cnf.num_vars + 1;

    for (size_t i = 0; i < q.stab_rows.rows(); i++)
        xor_clauses(cnf, row_support_lits(q.stab_rows.row(i), v.error_vars), 0);

    for (size_t g = 0; g < q.excl_gens.rows(); g++) {
        // t_g <-> (dot(g, E) = 1), folded into one XOR with t_g on the left.
        std::vector<int> lits = row_support_lits(q.excl_gens.row(g), v.error_vars);
        lits.push_back(v.excl_selectors[g]);
        xor_clauses(cnf, std::move(lits), 0);
    }
    cnf.add_clause(std::vector<int>(v.excl_selectors));

    at_most_k(cnf, v.error_vars, q.weight_bound);
    return out;
}

namespace {

// Per-slot state for the location encoding.
struct SlotCodec {
    std::vector<int> bits;            // LSB first; empty when n = 1
    std::map<size_t, int> eq_vars;    // position j -> var for [L = j]
    int prefix_eq_with_prev = 0;      // pe_0 of the comparator vs previous slot
};

class LocationEncoder {
  public:
    LocationEncoder(const DistanceQuery &q, const LocationOptions &opt, EncodedQuery &out)
        : q_(q), opt_(opt), cnf_(out.cnf), vm_(out.vm) {}

    void run() {
        size_t w = q_.weight_bound;
        bits_ = 0;
        while ((size_t(1) << bits_) < q_.n) bits_++;

        vm_.encoding = VarMap::Encoding::Location;
        vm_.n = q_.n;
        vm_.w = w;
        vm_.loc_bits = bits_;

        slots_.resize(w);
        for (size_t i = 0; i < w; i++)
            for (size_t b = 0; b < bits_; b++) slots_[i].bits.push_back(cnf_.new_var());
        for (size_t i = 0; i < w; i++) vm_.flag_vars.push_back(cnf_.new_var());
        for (size_t g = 0; g < q_.excl_gens.rows(); g++)
            vm_.excl_selectors.push_back(cnf_.new_var());
        for (size_t i = 0; i < w; i++) vm_.loc_vars.push_back(slots_[i].bits);
        vm_.first_aux = cnf_.num_vars + 1;

        for (size_t i = 0; i < w; i++) emit_range(i);
        for (size_t i = 1; i < w; i++) emit_sorted_and_flag(i);
        cnf_.add_clause({vm_.flag_vars[0]});

        for (size_t i = 0; i < q_.stab_rows.rows(); i++)
            xor_clauses(cnf_, slot_terms(q_.stab_rows.row(i)), 0);
        for (size_t g = 0; g < q_.excl_gens.rows(); g++) {
            std::vector<int> lits = slot_terms(q_.excl_gens.row(g));
            lits.push_back(vm_.excl_selectors[g]);
            xor_clauses(cnf_, std::move(lits), 0);
        }
        cnf_.add_clause(std::vector<int>(vm_.excl_selectors));
    }

  private:
    // L_i <= n-1: for every zero bit p of n-1, forbid L_p together with all
    // higher one-bits of n-1.
    void emit_range(size_t slot) {
        size_t c = q_.n - 1;
        for (size_t p = 0; p < bits_; p++) {
            if ((c >> p) & 1) continue;
            std::vector<int> clause{-slots_[slot].bits[p]};
            for (size_t h = p + 1; h < bits_; h++)
                if ((c >> h) & 1) clause.push_back(-slots_[slot].bits[h]);
            cnf_.add_clause(std::move(clause));
        }
    }

    // L_{i-1} <= L_i plus the first-occurrence flag f_i <-> (L_i != L_{i-1}).
    void emit_sorted_and_flag(size_t i) {
        int f = vm_.flag_vars[i];
        if (bits_ == 0) {
            cnf_.add_clause({-f}); // single location: later slots never differ
            return;
        }
        const auto &a = slots_[i - 1].bits, &b = slots_[i].bits;
        // eq_p <-> (a_p <-> b_p); pe_p <-> eq_{bits-1} & ... & eq_p
        std::vector<int> eq(bits_), pe(bits_);
        for (size_t p = 0; p < bits_; p++) {
            eq[p] = cnf_.new_var();
            cnf_.add_clause({-eq[p], -a[p], b[p]});
            cnf_.add_clause({-eq[p], a[p], -b[p]});
            cnf_.add_clause({eq[p], a[p], b[p]});
            cnf_.add_clause({eq[p], -a[p], -b[p]});
        }
        pe[bits_ - 1] = eq[bits_ - 1];
        for (size_t p = bits_ - 1; p-- > 0;) {
            pe[p] = cnf_.new_var();
            cnf_.add_clause({-pe[p], pe[p + 1]});
            cnf_.add_clause({-pe[p], eq[p]});
            cnf_.add_clause({pe[p], -pe[p + 1], -eq[p]});
        }
        if (opt_.sort_slots) {
            // lex order: a_p > b_p is forbidden whenever all higher bits are equal
            cnf_.add_clause({-a[bits_ - 1], b[bits_ - 1]});
            for (size_t p = bits_ - 1; p-- > 0;)
                cnf_.add_clause({-pe[p + 1], -a[p], b[p]});
        }
        slots_[i].prefix_eq_with_prev = pe[0];
        cnf_.add_clause({f, pe[0]});
        cnf_.add_clause({-f, -pe[0]});
    }

    // Literal list for "XOR over slots of f_i AND row[L_i]".
    std::vector<int> slot_terms(const BitString &row) {
        std::vector<int> terms;
        for (size_t i = 0; i < q_.weight_bound; i++) {
            int r = row_lookup(i, row);
            if (i == 0) {
                terms.push_back(r); // f_1 is constant true
                continue;
            }
            int u = cnf_.new_var();
            cnf_.add_clause({-u, vm_.flag_vars[i]});
            cnf_.add_clause({-u, r});
            cnf_.add_clause({u, -vm_.flag_vars[i], -r});
            terms.push_back(u);
        }
        return terms;
    }

    // r <-> row[L_i], as a fresh variable.
    int row_lookup(size_t slot, const BitString &row) {
        int r = cnf_.new_var();
        size_t support = row.popcount();
        if (support == 0) {
            cnf_.add_clause({-r});
        } else if (support <= opt_.support_threshold) {
            std::vector<int> any;
            for (size_t j = 0; j < q_.n; j++) {
                if (!row.get(j)) continue;
                int m = equals_const(slot, j);
                cnf_.add_clause({-m, r});
                any.push_back(m);
            }
            any.push_back(-r);
            cnf_.add_clause(std::move(any));
        } else {
            int node = mux(slot, row, bits_, 0);
            cnf_.add_clause({-r, node});
            cnf_.add_clause({r, -node});
        }
        return r;
    }

    // m <-> (L_slot = j); shared across rows within a slot.
    int equals_const(size_t slot, size_t j) {
        auto it = slots_[slot].eq_vars.find(j);
        if (it != slots_[slot].eq_vars.end()) return it->second;
        int m = cnf_.new_var();
        if (bits_ == 0) {
            cnf_.add_clause({m}); // n = 1: the only location is 0
        } else {
            std::vector<int> back{m};
            for (size_t p = 0; p < bits_; p++) {
                int lit = ((j >> p) & 1) ? slots_[slot].bits[p] : -slots_[slot].bits[p];
                cnf_.add_clause({-m, lit});
                back.push_back(-lit);
            }
            cnf_.add_clause(std::move(back));
        }
        slots_[slot].eq_vars[j] = m;
        return m;
    }

    // Shannon expansion of the constant row table over L_slot's bits; the
    // node covers positions [base, base + 2^depth). Positions >= n are
    // unreachable (range constraint) and read as 0. Returns a literal.
    int mux(size_t slot, const BitString &row, size_t depth, size_t base) {
        bool all0 = true, all1 = true;
        size_t hi = std::min(base + (size_t(1) << depth), q_.n);
        for (size_t j = base; j < hi; j++)
            (row.get(j) ? all0 : all1) = false;
        // positions >= n are unreachable under the range constraint
        if (base >= q_.n || all0) return -true_var();
        if (all1) return true_var();
        if (depth == 0) return row.get(base) ? true_var() : -true_var();

        int sel = slots_[slot].bits[depth - 1];
        int lo = mux(slot, row, depth - 1, base);
        int hi_node = mux(slot, row, depth - 1, base + (size_t(1) << (depth - 1)));
        int v = cnf_.new_var();
        cnf_.add_clause({-sel, -hi_node, v});
        cnf_.add_clause({-sel, hi_node, -v});
        cnf_.add_clause({sel, -lo, v});
        cnf_.add_clause({sel, lo, -v});
        return v;
    }

    // A variable pinned true, for constant folding in gadgets.
    int true_var() {
        if (!true_var_) {
            true_var_ = cnf_.new_var();
            cnf_.add_clause({true_var_});
        }
        return true_var_;
    }

    const DistanceQuery &q_;
    const LocationOptions &opt_;
    Cnf &cnf_;
    VarMap &vm_;
    size_t bits_ = 0;
    std::vector<SlotCodec> slots_;
    int true_var_ = 0;
};

} // namespace

EncodedQuery encode_location(const DistanceQuery &q, const LocationOptions &opt) {
    q.validate();
    if (q.n == 0)
        throw std::invalid_argument("encode_location: n must be >= 1");

    VarMap vm;
    vm.encoding = VarMap::Encoding::Location;
    vm.n = q.n;
    vm.w = q.weight_bound;
    if (q.excl_gens.rows() == 0) return trivially_unsat_query(std::move(vm));

    EncodedQuery out;
    LocationEncoder enc(q, opt, out);
    enc.run();
    return out;
}

Cnf encode_independence(const Gf2Matrix &m) {
    if (m.rows() < 1)
        throw std::invalid_argument("encode_independence: need at least one row");
    Cnf cnf;
    std::vector<int> coeff;
    for (size_t i = 0; i < m.rows(); i++) coeff.push_back(cnf.new_var());
    for (size_t j = 0; j < m.cols(); j++) {
        std::vector<int> lits;
        for (size_t i = 0; i < m.rows(); i++)
            if (m.get(i, j)) lits.push_back(coeff[i]);
        xor_clauses(cnf, std::move(lits), 0);
    }
    cnf.add_clause(std::move(coeff));
    return cnf;
}

std::string write_dimacs(const Cnf &c) {
    std::string out = "p cnf " + std::to_string(c.num_vars) + " " +
                      std::to_string(c.clauses.size()) + "\n";
    for (const auto &clause : c.clauses) {
        for (int l : clause) {
            out += std::to_string(l);
            out += ' ';
        }
        out += "0\n";
    }
    return out;
}

Cnf parse_dimacs(std::string_view text) {
    Cnf cnf;
    long declared_clauses = -1;
    bool header_seen = false;
    std::vector<int> current;
    size_t line_no = 0;

    size_t pos = 0;
    while (pos < text.size()) {
        size_t eol = text.find('\n', pos);
        std::string_view line = text.substr(pos, eol == std::string_view::npos ? std::string_view::npos : eol - pos);
        pos = eol == std::string_view::npos ? text.size() : eol + 1;
        line_no++;

        size_t first = line.find_first_not_of(" \t\r");
        if (first == std::string_view::npos) continue;
        if (line[first] == 'c') continue;
        if (line[first] == 'p') {
            if (header_seen) throw ParseError("duplicate header", line_no);
            int vars = 0;
            long clauses = 0;
            char tag[8] = {0};
            if (sscanf(std::string(line).c_str(), " p %7s %d %ld", tag, &vars, &clauses) != 3 ||
                std::string_view(tag) != "cnf" || vars < 0 || clauses < 0)
                throw ParseError("malformed header (expected 'p cnf <vars> <clauses>')", line_no);
            cnf.num_vars = vars;
            declared_clauses = clauses;
            header_seen = true;
            continue;
        }
        if (!header_seen) throw ParseError("clause before header", line_no);

        const char *p = line.data() + first;
        const char *end = line.data() + line.size();
        while (p < end) {
            while (p < end && (*p == ' ' || *p == '\t' || *p == '\r')) p++;
            if (p >= end) break;
            int lit = 0;
            auto [next, ec] = std::from_chars(p, end, lit);
            if (ec != std::errc())
                throw ParseError("expected integer literal", line_no);
            p = next;
            if (lit == 0) {
                if (current.empty()) throw ParseError("empty clause", line_no);
                try {
                    cnf.add_clause(std::move(current));
                } catch (const std::invalid_argument &e) {
                    throw ParseError(e.what(), line_no);
                }
                current.clear();
            } else {
                if (std::abs(lit) > cnf.num_vars)
                    throw ParseError("literal out of range", line_no);
                current.push_back(lit);
            }
        }
    }
    if (!header_seen) throw ParseError("missing header", line_no);
    if (!current.empty()) throw ParseError("missing clause terminator", line_no);
    if (declared_clauses >= 0 && static_cast<long>(cnf.clauses.size()) != declared_clauses)
        throw ParseError("header clause count mismatch (declared " +
                             std::to_string(declared_clauses) + ", found " +
                             std::to_string(cnf.clauses.size()) + ")",
                         line_no);
    return cnf;
}

} // namespace qdist
