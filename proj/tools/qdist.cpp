// qdist: SAT-certified minimum distance for CSS stabilizer codes.

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "qdist/cert.hpp"
#include "qdist/error.hpp"
#include "qdist/json_io.hpp"
#include "qdist/oracle.hpp"
#include "qdist/pipeline.hpp"

using namespace qdist;

namespace {

void emit_report(const Report &rep, const std::string &out_path) {
    std::string text = rep.to_json().dump(2) + "\n";
    if (out_path.empty())
        std::cout << text;
    else
        write_file_atomic(out_path, text);
}

std::pair<unsigned, unsigned> parse_monomial(const std::string &tok) {
    if (tok == "1") return {0, 0};
    unsigned xi = 0, yj = 0;
    size_t pos = 0;
    bool any = false;
    auto read_exp = [&](char axis, unsigned &out) {
        if (pos < tok.size() && tok[pos] == axis) {
            pos++;
            size_t start = pos;
            while (pos < tok.size() && isdigit(static_cast<unsigned char>(tok[pos]))) pos++;
            out = pos == start ? 1 : unsigned(std::stoul(tok.substr(start, pos - start)));
            any = true;
        }
    };
    read_exp('x', xi);
    read_exp('y', yj);
    if (!any || pos != tok.size())
        throw ParseError("bad monomial '" + tok + "' (expected 1, xI, yJ, or xIyJ)");
    return {xi, yj};
}

std::array<std::pair<unsigned, unsigned>, 3> parse_monomials(const std::string &s) {
    std::array<std::pair<unsigned, unsigned>, 3> out;
    std::stringstream ss(s);
    std::string tok;
    size_t i = 0;
    while (std::getline(ss, tok, ',')) {
        if (i >= 3) throw ParseError("expected exactly 3 monomials in '" + s + "'");
        out[i++] = parse_monomial(tok);
    }
    if (i != 3) throw ParseError("expected exactly 3 monomials in '" + s + "'");
    return out;
}

struct SolverFlags {
    std::string backend = "internal";
    std::string path;
    double timeout = 0;
    uint64_t seed = 0;

    void attach(CLI::App *cmd) {
        cmd->add_option("--solver", backend, "SAT backend: internal or external")
            ->check(CLI::IsMember({"internal", "external"}));
        cmd->add_option("--solver-path", path,
                        "external solver executable (default: $QDIST_EXTERNAL_SOLVER)");
        cmd->add_option("--timeout", timeout, "per-query timeout in seconds (0 = none)");
        cmd->add_option("--seed", seed, "internal solver seed");
    }

    SolverConfig to_config() const {
        SolverConfig cfg;
        cfg.timeout_seconds = timeout;
        cfg.seed = seed;
        if (backend == "external") {
            cfg.backend = SolverConfig::Backend::External;
            cfg.external_path = path;
            if (cfg.external_path.empty())
                if (const char *env = std::getenv("QDIST_EXTERNAL_SOLVER"))
                    cfg.external_path = env;
            if (cfg.external_path.empty())
                throw std::invalid_argument(
                    "external backend needs --solver-path or QDIST_EXTERNAL_SOLVER");
        }
        return cfg;
    }
};

PipelineOptions::EncodingChoice encoding_choice(const std::string &s) {
    if (s == "perbit") return PipelineOptions::EncodingChoice::PerBit;
    if (s == "location") return PipelineOptions::EncodingChoice::Location;
    return PipelineOptions::EncodingChoice::Auto;
}

int run(int argc, char **argv) {
    CLI::App app{"qdist: SAT-certified minimum distance for CSS stabilizer codes"};
    app.require_subcommand(1);

    // validate
    auto *validate = app.add_subcommand("validate", "check orthogonality, ranks, kernels");
    std::string v_code, v_out;
    validate->add_option("code", v_code, "code JSON file")->required();
    validate->add_option("--out", v_out, "write the report here instead of stdout");

    // distance
    auto *distance = app.add_subcommand("distance", "prove or refute distance >= d");
    std::string d_code, d_out, d_enc = "auto", d_cache;
    size_t d_bound = 0;
    bool d_cert = false;
    SolverFlags d_solver;
    distance->add_option("code", d_code)->required();
    distance->add_option("--d", d_bound, "distance bound to prove")->required();
    distance->add_option("--encoding", d_enc)->check(CLI::IsMember({"auto", "perbit", "location"}));
    distance->add_flag("--cert", d_cert, "demand and re-check LRAT certificates");
    distance->add_option("--cache", d_cache, "content-addressed cache directory");
    distance->add_option("--out", d_out);
    d_solver.attach(distance);

    // exact
    auto *exact = app.add_subcommand("exact", "bracket the exact distance");
    std::string e_code, e_out, e_enc = "auto", e_cache, e_method = "auto";
    bool e_cert = false;
    SolverFlags e_solver;
    exact->add_option("code", e_code)->required();
    exact->add_option("--encoding", e_enc)->check(CLI::IsMember({"auto", "perbit", "location"}));
    exact->add_option("--method", e_method)->check(CLI::IsMember({"auto", "sat", "oracle"}));
    exact->add_flag("--cert", e_cert);
    exact->add_option("--cache", e_cache);
    exact->add_option("--out", e_out);
    e_solver.attach(exact);

    // encode
    auto *encode = app.add_subcommand("encode", "write the DIMACS CNF and varmap sidecar");
    std::string n_code, n_sector, n_enc = "auto", n_out;
    size_t n_w = 0;
    encode->add_option("code", n_code)->required();
    encode->add_option("--sector", n_sector)->required()->check(CLI::IsMember({"x", "z"}));
    encode->add_option("--w", n_w, "weight bound")->required();
    encode->add_option("--encoding", n_enc)->check(CLI::IsMember({"auto", "perbit", "location"}));
    encode->add_option("--out", n_out, "output prefix (.cnf / .varmap.json)")->required();

    // bb
    auto *bb = app.add_subcommand("bb", "build a bivariate bicycle code file");
    std::string b_a, b_b, b_name, b_out;
    size_t b_l = 0, b_m = 0;
    bb->add_option("--l", b_l)->required();
    bb->add_option("--m", b_m)->required();
    bb->add_option("--a", b_a, "three monomials, e.g. x3,y1,y2")->required();
    bb->add_option("--b", b_b, "three monomials, e.g. y3,x1,x2")->required();
    bb->add_option("--name", b_name);
    bb->add_option("--out", b_out)->required();

    // check-cert
    auto *check = app.add_subcommand("check-cert", "replay an LRAT certificate");
    std::string c_cnf, c_lrat;
    check->add_option("cnf", c_cnf)->required();
    check->add_option("lrat", c_lrat)->required();

    // solve-dimacs (also serves as an external-backend stand-in)
    auto *sd = app.add_subcommand("solve-dimacs", "solve a DIMACS file, print s/v lines");
    std::string s_cnf, s_proof;
    uint64_t s_seed = 0;
    double s_timeout = 0;
    sd->add_option("cnf", s_cnf)->required();
    sd->add_option("proof", s_proof, "write an LRAT proof here on UNSAT");
    sd->add_option("--seed", s_seed);
    sd->add_option("--timeout", s_timeout);

    CLI11_PARSE(app, argc, argv);

    if (validate->parsed()) {
        Report rep = run_validate(load_code_file(v_code));
        emit_report(rep, v_out);
        return int(rep.exit_code());
    }

    if (distance->parsed()) {
        PipelineOptions opt;
        opt.encoding = encoding_choice(d_enc);
        opt.solver = d_solver.to_config();
        opt.check_certificates = d_cert;
        opt.cache_dir = d_cache;
        CssCode code = load_code_file(d_code);
        Report vr = run_validate(code);
        if (vr.exit_code() != ExitCode::Proven) {
            emit_report(vr, d_out);
            return int(ExitCode::InvalidInput);
        }
        Report rep = run_distance(code, d_bound, opt);
        emit_report(rep, d_out);
        return int(rep.exit_code());
    }

    if (exact->parsed()) {
        PipelineOptions opt;
        opt.encoding = encoding_choice(e_enc);
        opt.solver = e_solver.to_config();
        opt.check_certificates = e_cert;
        opt.cache_dir = e_cache;
        opt.method = e_method;
        CssCode code = load_code_file(e_code);
        Report vr = run_validate(code);
        if (vr.exit_code() != ExitCode::Proven) {
            emit_report(vr, e_out);
            return int(ExitCode::InvalidInput);
        }
        Report rep = run_exact(code, opt);
        emit_report(rep, e_out);
        return int(rep.exit_code());
    }

    if (encode->parsed()) {
        CssCode code = load_code_file(n_code);
        DistanceQuery q = sector_query(code, n_sector[0], n_w);
        EncodedQuery enc = encode_query(q, encoding_choice(n_enc));
        write_file_atomic(n_out + ".cnf", write_dimacs(enc.cnf));
        write_file_atomic(n_out + ".varmap.json", varmap_to_json(enc.vm).dump(2) + "\n");
        std::cout << "wrote " << n_out << ".cnf (" << enc.cnf.num_vars << " vars, "
                  << enc.cnf.clauses.size() << " clauses)\n";
        return 0;
    }

    if (bb->parsed()) {
        BbSpec spec;
        spec.l = b_l;
        spec.m = b_m;
        spec.a_monomials = parse_monomials(b_a);
        spec.b_monomials = parse_monomials(b_b);
        CssCode code = bb_build(spec, b_name.empty() ? "bb" : b_name);
        Report rep = run_validate(code);
        if (rep.exit_code() != ExitCode::Proven) return int(ExitCode::InvalidInput);
        code.ker_hx = kernel_basis(code.hx);
        code.ker_hz = kernel_basis(code.hz);
        code.claimed = ClaimedParams{int(*rep.k), -1};
        write_file_atomic(b_out, css_to_json(code).dump(2) + "\n");
        std::cout << "wrote " << b_out << " (n=" << code.n << ", k=" << *rep.k << ")\n";
        return 0;
    }

    if (check->parsed()) {
        std::ifstream cf(c_cnf);
        if (!cf) throw ParseError("cannot open " + c_cnf);
        std::stringstream cs;
        cs << cf.rdbuf();
        Cnf cnf = parse_dimacs(cs.str());
        std::ifstream lf(c_lrat);
        if (!lf) throw ParseError("cannot open " + c_lrat);
        std::stringstream ls;
        ls << lf.rdbuf();
        auto res = check_lrat(cnf, parse_lrat(ls.str(), cnf.clauses.size()));
        if (res.accepted) {
            std::cout << "accepted (" << res.clauses_added << " additions, "
                      << res.clauses_deleted << " deletions)\n";
            return 0;
        }
        std::cout << "rejected at line id " << res.line_id << ": " << res.reason << "\n";
        return 1;
    }

    if (sd->parsed()) {
        std::ifstream cf(s_cnf);
        if (!cf) throw ParseError("cannot open " + s_cnf);
        std::stringstream cs;
        cs << cf.rdbuf();
        Cnf cnf = parse_dimacs(cs.str());
        SolverConfig cfg;
        cfg.seed = s_seed;
        cfg.timeout_seconds = s_timeout;
        cfg.produce_proof = !s_proof.empty();
        SolveOutcome out = solve(cnf, cfg);
        if (out.is_sat()) {
            std::cout << "s SATISFIABLE\n";
            std::string line = "v";
            for (int v = 1; v <= cnf.num_vars; v++) {
                line += ' ';
                line += std::to_string(out.model[v] ? v : -v);
                if (line.size() > 70) {
                    std::cout << line << "\n";
                    line = "v";
                }
            }
            std::cout << line << " 0\n";
            return 10;
        }
        if (out.is_unsat()) {
            if (!s_proof.empty()) write_file_atomic(s_proof, out.proof);
            std::cout << "s UNSATISFIABLE\n";
            return 20;
        }
        std::cout << "s UNKNOWN\n";
        return int(ExitCode::Unknown);
    }

    return int(ExitCode::InvalidInput);
}

} // namespace

int main(int argc, char **argv) {
    try {
        return run(argc, argv);
    } catch (const SoundnessError &e) {
        std::cerr << "internal soundness error: " << e.what() << "\n";
        return int(ExitCode::SoundnessFault);
    } catch (const ParseError &e) {
        std::cerr << "error: " << e.what() << "\n";
        return int(ExitCode::InvalidInput);
    } catch (const InvalidCodeError &e) {
        std::cerr << "error: " << e.what() << "\n";
        return int(ExitCode::InvalidInput);
    } catch (const std::invalid_argument &e) {
        std::cerr << "error: " << e.what() << "\n";
        return int(ExitCode::InvalidInput);
    } catch (const std::exception &e) {
        std::cerr << "error: " << e.what() << "\n";
        return int(ExitCode::Unknown);
    }
}
