#include "qdist/json_io.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <unistd.h>

#include "qdist/error.hpp"

namespace qdist {

json matrix_to_json(const Gf2Matrix &m) {
    return json{{"rows", m.rows()}, {"cols", m.cols()}, {"data", m.to_hex_rows()}};
}

Gf2Matrix matrix_from_json(const json &j) {
    if (!j.is_object() || !j.contains("rows") || !j.contains("cols") || !j.contains("data"))
        throw ParseError("matrix JSON needs rows/cols/data");
    size_t rows = j.at("rows").get<size_t>();
    size_t cols = j.at("cols").get<size_t>();
    auto data = j.at("data").get<std::vector<std::string>>();
    if (data.size() != rows)
        throw ParseError("matrix JSON: row count disagrees with data length");
    try {
        return Gf2Matrix::from_hex_rows(data, cols);
    } catch (const std::invalid_argument &e) {
        throw ParseError(std::string("matrix JSON: ") + e.what());
    }
}

json css_to_json(const CssCode &c) {
    json j{{"name", c.name},
           {"n", c.n},
           {"hx", matrix_to_json(c.hx)},
           {"hz", matrix_to_json(c.hz)}};
    if (c.ker_hx) j["ker_hx"] = matrix_to_json(*c.ker_hx);
    if (c.ker_hz) j["ker_hz"] = matrix_to_json(*c.ker_hz);
    if (c.claimed) j["claimed"] = json{{"k", c.claimed->k}, {"d", c.claimed->d}};
    return j;
}

CssCode css_from_json(const json &j) {
    CssCode c;
    c.name = j.value("name", "");
    if (!j.contains("n") || !j.contains("hx") || !j.contains("hz"))
        throw ParseError("code JSON needs n/hx/hz");
    c.n = j.at("n").get<size_t>();
    c.hx = matrix_from_json(j.at("hx"));
    c.hz = matrix_from_json(j.at("hz"));
    if (c.hx.cols() != c.n || c.hz.cols() != c.n)
        throw ParseError("code JSON: parity-check width disagrees with n");
    if (j.contains("ker_hx")) c.ker_hx = matrix_from_json(j.at("ker_hx"));
    if (j.contains("ker_hz")) c.ker_hz = matrix_from_json(j.at("ker_hz"));
    if (j.contains("claimed")) {
        ClaimedParams p;
        p.k = j.at("claimed").value("k", -1);
        p.d = j.at("claimed").value("d", -1);
        c.claimed = p;
    }
    return c;
}

json bbspec_to_json(const BbSpec &s) {
    auto mons = [](const std::array<std::pair<unsigned, unsigned>, 3> &a) {
        json out = json::array();
        for (auto [i, j] : a) out.push_back(json::array({i, j}));
        return out;
    };
    return json{{"l", s.l}, {"m", s.m}, {"a", mons(s.a_monomials)}, {"b", mons(s.b_monomials)}};
}

BbSpec bbspec_from_json(const json &j) {
    BbSpec s;
    s.l = j.at("l").get<size_t>();
    s.m = j.at("m").get<size_t>();
    auto read = [](const json &arr, std::array<std::pair<unsigned, unsigned>, 3> &out) {
        if (!arr.is_array() || arr.size() != 3)
            throw ParseError("BB spec: expected exactly 3 monomials");
        for (size_t i = 0; i < 3; i++)
            out[i] = {arr[i].at(0).get<unsigned>(), arr[i].at(1).get<unsigned>()};
    };
    read(j.at("a"), s.a_monomials);
    read(j.at("b"), s.b_monomials);
    return s;
}

json varmap_to_json(const VarMap &vm) {
    json vars = json::object();
    if (vm.encoding == VarMap::Encoding::PerBit) {
        for (size_t i = 0; i < vm.error_vars.size(); i++)
            vars["e" + std::to_string(i)] = vm.error_vars[i];
    } else {
        for (size_t i = 0; i < vm.loc_vars.size(); i++)
            for (size_t b = 0; b < vm.loc_vars[i].size(); b++)
                vars["loc" + std::to_string(i) + "_b" + std::to_string(b)] = vm.loc_vars[i][b];
        for (size_t i = 0; i < vm.flag_vars.size(); i++)
            vars["flag" + std::to_string(i)] = vm.flag_vars[i];
    }
    for (size_t g = 0; g < vm.excl_selectors.size(); g++)
        vars["t" + std::to_string(g)] = vm.excl_selectors[g];
    return json{{"encoding", vm.encoding == VarMap::Encoding::PerBit ? "perbit" : "location"},
                {"n", vm.n},
                {"w", vm.w},
                {"loc_bits", vm.loc_bits},
                {"first_aux", vm.first_aux},
                {"vars", vars}};
}

VarMap varmap_from_json(const json &j) {
    VarMap vm;
    std::string enc = j.at("encoding").get<std::string>();
    if (enc == "perbit")
        vm.encoding = VarMap::Encoding::PerBit;
    else if (enc == "location")
        vm.encoding = VarMap::Encoding::Location;
    else
        throw ParseError("varmap JSON: unknown encoding '" + enc + "'");
    vm.n = j.at("n").get<size_t>();
    vm.w = j.at("w").get<size_t>();
    vm.loc_bits = j.value("loc_bits", size_t{0});
    vm.first_aux = j.value("first_aux", 0);
    const json &vars = j.at("vars");
    if (vm.encoding == VarMap::Encoding::PerBit) {
        vm.error_vars.resize(vm.n, 0);
        for (size_t i = 0; i < vm.n; i++)
            vm.error_vars[i] = vars.at("e" + std::to_string(i)).get<int>();
    } else {
        vm.loc_vars.assign(vm.w, std::vector<int>(vm.loc_bits, 0));
        vm.flag_vars.resize(vm.w, 0);
        for (size_t i = 0; i < vm.w; i++) {
            for (size_t b = 0; b < vm.loc_bits; b++)
                vm.loc_vars[i][b] = vars.at("loc" + std::to_string(i) + "_b" + std::to_string(b)).get<int>();
            vm.flag_vars[i] = vars.at("flag" + std::to_string(i)).get<int>();
        }
    }
    for (size_t g = 0;; g++) {
        auto it = vars.find("t" + std::to_string(g));
        if (it == vars.end()) break;
        vm.excl_selectors.push_back(it->get<int>());
    }
    return vm;
}

json read_json_file(const std::string &path) {
    std::ifstream f(path);
    if (!f) throw ParseError("cannot open file: " + path);
    json j;
    try {
        f >> j;
    } catch (const json::parse_error &e) {
        throw ParseError(std::string("invalid JSON in ") + path + ": " + e.what());
    }
    return j;
}

CssCode load_code_file(const std::string &path) {
    json j = read_json_file(path);
    if (j.contains("hx")) return css_from_json(j);
    if (j.contains("a") && j.contains("l")) {
        std::filesystem::path p(path);
        return bb_build(bbspec_from_json(j), p.stem().string());
    }
    throw ParseError("unrecognized code file shape (expected CSS code or BB spec): " + path);
}

void write_file_atomic(const std::string &path, const std::string &contents) {
    std::string tmp = path + ".tmp." + std::to_string(::getpid());
    {
        std::ofstream f(tmp, std::ios::binary | std::ios::trunc);
        if (!f) throw std::runtime_error("cannot write " + tmp);
        f << contents;
    }
    std::filesystem::rename(tmp, path);
}

} // namespace qdist
