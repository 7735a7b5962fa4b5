#pragma once

#include <string>

#include <json.hpp>

#include "qdist/code.hpp"
#include "qdist/encode.hpp"
#include "qdist/gf2.hpp"

namespace qdist {

using nlohmann::json;

/// {"rows": k, "cols": n, "data": ["<hex per row, LSB = column 0>", ...]}
json matrix_to_json(const Gf2Matrix &m);
Gf2Matrix matrix_from_json(const json &j);

/// {"name", "n", "hx", "hz", "ker_hx"?, "ker_hz"?, "claimed": {"k","d"}?}
json css_to_json(const CssCode &c);
CssCode css_from_json(const json &j);

/// {"l", "m", "a": [[i,j] x3], "b": [[i,j] x3]}
json bbspec_to_json(const BbSpec &s);
BbSpec bbspec_from_json(const json &j);

/// The witness-decoding sidecar written next to each CNF: role -> variable.
json varmap_to_json(const VarMap &vm);
VarMap varmap_from_json(const json &j);

/// Load a code file: either a CssCode object or a BbSpec (detected by
/// shape), building the BB code when needed.
CssCode load_code_file(const std::string &path);

json read_json_file(const std::string &path);
void write_file_atomic(const std::string &path, const std::string &contents);

} // namespace qdist
