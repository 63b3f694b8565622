#pragma once

#include <string>
#include <string_view>

#include <json.hpp>

#include <speckit/series.hpp>

namespace speckit {

// Canonical one-line text form: graded-lex terms joined by " + ", each term
// "<num>/<den>" followed by " var^k" for every nonzero exponent in name
// order. The zero series is "0/1". Caps are not part of the text form.
std::string to_text(const Series &f);
Series parse_text(std::string_view text, const Truncation &truncation);

// {"caps": {var: int}, "terms": [{"exponents": {var: int}, "num": str, "den": str}]}
nlohmann::json to_json(const Series &f);
Series series_from_json(const nlohmann::json &j);

nlohmann::json to_json(const MultiIndex &m);

} // namespace speckit
