#include <speckit/errors.hpp>
#include <speckit/series_io.hpp>

#include <sstream>

namespace speckit {

std::string to_text(const Series &f)
{
    if (f.is_zero()) {
        return "0/1";
    }
    std::string out;
    for (const auto &[e, c] : f.term_map()) {
        if (!out.empty()) {
            out += " + ";
        }
        out += c.fraction_str();
        for (std::size_t i = 0; i < e.size(); ++i) {
            if (e[i] != 0) {
                out += " " + f.variables()[i] + "^" + std::to_string(e[i]);
            }
        }
    }
    return out;
}

Series parse_text(std::string_view text, const Truncation &truncation)
{
    std::vector<std::pair<MultiIndex, Rational>> terms;
    std::istringstream in{std::string(text)};
    std::string tok;
    bool expect_coeff = true;
    while (in >> tok) {
        if (tok == "+") {
            if (expect_coeff) {
                throw UsageError("series text: unexpected '+'");
            }
            expect_coeff = true;
            continue;
        }
        if (expect_coeff) {
            if (tok.find('/') == std::string::npos) {
                throw UsageError("series text: expected <num>/<den>, found '" + tok + "'");
            }
            terms.emplace_back(MultiIndex{}, Rational::parse(tok));
            expect_coeff = false;
            continue;
        }
        const auto caret = tok.find('^');
        if (caret == std::string::npos || caret == 0) {
            throw UsageError("series text: expected var^k, found '" + tok + "'");
        }
        const auto m = parse_monomial(tok);
        for (const auto &[var, k] : m) {
            terms.back().first[var] += k;
        }
    }
    if (expect_coeff && !terms.empty()) {
        throw UsageError("series text: dangling '+'");
    }
    return Series::from_terms(truncation, terms);
}

nlohmann::json to_json(const MultiIndex &m)
{
    nlohmann::json j = nlohmann::json::object();
    for (const auto &[var, k] : m) {
        if (k != 0) {
            j[var] = k;
        }
    }
    return j;
}

nlohmann::json to_json(const Series &f)
{
    nlohmann::json caps = nlohmann::json::object();
    for (const auto &[var, cap] : f.truncation().caps()) {
        caps[var] = cap;
    }
    nlohmann::json terms = nlohmann::json::array();
    for (const auto &[e, c] : f.term_map()) {
        terms.push_back({{"exponents", to_json(f.to_multi_index(e))},
                         {"num", c.numerator_str()},
                         {"den", c.denominator_str()}});
    }
    return {{"caps", caps}, {"terms", terms}};
}

Series series_from_json(const nlohmann::json &j)
{
    try {
        std::map<std::string, int> caps;
        for (const auto &[var, cap] : j.at("caps").items()) {
            caps[var] = cap.get<int>();
        }
        std::vector<std::pair<MultiIndex, Rational>> terms;
        for (const auto &t : j.at("terms")) {
            MultiIndex m;
            for (const auto &[var, k] : t.at("exponents").items()) {
                m[var] = k.get<int>();
            }
            const auto num = t.at("num").get<std::string>();
            const auto den = t.at("den").get<std::string>();
            terms.emplace_back(std::move(m), Rational::parse(num + "/" + den));
        }
        return Series::from_terms(Truncation(std::move(caps)), terms);
    } catch (const nlohmann::json::exception &e) {
        throw UsageError(std::string("series JSON: ") + e.what());
    }
}

} // namespace speckit
