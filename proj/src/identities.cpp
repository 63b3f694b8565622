#include <speckit/errors.hpp>
#include <speckit/identities.hpp>
#include <speckit/operators.hpp>
#include <speckit/oracle.hpp>
#include <speckit/series_io.hpp>

#include <algorithm>
#include <chrono>
#include <future>
#include <iomanip>
#include <ostream>
#include <random>
#include <set>

namespace speckit {

// ------------------------------------------------------------------ reports

void append_mismatches(VerificationReport &report, const Series &lhs, const Series &rhs, const std::string &routes,
                       const Truncation &window)
{
    const Truncation w = merge(merge(lhs.truncation(), rhs.truncation()), window);
    const Series a = lhs.retruncated(w);
    const Series b = rhs.retruncated(w);
    std::set<Series::Exponents, Series::GradedLexLess> keys;
    for (const auto &kv : a.term_map()) {
        keys.insert(kv.first);
    }
    for (const auto &kv : b.term_map()) {
        keys.insert(kv.first);
    }
    for (const auto &e : keys) {
        const auto ia = a.term_map().find(e);
        const auto ib = b.term_map().find(e);
        const Rational ca = ia == a.term_map().end() ? Rational(0) : ia->second;
        const Rational cb = ib == b.term_map().end() ? Rational(0) : ib->second;
        if (ca != cb) {
            report.mismatches.push_back({a.to_multi_index(e), ca, cb, routes});
        }
    }
}

VerificationReport compare_series(const std::string &identity, const Series &lhs, const Series &rhs,
                                  const Truncation &window, const std::string &routes)
{
    VerificationReport report;
    report.identity = identity;
    report.caps = window;
    append_mismatches(report, lhs, rhs, routes, window);
    return report;
}

nlohmann::json to_json(const VerificationReport &report, bool include_timing)
{
    nlohmann::json caps = nlohmann::json::object();
    for (const auto &[var, cap] : report.caps.caps()) {
        caps[var] = cap;
    }
    nlohmann::json mismatches = nlohmann::json::array();
    for (const auto &m : report.mismatches) {
        mismatches.push_back(
            {{"monomial", to_json(m.monomial)}, {"lhs", m.lhs.str()}, {"rhs", m.rhs.str()}, {"routes", m.routes}});
    }
    nlohmann::json j{{"identity", report.identity},
                     {"caps", caps},
                     {"status", report.passed() ? "pass" : "fail"},
                     {"mismatches", mismatches},
                     {"errata", report.errata}};
    if (include_timing) {
        j["wallTimeMs"] = report.wall_time_ms;
    }
    return j;
}

void print_table(std::ostream &os, const std::vector<VerificationReport> &reports)
{
    os << std::left << std::setw(22) << "identity" << std::setw(8) << "status" << std::setw(12) << "mismatches"
       << std::setw(8) << "errata" << std::right << std::setw(10) << "ms" << "  caps\n";
    for (const auto &r : reports) {
        os << std::left << std::setw(22) << r.identity << std::setw(8) << (r.passed() ? "pass" : "FAIL")
           << std::setw(12) << r.mismatches.size() << std::setw(8) << r.errata.size() << std::right << std::setw(10)
           << std::fixed << std::setprecision(1) << r.wall_time_ms << "  " << r.caps.str() << '\n';
    }
    for (const auto &r : reports) {
        for (std::size_t i = 0; i < r.mismatches.size() && i < 10; ++i) {
            const auto &m = r.mismatches[i];
            os << "  " << r.identity << ": [" << m.routes << "] " << monomial_str(m.monomial) << ": " << m.lhs
               << " != " << m.rhs << '\n';
        }
        if (r.mismatches.size() > 10) {
            os << "  " << r.identity << ": ... " << r.mismatches.size() - 10 << " more\n";
        }
        for (const auto &e : r.errata) {
            os << "  " << r.identity << ": " << e << '\n';
        }
    }
}

// -------------------------------------------------------------- model layer

namespace {

Series var(const std::string &name, const Truncation &caps)
{
    return Series::variable(name, caps);
}

Series mono(std::string_view m, const Rational &c, const Truncation &caps)
{
    return Series::monomial(parse_monomial(m), c, caps);
}

void require_cap(const Truncation &caps, const std::string &v, const char *who)
{
    if (!caps.has(v)) {
        throw UsageError(std::string(who) + ": caps must include '" + v + "'");
    }
}

int cap_of(const Truncation &caps, const std::string &v)
{
    return caps.cap(v).value_or(0);
}

std::string egf_note(const Series &f, const MultiIndex &m)
{
    return egf_count(f, m).str();
}

} // namespace

ClassExpr closed_chain_class()
{
    return weighted(Rational(1, 2), cyc_of(weighted(Rational(2), atom("y^2*t"))));
}

Series glaisher_closed_form(const Truncation &caps)
{
    const Series z = mono("y^2*t", Rational(2), caps);
    return pow_frac(-z, Rational(-1, 2)) * exp_series(mono("x^2*t", Rational(1), caps) * geometric(z));
}

Series glaisher_undivided_form(const Truncation &caps)
{
    const Series z = mono("y^2*t", Rational(2), caps);
    return geometric(z) * exp_series(mono("x^2*t", Rational(1), caps) * geometric(z));
}

Series glaisher_unhalved_expansion(const Truncation &caps)
{
    const Series f = compile(set_of(atom("x^2*t")), {caps});
    Series sum = f;
    Series term = f;
    for (int k = 1; !term.is_zero(); ++k) {
        // (y d/dx)^2 without the 1/2
        term = Rational(1, k) * (mono("y^2", Rational(1), caps) * differentiate(differentiate(term, "x"), "x"));
        sum += term;
    }
    return sum;
}

Series glaisher_operator_route(const Truncation &caps)
{
    return apply_exp_half_square(compile(set_of(atom("x^2*t")), {caps}), "x", "y");
}

namespace {

ErratumFinding erratum_against_oracle(const std::string &label, const Series &candidate, const Truncation &caps)
{
    ErratumFinding out;
    const Series oracle = oracle_egf(cap_of(caps, "t"));
    VerificationReport tmp;
    append_mismatches(tmp, oracle, candidate, "oracle/" + label, caps);
    out.mismatches = std::move(tmp.mismatches);
    std::stable_sort(out.mismatches.begin(), out.mismatches.end(), [](const Mismatch &a, const Mismatch &b) {
        const auto ta = a.monomial.count("t") ? a.monomial.at("t") : 0;
        const auto tb = b.monomial.count("t") ? b.monomial.at("t") : 0;
        return ta < tb;
    });
    if (!out.mismatches.empty()) {
        out.first = out.mismatches.front();
    }
    return out;
}

std::string describe_first(const ErratumFinding &f)
{
    if (!f.first) {
        return "no mismatch within caps";
    }
    const auto &m = *f.first;
    const int n = m.monomial.count("t") ? m.monomial.at("t") : 0;
    const Rational nf = Rational::factorial(static_cast<unsigned>(n));
    return "first mismatch at t-degree " + std::to_string(n) + ", " + monomial_str(m.monomial) + ": egf count "
           + (nf * m.lhs).str() + " (oracle) vs " + (nf * m.rhs).str();
}

} // namespace

ErratumFinding undivided_prefactor_erratum(const Truncation &caps)
{
    auto f = erratum_against_oracle("undivided", glaisher_undivided_form(caps), caps);
    f.description = "erratum: prefactor 1/(1-2y^2t) (closed chains counted as directed cycles, "
                    "A = log 1/(1-2y^2t)) disagrees with the matching oracle; "
                    + describe_first(f);
    const MultiIndex y4t2{{"y", 4}, {"t", 2}};
    if (caps.admits(y4t2)) {
        f.description += "; at y^4*t^2 egf count " + egf_note(oracle_egf(cap_of(caps, "t")), y4t2) + " vs "
                         + egf_note(glaisher_undivided_form(caps), y4t2);
    }
    f.description += "; the square-root prefactor (1-2y^2t)^(-1/2) with A = 1/2 log 1/(1-2y^2t) agrees";
    return f;
}

ErratumFinding unhalved_expansion_erratum(const Truncation &caps)
{
    auto f = erratum_against_oracle("unhalved", glaisher_unhalved_expansion(caps), caps);
    f.description = "erratum: expanding exp(1/2 (y D_x)^2) as sum_k 1/k! (y D_x)^(2k) without the (1/2)^k factor "
                    "disagrees with the matching oracle; "
                    + describe_first(f);
    return f;
}

Series hermite_he(int n, const Truncation &caps)
{
    Series prev = Series::constant(Rational(1), caps);
    if (n == 0) {
        return prev;
    }
    const Series x = var("x", caps);
    Series cur = x;
    for (int k = 1; k < n; ++k) {
        Series next = x * cur - Rational(k) * prev;
        prev = std::move(cur);
        cur = std::move(next);
    }
    return cur;
}

namespace {

Series random_polynomial(std::mt19937_64 &rng, const std::vector<std::string> &vars, int max_degree,
                         const Truncation &caps, bool allow_constant = true)
{
    std::uniform_int_distribution<int> coef(-3, 3);
    std::uniform_int_distribution<int> deg(0, max_degree);
    std::uniform_int_distribution<int> nterms(1, 4);
    std::vector<std::pair<MultiIndex, Rational>> terms;
    const int count = nterms(rng);
    for (int i = 0; i < count; ++i) {
        MultiIndex m;
        int total = 0;
        for (const auto &v : vars) {
            const int d = deg(rng);
            if (total + d <= max_degree) {
                m[v] = d;
                total += d;
            }
        }
        if (!allow_constant && total == 0) {
            m[vars.front()] = 1;
        }
        const int c = coef(rng);
        terms.emplace_back(std::move(m), Rational(c == 0 ? 1 : c, 1 + static_cast<long>(rng() % 3)));
    }
    return Series::from_terms(caps, terms);
}

} // namespace

std::vector<std::pair<std::string, Series>> taylor_battery(const Truncation &caps)
{
    std::vector<std::pair<std::string, Series>> out;
    out.emplace_back("x^3", mono("x^3", Rational(1), caps));
    out.emplace_back("0", Series(caps));
    out.emplace_back("1", Series::constant(Rational(1), caps));
    out.emplace_back("x^2", mono("x^2", Rational(1), caps));
    if (caps.has("t")) {
        out.emplace_back("exp(x*t)", compile(set_of(atom("x*t")), {caps}));
        out.emplace_back("exp(x^2*t)", compile(set_of(atom("x^2*t")), {caps}));
        out.emplace_back("1/(1-x*t)", geometric(mono("x*t", Rational(1), caps)));
    }
    std::mt19937_64 rng(0x7a1105);
    std::vector<std::string> vars{"x"};
    if (caps.has("t")) {
        vars.push_back("t");
    }
    const int max_degree = std::min(6, cap_of(caps, "x"));
    for (int i = static_cast<int>(out.size()); i < 20; ++i) {
        out.emplace_back("random#" + std::to_string(i), random_polynomial(rng, vars, max_degree, caps));
    }
    return out;
}

std::vector<FlowCase> random_flow_cases(int count, std::uint64_t seed, const Truncation &caps)
{
    std::mt19937_64 rng(seed);
    std::vector<FlowCase> out;
    for (int i = 0; i < count; ++i) {
        FlowCase c{random_polynomial(rng, {"x"}, 3, caps), random_polynomial(rng, {"x"}, 3, caps),
                   random_polynomial(rng, {"x"}, 3, caps)};
        out.push_back(std::move(c));
    }
    return out;
}

namespace {

const std::vector<std::string> kAtomWeights{"x*t", "y*t", "x^2*t", "x*y*t", "y^2*t", "t"};

ClassExpr random_class(std::mt19937_64 &rng, int depth, bool positive)
{
    std::uniform_int_distribution<int> pick_atom(0, static_cast<int>(kAtomWeights.size()) - 1);
    std::uniform_int_distribution<int> small(1, 3);
    if (depth <= 0) {
        return atom(kAtomWeights[static_cast<std::size_t>(pick_atom(rng))]);
    }
    std::uniform_int_distribution<int> kind(0, positive ? 8 : 11);
    switch (kind(rng)) {
    case 0:
    case 1:
        return atom(kAtomWeights[static_cast<std::size_t>(pick_atom(rng))]);
    case 2:
        return random_class(rng, depth - 1, positive) + random_class(rng, depth - 1, positive);
    case 3:
        // one positive factor is enough for the product
        return random_class(rng, depth - 1, positive) * random_class(rng, depth - 1, false);
    case 4:
        return power_of(random_class(rng, depth - 1, positive), small(rng) - (positive ? 0 : 1));
    case 5:
        return cyc_of(random_class(rng, depth - 1, true));
    case 6:
        return weighted(Rational(small(rng)), random_class(rng, depth - 1, positive));
    case 7:
        return subst(random_class(rng, depth - 1, positive), "x", random_class(rng, depth - 1, true));
    case 8:
        // symmetrised doubleton 1/2 (A)^2 keeps integer counts
        return weighted(Rational(1, 2), power_of(atom("y*t"), 2)) + random_class(rng, depth - 1, positive);
    case 9:
        return set_of(random_class(rng, depth - 1, true));
    case 10:
        return seq_of(random_class(rng, depth - 1, true));
    default:
        return neutral();
    }
}

} // namespace

ClassExpr random_positive_class(std::uint64_t seed, int depth)
{
    std::mt19937_64 rng(seed);
    return random_class(rng, depth, true);
}

// ---------------------------------------------------------------- verifiers

VerificationReport verify_taylor(const Truncation &caps)
{
    require_cap(caps, "x", "verify_taylor");
    require_cap(caps, "y", "verify_taylor");
    VerificationReport report;
    report.identity = "taylor";
    report.caps = caps;
    const Series shift = var("x", caps) + var("y", caps);
    for (const auto &[label, f] : taylor_battery(caps)) {
        append_mismatches(report, apply_exp_shift(f, "x", "y"), substitute(f, "x", shift),
                          "exp_shift/subst " + label, caps);
    }
    return report;
}

VerificationReport verify_shift_dilation(const Truncation &caps)
{
    require_cap(caps, "x", "verify_shift_dilation");
    require_cap(caps, "lambda", "verify_shift_dilation");
    VerificationReport report;
    report.identity = "shift-dilation";
    report.caps = caps;

    const Series x = var("x", caps);
    const Series lambda = var("lambda", caps);
    const Series zero(caps);
    const Series one = Series::constant(Rational(1), caps);
    const Series e_lambda = exp_series(lambda);

    std::mt19937_64 rng(11);
    std::vector<std::pair<std::string, Series>> battery{
        {"x^2", x * x}, {"x^3", x * x * x}, {"1", one}, {"0", zero}};
    for (int i = 0; i < 4; ++i) {
        battery.emplace_back("random#" + std::to_string(i), random_polynomial(rng, {"x"}, 3, caps));
    }
    for (const auto &[label, F] : battery) {
        const auto shift = flow_exp(one, zero, F, "lambda", caps);
        append_mismatches(report, shift.result, substitute(F, "x", x + lambda), "shift " + label, caps);
        append_mismatches(report, shift.T, x + lambda, "shift T", caps);

        const auto dilation = flow_exp(x, zero, F, "lambda", caps);
        append_mismatches(report, dilation.result, substitute(F, "x", x * e_lambda), "dilation " + label, caps);
        append_mismatches(report, dilation.T, x * e_lambda, "dilation T", caps);

        const auto mult = flow_exp(zero, one, F, "lambda", caps);
        append_mismatches(report, mult.result, e_lambda * F, "multiplication " + label, caps);
    }
    auto flows = verify_flow_routes(50, cap_of(caps, "lambda"));
    report.mismatches.insert(report.mismatches.end(), flows.mismatches.begin(), flows.mismatches.end());
    return report;
}

VerificationReport verify_hermite_monomial(int n_max)
{
    if (n_max < 0) {
        throw UsageError("verify_hermite_monomial: n_max must be non-negative");
    }
    const Truncation caps{{"x", n_max}, {"y", n_max}};
    VerificationReport report;
    report.identity = "hermite-monomial";
    report.caps = caps;
    for (int n = 0; n <= n_max; ++n) {
        const Series xn = mono("x^" + std::to_string(n), Rational(1), caps);
        const Series action = apply_exp_half_square(xn, "x", "y");

        std::vector<std::pair<MultiIndex, Rational>> closed;
        const auto involutions = enumerate_involutions(n);
        std::vector<std::pair<MultiIndex, Rational>> counted;
        for (int k = 0; 2 * k <= n; ++k) {
            const MultiIndex m{{"x", n - 2 * k}, {"y", 2 * k}};
            closed.emplace_back(m, Rational::factorial(static_cast<unsigned>(n))
                                       / (Rational(2).pow(static_cast<unsigned>(k))
                                          * Rational::factorial(static_cast<unsigned>(k))
                                          * Rational::factorial(static_cast<unsigned>(n - 2 * k))));
            counted.emplace_back(m, Rational(static_cast<long>(involutions[static_cast<std::size_t>(k)])));
        }
        const std::string label = "n=" + std::to_string(n);
        append_mismatches(report, action, Series::from_terms(caps, closed), "operator/closed " + label, caps);
        append_mismatches(report, action, Series::from_terms(caps, counted), "operator/involutions " + label, caps);

        const Truncation xcaps{{"x", n_max}};
        append_mismatches(report, substitute_square(action, "y", Rational(-1)), hermite_he(n, xcaps),
                          "y^2=-1/He " + label, xcaps);
    }
    return report;
}

VerificationReport verify_hermite_egf(const Truncation &caps)
{
    for (const char *v : {"x", "y", "t"}) {
        require_cap(caps, v, "verify_hermite_egf");
    }
    if (cap_of(caps, "x") < cap_of(caps, "t")) {
        throw UsageError("verify_hermite_egf: x cap must be at least the t cap so exp(x t) is complete");
    }
    VerificationReport report;
    report.identity = "hermite-egf";
    report.caps = caps;
    const CompileContext ctx{caps};

    const Series op_route = apply_exp_half_square(compile(set_of(atom("x*t")), ctx), "x", "y");
    const Series class_route =
        compile(set_of(atom("x*t") + weighted(Rational(1, 2), power_of(atom("y*t"), 2))), ctx);
    const Series closed = exp_series(mono("x*t", Rational(1), caps) + mono("y^2*t^2", Rational(1, 2), caps));
    append_mismatches(report, op_route, class_route, "operator/class", caps);
    append_mismatches(report, class_route, closed, "class/closed", caps);

    // y^2 -> -1 mixes every y-degree of a t-slice, so it needs y cap >= t cap.
    if (cap_of(caps, "y") >= cap_of(caps, "t")) {
        const Truncation xt = caps.without("y");
        const Series hermite = exp_series(mono("x*t", Rational(1), xt) + mono("t^2", Rational(-1, 2), xt));
        append_mismatches(report, substitute_square(op_route, "y", Rational(-1)), hermite, "y^2=-1/hermite-egf",
                          xt);
        // Coefficients of the specialised EGF are He_n / n!.
        for (int n = 0; n <= cap_of(caps, "t"); ++n) {
            const Series he = (Rational(1) / Rational::factorial(static_cast<unsigned>(n)))
                              * hermite_he(n, xt) * mono("t^" + std::to_string(n), Rational(1), xt);
            Series slice(xt);
            for (const auto &[m, c] : hermite.terms()) {
                if ((m.count("t") ? m.at("t") : 0) == n) {
                    slice += Series::monomial(m, c, xt);
                }
            }
            append_mismatches(report, slice, he, "hermite-egf/He_" + std::to_string(n), xt);
        }
    } else {
        report.errata.push_back("note: y^2=-1 specialisation skipped, y cap below t cap");
    }
    return report;
}

VerificationReport verify_glaisher(const Truncation &caps)
{
    for (const char *v : {"x", "y", "t"}) {
        require_cap(caps, v, "verify_glaisher");
    }
    if (cap_of(caps, "x") < 2 * cap_of(caps, "t")) {
        throw UsageError("verify_glaisher: x cap must be at least twice the t cap so exp(x^2 t) is complete");
    }
    VerificationReport report;
    report.identity = "glaisher";
    report.caps = caps;

    const Series op_route = glaisher_operator_route(caps);
    const Series closed = glaisher_closed_form(caps);
    const Series oracle = oracle_egf(cap_of(caps, "t"));
    append_mismatches(report, op_route, oracle, "operator/oracle", caps);
    append_mismatches(report, closed, oracle, "closed/oracle", caps);
    append_mismatches(report, op_route, closed, "operator/closed", caps);

    // x-free slice: perfect matchings, (2n-1)!! y^(2n) t^n / n!
    {
        std::vector<std::pair<MultiIndex, Rational>> terms;
        Rational odd_factorial(1);
        for (int n = 0; n <= cap_of(caps, "t"); ++n) {
            if (n > 0) {
                odd_factorial *= Rational(2 * n - 1);
            }
            terms.emplace_back(MultiIndex{{"y", 2 * n}, {"t", n}},
                               odd_factorial / Rational::factorial(static_cast<unsigned>(n)));
        }
        Series slice(caps);
        for (const auto &[m, c] : op_route.terms()) {
            if (!m.count("x") || m.at("x") == 0) {
                slice += Series::monomial(m, c, caps);
            }
        }
        append_mismatches(report, slice, Series::from_terms(caps, terms), "x-free slice/(2n-1)!!", caps);
    }

    const auto undivided = undivided_prefactor_erratum(caps);
    if (!undivided.mismatches.empty()) {
        report.errata.push_back(undivided.description);
    }
    const auto unhalved = unhalved_expansion_erratum(caps);
    if (!unhalved.mismatches.empty()) {
        report.errata.push_back(unhalved.description);
    }
    return report;
}

VerificationReport verify_chain_decomposition(int n_max)
{
    const MarkerVars markers;
    const Truncation caps{
        {"x", 2 * n_max}, {"y", 2 * n_max}, {"t", n_max}, {markers.closed, n_max + 1}, {markers.open, n_max + 1}};
    VerificationReport report;
    report.identity = "chain-decomposition";
    report.caps = caps;
    const CompileContext ctx{caps};

    const Series marked = oracle_egf(n_max, markers);
    const Series a_star = compile(closed_chain_class(), ctx);
    const Series b_star = compile_B(ctx);
    const Series decomposition = exp_series(var(markers.closed, caps) * a_star + var(markers.open, caps) * b_star);
    append_mismatches(report, marked, decomposition, "oracle/Set(uA)xSet(vB)", caps);

    const Series one = Series::constant(Rational(1), caps);
    const Series erased = substitute(substitute(marked, markers.closed, one), markers.open, one);
    append_mismatches(report, erased, oracle_egf(n_max), "erased markers/oracle", caps);

    for (int j = 1; j <= n_max; ++j) {
        const auto counts = chain_counts(j);
        const Rational pow2 = Rational(2).pow(static_cast<unsigned>(j - 1));
        const Rational closed_expected = Rational::factorial(static_cast<unsigned>(j - 1)) * pow2;
        const Rational open_expected = Rational::factorial(static_cast<unsigned>(j)) * pow2;
        const Rational closed_got(static_cast<long>(counts.closed));
        const Rational open_got(static_cast<long>(counts.open));
        if (closed_got != closed_expected) {
            report.mismatches.push_back({{{markers.closed, 1}, {"y", 2 * j}, {"t", j}}, closed_got, closed_expected,
                                         "chain_counts/(j-1)!2^(j-1)"});
        }
        if (open_got != open_expected) {
            report.mismatches.push_back(
                {{{markers.open, 1}, {"x", 2}, {"y", 2 * j - 2}, {"t", j}}, open_got, open_expected,
                 "chain_counts/j!2^(j-1)"});
        }
        // The class EGFs must count the same single chains.
        const MultiIndex closed_m{{"y", 2 * j}, {"t", j}};
        const MultiIndex open_m{{"x", 2}, {"y", 2 * j - 2}, {"t", j}};
        if (egf_count(a_star, closed_m) != closed_got) {
            report.mismatches.push_back({closed_m, egf_count(a_star, closed_m), closed_got, "A*/chain_counts"});
        }
        if (egf_count(b_star, open_m) != open_got) {
            report.mismatches.push_back({open_m, egf_count(b_star, open_m), open_got, "B*/chain_counts"});
        }
    }
    return report;
}

VerificationReport verify_transfer_rules(const Truncation &caps, int count, std::uint64_t seed)
{
    for (const char *v : {"x", "y", "t"}) {
        require_cap(caps, v, "verify_transfer_rules");
    }
    VerificationReport report;
    report.identity = "transfer-rules";
    report.caps = caps;
    const CompileContext ctx{caps};
    const Series xt = mono("x*t", Rational(1), caps);

    // Fixed anchors.
    {
        std::vector<std::pair<MultiIndex, Rational>> terms;
        for (int k = 0; k <= std::min(cap_of(caps, "x"), cap_of(caps, "t")); ++k) {
            terms.emplace_back(MultiIndex{{"x", k}, {"t", k}}, Rational(1));
        }
        append_mismatches(report, compile(seq_of(atom("x*t")), ctx), Series::from_terms(caps, terms),
                          "Seq(xt)/sum (xt)^k", caps);
        append_mismatches(report, compile(set_of(cyc_of(atom("x*t"))), ctx), geometric(xt), "Set(Cyc(xt))/Seq(xt)",
                          caps);
        append_mismatches(report, compile(subst(set_of(atom("x*t")), "x", atom("x") + atom("y")), ctx),
                          exp_series(xt + mono("y*t", Rational(1), caps)), "Subst(Set(xt),x+y)/exp((x+y)t)", caps);
    }

    std::mt19937_64 rng(seed);
    for (int i = 0; i < count; ++i) {
        const std::string tag = "case " + std::to_string(i) + " ";
        const ClassExpr a = random_positive_class(rng(), 3);
        const ClassExpr b = random_positive_class(rng(), 2);
        const Series fa = compile(a, ctx);
        const Series fb = compile(b, ctx);

        append_mismatches(report, compile(a + b, ctx), fa + fb, tag + "Union", caps);
        append_mismatches(report, compile(a * b, ctx), fa * fb, tag + "Product", caps);
        append_mismatches(report, compile(set_of(a), ctx), exp_series(fa), tag + "Set", caps);
        append_mismatches(report, compile(seq_of(a), ctx), geometric(fa), tag + "Seq", caps);
        append_mismatches(report, compile(cyc_of(a), ctx), log_geometric(fa), tag + "Cyc", caps);
        append_mismatches(report, compile(subst(a, "x", b), ctx), substitute(fa, "x", fb), tag + "Subst", caps);

        // Algebraic consequences checked on the same samples.
        append_mismatches(report, compile(set_of(a + b), ctx), compile(set_of(a) * set_of(b), ctx),
                          tag + "Set(A+B)/Set(A)xSet(B)", caps);
        append_mismatches(report, compile(set_of(cyc_of(a)), ctx), compile(seq_of(a), ctx),
                          tag + "Set(Cyc(A))/Seq(A)", caps);

        for (const auto &e : {a, set_of(a), seq_of(a), cyc_of(b)}) {
            const Series f = compile(e, ctx);
            for (const auto &[m, c] : f.terms()) {
                const Rational n = egf_count(f, m);
                if (!n.is_integer() || n.sign() < 0) {
                    report.mismatches.push_back({m, n, Rational(0), tag + "egf count not a non-negative integer"});
                }
            }
        }
    }
    return report;
}

VerificationReport verify_flow_routes(int count, int lambda_cap, std::uint64_t seed)
{
    // Degree <= 3 data: the lambda^k coefficient has x-degree <= 3 + 3k, so
    // this x cap never truncates and both routes are exact.
    const Truncation caps{{"x", 3 + 3 * lambda_cap}, {"lambda", lambda_cap}};
    VerificationReport report;
    report.identity = "flow-routes";
    report.caps = caps;
    int i = 0;
    for (const auto &c : random_flow_cases(count, seed, caps)) {
        const auto flow = flow_exp(c.q, c.v, c.F, "lambda", caps);
        append_mismatches(report, flow.result, flow_direct(c.q, c.v, c.F, "lambda", caps),
                          "ode/direct case " + std::to_string(i++), caps);
    }
    return report;
}

// ----------------------------------------------------------------- registry

const std::vector<std::string> &verifier_names()
{
    static const std::vector<std::string> names{"chain-decomposition", "glaisher",       "hermite-egf",
                                                "hermite-monomial",    "shift-dilation", "taylor",
                                                "transfer-rules"};
    return names;
}

Truncation default_caps(const std::string &name)
{
    if (name == "glaisher") {
        return {{"x", 8}, {"y", 8}, {"t", 4}};
    }
    if (name == "hermite-egf") {
        return {{"x", 8}, {"y", 8}, {"t", 8}};
    }
    if (name == "hermite-monomial") {
        return {{"x", 12}, {"y", 12}};
    }
    if (name == "shift-dilation") {
        return {{"x", 8}, {"lambda", 8}};
    }
    if (name == "taylor") {
        return {{"x", 8}, {"y", 8}, {"t", 4}};
    }
    if (name == "chain-decomposition") {
        return {{"t", 5}};
    }
    if (name == "transfer-rules") {
        return {{"x", 4}, {"y", 4}, {"t", 4}};
    }
    throw UsageError("unknown identity '" + name + "'");
}

VerificationReport run_verifier(const std::string &name, const std::optional<Truncation> &caps)
{
    Truncation effective = default_caps(name);
    if (caps) {
        auto merged = effective.caps();
        for (const auto &[v, c] : caps->caps()) {
            merged[v] = c;
        }
        effective = Truncation(merged);
    }
    const auto start = std::chrono::steady_clock::now();
    VerificationReport report;
    if (name == "glaisher") {
        report = verify_glaisher(effective);
    } else if (name == "hermite-egf") {
        report = verify_hermite_egf(effective);
    } else if (name == "hermite-monomial") {
        report = verify_hermite_monomial(cap_of(effective, "x"));
    } else if (name == "shift-dilation") {
        report = verify_shift_dilation(effective);
    } else if (name == "taylor") {
        report = verify_taylor(effective);
    } else if (name == "chain-decomposition") {
        report = verify_chain_decomposition(cap_of(effective, "t"));
    } else {
        report = verify_transfer_rules(effective);
    }
    report.wall_time_ms =
        std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
    return report;
}

std::vector<VerificationReport> run_all_verifiers(const std::optional<Truncation> &caps)
{
    std::vector<std::future<VerificationReport>> jobs;
    for (const auto &name : verifier_names()) {
        jobs.push_back(std::async(std::launch::async, [name, caps] { return run_verifier(name, caps); }));
    }
    std::vector<VerificationReport> out;
    for (auto &j : jobs) {
        out.push_back(j.get());
    }
    return out;
}

} // namespace speckit
