#include <speckit/errors.hpp>
#include <speckit/series.hpp>

#include <algorithm>
#include <cctype>
#include <numeric>

namespace speckit {

// ---------------------------------------------------------------- Truncation

Truncation::Truncation(std::initializer_list<std::pair<const std::string, int>> caps)
    : Truncation(std::map<std::string, int>(caps))
{
}

Truncation::Truncation(std::map<std::string, int> caps) : caps_(std::move(caps))
{
    for (const auto &[var, cap] : caps_) {
        if (cap < 0) {
            throw UsageError("negative cap for variable '" + var + "'");
        }
        if (var.empty()) {
            throw UsageError("empty variable name in truncation");
        }
    }
}

Truncation Truncation::parse(std::string_view text)
{
    std::map<std::string, int> caps;
    std::size_t pos = 0;
    while (pos < text.size()) {
        const auto comma = std::min(text.find(',', pos), text.size());
        std::string_view item = text.substr(pos, comma - pos);
        while (!item.empty() && std::isspace(static_cast<unsigned char>(item.front()))) {
            item.remove_prefix(1);
        }
        while (!item.empty() && std::isspace(static_cast<unsigned char>(item.back()))) {
            item.remove_suffix(1);
        }
        const auto sep = item.find_first_of("=:");
        if (sep == std::string_view::npos || sep == 0 || sep + 1 == item.size()) {
            throw UsageError("malformed cap '" + std::string(item) + "', expected var=int");
        }
        const std::string var(item.substr(0, sep));
        const std::string_view digits = item.substr(sep + 1);
        if (!std::all_of(digits.begin(), digits.end(), [](char c) { return std::isdigit(static_cast<unsigned char>(c)); })
            || digits.size() > 6) {
            throw UsageError("malformed cap value in '" + std::string(item) + "'");
        }
        caps[var] = std::stoi(std::string(digits));
        pos = comma + 1;
    }
    return Truncation(std::move(caps));
}

std::optional<int> Truncation::cap(const std::string &var) const
{
    const auto it = caps_.find(var);
    if (it == caps_.end()) {
        return std::nullopt;
    }
    return it->second;
}

std::vector<std::string> Truncation::variables() const
{
    std::vector<std::string> out;
    out.reserve(caps_.size());
    for (const auto &kv : caps_) {
        out.push_back(kv.first);
    }
    return out;
}

bool Truncation::admits(const MultiIndex &m) const
{
    for (const auto &[var, e] : m) {
        if (e == 0) {
            continue;
        }
        const auto c = cap(var);
        if (!c || e > *c || e < 0) {
            return false;
        }
    }
    return true;
}

Truncation Truncation::with(const std::string &var, int cap) const
{
    auto caps = caps_;
    caps[var] = cap;
    return Truncation(std::move(caps));
}

Truncation Truncation::without(const std::string &var) const
{
    auto caps = caps_;
    caps.erase(var);
    return Truncation(std::move(caps));
}

std::string Truncation::str() const
{
    std::string out;
    for (const auto &[var, cap] : caps_) {
        if (!out.empty()) {
            out += ',';
        }
        out += var + ":" + std::to_string(cap);
    }
    return out;
}

Truncation merge(const Truncation &a, const Truncation &b)
{
    auto caps = a.caps();
    for (const auto &[var, cap] : b.caps()) {
        auto [it, inserted] = caps.emplace(var, cap);
        if (!inserted) {
            it->second = std::min(it->second, cap);
        }
    }
    return Truncation(std::move(caps));
}

// -------------------------------------------------------------------- Series

bool Series::GradedLexLess::operator()(const Exponents &a, const Exponents &b) const
{
    const int da = std::accumulate(a.begin(), a.end(), 0);
    const int db = std::accumulate(b.begin(), b.end(), 0);
    if (da != db) {
        return da < db;
    }
    // Larger exponent of the earlier variable sorts first.
    return std::lexicographical_compare(b.begin(), b.end(), a.begin(), a.end());
}

Series::Series(Truncation truncation) : truncation_(std::move(truncation))
{
    for (const auto &[var, cap] : truncation_.caps()) {
        vars_.push_back(var);
        caps_.push_back(cap);
    }
}

Series Series::constant(const Rational &c, Truncation truncation)
{
    Series s(std::move(truncation));
    if (!c.is_zero()) {
        s.terms_.emplace(Exponents(s.vars_.size(), 0), c);
    }
    return s;
}

Series Series::monomial(const MultiIndex &m, const Rational &c, Truncation truncation)
{
    return from_terms(std::move(truncation), {{m, c}});
}

Series Series::variable(const std::string &var, Truncation truncation)
{
    return monomial({{var, 1}}, Rational(1), std::move(truncation));
}

Series Series::from_terms(Truncation truncation, const std::vector<std::pair<MultiIndex, Rational>> &terms)
{
    Series s(std::move(truncation));
    for (const auto &[m, c] : terms) {
        Exponents e(s.vars_.size(), 0);
        bool keep = true;
        for (const auto &[var, k] : m) {
            if (k < 0) {
                throw UsageError("negative exponent for '" + var + "'");
            }
            if (k == 0) {
                continue;
            }
            const auto it = std::lower_bound(s.vars_.begin(), s.vars_.end(), var);
            if (it == s.vars_.end() || *it != var) {
                throw UsageError("variable '" + var + "' has no cap in truncation {" + s.truncation_.str() + "}");
            }
            const auto idx = static_cast<std::size_t>(it - s.vars_.begin());
            if (k > s.caps_[idx]) {
                keep = false;
            }
            e[idx] = k;
        }
        if (keep) {
            s.accumulate(std::move(e), c);
        }
    }
    s.drop_zeros();
    return s;
}

Rational Series::constant_term() const
{
    const auto it = terms_.find(Exponents(vars_.size(), 0));
    return it == terms_.end() ? Rational(0) : it->second;
}

int Series::degree(const std::string &var) const
{
    if (terms_.empty()) {
        return -1;
    }
    const auto it = std::lower_bound(vars_.begin(), vars_.end(), var);
    if (it == vars_.end() || *it != var) {
        return 0;
    }
    const auto idx = static_cast<std::size_t>(it - vars_.begin());
    int d = 0;
    for (const auto &kv : terms_) {
        d = std::max(d, kv.first[idx]);
    }
    return d;
}

Rational Series::coefficient(const MultiIndex &m) const
{
    Exponents e(vars_.size(), 0);
    for (const auto &[var, k] : m) {
        if (k == 0) {
            continue;
        }
        const auto it = std::lower_bound(vars_.begin(), vars_.end(), var);
        if (it == vars_.end() || *it != var) {
            return Rational(0);
        }
        e[static_cast<std::size_t>(it - vars_.begin())] = k;
    }
    const auto it = terms_.find(e);
    return it == terms_.end() ? Rational(0) : it->second;
}

MultiIndex Series::to_multi_index(const Exponents &e) const
{
    MultiIndex m;
    for (std::size_t i = 0; i < vars_.size(); ++i) {
        if (e[i] != 0) {
            m[vars_[i]] = e[i];
        }
    }
    return m;
}

std::vector<std::pair<MultiIndex, Rational>> Series::terms() const
{
    std::vector<std::pair<MultiIndex, Rational>> out;
    out.reserve(terms_.size());
    for (const auto &[e, c] : terms_) {
        out.emplace_back(to_multi_index(e), c);
    }
    return out;
}

Series Series::retruncated(const Truncation &target) const
{
    if (target == truncation_) {
        return *this;
    }
    Series out(target);
    std::vector<int> index(vars_.size(), -1);
    for (std::size_t i = 0; i < vars_.size(); ++i) {
        const auto it = std::lower_bound(out.vars_.begin(), out.vars_.end(), vars_[i]);
        if (it != out.vars_.end() && *it == vars_[i]) {
            index[i] = static_cast<int>(it - out.vars_.begin());
        }
    }
    for (const auto &[e, c] : terms_) {
        Exponents ne(out.vars_.size(), 0);
        for (std::size_t i = 0; i < vars_.size(); ++i) {
            if (e[i] == 0) {
                continue;
            }
            if (index[i] < 0) {
                throw UsageError("cannot drop variable '" + vars_[i] + "' that the series depends on");
            }
            ne[static_cast<std::size_t>(index[i])] = e[i];
        }
        if (out.within_caps(ne)) {
            out.terms_.emplace(std::move(ne), c);
        }
    }
    return out;
}

bool Series::within_caps(const Exponents &e) const
{
    for (std::size_t i = 0; i < e.size(); ++i) {
        if (e[i] > caps_[i]) {
            return false;
        }
    }
    return true;
}

void Series::accumulate(Exponents e, const Rational &c)
{
    if (c.is_zero()) {
        return;
    }
    auto [it, inserted] = terms_.try_emplace(std::move(e), c);
    if (!inserted) {
        it->second += c;
    }
}

void Series::drop_zeros()
{
    std::erase_if(terms_, [](const auto &kv) { return kv.second.is_zero(); });
}

Series &Series::operator+=(const Series &o)
{
    const Truncation t = merge(truncation_, o.truncation_);
    if (t != truncation_) {
        *this = retruncated(t);
    }
    const Series rhs = o.retruncated(t);
    for (const auto &[e, c] : rhs.terms_) {
        accumulate(e, c);
    }
    drop_zeros();
    return *this;
}

Series &Series::operator-=(const Series &o)
{
    return *this += -o;
}

Series &Series::operator*=(const Series &o)
{
    *this = *this * o;
    return *this;
}

Series &Series::operator*=(const Rational &c)
{
    if (c.is_zero()) {
        terms_.clear();
        return *this;
    }
    for (auto &kv : terms_) {
        kv.second *= c;
    }
    return *this;
}

Series operator*(const Series &a, const Series &b)
{
    const Truncation t = merge(a.truncation_, b.truncation_);
    const Series lhs = a.retruncated(t);
    const Series rhs = b.retruncated(t);
    Series out(t);
    const std::size_t n = out.vars_.size();
    Series::Exponents e(n);
    mpq_class prod;
    for (const auto &[ea, ca] : lhs.terms_) {
        for (const auto &[eb, cb] : rhs.terms_) {
            bool keep = true;
            for (std::size_t i = 0; i < n; ++i) {
                e[i] = ea[i] + eb[i];
                if (e[i] > out.caps_[i]) {
                    keep = false;
                    break;
                }
            }
            if (!keep) {
                continue;
            }
            prod = ca.raw() * cb.raw();
            out.accumulate(e, Rational(prod));
        }
    }
    out.drop_zeros();
    return out;
}

bool operator==(const Series &a, const Series &b)
{
    const Truncation w = merge(a.truncation_, b.truncation_);
    return a.retruncated(w).terms_ == b.retruncated(w).terms_;
}

// --------------------------------------------------------- free operations

Series add(const Series &a, const Series &b)
{
    return a + b;
}

Series mul(const Series &a, const Series &b)
{
    return a * b;
}

Series scale(const Rational &c, const Series &a)
{
    return c * a;
}

Series power(const Series &f, unsigned k)
{
    Series result = Series::constant(Rational(1), f.truncation());
    Series base = f;
    while (k != 0) {
        if (k & 1U) {
            result *= base;
        }
        k >>= 1U;
        if (k != 0) {
            base = base * base;
        }
    }
    return result;
}

namespace {

std::optional<std::size_t> var_index(const Series &f, const std::string &var)
{
    const auto &vars = f.variables();
    const auto it = std::lower_bound(vars.begin(), vars.end(), var);
    if (it == vars.end() || *it != var) {
        return std::nullopt;
    }
    return static_cast<std::size_t>(it - vars.begin());
}

void require_zero_constant(const Series &f, const char *op)
{
    if (!f.constant_term().is_zero()) {
        throw NonzeroConstantTerm(std::string(op) + ": argument has constant term " + f.constant_term().str());
    }
}

// Upper bound on the number of nonzero powers of a series without constant
// term: every power raises the total degree by at least one.
unsigned power_bound(const Series &f)
{
    unsigned bound = 1;
    for (const auto &[var, cap] : f.truncation().caps()) {
        bound += static_cast<unsigned>(cap);
    }
    return bound;
}

} // namespace

Series differentiate(const Series &f, const std::string &var)
{
    const auto idx = var_index(f, var);
    if (!idx) {
        return Series(f.truncation());
    }
    std::vector<std::pair<MultiIndex, Rational>> terms;
    for (const auto &[e, c] : f.term_map()) {
        const int k = e[*idx];
        if (k == 0) {
            continue;
        }
        auto m = f.to_multi_index(e);
        m[var] = k - 1;
        terms.emplace_back(std::move(m), c * Rational(k));
    }
    return Series::from_terms(f.truncation(), terms);
}

Series integrate(const Series &f, const std::string &var)
{
    if (!f.truncation().has(var)) {
        throw UsageError("integrate: variable '" + var + "' has no cap");
    }
    const auto idx = *var_index(f, var);
    std::vector<std::pair<MultiIndex, Rational>> terms;
    for (const auto &[e, c] : f.term_map()) {
        const int k = e[idx];
        auto m = f.to_multi_index(e);
        m[var] = k + 1;
        terms.emplace_back(std::move(m), c / Rational(k + 1));
    }
    return Series::from_terms(f.truncation(), terms);
}

Series exp_series(const Series &f)
{
    require_zero_constant(f, "exp_series");
    Series result = Series::constant(Rational(1), f.truncation());
    Series term = result;
    const unsigned bound = power_bound(f);
    for (unsigned k = 1; k <= bound; ++k) {
        term = term * f;
        term *= Rational(1, static_cast<long>(k));
        if (term.is_zero()) {
            break;
        }
        result += term;
    }
    return result;
}

Series log_geometric(const Series &f)
{
    require_zero_constant(f, "log_geometric");
    Series result(f.truncation());
    Series fk = Series::constant(Rational(1), f.truncation());
    const unsigned bound = power_bound(f);
    for (unsigned k = 1; k <= bound; ++k) {
        fk = fk * f;
        if (fk.is_zero()) {
            break;
        }
        result += Rational(1, static_cast<long>(k)) * fk;
    }
    return result;
}

Series geometric(const Series &f)
{
    require_zero_constant(f, "geometric");
    Series result = Series::constant(Rational(1), f.truncation());
    Series fk = result;
    const unsigned bound = power_bound(f);
    for (unsigned k = 1; k <= bound; ++k) {
        fk = fk * f;
        if (fk.is_zero()) {
            break;
        }
        result += fk;
    }
    return result;
}

Series log1p_series(const Series &f)
{
    require_zero_constant(f, "log1p_series");
    return -log_geometric(-f);
}

Series pow_frac(const Series &f, const Rational &p)
{
    require_zero_constant(f, "pow_frac");
    return exp_series(p * log1p_series(f));
}

Series substitute(const Series &f, const std::string &var, const Series &g)
{
    const auto idx = var_index(f, var);
    if (!idx || !f.depends_on(var)) {
        return f;
    }
    const int fdeg = f.degree(var);
    if (!g.constant_term().is_zero() && fdeg >= *f.truncation().cap(var)) {
        throw DivergentSubstitution("substitute: '" + var + "' is replaced by a series with constant term "
                                    + g.constant_term().str() + " but f reaches its cap " + std::to_string(fdeg)
                                    + " in '" + var + "'");
    }

    Truncation target = merge(f.truncation().without(var), g.truncation());
    if (g.truncation().has(var)) {
        target = target.with(var, std::min(*f.truncation().cap(var), *g.truncation().cap(var)));
    }

    // Slice f by degree in var.
    std::vector<std::vector<std::pair<MultiIndex, Rational>>> slices(static_cast<std::size_t>(fdeg) + 1);
    for (const auto &[e, c] : f.term_map()) {
        auto m = f.to_multi_index(e);
        m.erase(var);
        slices[static_cast<std::size_t>(e[*idx])].emplace_back(std::move(m), c);
    }

    Series result(target);
    Series gk = Series::constant(Rational(1), target);
    const Series gt = g.retruncated(merge(g.truncation(), target));
    for (std::size_t k = 0; k < slices.size(); ++k) {
        if (k > 0) {
            gk = gk * gt;
        }
        if (!slices[k].empty()) {
            result += Series::from_terms(target, slices[k]) * gk;
        }
        if (gk.is_zero()) {
            break;
        }
    }
    return result.retruncated(target);
}

Series substitute_square(const Series &f, const std::string &var, const Rational &value)
{
    const auto idx = var_index(f, var);
    const Truncation target = f.truncation().without(var);
    if (!idx) {
        return f;
    }
    std::vector<std::pair<MultiIndex, Rational>> terms;
    for (const auto &[e, c] : f.term_map()) {
        const int k = e[*idx];
        if (k % 2 != 0) {
            throw OddExponent("substitute_square: odd power " + std::to_string(k) + " of '" + var + "'");
        }
        auto m = f.to_multi_index(e);
        m.erase(var);
        terms.emplace_back(std::move(m), c * value.pow(static_cast<unsigned>(k / 2)));
    }
    return Series::from_terms(target, terms);
}

Rational coeff(const Series &f, const MultiIndex &m)
{
    for (const auto &[var, k] : m) {
        if (k < 0) {
            throw OutOfTruncation("negative exponent for '" + var + "'");
        }
        const auto cap = f.truncation().cap(var);
        if (cap && k > *cap) {
            throw OutOfTruncation("monomial " + monomial_str(m) + " exceeds cap " + var + ":" + std::to_string(*cap));
        }
    }
    return f.coefficient(m);
}

Rational egf_count(const Series &f, const MultiIndex &m, const std::string &label_var)
{
    const auto it = m.find(label_var);
    const int n = it == m.end() ? 0 : it->second;
    return Rational::factorial(static_cast<unsigned>(n)) * coeff(f, m);
}

MultiIndex parse_monomial(std::string_view text)
{
    MultiIndex m;
    std::size_t pos = 0;
    auto skip = [&] {
        while (pos < text.size() && (std::isspace(static_cast<unsigned char>(text[pos])) || text[pos] == '*')) {
            ++pos;
        }
    };
    skip();
    if (pos < text.size() && text.substr(pos) == "1") {
        return m;
    }
    while (pos < text.size()) {
        const std::size_t start = pos;
        while (pos < text.size() && (std::isalnum(static_cast<unsigned char>(text[pos])) || text[pos] == '_')) {
            ++pos;
        }
        if (pos == start || std::isdigit(static_cast<unsigned char>(text[start]))) {
            throw UsageError("malformed monomial '" + std::string(text) + "'");
        }
        const std::string var(text.substr(start, pos - start));
        int k = 1;
        if (pos < text.size() && text[pos] == '^') {
            ++pos;
            const std::size_t ds = pos;
            while (pos < text.size() && std::isdigit(static_cast<unsigned char>(text[pos]))) {
                ++pos;
            }
            if (pos == ds) {
                throw UsageError("malformed exponent in '" + std::string(text) + "'");
            }
            k = std::stoi(std::string(text.substr(ds, pos - ds)));
        }
        m[var] += k;
        skip();
    }
    std::erase_if(m, [](const auto &kv) { return kv.second == 0; });
    return m;
}

std::string monomial_str(const MultiIndex &m)
{
    std::string out;
    for (const auto &[var, k] : m) {
        if (k == 0) {
            continue;
        }
        if (!out.empty()) {
            out += '*';
        }
        out += var;
        if (k != 1) {
            out += "^" + std::to_string(k);
        }
    }
    return out.empty() ? "1" : out;
}

} // namespace speckit
