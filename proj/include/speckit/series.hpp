#pragma once

#include <cstddef>
#include <initializer_list>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <speckit/rational.hpp>

namespace speckit {

// Sparse exponent map. Absent variables have exponent 0.
using MultiIndex = std::map<std::string, int>;

// Per-variable maximum retained degree.
//
// A series is known exactly for every monomial inside its caps. A variable
// without a cap is one the series does not depend on, so it is exact in
// every degree of that variable (all of which are zero beyond degree 0).
class Truncation {
public:
    Truncation() = default;
    Truncation(std::initializer_list<std::pair<const std::string, int>> caps);
    explicit Truncation(std::map<std::string, int> caps);

    // "x=8,y=8,t=4" or "x:8,y:8,t:4".
    static Truncation parse(std::string_view text);

    std::optional<int> cap(const std::string &var) const;
    bool has(const std::string &var) const { return caps_.count(var) != 0; }
    const std::map<std::string, int> &caps() const { return caps_; }
    std::vector<std::string> variables() const;
    bool empty() const { return caps_.empty(); }

    bool admits(const MultiIndex &m) const;

    Truncation with(const std::string &var, int cap) const;
    Truncation without(const std::string &var) const;

    // "t:4,x:8,y:8" (variables in name order).
    std::string str() const;

    friend bool operator==(const Truncation &, const Truncation &) = default;

private:
    std::map<std::string, int> caps_;
};

// Intersection of the exactly-known windows: union of variables, min cap
// where both sides constrain the same variable.
Truncation merge(const Truncation &a, const Truncation &b);

// Truncated multivariate formal power series with rational coefficients.
//
// Terms are stored densely in exponent vectors aligned with the variables of
// the truncation (name order) and kept in graded-lex order: ascending total
// degree, ties broken by the larger exponent of the earlier variable first.
// No stored coefficient is zero and no stored monomial exceeds a cap.
class Series {
public:
    using Exponents = std::vector<int>;

    struct GradedLexLess {
        bool operator()(const Exponents &a, const Exponents &b) const;
    };
    using TermMap = std::map<Exponents, Rational, GradedLexLess>;

    Series() = default;
    explicit Series(Truncation truncation);

    static Series constant(const Rational &c, Truncation truncation);
    static Series monomial(const MultiIndex &m, const Rational &c, Truncation truncation);
    static Series variable(const std::string &var, Truncation truncation);
    // Sums the given terms; terms outside the caps are dropped.
    static Series from_terms(Truncation truncation, const std::vector<std::pair<MultiIndex, Rational>> &terms);

    const Truncation &truncation() const { return truncation_; }
    const std::vector<std::string> &variables() const { return vars_; }
    const TermMap &term_map() const { return terms_; }

    std::size_t size() const { return terms_.size(); }
    bool is_zero() const { return terms_.empty(); }
    Rational constant_term() const;
    // Highest exponent of var among stored terms, or -1 for the zero series.
    int degree(const std::string &var) const;
    bool depends_on(const std::string &var) const { return degree(var) > 0; }

    // Stored coefficient; 0 when absent. Does not check caps (see coeff()).
    Rational coefficient(const MultiIndex &m) const;
    std::vector<std::pair<MultiIndex, Rational>> terms() const;
    MultiIndex to_multi_index(const Exponents &e) const;

    // Same polynomial re-expressed under new caps; terms outside are dropped.
    // Throws UsageError if a stored term uses a variable the target lacks.
    Series retruncated(const Truncation &target) const;

    Series &operator+=(const Series &o);
    Series &operator-=(const Series &o);
    Series &operator*=(const Series &o);
    Series &operator*=(const Rational &c);

    friend Series operator+(Series a, const Series &b) { return a += b; }
    friend Series operator-(Series a, const Series &b) { return a -= b; }
    friend Series operator*(const Series &a, const Series &b);
    friend Series operator*(const Rational &c, Series a) { return a *= c; }
    friend Series operator*(Series a, const Rational &c) { return a *= c; }
    friend Series operator-(Series a) { return a *= Rational(-1); }

    // Term-by-term equality on the common window of both truncations.
    friend bool operator==(const Series &a, const Series &b);

private:
    Truncation truncation_;
    std::vector<std::string> vars_;
    std::vector<int> caps_;
    TermMap terms_;

    bool within_caps(const Exponents &e) const;
    void accumulate(Exponents e, const Rational &c);
    void drop_zeros();
};

Series add(const Series &a, const Series &b);
Series mul(const Series &a, const Series &b);
Series scale(const Rational &c, const Series &a);
Series power(const Series &f, unsigned k);

// Formal partial derivative. Caps are kept, so the coefficient at the top
// degree of var may be incomplete when f itself was truncated in var.
Series differentiate(const Series &f, const std::string &var);
// Antiderivative in var with zero constant of integration.
Series integrate(const Series &f, const std::string &var);

// The following require f to have zero constant term (NonzeroConstantTerm).
Series exp_series(const Series &f);     // sum f^k / k!
Series log_geometric(const Series &f);  // log 1/(1-f) = sum_{k>=1} f^k / k
Series geometric(const Series &f);      // 1/(1-f) = sum f^k
Series log1p_series(const Series &f);   // log(1+f)
Series pow_frac(const Series &f, const Rational &p); // (1+f)^p

// Replaces var by g. When g has a nonzero constant term the result is only
// exact if f is polynomial in var, which is taken to mean its var-degree
// stays strictly below its cap; otherwise DivergentSubstitution.
Series substitute(const Series &f, const std::string &var, const Series &g);

// Rewrites every var^(2k) as value^k; OddExponent on any odd power.
Series substitute_square(const Series &f, const std::string &var, const Rational &value);

// Coefficient with a cap check (OutOfTruncation).
Rational coeff(const Series &f, const MultiIndex &m);
// n! * coeff, n the exponent of label_var in m.
Rational egf_count(const Series &f, const MultiIndex &m, const std::string &label_var = "t");

// "x^2*t" / "x^2 t" / "1" into an exponent map.
MultiIndex parse_monomial(std::string_view text);
std::string monomial_str(const MultiIndex &m);

} // namespace speckit
