#include <speckit/errors.hpp>
#include <speckit/rational.hpp>

#include <cctype>
#include <ostream>

namespace speckit {

SyntaxError::SyntaxError(int line, int column, std::vector<std::string> expected, const std::string &found)
    : Error([&] {
          std::string msg = std::to_string(line) + ":" + std::to_string(column) + ": syntax error: expected ";
          for (std::size_t i = 0; i < expected.size(); ++i) {
              msg += (i ? " | " : "") + expected[i];
          }
          return msg + ", found " + found;
      }()),
      line_(line), column_(column), expected_(std::move(expected))
{
}

Rational::Rational(long num, long den)
{
    if (den == 0) {
        throw std::domain_error("Rational: zero denominator");
    }
    value_ = mpq_class(num, den);
    value_.canonicalize();
}

Rational::Rational(mpq_class value) : value_(std::move(value))
{
    value_.canonicalize();
}

namespace {

bool all_digits(std::string_view s)
{
    if (s.empty()) {
        return false;
    }
    for (char c : s) {
        if (!std::isdigit(static_cast<unsigned char>(c))) {
            return false;
        }
    }
    return true;
}

} // namespace

Rational Rational::parse(std::string_view text)
{
    std::string_view body = text;
    if (!body.empty() && body.front() == '-') {
        body.remove_prefix(1);
    }
    const auto slash = body.find('/');
    const std::string_view num = body.substr(0, slash);
    const std::string_view den = slash == std::string_view::npos ? std::string_view{"1"} : body.substr(slash + 1);
    if (!all_digits(num) || !all_digits(den)) {
        throw UsageError("malformed rational '" + std::string(text) + "'");
    }
    mpz_class n(std::string(num), 10);
    mpz_class d(std::string(den), 10);
    if (d == 0) {
        throw UsageError("zero denominator in '" + std::string(text) + "'");
    }
    if (text.front() == '-') {
        n = -n;
    }
    mpq_class q(n, d);
    q.canonicalize();
    return Rational(std::move(q));
}

Rational Rational::factorial(unsigned n)
{
    mpz_class f;
    mpz_fac_ui(f.get_mpz_t(), n);
    return Rational(mpq_class(f));
}

Rational Rational::binomial(unsigned n, unsigned k)
{
    mpz_class b;
    mpz_bin_uiui(b.get_mpz_t(), n, k);
    return Rational(mpq_class(b));
}

std::string Rational::fraction_str() const
{
    return numerator_str() + "/" + denominator_str();
}

std::string Rational::str() const
{
    return is_integer() ? numerator_str() : fraction_str();
}

Rational Rational::pow(unsigned k) const
{
    mpz_class n, d;
    mpz_pow_ui(n.get_mpz_t(), value_.get_num_mpz_t(), k);
    mpz_pow_ui(d.get_mpz_t(), value_.get_den_mpz_t(), k);
    return Rational(mpq_class(n, d));
}

Rational &Rational::operator/=(const Rational &o)
{
    if (o.is_zero()) {
        throw std::domain_error("Rational: division by zero");
    }
    value_ /= o.value_;
    return *this;
}

std::ostream &operator<<(std::ostream &os, const Rational &r)
{
    return os << r.str();
}

} // namespace speckit
