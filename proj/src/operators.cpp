#include <speckit/errors.hpp>
#include <speckit/operators.hpp>

namespace speckit {

namespace {

void require_caps(const Series &f, const std::string &src, const std::string &dst)
{
    for (const auto *v : {&src, &dst}) {
        if (!f.truncation().has(*v)) {
            throw UsageError("operator variable '" + *v + "' has no cap in {" + f.truncation().str() + "}");
        }
    }
}

// Exponential operators only terminate when each application moves degree
// from src to a distinct, capped dst.
void require_distinct(const std::string &src, const std::string &dst)
{
    if (src == dst) {
        throw UsageError("exponential operator needs distinct source and target variables, got '" + src + "' twice");
    }
}

Series dst_power(const Series &f, const std::string &dst, int k)
{
    return Series::monomial({{dst, k}}, Rational(1), f.truncation());
}

// 1/2 dst^2 d^2/d(src)^2
Series half_square(const Series &f, const std::string &src, const std::string &dst)
{
    return Rational(1, 2) * (dst_power(f, dst, 2) * differentiate(differentiate(f, src), src));
}

} // namespace

Series apply_singleton(const Series &f, const std::string &src, const std::string &dst)
{
    require_caps(f, src, dst);
    return dst_power(f, dst, 1) * differentiate(f, src);
}

Series apply_k_subset(const Series &f, const std::string &src, const std::string &dst, int k)
{
    if (k < 0) {
        throw UsageError("apply_k_subset: k must be non-negative");
    }
    require_caps(f, src, dst);
    Series d = f;
    for (int i = 0; i < k; ++i) {
        d = differentiate(d, src);
    }
    return (Rational(1) / Rational::factorial(static_cast<unsigned>(k))) * (dst_power(f, dst, k) * d);
}

Series apply_exp_shift(const Series &f, const std::string &src, const std::string &dst)
{
    require_caps(f, src, dst);
    require_distinct(src, dst);
    Series sum = f;
    Series term = f;
    for (int k = 1; !term.is_zero(); ++k) {
        term = Rational(1, k) * apply_singleton(term, src, dst);
        sum += term;
    }
    return sum;
}

Series apply_doubleton_k(const Series &f, const std::string &src, const std::string &dst, int k)
{
    if (k < 0) {
        throw UsageError("apply_doubleton_k: k must be non-negative");
    }
    require_caps(f, src, dst);
    Series term = f;
    for (int i = 1; i <= k && !term.is_zero(); ++i) {
        term = Rational(1, i) * half_square(term, src, dst);
    }
    return term;
}

Series apply_exp_half_square(const Series &f, const std::string &src, const std::string &dst)
{
    require_caps(f, src, dst);
    require_distinct(src, dst);
    Series sum = f;
    Series term = f;
    for (int k = 1; !term.is_zero(); ++k) {
        term = Rational(1, k) * half_square(term, src, dst);
        sum += term;
    }
    return sum;
}

FlowResult flow_exp(const Series &q, const Series &v, const Series &F, const std::string &lambda_var,
                    const Truncation &truncation, const std::string &var)
{
    const auto lambda_cap = truncation.cap(lambda_var);
    if (!lambda_cap || *lambda_cap == 0) {
        throw CapTooSmall("flow_exp: cap of '" + lambda_var + "' must be positive");
    }
    if (!truncation.has(var)) {
        throw UsageError("flow_exp: variable '" + var + "' has no cap");
    }
    const Series qt = q.retruncated(merge(q.truncation(), truncation));
    const Series vt = v.retruncated(merge(v.truncation(), truncation));
    const Series x = Series::variable(var, truncation);

    // Picard iteration gains one order in lambda per step.
    Series T = x;
    for (int i = 0; i < *lambda_cap; ++i) {
        T = x + integrate(substitute(qt, var, T).retruncated(truncation), lambda_var);
    }
    const Series log_g = integrate(substitute(vt, var, T).retruncated(truncation), lambda_var);
    Series g = exp_series(log_g);
    Series result = g * substitute(F, var, T);
    return {std::move(T), std::move(g), std::move(result)};
}

Series flow_direct(const Series &q, const Series &v, const Series &F, const std::string &lambda_var,
                   const Truncation &truncation, const std::string &var)
{
    const auto lambda_cap = truncation.cap(lambda_var);
    if (!lambda_cap || *lambda_cap == 0) {
        throw CapTooSmall("flow_direct: cap of '" + lambda_var + "' must be positive");
    }
    const Series qt = q.retruncated(merge(q.truncation(), truncation));
    const Series vt = v.retruncated(merge(v.truncation(), truncation));
    Series term = F.retruncated(merge(F.truncation(), truncation));
    Series sum = term;
    const Series lambda = Series::variable(lambda_var, truncation);
    for (int k = 1; k <= *lambda_cap; ++k) {
        term = Rational(1, k) * (lambda * (qt * differentiate(term, var) + vt * term));
        sum += term;
    }
    return sum;
}

} // namespace speckit
