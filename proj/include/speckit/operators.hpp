#pragma once

#include <string>

#include <speckit/series.hpp>

namespace speckit {

// dst * d/d(src): repaint one src atom as dst in every possible way.
Series apply_singleton(const Series &f, const std::string &src, const std::string &dst);

// (1/k!) dst^k d^k/d(src)^k: repaint an unordered k-subset.
Series apply_k_subset(const Series &f, const std::string &src, const std::string &dst, int k);

// exp(dst d/d(src)) f. Equals substitute(f, src, src + dst) under the caps.
Series apply_exp_shift(const Series &f, const std::string &src, const std::string &dst);

// (1/k!) (1/2 dst^2 d^2/d(src)^2)^k: select a set of k doubletons.
Series apply_doubleton_k(const Series &f, const std::string &src, const std::string &dst, int k);

// exp(1/2 (dst d/d(src))^2) f. Each doubleton lowers the src degree by two,
// so the sum stops once a term vanishes and is exact under the caps.
Series apply_exp_half_square(const Series &f, const std::string &src, const std::string &dst);

struct FlowResult {
    Series T;      // dT/dlambda = q(T), T(0) = x
    Series g;      // dg/dlambda = v(T) g, g(0) = 1
    Series result; // g * F(T)
};

// exp(lambda (q(x) d/dx + v(x))) F(x) through the flow of the vector field.
// `truncation` must cap both var and lambda_var; CapTooSmall if the lambda
// cap is 0.
FlowResult flow_exp(const Series &q, const Series &v, const Series &F, const std::string &lambda_var,
                    const Truncation &truncation, const std::string &var = "x");

// Same operator by summing lambda^k/k! (q d/dx + v)^k F directly.
Series flow_direct(const Series &q, const Series &v, const Series &F, const std::string &lambda_var,
                   const Truncation &truncation, const std::string &var = "x");

} // namespace speckit
