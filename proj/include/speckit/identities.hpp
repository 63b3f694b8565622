#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include <speckit/class_expr.hpp>
#include <speckit/series.hpp>

namespace speckit {

struct Mismatch {
    MultiIndex monomial;
    Rational lhs;
    Rational rhs;
    std::string routes; // which pair of computations disagreed
};

struct VerificationReport {
    std::string identity;
    Truncation caps;
    std::vector<Mismatch> mismatches;
    std::vector<std::string> errata;
    double wall_time_ms = 0;

    bool passed() const { return mismatches.empty(); }
};

// Appends one Mismatch per monomial where lhs and rhs differ on the common
// window of their truncations intersected with `window`.
void append_mismatches(VerificationReport &report, const Series &lhs, const Series &rhs, const std::string &routes,
                       const Truncation &window);

VerificationReport compare_series(const std::string &identity, const Series &lhs, const Series &rhs,
                                  const Truncation &window, const std::string &routes = "lhs/rhs");

// Serialises {identity, caps, status, mismatches[], errata[], wallTimeMs};
// wallTimeMs is omitted when include_timing is false so that reports can be
// compared byte for byte.
nlohmann::json to_json(const VerificationReport &report, bool include_timing = true);
void print_table(std::ostream &os, const std::vector<VerificationReport> &reports);

// ------------------------------------------------------------ model layer

// Undirected closed chains: 1/2 * CYC(2 y^2 t). Directed cycles over blocks
// count every chain of two or more doubletons twice (reading direction), and
// the self-paired doubleton has two block configurations but only one
// matching; the 1/2 fixes both.
ClassExpr closed_chain_class();

// (1 - 2 y^2 t)^(-1/2) * exp(x^2 t / (1 - 2 y^2 t))
Series glaisher_closed_form(const Truncation &caps);
// Same with the undivided cycle count: (1 - 2 y^2 t)^(-1) * exp(...).
Series glaisher_undivided_form(const Truncation &caps);
// sum_k 1/k! (y d/dx)^(2k) exp(x^2 t), i.e. without the (1/2)^k weights.
Series glaisher_unhalved_expansion(const Truncation &caps);
// exp(1/2 (y d/dx)^2) exp(x^2 t)
Series glaisher_operator_route(const Truncation &caps);

struct ErratumFinding {
    std::string description;
    std::vector<Mismatch> mismatches; // against the matching oracle, t-degree ascending
    std::optional<Mismatch> first;
};

ErratumFinding undivided_prefactor_erratum(const Truncation &caps);
ErratumFinding unhalved_expansion_erratum(const Truncation &caps);

// Probabilists' Hermite polynomial by He_{n+1} = x He_n - n He_{n-1}.
Series hermite_he(int n, const Truncation &caps);

// Deterministic test batteries shared by the verifiers and the tests.
std::vector<std::pair<std::string, Series>> taylor_battery(const Truncation &caps);

struct FlowCase {
    Series q, v, F;
};
std::vector<FlowCase> random_flow_cases(int count, std::uint64_t seed, const Truncation &caps);

// Random admissible class expression with zero-constant-term EGF and
// non-negative integer weights.
ClassExpr random_positive_class(std::uint64_t seed, int depth);

// ---------------------------------------------------------------- verifiers

VerificationReport verify_taylor(const Truncation &caps);
VerificationReport verify_shift_dilation(const Truncation &caps);
VerificationReport verify_hermite_monomial(int n_max);
VerificationReport verify_hermite_egf(const Truncation &caps);
VerificationReport verify_glaisher(const Truncation &caps);
VerificationReport verify_chain_decomposition(int n_max);
VerificationReport verify_transfer_rules(const Truncation &caps, int count = 200, std::uint64_t seed = 20110101);
// flow_exp against flow_direct on random (q, v, F) of degree <= 3.
VerificationReport verify_flow_routes(int count, int lambda_cap, std::uint64_t seed = 7);

// Registry used by the CLI: taylor, shift-dilation, hermite-monomial,
// hermite-egf, glaisher, chain-decomposition, transfer-rules.
const std::vector<std::string> &verifier_names();
Truncation default_caps(const std::string &name);
// Runs one verifier (caps merged over its defaults) and fills wall_time_ms.
VerificationReport run_verifier(const std::string &name, const std::optional<Truncation> &caps = std::nullopt);
// Runs every verifier concurrently; results ordered by name.
std::vector<VerificationReport> run_all_verifiers(const std::optional<Truncation> &caps = std::nullopt);

} // namespace speckit
