#include <gtest/gtest.h>

#include <speckit/errors.hpp>
#include <speckit/identities.hpp>
#include <speckit/oracle.hpp>

#include <sstream>

using namespace speckit;

namespace {

const Truncation kGlaisher{{"x", 8}, {"y", 8}, {"t", 4}};

int t_degree(const Mismatch &m)
{
    return m.monomial.count("t") ? m.monomial.at("t") : 0;
}

} // namespace

TEST(Identities, GlaisherThreeRoutes)
{
    const auto report = verify_glaisher(kGlaisher);
    EXPECT_TRUE(report.passed());
    EXPECT_EQ(report.errata.size(), 2u);
    for (const auto &f : {glaisher_operator_route(kGlaisher), glaisher_closed_form(kGlaisher), oracle_egf(4)}) {
        EXPECT_EQ(egf_count(f, parse_monomial("x^4*t^2")), Rational(1));
        EXPECT_EQ(egf_count(f, parse_monomial("x^2*y^2*t^2")), Rational(6));
        EXPECT_EQ(egf_count(f, parse_monomial("y^4*t^2")), Rational(3));
    }
}

TEST(Identities, GlaisherCapPreconditions)
{
    EXPECT_THROW(verify_glaisher({{"x", 6}, {"y", 8}, {"t", 4}}), UsageError);
    EXPECT_THROW(verify_glaisher({{"x", 8}, {"t", 4}}), UsageError);
}

TEST(Identities, PrintedPrefactorErratum)
{
    const auto f = undivided_prefactor_erratum(kGlaisher);
    ASSERT_TRUE(f.first);
    // The undivided cycle count already doubles the lone self-paired doubleton.
    EXPECT_EQ(t_degree(*f.first), 1);
    EXPECT_EQ(monomial_str(f.first->monomial), "t*y^2");
    EXPECT_EQ(f.first->lhs, Rational(1));
    EXPECT_EQ(f.first->rhs, Rational(2));
    const auto printed = glaisher_undivided_form(kGlaisher);
    EXPECT_EQ(egf_count(printed, parse_monomial("y^4*t^2")), Rational(8));
    EXPECT_NE(f.description.find("3 vs 8"), std::string::npos);
    for (std::size_t i = 1; i < f.mismatches.size(); ++i) {
        EXPECT_LE(t_degree(f.mismatches[i - 1]), t_degree(f.mismatches[i]));
    }
}

TEST(Identities, UnhalvedExpansionErratum)
{
    const auto f = unhalved_expansion_erratum(kGlaisher);
    ASSERT_TRUE(f.first);
    EXPECT_EQ(t_degree(*f.first), 1);
    const auto unhalved = glaisher_unhalved_expansion(kGlaisher);
    EXPECT_EQ(egf_count(unhalved, parse_monomial("y^2*t")), Rational(2));
}

TEST(Identities, HermitePolynomials)
{
    const Truncation c{{"x", 8}};
    const Series x = Series::variable("x", c);
    EXPECT_EQ(hermite_he(0, c), Series::constant(Rational(1), c));
    EXPECT_EQ(hermite_he(1, c), x);
    EXPECT_EQ(hermite_he(3, c), x * x * x - Rational(3) * x);
    EXPECT_EQ(hermite_he(4, c), x * x * x * x - Rational(6) * x * x + Series::constant(Rational(3), c));
}

TEST(Identities, DefaultVerifiersPass)
{
    for (const auto &name : verifier_names()) {
        const auto report = run_verifier(name);
        EXPECT_TRUE(report.passed()) << name << ": " << report.mismatches.size() << " mismatches";
        EXPECT_EQ(report.identity, name);
        EXPECT_GE(report.wall_time_ms, 0.0);
    }
}

TEST(Identities, HermiteEgfSpecialCases)
{
    const auto degenerate = verify_hermite_egf({{"x", 6}, {"y", 0}, {"t", 6}});
    EXPECT_TRUE(degenerate.passed());
    EXPECT_EQ(degenerate.errata.size(), 1u);
    EXPECT_THROW(verify_hermite_egf({{"x", 3}, {"y", 8}, {"t", 6}}), UsageError);
}

TEST(Identities, CapsOverrideDefaults)
{
    const auto r = run_verifier("glaisher", Truncation{{"t", 3}});
    EXPECT_EQ(r.caps, (Truncation{{"x", 8}, {"y", 8}, {"t", 3}}));
    EXPECT_THROW(run_verifier("nope"), UsageError);
}

TEST(Identities, RunAllOrderedByName)
{
    const auto reports = run_all_verifiers();
    ASSERT_EQ(reports.size(), verifier_names().size());
    for (std::size_t i = 1; i < reports.size(); ++i) {
        EXPECT_LT(reports[i - 1].identity, reports[i].identity);
    }
}

TEST(Identities, MismatchReporting)
{
    const Truncation c{{"x", 3}};
    const Series a = Series::variable("x", c);
    const Series b = Rational(2) * a + Series::monomial({{"x", 3}}, Rational(1), c);
    const auto report = compare_series("demo", a, b, c, "a/b");
    ASSERT_EQ(report.mismatches.size(), 2u);
    EXPECT_EQ(monomial_str(report.mismatches[0].monomial), "x");
    EXPECT_EQ(report.mismatches[0].lhs, Rational(1));
    EXPECT_EQ(report.mismatches[0].rhs, Rational(2));

    const auto j = to_json(report, false);
    EXPECT_EQ(j["status"], "fail");
    EXPECT_EQ(j["identity"], "demo");
    EXPECT_EQ(j["caps"]["x"], 3);
    EXPECT_EQ(j["mismatches"][0]["routes"], "a/b");
    EXPECT_EQ(j["mismatches"][0]["monomial"]["x"], 1);
    EXPECT_FALSE(j.contains("wallTimeMs"));
    EXPECT_TRUE(to_json(report).contains("wallTimeMs"));

    std::ostringstream os;
    print_table(os, {report});
    EXPECT_NE(os.str().find("FAIL"), std::string::npos);
}

TEST(Identities, ChainDecompositionSmall)
{
    EXPECT_TRUE(verify_chain_decomposition(3).passed());
}

TEST(Identities, Batteries)
{
    EXPECT_EQ(taylor_battery(kGlaisher).size(), 20u);
    const Truncation c{{"x", 27}, {"lambda", 8}};
    const auto a = random_flow_cases(5, 1, c);
    const auto b = random_flow_cases(5, 1, c);
    for (std::size_t i = 0; i < a.size(); ++i) {
        EXPECT_EQ(a[i].F, b[i].F);
        EXPECT_LE(a[i].q.degree("x"), 3);
    }
    EXPECT_EQ(random_positive_class(11, 3), random_positive_class(11, 3));
}
