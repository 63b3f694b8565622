#include <gtest/gtest.h>

#include <speckit/class_expr.hpp>
#include <speckit/dsl.hpp>
#include <speckit/errors.hpp>
#include <speckit/identities.hpp>
#include <speckit/operators.hpp>
#include <speckit/oracle.hpp>

#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>

using namespace speckit;
using namespace speckit::dsl;

namespace {

std::string slurp(const std::string &name)
{
    std::ifstream in(std::string(SPECKIT_SPECS) + "/" + name);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

const VerificationReport &report_named(const RunResult &r, const std::string &label)
{
    for (const auto &rep : r.reports) {
        if (rep.identity == label) {
            return rep;
        }
    }
    throw std::runtime_error("no report " + label);
}

} // namespace

TEST(DslParse, LetCheckEmit)
{
    const auto s = parse("let C = egf(SET(x^2*t));\n"
                         "check EXP_HALF_SQ[x->y] @ egf(SET(x^2*t)) == powfrac(-2*y^2*t,-1/2) * "
                         "exp(x^2*t * seqinv(2*y^2*t)) upto x:8,y:8,t:4;\n"
                         "emit C upto x:4,t:2 as json;");
    ASSERT_EQ(s.statements.size(), 3u);
    const auto &let = std::get<Let>(s.statements[0].node);
    EXPECT_EQ(let.name, "C");
    EXPECT_EQ(let.expr->type, Type::Series);
    const auto &check = std::get<Check>(s.statements[1].node);
    EXPECT_EQ(check.caps, (Truncation{{"x", 8}, {"y", 8}, {"t", 4}}));
    EXPECT_EQ(check.lhs->kind, Expr::Kind::Op);
    EXPECT_EQ(check.lhs->name, "EXP_HALF_SQ");
    EXPECT_EQ(std::get<Emit>(s.statements[2].node).format, Emit::Format::Json);
    EXPECT_EQ(s.statements[1].line, 2);
}

TEST(DslParse, Precedence)
{
    const auto e = parse_expression("1 + 2*x^3 - y");
    EXPECT_EQ(print(e), "1 + 2 * x^3 - y");
    EXPECT_EQ(e->kind, Expr::Kind::Sub);
    EXPECT_EQ(e->args[0]->kind, Expr::Kind::Add);
    EXPECT_EQ(e->args[0]->args[1]->kind, Expr::Kind::Mul);
    EXPECT_EQ(e->args[0]->args[1]->args[1]->kind, Expr::Kind::Pow);
    EXPECT_EQ(print(parse_expression("(x + y)^2 * -(x - y)")), "(x + y)^2 * -(x - y)");
    EXPECT_EQ(print(parse_expression("x - (y - 1)")), "x - (y - 1)");
    // the operand of @ is a power-level term
    const auto op = parse_expression("D[x->y] @ x^2 * y");
    EXPECT_EQ(op->kind, Expr::Kind::Mul);
    EXPECT_EQ(op->args[0]->kind, Expr::Kind::Op);
}

TEST(DslParse, SyntaxErrorsCarryPosition)
{
    try {
        parse("let a = x;\nlet b = (x + ;");
        FAIL() << "expected SyntaxError";
    } catch (const SyntaxError &e) {
        EXPECT_EQ(e.line(), 2);
        EXPECT_EQ(e.column(), 14);
        EXPECT_EQ(e.expected(), (std::vector<std::string>{"number", "name", "'('"}));
    }
    EXPECT_THROW(parse("check x == x;"), SyntaxError);           // missing upto
    EXPECT_THROW(parse("let a = x"), SyntaxError);               // missing ;
    EXPECT_THROW(parse("let a = x; let a = y;"), SyntaxError);   // single assignment
    EXPECT_THROW(parse("emit x as yaml;"), SyntaxError);
    EXPECT_THROW(parse("let a = x $ y;"), SyntaxError);
    EXPECT_THROW(parse("let a = x / y;"), SyntaxError);
}

TEST(DslParse, UnknownNames)
{
    EXPECT_THROW(parse("let a = foo(x);"), UnknownName);
    EXPECT_THROW(parse("let a = NOPE[x->y] @ x;"), UnknownName);
    EXPECT_THROW(parse("let a = B + x; let B = x;"), UnknownName); // used before definition
}

TEST(DslParse, TypeMismatches)
{
    EXPECT_THROW(parse("let a = SET(x*t) + exp(x);"), TypeMismatch);
    EXPECT_THROW(parse("let a = exp(SET(x*t));"), TypeMismatch);
    EXPECT_THROW(parse("let a = SET(egf(x*t));"), TypeMismatch);
    EXPECT_THROW(parse("check SET(x*t) == 1 upto t:2;"), TypeMismatch);
    EXPECT_THROW(parse("let a = D[x->y] @ SEQ(x*t);"), TypeMismatch);
    EXPECT_NO_THROW(parse("let a = SET(x*t); let b = egf(a) + 1;"));
}

TEST(DslParse, RoundTripShippedSpecs)
{
    for (const auto &entry : std::filesystem::directory_iterator(SPECKIT_SPECS)) {
        std::ifstream in(entry.path());
        std::ostringstream ss;
        ss << in.rdbuf();
        const auto s = parse(ss.str());
        const auto printed = print(s);
        EXPECT_EQ(parse(printed), s) << entry.path() << "\n" << printed;
        EXPECT_EQ(print(parse(printed)), printed);
    }
}

namespace {

std::string random_expr(std::mt19937_64 &rng, int depth)
{
    static const std::vector<std::string> leaves{"x", "y", "t", "2", "1/2", "3/4", "x^2", "(x*t)"};
    std::uniform_int_distribution<int> pick(0, depth <= 0 ? 0 : 9);
    const auto leaf = [&] { return leaves[rng() % leaves.size()]; };
    switch (pick(rng)) {
    case 0:
        return leaf();
    case 1:
        return "(" + random_expr(rng, depth - 1) + " + " + random_expr(rng, depth - 1) + ")";
    case 2:
        return "(" + random_expr(rng, depth - 1) + " - " + random_expr(rng, depth - 1) + ")";
    case 3:
        return random_expr(rng, depth - 1) + " * " + random_expr(rng, depth - 1);
    case 4:
        return "-" + random_expr(rng, depth - 1);
    case 5:
        return "(" + random_expr(rng, depth - 1) + ")^" + std::to_string(rng() % 3);
    case 6:
        return "D[x->y] @ (" + random_expr(rng, depth - 1) + ")";
    case 7:
        return "exp(" + random_expr(rng, depth - 1) + " * t)";
    case 8:
        return "subst(" + random_expr(rng, depth - 1) + ", x, x + y)";
    default:
        return "FLOW[1; x; lambda] @ " + leaf();
    }
}

} // namespace

TEST(DslParse, RoundTripRandomExpressions)
{
    std::mt19937_64 rng(17);
    for (int i = 0; i < 300; ++i) {
        const std::string text = random_expr(rng, 4);
        const auto e = parse_expression(text);
        const auto again = parse_expression(print(e));
        EXPECT_TRUE(same(e, again)) << text << "\n" << print(e);
    }
}

TEST(DslRun, EmptyScript)
{
    std::ostringstream os;
    RunOptions opts;
    opts.out = &os;
    const auto r = run(parse(""), opts);
    EXPECT_EQ(r.exit_code, 0);
    EXPECT_TRUE(os.str().empty());
    EXPECT_TRUE(r.reports.empty());
}

TEST(DslRun, FailingCheck)
{
    std::ostringstream os;
    RunOptions opts;
    opts.out = &os;
    const auto r = run(parse("check \"bad\": (x + y)^2 == x^2 + y^2 upto x:4, y:4;"), opts);
    EXPECT_EQ(r.exit_code, 1);
    ASSERT_EQ(r.reports.size(), 1u);
    EXPECT_EQ(r.reports[0].mismatches.size(), 1u);
    EXPECT_NE(os.str().find("FAIL"), std::string::npos);
    EXPECT_NE(os.str().find("x*y: 2 != 0"), std::string::npos);
}

TEST(DslRun, InadmissibleClassSurfaces)
{
    EXPECT_THROW(run(parse("let bad = SET(1);")), AdmissibilityError);
    EXPECT_THROW(run(parse("emit egf(SEQ(1 + x*t)) upto x:2, t:2;")), AdmissibilityError);
}

TEST(DslRun, ErrorsCarryStatementIndex)
{
    try {
        run(parse("let a = x;\nemit exp(1 + x) upto x:3;"));
        FAIL();
    } catch (const NonzeroConstantTerm &e) {
        EXPECT_NE(std::string(e.what()).find("statement 2 (line 2)"), std::string::npos);
    }
    EXPECT_THROW(run(parse("emit x + z upto x:3;")), UsageError);
    EXPECT_THROW(run(parse("emit x;")), UsageError);
}

TEST(DslRun, Emit)
{
    std::ostringstream os;
    RunOptions opts;
    opts.out = &os;
    run(parse("emit EXP_HALF_SQ[x->y] @ x^4 upto x:4, y:4;\n"
              "emit SET(x*t + 1/2*(y*t)^2);\n"
              "emit 2*x upto x:1 as json;"),
        opts);
    EXPECT_EQ(os.str(), "1/1 x^4 + 6/1 x^2 y^2 + 3/1 y^4\n"
                        "SET(t*x + 1/2*t^2*y^2)\n"
                        "{\"caps\":{\"x\":1},\"terms\":[{\"den\":\"1\",\"exponents\":{\"x\":1},\"num\":\"2\"}]}\n");
}

TEST(DslRun, ClassLiterals)
{
    const Truncation caps{{"x", 6}, {"y", 6}, {"t", 4}};
    const auto e = parse_expression("egf(x^2*t + 1/2 * (2*x*y*t) * SEQ(2*y^2*t) * (2*x*y*t))");
    EXPECT_EQ(evaluate(e, caps), compile_B({caps}));
    const auto c = evaluate_class(parse_expression("1/2 * CYC(2*y^2*t)"));
    EXPECT_EQ(compile(c, {caps}), compile(closed_chain_class(), {caps}));
    EXPECT_EQ(evaluate_class(parse_expression("1")), neutral());
    EXPECT_EQ(evaluate_class(parse_expression("SUBST(SET(x*t), x, x + y)")),
              subst(set_of(atom("x*t")), "x", atom("x") + atom("y")));
}

TEST(DslRun, Lazy)
{
    // the caps of each use decide the expansion
    const auto s = parse("let E = exp(x*t);\n"
                         "check \"small\": E == 1 + x*t upto x:1, t:1;\n"
                         "check \"large\": E == 1 + x*t + 1/2*x^2*t^2 upto x:2, t:2;");
    const auto r = run(s);
    EXPECT_EQ(r.exit_code, 0);
    EXPECT_EQ(r.reports.size(), 2u);
}

TEST(DslRun, Operators)
{
    const Truncation caps{{"x", 6}, {"y", 6}};
    EXPECT_EQ(evaluate(parse_expression("DK[x->y, 2] @ x^5"), caps),
              evaluate(parse_expression("10 * x^3 * y^2"), caps));
    EXPECT_EQ(evaluate(parse_expression("DBL[x->y, 2] @ x^4"), caps), evaluate(parse_expression("3*y^4"), caps));
    EXPECT_EQ(evaluate(parse_expression("EXP_SHIFT[x->y] @ x^2"), caps),
              evaluate(parse_expression("(x + y)^2"), caps));
    EXPECT_EQ(evaluate(parse_expression("d(x^3, x)"), caps), evaluate(parse_expression("3*x^2"), caps));
    const Truncation flow{{"z", 6}, {"lambda", 6}};
    EXPECT_EQ(evaluate(parse_expression("FLOW[1; 0; lambda; z] @ z^2"), flow),
              evaluate(parse_expression("(z + lambda)^2"), flow));
}

// Shipped scripts against the programmatic API, JSON without timing.
TEST(DslRun, SpecsMatchApiByteForByte)
{
    const auto bytes = [](const VerificationReport &r) { return to_json(r, false).dump(); };

    const auto glaisher = run(parse(slurp("glaisher.spec")));
    EXPECT_EQ(glaisher.exit_code, 0);
    const Truncation g{{"x", 8}, {"y", 8}, {"t", 4}};
    EXPECT_EQ(bytes(report_named(glaisher, "glaisher")),
              bytes(compare_series("glaisher", glaisher_operator_route(g), glaisher_closed_form(g), g)));
    EXPECT_EQ(bytes(report_named(glaisher, "glaisher-oracle")),
              bytes(compare_series("glaisher-oracle", glaisher_operator_route(g), oracle_egf(4), g)));

    const auto hermite = run(parse(slurp("hermite-egf.spec")));
    const Truncation h{{"x", 8}, {"y", 8}, {"t", 8}};
    const Series xt = Series::monomial({{"x", 1}, {"t", 1}}, Rational(1), h);
    const Series op = apply_exp_half_square(exp_series(xt), "x", "y");
    const Series closed = exp_series(xt + Series::monomial({{"y", 2}, {"t", 2}}, Rational(1, 2), h));
    EXPECT_EQ(bytes(report_named(hermite, "hermite-egf")), bytes(compare_series("hermite-egf", op, closed, h)));

    const auto chains = run(parse(slurp("chain-decomposition.spec")));
    EXPECT_EQ(chains.exit_code, 0);
    const Truncation c{{"x", 10}, {"y", 10}, {"t", 5}, {"u", 6}, {"v", 6}};
    const Series a = compile(closed_chain_class(), {c});
    const Series b = compile_B({c});
    const Series rhs = exp_series(Series::variable("u", c) * a + Series::variable("v", c) * b);
    EXPECT_EQ(bytes(report_named(chains, "chain-decomposition")),
              bytes(compare_series("chain-decomposition", oracle_egf(5, MarkerVars{}), rhs, c)));
}

TEST(DslRun, EveryShippedSpecPasses)
{
    for (const auto &entry : std::filesystem::directory_iterator(SPECKIT_SPECS)) {
        const auto r = run(parse(slurp(entry.path().filename().string())));
        EXPECT_EQ(r.exit_code, 0) << entry.path();
        EXPECT_FALSE(r.reports.empty()) << entry.path();
    }
}
