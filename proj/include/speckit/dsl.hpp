#pragma once

#include <iosfwd>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include <speckit/class_expr.hpp>
#include <speckit/identities.hpp>
#include <speckit/rational.hpp>
#include <speckit/series.hpp>

namespace speckit::dsl {

// Grammar:
//
//   script    := { statement }
//   statement := "let" NAME "=" expr ";"
//              | "check" [ STRING ":" ] expr "==" expr "upto" caps ";"
//              | "emit" expr [ "upto" caps ] [ "as" ( "text" | "json" ) ] ";"
//   caps      := NAME ":" INT { "," NAME ":" INT }
//   expr      := term { ( "+" | "-" ) term }
//   term      := unary { "*" unary }
//   unary     := "-" unary | power
//   power     := primary [ "^" INT ]
//   primary   := INT [ "/" INT ] | NAME | "(" expr ")"
//              | FUNC "(" args ")"                  exp loggeo seqinv log1p powfrac subst
//                                                   sqsub d egf oracle SET SEQ CYC SUBST
//              | OP "[" opargs "]" "@" power        D EXP_SHIFT EXP_HALF_SQ FLOW DK DBL
//
// '#' starts a comment. Lower-case names not bound by `let` are series
// variables; an unbound upper-case name is an UnknownName.

enum class Type { Poly, Series, Class };

struct Expr;
using ExprPtr = std::shared_ptr<const Expr>;

struct Expr {
    enum class Kind { Number, Var, Ref, Neg, Add, Sub, Mul, Pow, Call, Op };

    Kind kind = Kind::Number;
    Rational value;             // Number; rational argument of powfrac/sqsub
    std::string name;           // Var, Ref, Call, Op
    std::vector<ExprPtr> args;  // operands; Op: [q, v] for FLOW then the operand last
    std::vector<std::string> vars; // variable arguments (subst var, D src/dst, FLOW lambda/x)
    int k = 0;                  // Pow exponent, DK/DBL k, oracle n
    Type type = Type::Poly;
};

bool operator==(const Expr &a, const Expr &b);
bool same(const ExprPtr &a, const ExprPtr &b);

struct Let {
    std::string name;
    ExprPtr expr;
};

struct Check {
    std::optional<std::string> label;
    ExprPtr lhs;
    ExprPtr rhs;
    Truncation caps;
};

struct Emit {
    enum class Format { Text, Json };
    ExprPtr expr;
    std::optional<Truncation> caps;
    Format format = Format::Text;
};

struct Statement {
    std::variant<Let, Check, Emit> node;
    int line = 0;
    int column = 0;
};

struct Script {
    std::vector<Statement> statements;
};

bool operator==(const Script &a, const Script &b);

Script parse(std::string_view text);
// A single expression, with the let bindings of `context` in scope.
ExprPtr parse_expression(std::string_view text, const Script *context = nullptr);

std::string print(const ExprPtr &e);
std::string print(const Script &s);

struct RunOptions {
    std::ostream *out = nullptr;
    std::optional<Truncation> default_caps; // for emit without upto
};

struct RunResult {
    int exit_code = 0;
    std::vector<VerificationReport> reports;
};

RunResult run(const Script &script, const RunOptions &options = {});

// Evaluates a series- or poly-typed expression under caps.
Series evaluate(const ExprPtr &e, const Truncation &caps, const Script *context = nullptr);
// Evaluates a class- or poly-typed expression.
ClassExpr evaluate_class(const ExprPtr &e, const Script *context = nullptr);

} // namespace speckit::dsl
