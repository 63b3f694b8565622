#include <speckit/dsl.hpp>
#include <speckit/errors.hpp>
#include <speckit/operators.hpp>
#include <speckit/oracle.hpp>
#include <speckit/series_io.hpp>

#include <map>
#include <ostream>

namespace speckit::dsl {

namespace {

using Lets = std::map<std::string, ExprPtr>;

Lets lets_of(const Script *context)
{
    Lets out;
    if (context) {
        for (const auto &st : context->statements) {
            if (const auto *let = std::get_if<Let>(&st.node)) {
                out[let->name] = let->expr;
            }
        }
    }
    return out;
}

const ExprPtr &lookup(const Lets &lets, const std::string &name)
{
    const auto it = lets.find(name);
    if (it == lets.end()) {
        throw UnknownName("unknown name '" + name + "'");
    }
    return it->second;
}

// c * m when e is a product of a rational and variable powers.
std::optional<std::pair<Rational, MultiIndex>> scaled_monomial(const Expr &e, const Lets &lets)
{
    switch (e.kind) {
    case Expr::Kind::Number:
        return std::pair{e.value, MultiIndex{}};
    case Expr::Kind::Var:
        return std::pair{Rational(1), MultiIndex{{e.name, 1}}};
    case Expr::Kind::Ref:
        return scaled_monomial(*lookup(lets, e.name), lets);
    case Expr::Kind::Neg:
        if (auto m = scaled_monomial(*e.args[0], lets)) {
            m->first = -m->first;
            return m;
        }
        return std::nullopt;
    case Expr::Kind::Pow:
        if (auto m = scaled_monomial(*e.args[0], lets)) {
            m->first = m->first.pow(static_cast<unsigned>(e.k));
            for (auto &[v, d] : m->second) {
                d *= e.k;
            }
            return m;
        }
        return std::nullopt;
    case Expr::Kind::Mul: {
        auto a = scaled_monomial(*e.args[0], lets);
        auto b = scaled_monomial(*e.args[1], lets);
        if (!a || !b) {
            return std::nullopt;
        }
        a->first *= b->first;
        for (const auto &[v, d] : b->second) {
            a->second[v] += d;
        }
        return a;
    }
    default:
        return std::nullopt;
    }
}

ClassExpr to_class(const Expr &e, const Lets &lets)
{
    if (auto m = scaled_monomial(e, lets)) {
        const auto &[c, w] = *m;
        ClassExpr base = w.empty() ? neutral() : atom(w);
        return c == Rational(1) ? base : weighted(c, base);
    }
    switch (e.kind) {
    case Expr::Kind::Ref:
        return to_class(*lookup(lets, e.name), lets);
    case Expr::Kind::Neg:
        return weighted(Rational(-1), to_class(*e.args[0], lets));
    case Expr::Kind::Add:
        return to_class(*e.args[0], lets) + to_class(*e.args[1], lets);
    case Expr::Kind::Sub:
        return to_class(*e.args[0], lets) + weighted(Rational(-1), to_class(*e.args[1], lets));
    case Expr::Kind::Mul: {
        // keep a leading or trailing rational as a weight rather than a product factor
        const auto &a = *e.args[0];
        const auto &b = *e.args[1];
        if (a.kind == Expr::Kind::Number) {
            return weighted(a.value, to_class(b, lets));
        }
        if (b.kind == Expr::Kind::Number) {
            return weighted(b.value, to_class(a, lets));
        }
        return to_class(a, lets) * to_class(b, lets);
    }
    case Expr::Kind::Pow:
        return power_of(to_class(*e.args[0], lets), e.k);
    case Expr::Kind::Call:
        if (e.name == "SET") {
            return set_of(to_class(*e.args[0], lets));
        }
        if (e.name == "SEQ") {
            return seq_of(to_class(*e.args[0], lets));
        }
        if (e.name == "CYC") {
            return cyc_of(to_class(*e.args[0], lets));
        }
        if (e.name == "SUBST") {
            return subst(to_class(*e.args[0], lets), e.vars[0], to_class(*e.args[1], lets));
        }
        break;
    default:
        break;
    }
    throw TypeMismatch("expression of series type used as a class: " + print(std::make_shared<const Expr>(e)));
}

Series to_series(const Expr &e, const Truncation &caps, const Lets &lets)
{
    const auto sub = [&](std::size_t i) { return to_series(*e.args[i], caps, lets); };
    switch (e.kind) {
    case Expr::Kind::Number:
        return Series::constant(e.value, caps);
    case Expr::Kind::Var:
        if (!caps.has(e.name)) {
            throw UsageError("variable '" + e.name + "' has no cap (caps " + caps.str() + ")");
        }
        return Series::variable(e.name, caps);
    case Expr::Kind::Ref:
        return to_series(*lookup(lets, e.name), caps, lets);
    case Expr::Kind::Neg:
        return -sub(0);
    case Expr::Kind::Add:
        return sub(0) + sub(1);
    case Expr::Kind::Sub:
        return sub(0) - sub(1);
    case Expr::Kind::Mul:
        return sub(0) * sub(1);
    case Expr::Kind::Pow:
        return power(sub(0), static_cast<unsigned>(e.k));
    case Expr::Kind::Call:
        if (e.name == "exp") {
            return exp_series(sub(0));
        }
        if (e.name == "loggeo") {
            return log_geometric(sub(0));
        }
        if (e.name == "seqinv") {
            return geometric(sub(0));
        }
        if (e.name == "log1p") {
            return log1p_series(sub(0));
        }
        if (e.name == "powfrac") {
            return pow_frac(sub(0), e.value);
        }
        if (e.name == "subst") {
            return substitute(sub(0), e.vars[0], sub(1));
        }
        if (e.name == "sqsub") {
            return substitute_square(sub(0), e.vars[0], e.value);
        }
        if (e.name == "d") {
            return differentiate(sub(0), e.vars[0]);
        }
        if (e.name == "egf") {
            return compile(to_class(*e.args[0], lets), {caps});
        }
        if (e.name == "oracle") {
            if (e.vars.size() == 2) {
                return oracle_egf(e.k, MarkerVars{e.vars[0], e.vars[1]});
            }
            return oracle_egf(e.k);
        }
        break;
    case Expr::Kind::Op: {
        const Series f = to_series(*e.args.back(), caps, lets);
        if (e.name == "D") {
            return apply_singleton(f, e.vars[0], e.vars[1]);
        }
        if (e.name == "EXP_SHIFT") {
            return apply_exp_shift(f, e.vars[0], e.vars[1]);
        }
        if (e.name == "EXP_HALF_SQ") {
            return apply_exp_half_square(f, e.vars[0], e.vars[1]);
        }
        if (e.name == "DK") {
            return apply_k_subset(f, e.vars[0], e.vars[1], e.k);
        }
        if (e.name == "DBL") {
            return apply_doubleton_k(f, e.vars[0], e.vars[1], e.k);
        }
        if (e.name == "FLOW") {
            const std::string x = e.vars.size() > 1 ? e.vars[1] : "x";
            return flow_exp(sub(0), sub(1), f, e.vars[0], caps, x).result;
        }
        break;
    }
    }
    throw TypeMismatch("expression of class type used as a series: " + print(std::make_shared<const Expr>(e))
                       + "; wrap it in egf(...)");
}

// Class literals are checked when their statement runs, not when first compiled.
void validate_classes(const Expr &e, const Lets &lets)
{
    if (e.type == Type::Class) {
        const auto violations = validate(to_class(e, lets));
        if (!violations.empty()) {
            std::string msg = "inadmissible class " + print(std::make_shared<const Expr>(e)) + ":";
            for (const auto &v : violations) {
                msg += " " + v.construction + " at " + v.path + " has constant term " + v.constant_term.str() + ";";
            }
            msg.pop_back();
            throw AdmissibilityError(msg);
        }
        return;
    }
    if (e.kind == Expr::Kind::Ref) {
        return;
    }
    for (const auto &a : e.args) {
        validate_classes(*a, lets);
    }
}

template <class E>
[[noreturn]] void rethrow_as(const std::string &prefix, const E &e)
{
    throw E(prefix + e.what());
}

[[noreturn]] void rethrow_with_context(const std::string &prefix)
{
    try {
        throw;
    } catch (const NonzeroConstantTerm &e) {
        rethrow_as(prefix, e);
    } catch (const DivergentSubstitution &e) {
        rethrow_as(prefix, e);
    } catch (const OddExponent &e) {
        rethrow_as(prefix, e);
    } catch (const OutOfTruncation &e) {
        rethrow_as(prefix, e);
    } catch (const AdmissibilityError &e) {
        rethrow_as(prefix, e);
    } catch (const CapExceeded &e) {
        rethrow_as(prefix, e);
    } catch (const CapTooSmall &e) {
        rethrow_as(prefix, e);
    } catch (const UsageError &e) {
        rethrow_as(prefix, e);
    } catch (const UnknownName &e) {
        rethrow_as(prefix, e);
    } catch (const TypeMismatch &e) {
        rethrow_as(prefix, e);
    }
}

void print_report(std::ostream &os, const VerificationReport &r)
{
    os << "check " << r.identity << ": " << (r.passed() ? "pass" : "FAIL") << " (caps " << r.caps.str() << ")";
    if (!r.passed()) {
        os << ", " << r.mismatches.size() << " mismatch" << (r.mismatches.size() == 1 ? "" : "es");
    }
    os << '\n';
    for (const auto &m : r.mismatches) {
        os << "  " << monomial_str(m.monomial) << ": " << m.lhs << " != " << m.rhs << '\n';
    }
}

} // namespace

Series evaluate(const ExprPtr &e, const Truncation &caps, const Script *context)
{
    return to_series(*e, caps, lets_of(context));
}

ClassExpr evaluate_class(const ExprPtr &e, const Script *context)
{
    return to_class(*e, lets_of(context));
}

RunResult run(const Script &script, const RunOptions &options)
{
    RunResult result;
    Lets lets;
    int checks = 0;
    for (std::size_t i = 0; i < script.statements.size(); ++i) {
        const auto &st = script.statements[i];
        try {
            if (const auto *let = std::get_if<Let>(&st.node)) {
                validate_classes(*let->expr, lets);
                lets[let->name] = let->expr;
            } else if (const auto *c = std::get_if<Check>(&st.node)) {
                ++checks;
                validate_classes(*c->lhs, lets);
                validate_classes(*c->rhs, lets);
                const Series lhs = to_series(*c->lhs, c->caps, lets);
                const Series rhs = to_series(*c->rhs, c->caps, lets);
                auto report =
                    compare_series(c->label.value_or("check" + std::to_string(checks)), lhs, rhs, c->caps);
                if (!report.passed()) {
                    result.exit_code = 1;
                }
                if (options.out) {
                    print_report(*options.out, report);
                }
                result.reports.push_back(std::move(report));
            } else {
                const auto &em = std::get<Emit>(st.node);
                validate_classes(*em.expr, lets);
                std::string text;
                if (em.expr->type == Type::Class) {
                    const ClassExpr ce = to_class(*em.expr, lets);
                    text = em.format == Emit::Format::Json ? to_json(ce).dump() : to_string(ce);
                } else {
                    const auto caps = em.caps ? em.caps : options.default_caps;
                    if (!caps) {
                        throw UsageError("emit needs an upto clause");
                    }
                    const Series f = to_series(*em.expr, *caps, lets);
                    text = em.format == Emit::Format::Json ? to_json(f).dump() : to_text(f);
                }
                if (options.out) {
                    *options.out << text << '\n';
                }
            }
        } catch (const Error &) {
            rethrow_with_context("statement " + std::to_string(i + 1) + " (line " + std::to_string(st.line)
                                 + "): ");
        }
    }
    return result;
}

} // namespace speckit::dsl
