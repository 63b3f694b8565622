#include <speckit/class_expr.hpp>
#include <speckit/errors.hpp>
#include <speckit/series_io.hpp>

namespace speckit {

namespace {

template <class... Ts>
struct overloaded : Ts... {
    using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

template <class T>
ClassExpr make(T value)
{
    return ClassExpr(std::make_shared<const ClassExpr::Node>(ClassExpr::Node{std::move(value)}));
}

} // namespace

ClassExpr::ClassExpr() : node_(std::make_shared<const Node>(Node{cls::Neutral{}})) {}

bool operator==(const ClassExpr &a, const ClassExpr &b)
{
    return a.node_ == b.node_ || a.node_->value == b.node_->value;
}

ClassExpr neutral()
{
    return ClassExpr();
}

ClassExpr atom(MultiIndex weight)
{
    std::erase_if(weight, [](const auto &kv) { return kv.second == 0; });
    for (const auto &[var, k] : weight) {
        if (k < 0) {
            throw UsageError("atom weight has negative exponent for '" + var + "'");
        }
    }
    return make(cls::Atom{std::move(weight)});
}

ClassExpr atom(std::string_view monomial)
{
    return atom(parse_monomial(monomial));
}

ClassExpr union_of(std::vector<ClassExpr> parts)
{
    return make(cls::Union{std::move(parts)});
}

ClassExpr product_of(std::vector<ClassExpr> factors)
{
    return make(cls::Product{std::move(factors)});
}

ClassExpr power_of(ClassExpr base, int k)
{
    if (k < 0) {
        throw UsageError("class power must be non-negative");
    }
    return make(cls::Power{std::move(base), k});
}

ClassExpr set_of(ClassExpr arg)
{
    return make(cls::Set{std::move(arg)});
}

ClassExpr seq_of(ClassExpr arg)
{
    return make(cls::Seq{std::move(arg)});
}

ClassExpr cyc_of(ClassExpr arg)
{
    return make(cls::Cyc{std::move(arg)});
}

ClassExpr subst(ClassExpr outer, std::string var, ClassExpr inner)
{
    return make(cls::Subst{std::move(outer), std::move(var), std::move(inner)});
}

ClassExpr weighted(Rational coefficient, ClassExpr arg)
{
    return make(cls::Weighted{std::move(coefficient), std::move(arg)});
}

ClassExpr operator+(const ClassExpr &a, const ClassExpr &b)
{
    std::vector<ClassExpr> parts;
    for (const auto *e : {&a, &b}) {
        if (const auto *u = std::get_if<cls::Union>(&e->node().value)) {
            parts.insert(parts.end(), u->parts.begin(), u->parts.end());
        } else {
            parts.push_back(*e);
        }
    }
    return union_of(std::move(parts));
}

ClassExpr operator*(const ClassExpr &a, const ClassExpr &b)
{
    std::vector<ClassExpr> factors;
    for (const auto *e : {&a, &b}) {
        if (const auto *p = std::get_if<cls::Product>(&e->node().value)) {
            factors.insert(factors.end(), p->factors.begin(), p->factors.end());
        } else {
            factors.push_back(*e);
        }
    }
    return product_of(std::move(factors));
}

ClassExpr operator*(const Rational &c, const ClassExpr &a)
{
    return weighted(c, a);
}

// ---------------------------------------------------------------- validate

namespace {

// Constant term of the EGF, computed on the skeleton. Inadmissible nodes are
// recorded and then treated as if their argument had been admissible.
Rational skeleton_constant(const ClassExpr &e, const std::string &path, std::vector<Violation> &out)
{
    auto child = [&](const std::string &suffix) { return path.empty() ? suffix : path + "/" + suffix; };
    auto check = [&](const ClassExpr &arg, const char *name) {
        const Rational c = skeleton_constant(arg, child(name), out);
        if (!c.is_zero()) {
            out.push_back({child(name), name, c});
        }
    };
    return std::visit(
        overloaded{
            [](const cls::Neutral &) { return Rational(1); },
            [](const cls::Atom &a) { return a.weight.empty() ? Rational(1) : Rational(0); },
            [&](const cls::Union &u) {
                Rational c;
                for (std::size_t i = 0; i < u.parts.size(); ++i) {
                    c += skeleton_constant(u.parts[i], child("Union[" + std::to_string(i) + "]"), out);
                }
                return c;
            },
            [&](const cls::Product &p) {
                Rational c(1);
                for (std::size_t i = 0; i < p.factors.size(); ++i) {
                    c *= skeleton_constant(p.factors[i], child("Product[" + std::to_string(i) + "]"), out);
                }
                return c;
            },
            [&](const cls::Power &p) {
                return skeleton_constant(p.base, child("Power"), out).pow(static_cast<unsigned>(p.k));
            },
            [&](const cls::Set &s) {
                check(s.arg, "Set");
                return Rational(1);
            },
            [&](const cls::Seq &s) {
                check(s.arg, "Seq");
                return Rational(1);
            },
            [&](const cls::Cyc &s) {
                check(s.arg, "Cyc");
                return Rational(0);
            },
            [&](const cls::Subst &s) {
                check(s.inner, "Subst");
                return skeleton_constant(s.outer, child("Subst.outer"), out);
            },
            [&](const cls::Weighted &w) {
                return w.coefficient * skeleton_constant(w.arg, child("Weighted"), out);
            },
        },
        e.node().value);
}

Series compile_node(const ClassExpr &e, const Truncation &t)
{
    return std::visit(
        overloaded{
            [&](const cls::Neutral &) { return Series::constant(Rational(1), t); },
            [&](const cls::Atom &a) { return Series::monomial(a.weight, Rational(1), t); },
            [&](const cls::Union &u) {
                Series s(t);
                for (const auto &p : u.parts) {
                    s += compile_node(p, t);
                }
                return s;
            },
            [&](const cls::Product &p) {
                Series s = Series::constant(Rational(1), t);
                for (const auto &f : p.factors) {
                    s *= compile_node(f, t);
                }
                return s;
            },
            [&](const cls::Power &p) { return power(compile_node(p.base, t), static_cast<unsigned>(p.k)); },
            [&](const cls::Set &s) { return exp_series(compile_node(s.arg, t)); },
            [&](const cls::Seq &s) { return geometric(compile_node(s.arg, t)); },
            [&](const cls::Cyc &s) { return log_geometric(compile_node(s.arg, t)); },
            [&](const cls::Subst &s) {
                return substitute(compile_node(s.outer, t), s.var, compile_node(s.inner, t)).retruncated(t);
            },
            [&](const cls::Weighted &w) { return w.coefficient * compile_node(w.arg, t); },
        },
        e.node().value);
}

} // namespace

std::vector<Violation> validate(const ClassExpr &e)
{
    std::vector<Violation> out;
    skeleton_constant(e, "", out);
    return out;
}

Series compile(const ClassExpr &e, const CompileContext &ctx)
{
    if (!ctx.truncation.has(ctx.label_var)) {
        throw UsageError("label variable '" + ctx.label_var + "' has no cap");
    }
    const auto violations = validate(e);
    if (!violations.empty()) {
        std::string msg = "inadmissible class " + to_string(e) + ":";
        for (const auto &v : violations) {
            msg += " " + v.construction + " argument at '" + v.path + "' has constant term " + v.constant_term.str()
                   + ";";
        }
        throw AdmissibilityError(msg);
    }
    return compile_node(e, ctx.truncation);
}

ClassExpr open_chain_class()
{
    const ClassExpr end = weighted(Rational(2), atom("x*y*t"));
    const ClassExpr inner = seq_of(weighted(Rational(2), atom("y^2*t")));
    return atom("x^2*t") + weighted(Rational(1, 2), product_of({end, inner, end}));
}

Series compile_B(const CompileContext &ctx)
{
    return compile(open_chain_class(), ctx);
}

// ------------------------------------------------------------------ output

namespace {

int precedence(const ClassExpr &e)
{
    return std::visit(overloaded{
                          [](const cls::Atom &a) {
                              if (a.weight.size() > 1) {
                                  return 3;
                              }
                              return a.weight.size() == 1 && a.weight.begin()->second != 1 ? 4 : 5;
                          },
                          [](const cls::Union &) { return 1; },
                          [](const cls::Product &) { return 2; },
                          [](const cls::Weighted &) { return 2; },
                          [](const cls::Power &) { return 4; },
                          [](const auto &) { return 5; },
                      },
                      e.node().value);
}

std::string show(const ClassExpr &e, int ctx)
{
    const std::string s = to_string(e);
    return precedence(e) < ctx ? "(" + s + ")" : s;
}

std::string join(const std::vector<ClassExpr> &parts, const char *sep, int ctx)
{
    std::string out;
    for (std::size_t i = 0; i < parts.size(); ++i) {
        out += (i ? sep : "") + show(parts[i], ctx);
    }
    return out;
}

} // namespace

std::string to_string(const ClassExpr &e)
{
    return std::visit(overloaded{
                          [](const cls::Neutral &) -> std::string { return "1"; },
                          [](const cls::Atom &a) { return monomial_str(a.weight); },
                          [](const cls::Union &u) { return join(u.parts, " + ", 2); },
                          [](const cls::Product &p) { return join(p.factors, " * ", 3); },
                          [](const cls::Power &p) { return show(p.base, 5) + "^" + std::to_string(p.k); },
                          [](const cls::Set &s) { return "SET(" + to_string(s.arg) + ")"; },
                          [](const cls::Seq &s) { return "SEQ(" + to_string(s.arg) + ")"; },
                          [](const cls::Cyc &s) { return "CYC(" + to_string(s.arg) + ")"; },
                          [](const cls::Subst &s) {
                              return "SUBST(" + to_string(s.outer) + ", " + s.var + ", " + to_string(s.inner) + ")";
                          },
                          [](const cls::Weighted &w) { return w.coefficient.str() + "*" + show(w.arg, 3); },
                      },
                      e.node().value);
}

nlohmann::json to_json(const ClassExpr &e)
{
    using nlohmann::json;
    auto list = [](const std::vector<ClassExpr> &v) {
        json a = json::array();
        for (const auto &x : v) {
            a.push_back(to_json(x));
        }
        return a;
    };
    return std::visit(overloaded{
                          [](const cls::Neutral &) { return json{{"kind", "Neutral"}}; },
                          [](const cls::Atom &a) { return json{{"kind", "Atom"}, {"weight", to_json(a.weight)}}; },
                          [&](const cls::Union &u) { return json{{"kind", "Union"}, {"parts", list(u.parts)}}; },
                          [&](const cls::Product &p) { return json{{"kind", "Product"}, {"factors", list(p.factors)}}; },
                          [](const cls::Power &p) { return json{{"kind", "Power"}, {"base", to_json(p.base)}, {"k", p.k}}; },
                          [](const cls::Set &s) { return json{{"kind", "Set"}, {"arg", to_json(s.arg)}}; },
                          [](const cls::Seq &s) { return json{{"kind", "Seq"}, {"arg", to_json(s.arg)}}; },
                          [](const cls::Cyc &s) { return json{{"kind", "Cyc"}, {"arg", to_json(s.arg)}}; },
                          [](const cls::Subst &s) {
                              return json{{"kind", "Subst"}, {"outer", to_json(s.outer)}, {"var", s.var},
                                          {"inner", to_json(s.inner)}};
                          },
                          [](const cls::Weighted &w) {
                              return json{{"kind", "Weighted"},
                                          {"num", w.coefficient.numerator_str()},
                                          {"den", w.coefficient.denominator_str()},
                                          {"arg", to_json(w.arg)}};
                          },
                      },
                      e.node().value);
}

} // namespace speckit
