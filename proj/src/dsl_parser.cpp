#include <speckit/dsl.hpp>
#include <speckit/errors.hpp>

#include <cctype>
#include <map>
#include <set>

namespace speckit::dsl {

// ------------------------------------------------------------------ lexer

namespace {

enum class Tok { End, Ident, Int, String, Punct };

struct Token {
    Tok kind = Tok::End;
    std::string text;
    int line = 1;
    int column = 1;
};

class Lexer {
public:
    explicit Lexer(std::string_view src) : src_(src) {}

    std::vector<Token> run()
    {
        std::vector<Token> out;
        for (;;) {
            skip_space();
            Token t;
            t.line = line_;
            t.column = col_;
            if (pos_ >= src_.size()) {
                out.push_back(t);
                return out;
            }
            const char c = src_[pos_];
            if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
                t.kind = Tok::Ident;
                while (pos_ < src_.size()
                       && (std::isalnum(static_cast<unsigned char>(src_[pos_])) || src_[pos_] == '_')) {
                    t.text += advance();
                }
            } else if (std::isdigit(static_cast<unsigned char>(c))) {
                t.kind = Tok::Int;
                while (pos_ < src_.size() && std::isdigit(static_cast<unsigned char>(src_[pos_]))) {
                    t.text += advance();
                }
            } else if (c == '"') {
                t.kind = Tok::String;
                advance();
                while (pos_ < src_.size() && src_[pos_] != '"' && src_[pos_] != '\n') {
                    t.text += advance();
                }
                if (pos_ >= src_.size() || src_[pos_] != '"') {
                    throw SyntaxError(line_, col_, {"'\"'"}, "end of line");
                }
                advance();
            } else {
                t.kind = Tok::Punct;
                const std::string_view two = src_.substr(pos_, 2);
                if (two == "==" || two == "->") {
                    t.text = std::string(two);
                    advance();
                    advance();
                } else if (std::string_view("=;+-*^/()[],:@").find(c) != std::string_view::npos) {
                    t.text = std::string(1, advance());
                } else {
                    throw SyntaxError(line_, col_, {"token"}, "'" + std::string(1, c) + "'");
                }
            }
            out.push_back(std::move(t));
        }
    }

private:
    std::string_view src_;
    std::size_t pos_ = 0;
    int line_ = 1;
    int col_ = 1;

    char advance()
    {
        const char c = src_[pos_++];
        if (c == '\n') {
            ++line_;
            col_ = 1;
        } else {
            ++col_;
        }
        return c;
    }

    void skip_space()
    {
        while (pos_ < src_.size()) {
            if (std::isspace(static_cast<unsigned char>(src_[pos_]))) {
                advance();
            } else if (src_[pos_] == '#') {
                while (pos_ < src_.size() && src_[pos_] != '\n') {
                    advance();
                }
            } else {
                break;
            }
        }
    }
};

std::string describe(const Token &t)
{
    switch (t.kind) {
    case Tok::End:
        return "end of input";
    case Tok::String:
        return "string \"" + t.text + "\"";
    default:
        return "'" + t.text + "'";
    }
}

// ------------------------------------------------------------------ tables

enum class ArgKind { Value, Var, Ratio, Int };

struct FuncSig {
    std::vector<ArgKind> args;
    std::vector<Type> accepts; // per Value argument
    Type result;
};

const std::map<std::string, FuncSig, std::less<>> &functions()
{
    static const std::map<std::string, FuncSig, std::less<>> table{
        {"exp", {{ArgKind::Value}, {Type::Series}, Type::Series}},
        {"loggeo", {{ArgKind::Value}, {Type::Series}, Type::Series}},
        {"seqinv", {{ArgKind::Value}, {Type::Series}, Type::Series}},
        {"log1p", {{ArgKind::Value}, {Type::Series}, Type::Series}},
        {"powfrac", {{ArgKind::Value, ArgKind::Ratio}, {Type::Series}, Type::Series}},
        {"subst", {{ArgKind::Value, ArgKind::Var, ArgKind::Value}, {Type::Series, Type::Series}, Type::Series}},
        {"sqsub", {{ArgKind::Value, ArgKind::Var, ArgKind::Ratio}, {Type::Series}, Type::Series}},
        {"d", {{ArgKind::Value, ArgKind::Var}, {Type::Series}, Type::Series}},
        {"egf", {{ArgKind::Value}, {Type::Class}, Type::Series}},
        {"oracle", {{ArgKind::Int}, {}, Type::Series}},
        {"SET", {{ArgKind::Value}, {Type::Class}, Type::Class}},
        {"SEQ", {{ArgKind::Value}, {Type::Class}, Type::Class}},
        {"CYC", {{ArgKind::Value}, {Type::Class}, Type::Class}},
        {"SUBST", {{ArgKind::Value, ArgKind::Var, ArgKind::Value}, {Type::Class, Type::Class}, Type::Class}},
    };
    return table;
}

const std::set<std::string, std::less<>> kOperators{"D", "EXP_SHIFT", "EXP_HALF_SQ", "FLOW", "DK", "DBL"};
const std::set<std::string, std::less<>> kKeywords{"let", "check", "emit", "upto", "as"};

const char *type_name(Type t)
{
    switch (t) {
    case Type::Poly:
        return "polynomial";
    case Type::Series:
        return "series";
    default:
        return "class";
    }
}

// Poly is accepted wherever a series or a class is.
bool accepts(Type want, Type got)
{
    return got == Type::Poly || got == want;
}

Type combine(Type a, Type b, const Token &at)
{
    if ((a == Type::Class && b == Type::Series) || (a == Type::Series && b == Type::Class)) {
        throw TypeMismatch(std::to_string(at.line) + ":" + std::to_string(at.column)
                           + ": cannot combine a series with a class; wrap the class in egf(...)");
    }
    if (a == Type::Class || b == Type::Class) {
        return Type::Class;
    }
    if (a == Type::Series || b == Type::Series) {
        return Type::Series;
    }
    return Type::Poly;
}

ExprPtr make(Expr e)
{
    return std::make_shared<const Expr>(std::move(e));
}

// ----------------------------------------------------------------- parser

class Parser {
public:
    Parser(std::vector<Token> tokens, std::map<std::string, Type> bindings)
        : toks_(std::move(tokens)), bindings_(std::move(bindings))
    {
    }

    Script script()
    {
        Script s;
        while (peek().kind != Tok::End) {
            s.statements.push_back(statement());
        }
        return s;
    }

    ExprPtr lone_expression()
    {
        auto e = expr();
        if (peek().kind != Tok::End) {
            fail({"operator", "end of input"});
        }
        return e;
    }

private:
    std::vector<Token> toks_;
    std::size_t pos_ = 0;
    std::map<std::string, Type> bindings_;

    const Token &peek(std::size_t ahead = 0) const { return toks_[std::min(pos_ + ahead, toks_.size() - 1)]; }
    const Token &next() { return toks_[pos_ < toks_.size() - 1 ? pos_++ : pos_]; }

    bool is_punct(const char *p, std::size_t ahead = 0) const
    {
        return peek(ahead).kind == Tok::Punct && peek(ahead).text == p;
    }
    bool is_word(const char *w) const { return peek().kind == Tok::Ident && peek().text == w; }

    [[noreturn]] void fail(std::vector<std::string> expected) const
    {
        throw SyntaxError(peek().line, peek().column, std::move(expected), describe(peek()));
    }

    const Token &expect_punct(const char *p)
    {
        if (!is_punct(p)) {
            fail({std::string("'") + p + "'"});
        }
        return next();
    }

    void expect_word(const char *w)
    {
        if (!is_word(w)) {
            fail({std::string("'") + w + "'"});
        }
        next();
    }

    std::string name()
    {
        if (peek().kind != Tok::Ident || kKeywords.count(peek().text)) {
            fail({"name"});
        }
        return next().text;
    }

    int integer()
    {
        if (peek().kind != Tok::Int || peek().text.size() > 9) {
            fail({"integer"});
        }
        return std::stoi(next().text);
    }

    Rational ratio()
    {
        bool neg = false;
        if (is_punct("-")) {
            next();
            neg = true;
        }
        if (peek().kind != Tok::Int) {
            fail({"rational literal"});
        }
        std::string text = next().text;
        if (is_punct("/")) {
            next();
            if (peek().kind != Tok::Int) {
                fail({"integer"});
            }
            text += "/" + next().text;
        }
        Rational r = Rational::parse(text);
        return neg ? -r : r;
    }

    Statement statement()
    {
        Statement st;
        st.line = peek().line;
        st.column = peek().column;
        if (is_word("let")) {
            next();
            const Token at = peek();
            Let let;
            let.name = name();
            if (bindings_.count(let.name)) {
                throw SyntaxError(at.line, at.column, {"unbound name"}, "'" + let.name + "' (already defined)");
            }
            expect_punct("=");
            let.expr = expr();
            expect_punct(";");
            bindings_[let.name] = let.expr->type;
            st.node = std::move(let);
        } else if (is_word("check")) {
            next();
            Check c;
            if (peek().kind == Tok::String) {
                c.label = next().text;
                expect_punct(":");
            }
            c.lhs = series_side();
            expect_punct("==");
            c.rhs = series_side();
            expect_word("upto");
            c.caps = caps();
            expect_punct(";");
            st.node = std::move(c);
        } else if (is_word("emit")) {
            next();
            Emit e;
            e.expr = expr();
            if (is_word("upto")) {
                next();
                e.caps = caps();
            }
            if (is_word("as")) {
                next();
                if (is_word("text")) {
                    e.format = Emit::Format::Text;
                } else if (is_word("json")) {
                    e.format = Emit::Format::Json;
                } else {
                    fail({"'text'", "'json'"});
                }
                next();
            }
            expect_punct(";");
            st.node = std::move(e);
        } else {
            fail({"'let'", "'check'", "'emit'"});
        }
        return st;
    }

    ExprPtr series_side()
    {
        const Token at = peek();
        auto e = expr();
        if (e->type == Type::Class) {
            throw TypeMismatch(std::to_string(at.line) + ":" + std::to_string(at.column)
                               + ": check compares series; wrap the class in egf(...)");
        }
        return e;
    }

    Truncation caps()
    {
        std::map<std::string, int> out;
        do {
            if (!out.empty()) {
                next(); // ','
            }
            const std::string v = name();
            expect_punct(":");
            out[v] = integer();
        } while (is_punct(","));
        return Truncation(std::move(out));
    }

    ExprPtr expr()
    {
        auto lhs = term();
        while (is_punct("+") || is_punct("-")) {
            const Token op = next();
            auto rhs = term();
            Expr e;
            e.kind = op.text == "+" ? Expr::Kind::Add : Expr::Kind::Sub;
            e.type = combine(lhs->type, rhs->type, op);
            e.args = {lhs, rhs};
            lhs = make(std::move(e));
        }
        return lhs;
    }

    ExprPtr term()
    {
        auto lhs = unary();
        while (is_punct("*")) {
            const Token op = next();
            auto rhs = unary();
            Expr e;
            e.kind = Expr::Kind::Mul;
            e.type = combine(lhs->type, rhs->type, op);
            e.args = {lhs, rhs};
            lhs = make(std::move(e));
        }
        return lhs;
    }

    ExprPtr unary()
    {
        if (is_punct("-")) {
            next();
            auto a = unary();
            Expr e;
            e.kind = Expr::Kind::Neg;
            e.type = a->type;
            e.args = {a};
            return make(std::move(e));
        }
        return power();
    }

    ExprPtr power()
    {
        auto base = primary();
        if (is_punct("^")) {
            next();
            Expr e;
            e.kind = Expr::Kind::Pow;
            e.type = base->type;
            e.k = integer();
            e.args = {base};
            return make(std::move(e));
        }
        return base;
    }

    ExprPtr primary()
    {
        const Token &t = peek();
        if (t.kind == Tok::Int) {
            Expr e;
            e.kind = Expr::Kind::Number;
            e.value = ratio();
            return make(std::move(e));
        }
        if (is_punct("(")) {
            next();
            auto e = expr();
            expect_punct(")");
            return e;
        }
        if (t.kind != Tok::Ident || kKeywords.count(t.text)) {
            fail({"number", "name", "'('"});
        }
        if (is_punct("(", 1)) {
            return call();
        }
        if (is_punct("[", 1)) {
            return op();
        }
        const Token id = next();
        Expr e;
        e.name = id.text;
        if (auto b = bindings_.find(id.text); b != bindings_.end()) {
            e.kind = Expr::Kind::Ref;
            e.type = b->second;
        } else if (std::islower(static_cast<unsigned char>(id.text.front()))) {
            e.kind = Expr::Kind::Var;
        } else {
            throw UnknownName(std::to_string(id.line) + ":" + std::to_string(id.column) + ": unknown name '"
                              + id.text + "'");
        }
        return make(std::move(e));
    }

    void check_arg(Type want, const ExprPtr &arg, const Token &at, const std::string &fn)
    {
        if (!accepts(want, arg->type)) {
            throw TypeMismatch(std::to_string(at.line) + ":" + std::to_string(at.column) + ": " + fn + " expects a "
                               + type_name(want) + ", got a " + type_name(arg->type));
        }
    }

    ExprPtr call()
    {
        const Token id = next();
        const auto &table = functions();
        const auto it = table.find(id.text);
        if (it == table.end()) {
            throw UnknownName(std::to_string(id.line) + ":" + std::to_string(id.column) + ": unknown function '"
                              + id.text + "'");
        }
        const FuncSig &sig = it->second;
        expect_punct("(");
        Expr e;
        e.kind = Expr::Kind::Call;
        e.name = id.text;
        e.type = sig.result;
        std::size_t value_index = 0;
        for (std::size_t i = 0; i < sig.args.size(); ++i) {
            if (i) {
                expect_punct(",");
            }
            const Token at = peek();
            switch (sig.args[i]) {
            case ArgKind::Value: {
                auto a = expr();
                check_arg(sig.accepts[value_index++], a, at, id.text);
                e.args.push_back(std::move(a));
                break;
            }
            case ArgKind::Var:
                e.vars.push_back(name());
                break;
            case ArgKind::Ratio:
                e.value = ratio();
                break;
            case ArgKind::Int:
                e.k = integer();
                break;
            }
        }
        // oracle(n, u, v) marks closed and open chains.
        if (id.text == "oracle" && is_punct(",")) {
            next();
            e.vars.push_back(name());
            expect_punct(",");
            e.vars.push_back(name());
        }
        expect_punct(")");
        return make(std::move(e));
    }

    ExprPtr op()
    {
        const Token id = next();
        if (!kOperators.count(id.text)) {
            throw UnknownName(std::to_string(id.line) + ":" + std::to_string(id.column) + ": unknown operator '"
                              + id.text + "'");
        }
        expect_punct("[");
        Expr e;
        e.kind = Expr::Kind::Op;
        e.name = id.text;
        e.type = Type::Series;
        if (id.text == "FLOW") {
            for (int i = 0; i < 2; ++i) {
                const Token at = peek();
                auto a = expr();
                check_arg(Type::Series, a, at, "FLOW");
                e.args.push_back(std::move(a));
                expect_punct(";");
            }
            e.vars.push_back(name());
            if (is_punct(";")) {
                next();
                e.vars.push_back(name());
            }
        } else {
            e.vars.push_back(name());
            expect_punct("->");
            e.vars.push_back(name());
            if (id.text == "DK" || id.text == "DBL") {
                expect_punct(",");
                e.k = integer();
            }
        }
        expect_punct("]");
        expect_punct("@");
        const Token at = peek();
        auto operand = power();
        check_arg(Type::Series, operand, at, id.text);
        e.args.push_back(std::move(operand));
        return make(std::move(e));
    }
};

std::map<std::string, Type> bindings_of(const Script *context)
{
    std::map<std::string, Type> out;
    if (context) {
        for (const auto &st : context->statements) {
            if (const auto *let = std::get_if<Let>(&st.node)) {
                out[let->name] = let->expr->type;
            }
        }
    }
    return out;
}

} // namespace

Script parse(std::string_view text)
{
    return Parser(Lexer(text).run(), {}).script();
}

ExprPtr parse_expression(std::string_view text, const Script *context)
{
    return Parser(Lexer(text).run(), bindings_of(context)).lone_expression();
}

// --------------------------------------------------------------- equality

bool same(const ExprPtr &a, const ExprPtr &b)
{
    return a == b || (a && b && *a == *b);
}

bool operator==(const Expr &a, const Expr &b)
{
    if (a.kind != b.kind || a.value != b.value || a.name != b.name || a.vars != b.vars || a.k != b.k
        || a.args.size() != b.args.size()) {
        return false;
    }
    for (std::size_t i = 0; i < a.args.size(); ++i) {
        if (!same(a.args[i], b.args[i])) {
            return false;
        }
    }
    return true;
}

namespace {

bool same_statement(const Statement &a, const Statement &b)
{
    if (a.node.index() != b.node.index()) {
        return false;
    }
    if (const auto *x = std::get_if<Let>(&a.node)) {
        const auto &y = std::get<Let>(b.node);
        return x->name == y.name && same(x->expr, y.expr);
    }
    if (const auto *x = std::get_if<Check>(&a.node)) {
        const auto &y = std::get<Check>(b.node);
        return x->label == y.label && same(x->lhs, y.lhs) && same(x->rhs, y.rhs) && x->caps == y.caps;
    }
    const auto &x = std::get<Emit>(a.node);
    const auto &y = std::get<Emit>(b.node);
    return same(x.expr, y.expr) && x.caps == y.caps && x.format == y.format;
}

} // namespace

bool operator==(const Script &a, const Script &b)
{
    if (a.statements.size() != b.statements.size()) {
        return false;
    }
    for (std::size_t i = 0; i < a.statements.size(); ++i) {
        if (!same_statement(a.statements[i], b.statements[i])) {
            return false;
        }
    }
    return true;
}

// ---------------------------------------------------------------- printer

namespace {

int precedence(const Expr &e)
{
    switch (e.kind) {
    case Expr::Kind::Add:
    case Expr::Kind::Sub:
        return 1;
    case Expr::Kind::Mul:
        return 2;
    case Expr::Kind::Neg:
        return 3;
    case Expr::Kind::Pow:
    case Expr::Kind::Op:
        return 4;
    case Expr::Kind::Number:
        // a negative literal only comes from hand-built trees
        return e.value.sign() < 0 ? 3 : 5;
    default:
        return 5;
    }
}

std::string show(const ExprPtr &e, int ctx);

std::string show_inner(const Expr &e)
{
    switch (e.kind) {
    case Expr::Kind::Number:
        return e.value.str();
    case Expr::Kind::Var:
    case Expr::Kind::Ref:
        return e.name;
    case Expr::Kind::Neg:
        return "-" + show(e.args[0], 3);
    case Expr::Kind::Add:
        return show(e.args[0], 1) + " + " + show(e.args[1], 2);
    case Expr::Kind::Sub:
        return show(e.args[0], 1) + " - " + show(e.args[1], 2);
    case Expr::Kind::Mul:
        return show(e.args[0], 2) + " * " + show(e.args[1], 3);
    case Expr::Kind::Pow:
        return show(e.args[0], 5) + "^" + std::to_string(e.k);
    case Expr::Kind::Call: {
        const auto &sig = functions().at(e.name);
        std::string out = e.name + "(";
        std::size_t vi = 0, vv = 0;
        for (std::size_t i = 0; i < sig.args.size(); ++i) {
            if (i) {
                out += ", ";
            }
            switch (sig.args[i]) {
            case ArgKind::Value:
                out += show(e.args[vi++], 0);
                break;
            case ArgKind::Var:
                out += e.vars[vv++];
                break;
            case ArgKind::Ratio:
                out += e.value.str();
                break;
            case ArgKind::Int:
                out += std::to_string(e.k);
                break;
            }
        }
        for (; vv < e.vars.size(); ++vv) {
            out += ", " + e.vars[vv];
        }
        return out + ")";
    }
    case Expr::Kind::Op: {
        std::string out = e.name + "[";
        if (e.name == "FLOW") {
            out += show(e.args[0], 0) + "; " + show(e.args[1], 0) + "; " + e.vars[0];
            if (e.vars.size() > 1) {
                out += "; " + e.vars[1];
            }
        } else {
            out += e.vars[0] + "->" + e.vars[1];
            if (e.name == "DK" || e.name == "DBL") {
                out += ", " + std::to_string(e.k);
            }
        }
        return out + "] @ " + show(e.args.back(), 4);
    }
    }
    return {};
}

std::string show(const ExprPtr &e, int ctx)
{
    const std::string s = show_inner(*e);
    return precedence(*e) < ctx ? "(" + s + ")" : s;
}

std::string show_caps(const Truncation &caps)
{
    std::string out;
    for (const auto &[v, c] : caps.caps()) {
        out += (out.empty() ? "" : ", ") + v + ":" + std::to_string(c);
    }
    return out;
}

} // namespace

std::string print(const ExprPtr &e)
{
    return show(e, 0);
}

std::string print(const Script &s)
{
    std::string out;
    for (const auto &st : s.statements) {
        if (const auto *let = std::get_if<Let>(&st.node)) {
            out += "let " + let->name + " = " + print(let->expr) + ";\n";
        } else if (const auto *c = std::get_if<Check>(&st.node)) {
            out += "check ";
            if (c->label) {
                out += "\"" + *c->label + "\": ";
            }
            out += print(c->lhs) + " == " + print(c->rhs) + " upto " + show_caps(c->caps) + ";\n";
        } else {
            const auto &e = std::get<Emit>(st.node);
            out += "emit " + print(e.expr);
            if (e.caps) {
                out += " upto " + show_caps(*e.caps);
            }
            out += e.format == Emit::Format::Json ? " as json;\n" : ";\n";
        }
    }
    return out;
}

} // namespace speckit::dsl
