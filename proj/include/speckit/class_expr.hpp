#pragma once

#include <memory>
#include <string>
#include <variant>
#include <vector>

#include <json.hpp>

#include <speckit/rational.hpp>
#include <speckit/series.hpp>

namespace speckit {

// Immutable handle on a labelled combinatorial class expression. Copies share
// the underlying tree.
class ClassExpr {
public:
    struct Node;

    ClassExpr(); // the neutral class
    explicit ClassExpr(std::shared_ptr<const Node> node) : node_(std::move(node)) {}

    const Node &node() const { return *node_; }

    friend bool operator==(const ClassExpr &a, const ClassExpr &b);

private:
    std::shared_ptr<const Node> node_;
};

namespace cls {

struct Neutral {
    friend bool operator==(const Neutral &, const Neutral &) = default;
};
// An atom's weight monomial is its EGF term with coefficient 1; the label
// variable counts its size.
struct Atom {
    MultiIndex weight;
    friend bool operator==(const Atom &, const Atom &) = default;
};
struct Union {
    std::vector<ClassExpr> parts;
    friend bool operator==(const Union &, const Union &) = default;
};
struct Product {
    std::vector<ClassExpr> factors;
    friend bool operator==(const Product &, const Product &) = default;
};
// k-fold labelled product, no 1/k! symmetry factor.
struct Power {
    ClassExpr base;
    int k = 0;
    friend bool operator==(const Power &, const Power &) = default;
};
struct Set {
    ClassExpr arg;
    friend bool operator==(const Set &, const Set &) = default;
};
struct Seq {
    ClassExpr arg;
    friend bool operator==(const Seq &, const Seq &) = default;
};
// Directed labelled cycles.
struct Cyc {
    ClassExpr arg;
    friend bool operator==(const Cyc &, const Cyc &) = default;
};
// inner substituted into the var-atoms of outer.
struct Subst {
    ClassExpr outer;
    std::string var;
    ClassExpr inner;
    friend bool operator==(const Subst &, const Subst &) = default;
};
struct Weighted {
    Rational coefficient;
    ClassExpr arg;
    friend bool operator==(const Weighted &, const Weighted &) = default;
};

} // namespace cls

struct ClassExpr::Node {
    std::variant<cls::Neutral, cls::Atom, cls::Union, cls::Product, cls::Power, cls::Set, cls::Seq, cls::Cyc,
                 cls::Subst, cls::Weighted>
        value;
};

ClassExpr neutral();
ClassExpr atom(MultiIndex weight);
ClassExpr atom(std::string_view monomial);
ClassExpr union_of(std::vector<ClassExpr> parts);
ClassExpr product_of(std::vector<ClassExpr> factors);
ClassExpr power_of(ClassExpr base, int k);
ClassExpr set_of(ClassExpr arg);
ClassExpr seq_of(ClassExpr arg);
ClassExpr cyc_of(ClassExpr arg);
ClassExpr subst(ClassExpr outer, std::string var, ClassExpr inner);
ClassExpr weighted(Rational coefficient, ClassExpr arg);

ClassExpr operator+(const ClassExpr &a, const ClassExpr &b);
ClassExpr operator*(const ClassExpr &a, const ClassExpr &b);
ClassExpr operator*(const Rational &c, const ClassExpr &a);

struct CompileContext {
    Truncation truncation;
    std::string label_var = "t";
};

// A Set/Seq/Cyc argument or Subst inner class whose EGF has a nonzero
// constant term.
struct Violation {
    std::string path;         // e.g. "Union[1]/Set"
    std::string construction; // "Set", "Seq", "Cyc" or "Subst"
    Rational constant_term;
};

std::vector<Violation> validate(const ClassExpr &e);

// Throws AdmissibilityError when validate() is non-empty and UsageError when
// the label variable has no cap.
Series compile(const ClassExpr &e, const CompileContext &ctx);

// X T X + 1/2 (2 X Y T) x Seq(2 Y T Y) x (2 Y T X): open chains of
// doubletons. Its EGF is x^2 t / (1 - 2 y^2 t).
ClassExpr open_chain_class();
Series compile_B(const CompileContext &ctx);

std::string to_string(const ClassExpr &e);
nlohmann::json to_json(const ClassExpr &e);

} // namespace speckit
