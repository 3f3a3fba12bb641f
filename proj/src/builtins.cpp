#include "mcf/builtins.hpp"

#include "mcf/counterexample.hpp"
#include "mcf/error.hpp"

#include <charconv>

namespace mcf {

namespace {

Term v(const char* name) { return Term::var(name); }
Formula E(const Term& x, const Term& y) { return Formula::atom("E", {x, y}); }

Formula reflexive() { return Formula::forall("x", E(v("x"), v("x"))); }

Formula symmetric()
{
    return Formula::forall_all({"x", "y"}, Formula::implies(E(v("x"), v("y")), E(v("y"), v("x"))));
}

Formula antisymmetric()
{
    return Formula::forall_all({"x", "y"},
                               Formula::implies(Formula::conj(E(v("x"), v("y")), E(v("y"), v("x"))),
                                                Formula::equals(v("x"), v("y"))));
}

Formula transitive()
{
    return Formula::forall_all({"x", "y", "z"},
                               Formula::implies(Formula::conj(E(v("x"), v("y")), E(v("y"), v("z"))),
                                                E(v("x"), v("z"))));
}

Formula equivalence() { return Formula::conj_all({reflexive(), symmetric(), transitive()}); }

Vocabulary binary_vocab(int constants) { return Vocabulary{{{"E", 2}}, constants}; }

void expect_params(const std::string& name, const std::vector<int>& params, std::size_t count)
{
    if (params.size() != count)
        throw ValidationError(name + " takes " + std::to_string(count) + " parameter(s), got " +
                              std::to_string(params.size()));
}

ClassSpec restricted_bell(int r)
{
    if (r < 0)
        throw ValidationError("restrictedBell needs r >= 0");
    std::vector<Formula> parts{equivalence()};
    for (int i = 1; i <= r; ++i)
        for (int j = i + 1; j <= r; ++j)
            parts.push_back(Formula::negate(E(Term::cst(i), Term::cst(j))));
    return make_class_spec(binary_vocab(r), Formula::conj_all(parts));
}

ClassSpec even_degree_graph()
{
    Formula irreflexive = Formula::forall("x", Formula::negate(E(v("x"), v("x"))));
    Formula even = Formula::forall("x", Formula::count(0, 2, "y", E(v("x"), v("y"))));
    return make_class_spec(binary_vocab(0), Formula::conj_all({irreflexive, symmetric(), even}));
}

// Exactly one v satisfying body(v) with the given guard.
Formula exactly_one(const char* var, const char* other, const Formula& body_var, const Formula& body_other)
{
    return Formula::conj(Formula::exists(var, body_var),
                         Formula::forall_all({var, other},
                                             Formula::implies(Formula::conj(body_var, body_other),
                                                              Formula::equals(v(var), v(other)))));
}

ClassSpec eq2()
{
    // Two classes, those of x and y, with F a bijection from the class of x onto that of y.
    auto F = [](const char* a, const char* b) { return Formula::atom("F", {v(a), v(b)}); };
    Formula onto_y = Formula::forall(
        "u", Formula::implies(E(v("u"), v("x")),
                              exactly_one("w", "w2", Formula::conj(E(v("w"), v("y")), F("u", "w")),
                                          Formula::conj(E(v("w2"), v("y")), F("u", "w2")))));
    Formula from_x = Formula::forall(
        "w", Formula::implies(E(v("w"), v("y")),
                              exactly_one("u", "u2", Formula::conj(E(v("u"), v("x")), F("u", "w")),
                                          Formula::conj(E(v("u2"), v("x")), F("u2", "w")))));
    Formula two = Formula::conj(Formula::negate(E(v("x"), v("y"))),
                                Formula::forall("z", Formula::disj(E(v("z"), v("x")), E(v("z"), v("y")))));
    Formula body = Formula::exists_all(
        {"x", "y"}, Formula::conj(two, Formula::exists_rel("F", 2, Formula::conj(onto_y, from_x))));
    return make_class_spec(binary_vocab(0), Formula::conj(equivalence(), body));
}

std::vector<int> parse_ints(const std::string& text)
{
    std::vector<int> out;
    std::size_t pos = 0;
    while (pos < text.size()) {
        std::size_t end = text.find(',', pos);
        if (end == std::string::npos)
            end = text.size();
        int value = 0;
        const char* first = text.data() + pos;
        const char* last = text.data() + end;
        auto [ptr, ec] = std::from_chars(first, last, value);
        if (ec != std::errc() || ptr != last || first == last)
            throw ValidationError("bad builtin parameter '" + text.substr(pos, end - pos) + "'");
        out.push_back(value);
        pos = end + 1;
    }
    return out;
}

} // namespace

std::vector<std::string> builtin_names()
{
    return {"equivalence", "partialOrder", "quasiOrder",    "transitive", "restrictedBell",
            "evenDegreeGraph", "eq2",      "phiM",          "phiMp"};
}

ClassSpec builtin_class(const std::string& name, const std::vector<int>& params)
{
    if (name == "restrictedBell") {
        expect_params(name, params, 1);
        return restricted_bell(params[0]);
    }
    if (name == "phiMp") {
        expect_params(name, params, 1);
        return build_phi_mp(params[0]);
    }
    expect_params(name, params, 0);
    if (name == "equivalence")
        return make_class_spec(binary_vocab(0), equivalence());
    if (name == "partialOrder")
        return make_class_spec(binary_vocab(0), Formula::conj_all({reflexive(), antisymmetric(), transitive()}));
    if (name == "quasiOrder")
        return make_class_spec(binary_vocab(0), Formula::conj(reflexive(), transitive()));
    if (name == "transitive")
        return make_class_spec(binary_vocab(0), transitive());
    if (name == "evenDegreeGraph")
        return even_degree_graph();
    if (name == "eq2")
        return eq2();
    if (name == "phiM")
        return build_phi_m();
    throw ValidationError("unknown builtin class '" + name + "'");
}

ClassSpec builtin_class_from_text(const std::string& text)
{
    std::string name = text;
    std::string args;
    if (auto colon = text.find(':'); colon != std::string::npos) {
        name = text.substr(0, colon);
        args = text.substr(colon + 1);
    } else if (auto open = text.find('('); open != std::string::npos) {
        if (text.back() != ')')
            throw ValidationError("unbalanced parentheses in '" + text + "'");
        name = text.substr(0, open);
        args = text.substr(open + 1, text.size() - open - 2);
    }
    return builtin_class(name, parse_ints(args));
}

} // namespace mcf
