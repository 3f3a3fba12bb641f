#include "doctest.h"
#include "oracles.hpp"

#include "mcf/builtins.hpp"
#include "mcf/counterexample.hpp"
#include "mcf/eliminator.hpp"
#include "mcf/error.hpp"
#include "mcf/formula_text.hpp"

using namespace mcf;

TEST_CASE("parse a class spec")
{
    ClassSpec s = parse_class_spec("(vocab (rel E 2) (consts 0)) (sentence (forall x (E x x)))");
    CHECK(s.vocab == Vocabulary{{{"E", 2}}, 0});
    CHECK(s.sentence == Formula::forall("x", Formula::atom("E", {Term::var("x"), Term::var("x")})));
}

TEST_CASE("counting quantifier maps to a count node")
{
    Formula f = parse_formula("(count 0 2 x (E x y))");
    CHECK(f.kind() == FormulaKind::Count);
    CHECK(f.residue() == 0);
    CHECK(f.modulus() == 2);
    CHECK(f.symbol() == "x");
}

TEST_CASE("every construct parses")
{
    const char* text = "(vocab (rel E 2) (rel U 1) (rel Z 0) (consts 2))\n"
                       "; comment line\n"
                       "(sentence (and (existsrel S 1 (forall x (iff (S x) (U x))))"
                       " (and (forallrel-sub T E (or (Z) (not (= a1 a2))))"
                       " (implies (true) (existsrel-sub T2 U (forallrel P 2 (false)))))))";
    ClassSpec s = parse_class_spec(text);
    CHECK(s.vocab.num_constants == 2);
    CHECK(parse_class_spec(print_class_spec(s)) == s);
}

TEST_CASE("syntax errors carry positions")
{
    try {
        parse_formula("(forall x");
        FAIL("expected a parse error");
    } catch (const ParseError& e) {
        CHECK(e.line() == 1);
        CHECK(e.column() >= 10);
    }
    CHECK_THROWS_AS(parse_formula("(forall a1 (E a1 a1))"), ParseError);
    CHECK_THROWS_AS(parse_formula("(count 0 x (E x x))"), ParseError);
    CHECK_THROWS_AS(parse_formula("(E x x) trailing"), ParseError);
    CHECK_THROWS_AS(parse_class_spec("(vocab (rel E 2) (consts 0))\n(sentence (forall x (E x x))"), ParseError);
    try {
        parse_class_spec("(vocab (consts 0))\n(sentence\n  (exists))");
    } catch (const ParseError& e) {
        CHECK(e.line() == 3);
    }
}

TEST_CASE("invalid specs are rejected after parsing")
{
    CHECK_THROWS_AS(parse_class_spec("(vocab (rel E 2) (consts 0)) (sentence (E x x))"), ValidationError);
    CHECK_THROWS_AS(parse_class_spec("(vocab (rel E 2) (consts 0)) (sentence (forall x (E x)))"), ValidationError);
    CHECK_THROWS_AS(parse_class_spec("(vocab (rel E 2) (consts 1)) (sentence (E a1 a2))"), ValidationError);
}

TEST_CASE("builtin classes round-trip")
{
    for (const auto& name : builtin_names()) {
        CAPTURE(name);
        std::vector<int> params;
        if (name == "restrictedBell" || name == "phiMp")
            params = {name == "phiMp" ? 3 : 2};
        ClassSpec s = builtin_class(name, params);
        CHECK(parse_class_spec(print_class_spec(s)) == s);
    }
}

TEST_CASE("generated sentences round-trip")
{
    const ClassSpec phi = build_phi_m();
    CHECK(parse_class_spec(print_class_spec(phi)) == phi);
    const auto stages = trim_pipeline(eliminate_higher_arity(phi).outputs.front());
    for (const auto& st : stages) {
        CAPTURE(st.stage);
        CHECK(parse_class_spec(print_class_spec(st.spec)) == st.spec);
    }
    for (auto mode : {EliminationMode::Sum, EliminationMode::ManyOne, EliminationMode::HigherArity})
        for (const auto& out : eliminate(builtin_class("restrictedBell", {2}), mode).outputs)
            CHECK(parse_class_spec(print_class_spec(out)) == out);
}

TEST_CASE("random formulas up to depth 6 round-trip")
{
    Vocabulary vocab{{{"E", 2}, {"U", 1}, {"Z", 0}}, 2};
    oracle::RandomFormulas gen(vocab, 12345);
    for (int i = 0; i < 300; ++i) {
        const int depth = 1 + i % 6;
        Formula f = gen.sentence(depth, i % 2 == 0);
        const std::string text = print_formula(f);
        CAPTURE(text);
        CHECK(parse_formula(text) == f);
        CHECK(print_formula(parse_formula(text)) == text);
        ClassSpec s{vocab, f};
        CHECK(parse_class_spec(print_class_spec(s)) == s);
    }
}
