#include "doctest.h"
#include "oracles.hpp"

#include "mcf/builtins.hpp"
#include "mcf/counter.hpp"
#include "mcf/error.hpp"
#include "mcf/evaluator.hpp"
#include "mcf/formula_text.hpp"

#include <random>
#include <set>

using namespace mcf;

namespace {

Structure random_structure(const Vocabulary& vocab, int n, std::mt19937& rng)
{
    Structure s(vocab, n);
    for (std::int64_t i = 0; i < s.layout().total_bits(); ++i)
        s.set_bit(i, rng() & 1U);
    return s;
}

const Vocabulary kSmall{{{"E", 2}, {"U", 1}, {"Z", 0}}, 1};

} // namespace

TEST_CASE("evaluate on hand-built structures")
{
    ClassSpec eq = builtin_class("equivalence");
    Structure s(eq.vocab, 3);
    for (int i = 1; i <= 3; ++i)
        s.set("E", {i, i});
    CHECK(evaluate(s, eq.sentence));
    s.set("E", {1, 2});
    CHECK_FALSE(evaluate(s, eq.sentence));
    s.set("E", {2, 1});
    CHECK(evaluate(s, eq.sentence));

    // Free variables and relations come from the assignment.
    Formula f = Formula::atom("E", {Term::var("x"), Term::var("y")});
    CHECK(evaluate(s, f, Assignment{{{"x", 1}, {"y", 2}}, {}}));
    CHECK_FALSE(evaluate(s, f, Assignment{{{"x", 1}, {"y", 3}}, {}}));
    CHECK_THROWS_AS(evaluate(s, f), ValidationError);

    Formula g = Formula::forall("x", Formula::implies(Formula::atom("S", {Term::var("x")}),
                                                      Formula::atom("E", {Term::var("x"), Term::var("x")})));
    Assignment asg;
    asg.relations["S"] = RelationValue{1, {{1}, {3}}};
    CHECK(evaluate(s, g, asg));
}

TEST_CASE("counting and second-order quantifiers")
{
    Vocabulary vocab{{{"U", 1}}, 0};
    Structure s(vocab, 4);
    s.set("U", {1});
    s.set("U", {3});
    const Formula u = Formula::atom("U", {Term::var("x")});
    CHECK(evaluate(s, Formula::count(0, 2, "x", u)));
    CHECK(evaluate(s, Formula::count(2, 3, "x", u)));
    CHECK_FALSE(evaluate(s, Formula::count(1, 2, "x", u)));

    // Some subset S of U with exactly one element; every subset of U has even size fails.
    const Formula in_s = Formula::atom("S", {Term::var("x")});
    const Formula one = Formula::exists_rel_sub("S", "U", Formula::count(1, 2, "x", in_s));
    CHECK(evaluate(s, one));
    const Formula all_even = Formula::forall_rel_sub("S", "U", Formula::count(0, 2, "x", in_s));
    CHECK_FALSE(evaluate(s, all_even));
    const Formula some_full = Formula::exists_rel("S", 1, Formula::forall("x", in_s));
    CHECK(evaluate(s, some_full));
}

TEST_CASE("second-order limits")
{
    Vocabulary vocab{{{"E", 2}}, 0};
    Structure s(vocab, 5);
    const Formula f = Formula::exists_rel("S", 2, Formula::truth());
    CHECK_THROWS_AS(evaluate(s, f), BudgetExceeded);
    CHECK(evaluate(s, f, {}, EvalLimits{25}));
}

TEST_CASE("compiled evaluator agrees with a naive one on random sentences")
{
    oracle::RandomFormulas gen(kSmall, 7);
    std::mt19937 rng(99);
    for (int i = 0; i < 150; ++i) {
        Formula f = gen.sentence(1 + i % 5, i % 3 == 0);
        CAPTURE(print_formula(f));
        for (int n = 1; n <= 3; ++n) {
            Structure s = random_structure(kSmall, n, rng);
            oracle::NaiveEval naive(s);
            CHECK(evaluate(s, f) == naive(f));
        }
    }
}

TEST_CASE("certificates: bits after the certificate never change the value")
{
    oracle::RandomFormulas gen(kSmall, 21);
    std::mt19937 rng(5);
    for (int i = 0; i < 120; ++i) {
        Formula f = gen.sentence(2 + i % 4, i % 2 == 0);
        CAPTURE(print_formula(f));
        const int n = 2 + i % 2;
        Evaluator ev(f, kSmall, n);
        auto scratch = ev.make_scratch();
        for (int trial = 0; trial < 6; ++trial) {
            Structure s = random_structure(kSmall, n, rng);
            const Outcome out = ev.run(s.words(), scratch);
            CHECK(out.value == ev(s));
            for (int flip = 0; flip < 6; ++flip) {
                Structure t = s;
                for (std::int64_t b = out.certificate + 1; b < t.layout().total_bits(); ++b)
                    t.set_bit(b, rng() & 1U);
                CHECK(ev(t) == out.value);
            }
        }
    }
}

TEST_CASE("counts match brute force on random sentences")
{
    oracle::RandomFormulas gen(kSmall, 2024);
    for (int i = 0; i < 60; ++i) {
        Formula f = gen.sentence(1 + i % 4, i % 4 == 0);
        CAPTURE(print_formula(f));
        ClassSpec spec{kSmall, f};
        for (int n = 0; n <= 2; ++n) {
            const std::uint64_t want = oracle::brute_count(kSmall, f, n + 1);
            CHECK(count_models(spec, n).count == BigInt(want));
            CHECK(count_models_mod(spec, n, 7) == want % 7);
        }
    }
}

TEST_CASE("builtin counts against oracles")
{
    const ClassSpec eq = builtin_class("equivalence");
    for (int n = 1; n <= 5; ++n)
        CHECK(count_models(eq, n).count == BigInt(oracle::bell(n)));
    for (int r = 1; r <= 2; ++r)
        for (int n = 1; n <= 3; ++n)
            CHECK(count_models(builtin_class("restrictedBell", {r}), n).count == BigInt(oracle::restricted_bell(r, n)));
    for (int n = 1; n <= 4; ++n)
        CHECK(count_models(builtin_class("evenDegreeGraph"), n).count == BigInt(oracle::even_degree_graphs(n)));

    // Relations on [n] checked pair by pair.
    auto brute = [](const char* name, int n) {
        ClassSpec s = builtin_class(name);
        return BigInt(oracle::brute_count(s.vocab, s.sentence, n));
    };
    for (const char* name : {"partialOrder", "quasiOrder", "transitive"})
        for (int n = 1; n <= 3; ++n) {
            CAPTURE(name);
            CHECK(count_models(builtin_class(name), n).count == brute(name, n));
        }
    CHECK(count_models(builtin_class("partialOrder"), 4).count == BigInt(219));
    CHECK(count_models(builtin_class("transitive"), 4).count == BigInt(3994));
    // Equivalences with two classes of equal size: zero for odd n, C(n, n/2)/2 otherwise.
    CHECK(count_models(builtin_class("eq2"), 2).count == BigInt(1));
    CHECK(count_models(builtin_class("eq2"), 3).count == BigInt(0));
}

TEST_CASE("sharding gives identical counts")
{
    const ClassSpec eq = builtin_class("equivalence");
    const ClassSpec even = builtin_class("evenDegreeGraph");
    for (int workers : {1, 2, 8}) {
        CountOptions o;
        o.workers = workers;
        CHECK(count_models(eq, 5, o).count == BigInt(52));
        CHECK(count_models(even, 4, o).count == BigInt(8));
        CHECK(count_models_mod(eq, 5, 2, o) == 0);
        // Fewer bits than the shard prefix.
        CHECK(count_models(eq, 1, o).count == BigInt(1));
        CHECK(count_models(eq, 0, o).count == BigInt(1));
    }
    oracle::RandomFormulas gen(kSmall, 77);
    for (int i = 0; i < 20; ++i) {
        ClassSpec spec{kSmall, gen.sentence(3, i % 2 == 0)};
        CountOptions one, many;
        many.workers = 8;
        CHECK(count_models(spec, 2, one).count == count_models(spec, 2, many).count);
    }
}

TEST_CASE("for_each_model visits exactly the models")
{
    const ClassSpec eq = builtin_class("equivalence");
    std::set<std::vector<std::uint64_t>> seen;
    for_each_model(eq, 4, [&](const Structure& s) {
        CHECK(evaluate(s, eq.sentence));
        seen.insert(std::vector<std::uint64_t>(s.words().begin(), s.words().end()));
        return true;
    });
    CHECK(seen.size() == 15);

    int visits = 0;
    for_each_model(eq, 4, [&](const Structure&) { return ++visits < 3; });
    CHECK(visits == 3);
}

TEST_CASE("counter preconditions")
{
    const ClassSpec eq = builtin_class("equivalence");
    CHECK_THROWS_AS(count_models(eq, 7), BudgetExceeded);
    CountOptions big;
    big.budget_bits = 49;
    CHECK_NOTHROW(count_models_mod(eq, 7, 2, big));
    CHECK_THROWS_AS(count_models(eq, -1), PreconditionError);
    CHECK_THROWS_AS(count_models_mod(eq, 2, 1), PreconditionError);
    CHECK_THROWS_AS(count_models(ClassSpec{eq.vocab, Formula::atom("E", {Term::var("x"), Term::var("x")})}, 1),
                    ValidationError);
}

TEST_CASE("count result json and reordering")
{
    const auto r = count_models(builtin_class("equivalence"), 3, {}, "equivalence");
    const auto j = r.to_json();
    CHECK(j["class"] == "equivalence");
    CHECK(j["count"] == "5");
    CHECK(j["universe"] == 3);
    CHECK(j["method"] == "enumeration");

    const ClassSpec eq = builtin_class("equivalence");
    const Formula re = reorder_conjuncts(eq.sentence);
    CHECK(re.kind() == FormulaKind::And);
    CHECK(quantifier_depth(re.child(0)) == 1); // reflexivity first
    CountOptions plain;
    plain.reorder = false;
    CHECK(count_models(eq, 4, plain).count == count_models(eq, 4).count);
}

TEST_CASE("true sentence counts every interpretation")
{
    ClassSpec unary{Vocabulary{{{"U", 1}}, 0}, Formula::truth()};
    for (int n = 0; n <= 5; ++n)
        CHECK(count_models(unary, n).count == BigInt(1) << static_cast<unsigned>(n));
    ClassSpec none{Vocabulary{{}, 0}, Formula::falsity()};
    CHECK(count_models(none, 3).count == BigInt(0));
}
