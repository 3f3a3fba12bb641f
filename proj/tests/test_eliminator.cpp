#include "doctest.h"
#include "corpus.hpp"
#include "oracles.hpp"

#include "mcf/builtins.hpp"
#include "mcf/counter.hpp"
#include "mcf/eliminator.hpp"
#include "mcf/error.hpp"
#include "mcf/evaluator.hpp"
#include "mcf/formula_text.hpp"

#include <set>

using namespace mcf;

namespace {

const EliminationMode kModes[] = {EliminationMode::Sum, EliminationMode::ManyOne, EliminationMode::HigherArity};

BigInt output_sum(const EliminationResult& r, int n)
{
    BigInt total = 0;
    for (const auto& o : r.outputs)
        total += count_models(o, n).count;
    return total;
}

} // namespace

TEST_CASE("mode names")
{
    for (auto m : kModes)
        CHECK(parse_elimination_mode(to_string(m)) == m);
    CHECK_THROWS_AS(parse_elimination_mode("quick"), ValidationError);
}

TEST_CASE("component names")
{
    CHECK(component_name("E", 2, {}, 1, EliminationMode::ManyOne) == "E");
    CHECK(component_name("U", 1, {1}, 1, EliminationMode::ManyOne) == "U$S1");
    CHECK(component_name("E", 2, {1}, 3, EliminationMode::Sum) == "E$O3");
    CHECK(component_name("E", 2, {2}, 1, EliminationMode::ManyOne) == "E$I1");
    CHECK(component_name("E", 2, {1, 2}, 1, EliminationMode::ManyOne) == "E$D1");
    CHECK(component_name("R", 3, {1, 3}, 1, EliminationMode::HigherArity) == "R$1{1,3}");
    CHECK(component_name("E", 2, {2}, 1, EliminationMode::HigherArity) == "E$1{2}");
}

TEST_CASE("restrictedBell counts survive every mode")
{
    for (int r = 1; r <= 2; ++r) {
        const ClassSpec spec = builtin_class("restrictedBell", {r});
        for (auto mode : kModes) {
            CAPTURE(to_string(mode));
            const auto result = eliminate(spec, mode);
            for (int n = 1; n <= 3; ++n)
                CHECK(output_sum(result, n) == BigInt(oracle::restricted_bell(r, n)));
        }
    }
}

TEST_CASE("vocabulary accounting")
{
    const ClassSpec spec = parse_class_spec("(vocab (rel E 2) (rel U 1) (rel Z 0) (consts 1)) (sentence (true))");

    const auto mo = eliminate(spec, EliminationMode::ManyOne);
    REQUIRE(mo.outputs.size() == 1);
    CHECK(mo.outputs[0].vocab == Vocabulary{{{"E", 2}, {"E$O1", 1}, {"E$I1", 1}, {"E$D1", 0}, {"U", 1}, {"U$S1", 0}, {"Z", 0}}, 0});

    const auto ha = eliminate(spec, EliminationMode::HigherArity);
    CHECK(ha.outputs[0].vocab == Vocabulary{{{"E", 2}, {"E$1{1}", 1}, {"E$1{2}", 1}, {"E$1{1,2}", 0}, {"U", 1}, {"U$1{1}", 0}, {"Z", 0}}, 0});

    const auto sum = eliminate(spec, EliminationMode::Sum);
    CHECK(sum.outputs.size() == 4); // E(a,a) and U(a) each decided
    CHECK(sum.outputs[0].vocab == Vocabulary{{{"E", 2}, {"E$O1", 1}, {"E$I1", 1}, {"U", 1}, {"Z", 0}}, 0});
    CHECK(sum.contexts[1].with_a == std::set<std::string>{"E"});
    CHECK(sum.contexts[2].with_a == std::set<std::string>{"U"});

    // Every source bit is stored exactly once.
    for (int n = 1; n <= 3; ++n) {
        CHECK(BitLayout(spec.vocab, n + 1).total_bits() == BitLayout(mo.outputs[0].vocab, n).total_bits());
        CHECK(BitLayout(spec.vocab, n + 1).total_bits() == BitLayout(ha.outputs[0].vocab, n).total_bits());
        CHECK(BitLayout(spec.vocab, n + 1).total_bits() == BitLayout(sum.outputs[0].vocab, n).total_bits() + 2);
    }
    for (const auto& g : mo.relations)
        CHECK(g.source == (g.name.substr(0, 1)));
}

TEST_CASE("corpus counts are preserved at universe sizes up to 3")
{
    for (const auto& entry : corpus::elimination_corpus()) {
        CAPTURE(entry.name);
        const int k = entry.spec.vocab.num_constants;
        for (auto mode : kModes) {
            CAPTURE(to_string(mode));
            const auto result = eliminate(entry.spec, mode);
            for (int n = 0; n + k <= 3; ++n)
                CHECK(output_sum(result, n) == count_models(entry.spec, n).count);
        }
    }
}

TEST_CASE("correspondence is a satisfaction-preserving bijection")
{
    for (const auto& entry : corpus::elimination_corpus()) {
        if (entry.name.rfind("random", 0) == 0 && entry.name != "random-fo-3")
            continue; // the acceptance run covers the rest
        CAPTURE(entry.name);
        for (auto mode : kModes) {
            CAPTURE(to_string(mode));
            const auto result = eliminate(entry.spec, mode);
            const int k = entry.spec.vocab.num_constants;
            for (int universe = std::max(1, k); universe <= 3; ++universe) {
                std::set<std::pair<std::size_t, std::vector<std::uint64_t>>> images;
                std::uint64_t seen = 0;
                oracle::for_each_structure(entry.spec.vocab, universe, [&](const Structure& m) {
                    const Correspondent c = correspond(m, result);
                    CHECK(evaluate(c.image, result.outputs[c.output].sentence) == evaluate(m, entry.spec.sentence));
                    images.insert({c.output, std::vector<std::uint64_t>(c.image.words().begin(), c.image.words().end())});
                    ++seen;
                });
                CHECK(images.size() == seen); // injective
                std::uint64_t codomain = 0;
                for (const auto& o : result.outputs)
                    codomain += std::uint64_t{1} << BitLayout(o.vocab, universe - 1).total_bits();
                CHECK(codomain == seen); // and onto
            }
        }
    }
}

TEST_CASE("outputs stay within the input's logic")
{
    for (const auto& entry : corpus::elimination_corpus()) {
        CAPTURE(entry.name);
        const auto in = logic_features(entry.spec.sentence);
        for (auto mode : kModes)
            for (const auto& o : eliminate(entry.spec, mode).outputs) {
                CHECK(logic_features(o.sentence).within(in));
                CHECK(is_hygienic(o.sentence, relation_names(o.vocab)));
                CHECK(validate_class_spec(o).empty());
            }
    }
}

TEST_CASE("transform_formula on a single atom")
{
    const Vocabulary vocab{{{"E", 2}}, 1};
    const Formula atom = Formula::atom("E", {Term::var("x"), Term::cst(1)});
    CorrespondenceContext ctx;
    CHECK(transform_formula(atom, vocab, ctx, EliminationMode::ManyOne) ==
          Formula::atom("E$I1", {Term::var("x")}));
    ctx.sent_to_a = {"x"};
    CHECK(transform_formula(atom, vocab, ctx, EliminationMode::ManyOne) == Formula::atom("E$D1", {}));
    CHECK(transform_formula(atom, vocab, ctx, EliminationMode::Sum) == Formula::falsity());
    ctx.with_a = {"E"};
    CHECK(transform_formula(atom, vocab, ctx, EliminationMode::Sum) == Formula::truth());
    CHECK(transform_formula(Formula::equals(Term::var("x"), Term::cst(1)), vocab, ctx, EliminationMode::ManyOne) ==
          Formula::truth());
}

TEST_CASE("eliminating every constant")
{
    const ClassSpec spec = builtin_class("restrictedBell", {2});
    for (auto mode : {EliminationMode::ManyOne, EliminationMode::HigherArity}) {
        const ClassSpec out = eliminate_all(spec, mode);
        CHECK(out.vocab.num_constants == 0);
        for (int n = 1; n <= 2; ++n)
            CHECK(count_models(out, n).count == BigInt(oracle::restricted_bell(2, n)));
    }
    CHECK_THROWS_AS(eliminate_all(spec, EliminationMode::Sum), PreconditionError);
}

TEST_CASE("preconditions")
{
    const ClassSpec ternary = parse_class_spec("(vocab (rel R 3) (consts 1)) (sentence (R a1 a1 a1))");
    CHECK_THROWS_AS(eliminate(ternary, EliminationMode::Sum), PreconditionError);
    CHECK_THROWS_AS(eliminate(ternary, EliminationMode::ManyOne), PreconditionError);
    const auto ha = eliminate(ternary, EliminationMode::HigherArity);
    CHECK(ha.outputs[0].vocab.relations.size() == 8);
    for (int n = 0; n <= 1; ++n)
        CHECK(count_models(ha.outputs[0], n).count == count_models(ternary, n).count);

    const ClassSpec none = builtin_class("equivalence");
    const auto noop = eliminate(none, EliminationMode::ManyOne);
    CHECK(noop.noop);
    CHECK(noop.outputs[0] == none);
    CHECK_THROWS_AS(eliminate(none, EliminationMode::HigherArity), PreconditionError);
    CHECK_THROWS_AS(eliminate(none, EliminationMode::Sum), PreconditionError);

    const ClassSpec clash = parse_class_spec("(vocab (rel E 2) (rel E$O1 1) (consts 1)) (sentence (true))");
    CHECK_THROWS_AS(eliminate(clash, EliminationMode::ManyOne), PreconditionError);
}

TEST_CASE("nullary relations can be simulated by unary ones")
{
    const ClassSpec spec = parse_class_spec(
        "(vocab (rel Z 0) (rel E 2) (consts 0)) (sentence (iff (Z) (forall x (E x x))))");
    const ClassSpec sim = simulate_nullary(spec);
    CHECK(sim.vocab.find("Z$U") != nullptr);
    CHECK(sim.vocab.find("Z") == nullptr);
    for (int n = 1; n <= 3; ++n)
        CHECK(count_models(sim, n).count == count_models(spec, n).count);
    CHECK(simulate_nullary(builtin_class("equivalence")) == builtin_class("equivalence"));
}
