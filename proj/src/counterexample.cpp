#include "mcf/counterexample.hpp"

#include "mcf/error.hpp"

#include <algorithm>
#include <functional>
#include <numeric>

namespace mcf {

namespace {

Term v(const std::string& name) { return Term::var(name); }
Formula R(const Term& x, const Term& y, const Term& z) { return Formula::atom("R", {x, y, z}); }
Formula neq(const Term& x, const Term& y) { return Formula::negate(Formula::equals(x, y)); }
const Term a = Term::cst(1);

// Rank comparators on pairs; r_{x,y} = {t : R(x, y, t)}.
Formula rank_eq(const Term& x1, const Term& y1, const Term& x2, const Term& y2)
{
    return Formula::forall("t", Formula::iff(R(x1, y1, v("t")), R(x2, y2, v("t"))));
}

Formula rank_le(const Term& x1, const Term& y1, const Term& x2, const Term& y2)
{
    return Formula::forall("t", Formula::implies(R(x1, y1, v("t")), R(x2, y2, v("t"))));
}

Formula rank_lt(const Term& x1, const Term& y1, const Term& x2, const Term& y2)
{
    return Formula::conj(rank_le(x1, y1, x2, y2), Formula::negate(rank_eq(x1, y1, x2, y2)));
}

Formula phi_graph()
{
    return Formula::forall_all({"x", "y", "z"},
                               Formula::implies(R(v("x"), v("y"), v("z")),
                                                Formula::conj(neq(v("x"), v("y")), R(v("y"), v("x"), v("z")))));
}

Formula phi_comp()
{
    Formula body = Formula::conj_all({R(v("x1"), v("y1"), v("z1")), Formula::negate(R(v("x2"), v("y2"), v("z1"))),
                                      R(v("x2"), v("y2"), v("z2")), Formula::negate(R(v("x1"), v("y1"), v("z2")))});
    return Formula::forall_all({"x1", "y1", "x2", "y2"}, Formula::negate(Formula::exists_all({"z1", "z2"}, body)));
}

Formula phi_full()
{
    return Formula::forall_all({"x", "y"}, Formula::implies(neq(v("x"), v("y")), R(v("x"), v("y"), a)));
}

Formula phi_trans()
{
    return Formula::forall_all({"x", "y", "z"}, Formula::disj(rank_le(v("x"), v("z"), v("x"), v("y")),
                                                              rank_le(v("x"), v("z"), v("y"), v("z"))));
}

Formula phi_anchor()
{
    Formula closed = Formula::forall("w", Formula::implies(rank_lt(v("z"), v("w"), v("x"), v("y")),
                                                           R(v("x"), v("y"), v("w"))));
    return Formula::forall_all({"x", "y", "z"},
                               Formula::implies(R(v("x"), v("y"), v("z")),
                                                Formula::conj(rank_lt(v("z"), a, v("x"), v("y")), closed)));
}

Formula assemble(const Formula& cover, const Formula& part)
{
    Formula rank = Formula::conj_all({phi_graph(), phi_comp(), phi_full()});
    return Formula::conj_all({rank, phi_trans(), cover, part, phi_anchor()});
}

std::string zname(int i) { return "z" + std::to_string(i); }

// Variables x, y, z1 .. zp quantified as forall x y z1 exists z2 .. zp.
Formula phi_cover_p(int p)
{
    std::vector<Formula> eqs;
    for (int i = 1; i <= p; ++i)
        for (int j = i + 1; j <= p; ++j)
            eqs.push_back(rank_eq(v("x"), v("y"), v(zname(i)), v(zname(j))));
    Formula body = Formula::conj_all(eqs);
    for (int i = p; i >= 2; --i)
        body = Formula::exists(zname(i), body);
    return Formula::forall_all({"x", "y", "z1"}, body);
}

// No rank class holds a (p+1)-clique; the pair (z1, z2) fixes the rank.
Formula phi_part_p(int p)
{
    std::vector<Formula> eqs;
    for (int j = 3; j <= p + 1; ++j)
        for (int i = j - 1; i >= 1; --i)
            eqs.push_back(rank_eq(v("z1"), v("z2"), v(zname(i)), v(zname(j))));
    Formula body = Formula::implies(neq(v("z1"), v("z2")), Formula::negate(Formula::conj_all(eqs)));
    for (int i = p + 1; i >= 1; --i)
        body = Formula::forall(zname(i), body);
    return body;
}

Vocabulary ternary_vocab(int constants) { return Vocabulary{{{"R", 3}}, constants}; }

/// Perfect p-groupings of items 0..count-1, each group sorted, groups by smallest member.
void groupings(int count, int p, std::vector<bool>& used, std::vector<std::vector<int>>& current,
               const std::function<void(const std::vector<std::vector<int>>&)>& emit)
{
    int first = 0;
    while (first < count && used[static_cast<std::size_t>(first)])
        ++first;
    if (first == count) {
        emit(current);
        return;
    }
    used[static_cast<std::size_t>(first)] = true;
    std::vector<int> group{first};
    std::function<void(int)> extend = [&](int from) {
        if (static_cast<int>(group.size()) == p) {
            current.push_back(group);
            groupings(count, p, used, current, emit);
            current.pop_back();
            return;
        }
        for (int i = from; i < count; ++i) {
            if (used[static_cast<std::size_t>(i)])
                continue;
            used[static_cast<std::size_t>(i)] = true;
            group.push_back(i);
            extend(i + 1);
            group.pop_back();
            used[static_cast<std::size_t>(i)] = false;
        }
    };
    extend(first + 1);
    used[static_cast<std::size_t>(first)] = false;
}

/// Number of ways to split `count` items into groups of p (recursive on the first item's group).
BigInt grouping_count(int count, int p)
{
    if (count == 0)
        return 1;
    if (count % p != 0)
        return 0;
    BigInt choose = 1;
    for (int i = 0; i < p - 1; ++i)
        choose = choose * (count - 1 - i) / (i + 1);
    return choose * grouping_count(count - p, p);
}

std::vector<int> component_labels(int n, const std::vector<std::vector<std::pair<int, int>>>& levels, std::size_t upto)
{
    std::vector<int> parent(static_cast<std::size_t>(n) + 1);
    std::iota(parent.begin(), parent.end(), 0);
    std::function<int(int)> find = [&](int x) {
        while (parent[static_cast<std::size_t>(x)] != x)
            x = parent[static_cast<std::size_t>(x)] = parent[static_cast<std::size_t>(parent[static_cast<std::size_t>(x)])];
        return x;
    };
    for (std::size_t i = 0; i < upto; ++i)
        for (auto [u, w] : levels[i])
            parent[static_cast<std::size_t>(find(u))] = find(w);
    std::vector<int> label(static_cast<std::size_t>(n) + 1, 0);
    for (int x = 1; x <= n; ++x)
        label[static_cast<std::size_t>(x)] = find(x);
    return label;
}

} // namespace

bool is_prime(int p)
{
    if (p < 2)
        return false;
    for (int d = 2; d * d <= p; ++d)
        if (p % d == 0)
            return false;
    return true;
}

ClassSpec build_phi_m()
{
    Formula cover = Formula::forall_all({"x", "y", "z1"}, Formula::exists("z2", rank_eq(v("x"), v("y"), v("z1"), v("z2"))));
    Formula part = Formula::forall_all(
        {"z1", "z2", "z3"},
        Formula::implies(neq(v("z1"), v("z2")),
                         Formula::negate(Formula::conj(rank_eq(v("z1"), v("z2"), v("z2"), v("z3")),
                                                       rank_eq(v("z1"), v("z2"), v("z1"), v("z3"))))));
    return make_class_spec(ternary_vocab(1), assemble(cover, part));
}

ClassSpec build_phi_mp(int p)
{
    if (!is_prime(p))
        throw ValidationError(std::to_string(p) + " is not prime");
    if (p > 5)
        throw ValidationError("p must be at most 5, got " + std::to_string(p));
    return make_class_spec(ternary_vocab(1), assemble(phi_cover_p(p), phi_part_p(p)));
}

BigInt oracle_iterated_matchings(int n, int p)
{
    if (n < 1)
        throw PreconditionError("n must be positive");
    if (!is_prime(p))
        throw ValidationError(std::to_string(p) + " is not prime");
    if (n == 1)
        return 1;
    if (n % p != 0)
        return 0;
    return grouping_count(n, p) * oracle_iterated_matchings(n / p, p);
}

std::vector<IteratedMatchingSequence> enumerate_iterated_matchings(int n, int p)
{
    if (n < 1)
        throw PreconditionError("n must be positive");
    if (!is_prime(p))
        throw ValidationError(std::to_string(p) + " is not prime");
    std::vector<IteratedMatchingSequence> out;
    IteratedMatchingSequence seq{n, p, {}};
    // comps: current components (vertex lists); each level groups them p at a time.
    std::function<void(const std::vector<std::vector<int>>&)> level = [&](const std::vector<std::vector<int>>& comps) {
        if (comps.size() == 1) {
            out.push_back(seq);
            return;
        }
        const int count = static_cast<int>(comps.size());
        if (count % p != 0)
            return;
        std::vector<bool> used(static_cast<std::size_t>(count), false);
        std::vector<std::vector<int>> current;
        groupings(count, p, used, current, [&](const std::vector<std::vector<int>>& groups) {
            std::vector<std::pair<int, int>> edges;
            std::vector<std::vector<int>> next;
            for (const auto& g : groups) {
                std::vector<int> merged;
                for (std::size_t i = 0; i < g.size(); ++i) {
                    const auto& ci = comps[static_cast<std::size_t>(g[i])];
                    for (std::size_t j = i + 1; j < g.size(); ++j)
                        for (int u : ci)
                            for (int w : comps[static_cast<std::size_t>(g[j])])
                                edges.emplace_back(std::min(u, w), std::max(u, w));
                    merged.insert(merged.end(), ci.begin(), ci.end());
                }
                std::sort(merged.begin(), merged.end());
                next.push_back(std::move(merged));
            }
            std::sort(edges.begin(), edges.end());
            std::sort(next.begin(), next.end());
            seq.levels.push_back(std::move(edges));
            level(next);
            seq.levels.pop_back();
        });
    };
    std::vector<std::vector<int>> singletons;
    for (int x = 1; x <= n; ++x)
        singletons.push_back({x});
    level(singletons);
    return out;
}

bool is_full_sequence(const IteratedMatchingSequence& seq)
{
    const int n = seq.n;
    if (n < 1 || !is_prime(seq.p))
        return false;
    std::vector<std::vector<int>> level_of(static_cast<std::size_t>(n) + 1, std::vector<int>(static_cast<std::size_t>(n) + 1, 0));
    for (std::size_t i = 0; i < seq.levels.size(); ++i) {
        const auto before = component_labels(n, seq.levels, i);
        const auto after = component_labels(n, seq.levels, i + 1);
        std::set<std::pair<int, int>> edges;
        for (auto [u, w] : seq.levels[i]) {
            if (u < 1 || w > n || u >= w || level_of[static_cast<std::size_t>(u)][static_cast<std::size_t>(w)] != 0)
                return false;
            if (before[static_cast<std::size_t>(u)] == before[static_cast<std::size_t>(w)])
                return false;
            level_of[static_cast<std::size_t>(u)][static_cast<std::size_t>(w)] = static_cast<int>(i) + 1;
            edges.insert({u, w});
        }
        // Each new component must be p old components, joined completely and by nothing else.
        std::map<int, std::set<int>> parts;
        for (int x = 1; x <= n; ++x)
            parts[after[static_cast<std::size_t>(x)]].insert(before[static_cast<std::size_t>(x)]);
        for (const auto& [_, olds] : parts)
            if (olds.size() != static_cast<std::size_t>(seq.p))
                return false;
        for (int u = 1; u <= n; ++u)
            for (int w = u + 1; w <= n; ++w) {
                const bool joined = after[static_cast<std::size_t>(u)] == after[static_cast<std::size_t>(w)] &&
                                    before[static_cast<std::size_t>(u)] != before[static_cast<std::size_t>(w)];
                if (joined != (edges.count({u, w}) > 0))
                    return false;
            }
    }
    for (int u = 1; u <= n; ++u)
        for (int w = u + 1; w <= n; ++w)
            if (level_of[static_cast<std::size_t>(u)][static_cast<std::size_t>(w)] == 0)
                return false;
    return true;
}

Structure encode_canonical(const IteratedMatchingSequence& seq, bool with_constant)
{
    if (!is_full_sequence(seq))
        throw PreconditionError("sequence is not a full iterated matching sequence");
    const int n = seq.n;
    Structure s(ternary_vocab(with_constant ? 1 : 0), n);
    for (std::size_t i = 0; i < seq.levels.size(); ++i) {
        const auto below = component_labels(n, seq.levels, i);
        const int anchor = below[static_cast<std::size_t>(n)];
        for (auto [u, w] : seq.levels[i])
            for (int z = 1; z <= n; ++z)
                if (below[static_cast<std::size_t>(z)] == anchor) {
                    s.set("R", {u, w, z});
                    s.set("R", {w, u, z});
                }
    }
    return s;
}

std::vector<TrimStage> trim_pipeline(const ClassSpec& spec8)
{
    const auto& rels = spec8.vocab.relations;
    if (rels.size() != 8 || spec8.vocab.num_constants != 0 || rels[0].arity != 3)
        throw PreconditionError("expected the eight relations of a ternary relation after removing its constant");
    const std::string base = rels[0].name;
    // Recover the component names R_A from the vocabulary: R, R{1}, R{2}, R{3}, R{1,2}, ...
    const std::string prefix = base + "$";
    auto name_of = [&](std::size_t index, int arity) {
        const auto& r = rels[index];
        if (r.arity != arity || r.name.rfind(prefix, 0) != 0)
            throw PreconditionError("unexpected relation " + r.name + " in position " + std::to_string(index));
        return r.name;
    };
    const std::string r1 = name_of(1, 2), r2 = name_of(2, 2), r3 = name_of(3, 2);
    const std::string r12 = name_of(4, 1), r13 = name_of(5, 1), r23 = name_of(6, 1), r123 = name_of(7, 0);

    auto drop = [](Vocabulary vocab, std::initializer_list<std::string> names) {
        std::erase_if(vocab.relations, [&](const RelationSymbol& r) {
            return std::find(names.begin(), names.end(), r.name) != names.end();
        });
        return vocab;
    };

    std::vector<TrimStage> out;
    out.push_back({8, spec8});

    auto stage = [&](int number, std::initializer_list<std::string> removed, auto&& rewrite) {
        const ClassSpec& prev = out.back().spec;
        Formula f = rewrite_atoms(prev.sentence, rewrite);
        out.push_back({number, make_class_spec(drop(prev.vocab, removed), f)});
    };

    stage(6, {r123, r12}, [&](const Formula& at) -> std::optional<Formula> {
        if (at.symbol() == r123 || at.symbol() == r12)
            return Formula::falsity();
        return std::nullopt;
    });
    stage(4, {r13, r23}, [&](const Formula& at) -> std::optional<Formula> {
        if (at.symbol() == r13 || at.symbol() == r23)
            return Formula::truth();
        return std::nullopt;
    });
    stage(3, {r3}, [&](const Formula& at) -> std::optional<Formula> {
        if (at.symbol() == r3)
            return neq(at.terms()[0], at.terms()[1]);
        return std::nullopt;
    });
    stage(2, {r2}, [&](const Formula& at) -> std::optional<Formula> {
        if (at.symbol() == r2)
            return Formula::atom(r1, at.terms());
        return std::nullopt;
    });
    stage(1, {r1}, [&](const Formula& at) -> std::optional<Formula> {
        const auto& t = at.terms();
        if (at.symbol() == base)
            return Formula::conj(neq(t[0], t[1]), at);
        if (at.symbol() == r1)
            return Formula::atom(base, {t[0], t[0], t[1]});
        return std::nullopt;
    });
    return out;
}

} // namespace mcf
