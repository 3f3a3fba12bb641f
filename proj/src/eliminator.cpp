#include "mcf/eliminator.hpp"

#include "mcf/error.hpp"

#include <algorithm>
#include <map>
#include <tuple>

namespace mcf {

const char* to_string(EliminationMode mode)
{
    switch (mode) {
    case EliminationMode::Sum: return "sum";
    case EliminationMode::ManyOne: return "manyOne";
    case EliminationMode::HigherArity: return "higherArity";
    }
    return "?";
}

EliminationMode parse_elimination_mode(const std::string& text)
{
    if (text == "sum")
        return EliminationMode::Sum;
    if (text == "manyOne")
        return EliminationMode::ManyOne;
    if (text == "higherArity")
        return EliminationMode::HigherArity;
    throw ValidationError("unknown elimination mode '" + text + "' (expected sum, manyOne or higherArity)");
}

namespace {

/// Subsets of {1..arity} by size, then lexicographically. Sum mode drops the full set.
std::vector<std::vector<int>> components(int arity, EliminationMode mode)
{
    std::vector<std::vector<int>> out;
    for (std::uint32_t mask = 0; mask < (1U << arity); ++mask) {
        std::vector<int> a;
        for (int i = 0; i < arity; ++i)
            if ((mask >> i) & 1U)
                a.push_back(i + 1);
        out.push_back(std::move(a));
    }
    std::sort(out.begin(), out.end(), [](const auto& x, const auto& y) {
        return x.size() != y.size() ? x.size() < y.size() : x < y;
    });
    if (mode == EliminationMode::Sum && arity >= 1)
        out.pop_back();
    return out;
}

std::string role_of(int arity, const std::vector<int>& positions, EliminationMode mode)
{
    if (positions.empty())
        return "R";
    if (mode != EliminationMode::HigherArity) {
        if (arity == 1)
            return "S";
        if (positions.size() == 2)
            return "D";
        return positions[0] == 1 ? "O" : "I";
    }
    std::string s = "R{";
    for (std::size_t i = 0; i < positions.size(); ++i)
        s += (i ? "," : "") + std::to_string(positions[i]);
    return s + "}";
}

void check_arity(int arity, EliminationMode mode, const std::string& name)
{
    if (mode != EliminationMode::HigherArity && arity > 2)
        throw PreconditionError(std::string(to_string(mode)) + " elimination handles arity at most 2; " +
                                name + " has arity " + std::to_string(arity));
}

Formula f_not(const Formula& a)
{
    if (a.kind() == FormulaKind::True)
        return Formula::falsity();
    if (a.kind() == FormulaKind::False)
        return Formula::truth();
    return Formula::negate(a);
}

Formula f_and(const Formula& a, const Formula& b)
{
    if (a.kind() == FormulaKind::False || b.kind() == FormulaKind::False)
        return Formula::falsity();
    if (a.kind() == FormulaKind::True)
        return b;
    if (b.kind() == FormulaKind::True)
        return a;
    return Formula::conj(a, b);
}

Formula f_or(const Formula& a, const Formula& b)
{
    if (a.kind() == FormulaKind::True || b.kind() == FormulaKind::True)
        return Formula::truth();
    if (a.kind() == FormulaKind::False)
        return b;
    if (b.kind() == FormulaKind::False)
        return a;
    return Formula::disj(a, b);
}

Formula f_implies(const Formula& a, const Formula& b)
{
    if (a.kind() == FormulaKind::False || b.kind() == FormulaKind::True)
        return Formula::truth();
    if (a.kind() == FormulaKind::True)
        return b;
    if (b.kind() == FormulaKind::False)
        return f_not(a);
    return Formula::implies(a, b);
}

Formula f_iff(const Formula& a, const Formula& b)
{
    if (a.kind() == FormulaKind::True)
        return b;
    if (a.kind() == FormulaKind::False)
        return f_not(b);
    if (b.kind() == FormulaKind::True)
        return a;
    if (b.kind() == FormulaKind::False)
        return f_not(a);
    return Formula::iff(a, b);
}

struct FreeInfo {
    std::set<std::string> vars;
    std::set<std::string> rels;
};

class Transformer {
public:
    Transformer(const Vocabulary& vocab, EliminationMode mode, int k) : vocab_(vocab), mode_(mode), k_(k) {}

    Formula run(const Formula& f, const std::set<std::string>& x, const std::set<std::string>& w)
    {
        return go(f, x, w);
    }

private:
    using Key = std::tuple<const void*, std::vector<std::string>, std::vector<std::string>>;

    const FreeInfo& info(const Formula& f)
    {
        if (auto it = info_.find(f.id()); it != info_.end())
            return it->second;
        FreeInfo out;
        for (const auto& c : f.children()) {
            const FreeInfo& sub = info(c);
            out.vars.insert(sub.vars.begin(), sub.vars.end());
            out.rels.insert(sub.rels.begin(), sub.rels.end());
        }
        switch (f.kind()) {
        case FormulaKind::Atom:
            out.rels.insert(f.symbol());
            [[fallthrough]];
        case FormulaKind::Equals:
            for (const auto& t : f.terms())
                if (t.is_variable())
                    out.vars.insert(t.variable);
            break;
        case FormulaKind::Exists:
        case FormulaKind::Forall:
        case FormulaKind::Count:
            out.vars.erase(f.symbol());
            break;
        case FormulaKind::ExistsRel:
        case FormulaKind::ForallRel:
            out.rels.erase(f.symbol());
            break;
        case FormulaKind::ExistsRelGuarded:
        case FormulaKind::ForallRelGuarded:
            out.rels.erase(f.symbol());
            out.rels.insert(f.guard());
            break;
        default:
            break;
        }
        return info_.emplace(f.id(), std::move(out)).first->second;
    }

    static std::vector<std::string> restrict(const std::set<std::string>& s, const std::set<std::string>& to)
    {
        std::vector<std::string> out;
        std::set_intersection(s.begin(), s.end(), to.begin(), to.end(), std::back_inserter(out));
        return out;
    }

    bool is_a(const Term& t, const std::set<std::string>& x) const
    {
        return t.is_constant() ? t.constant == k_ : x.count(t.variable) > 0;
    }

    int arity_of(const std::string& name) const
    {
        for (auto it = bound_.rbegin(); it != bound_.rend(); ++it)
            if (it->first == name)
                return it->second;
        if (const auto* r = vocab_.find(name))
            return r->arity;
        throw ValidationError("unknown relation " + name);
    }

    std::string name(const std::string& base, int arity, const std::vector<int>& a) const
    {
        return component_name(base, arity, a, k_, mode_);
    }

    Formula go(const Formula& f, const std::set<std::string>& x, const std::set<std::string>& w)
    {
        const FreeInfo& fi = info(f);
        Key key{f.id(), restrict(x, fi.vars), restrict(w, fi.rels)};
        if (auto it = memo_.find(key); it != memo_.end())
            return it->second;
        Formula out = compute(f, x, w);
        memo_.emplace(std::move(key), out);
        return out;
    }

    Formula atom(const Formula& f, const std::set<std::string>& x, const std::set<std::string>& w)
    {
        const int arity = static_cast<int>(f.terms().size());
        check_arity(arity, mode_, f.symbol());
        std::vector<int> a;
        std::vector<Term> rest;
        for (int i = 0; i < arity; ++i) {
            const Term& t = f.terms()[static_cast<std::size_t>(i)];
            if (is_a(t, x))
                a.push_back(i + 1);
            else
                rest.push_back(t);
        }
        if (a.empty())
            return f;
        if (mode_ == EliminationMode::Sum && static_cast<int>(a.size()) == arity)
            return Formula::boolean(w.count(f.symbol()) > 0);
        return Formula::atom(name(f.symbol(), arity, a), std::move(rest));
    }

    Formula equality(const Formula& f, const std::set<std::string>& x) const
    {
        const Term& l = f.terms()[0];
        const Term& r = f.terms()[1];
        const bool la = is_a(l, x), ra = is_a(r, x);
        if (la && ra)
            return Formula::truth();
        if (la || ra)
            return Formula::falsity();
        if (l.is_constant() && r.is_constant())
            return Formula::boolean(l.constant == r.constant);
        return f;
    }

    /// Quantifier prefix over the components of `rel`, outermost the original symbol.
    Formula so_prefix(const Formula& f, int arity, Formula body) const
    {
        auto comps = components(arity, mode_);
        for (auto it = comps.rbegin(); it != comps.rend(); ++it) {
            const std::string n = name(f.symbol(), arity, *it);
            switch (f.kind()) {
            case FormulaKind::ExistsRel:
                body = Formula::exists_rel(n, arity - static_cast<int>(it->size()), body);
                break;
            case FormulaKind::ForallRel:
                body = Formula::forall_rel(n, arity - static_cast<int>(it->size()), body);
                break;
            case FormulaKind::ExistsRelGuarded:
                body = Formula::exists_rel_sub(n, name(f.guard(), arity, *it), body);
                break;
            default:
                body = Formula::forall_rel_sub(n, name(f.guard(), arity, *it), body);
                break;
            }
        }
        return body;
    }

    Formula second_order(const Formula& f, const std::set<std::string>& x, const std::set<std::string>& w)
    {
        const bool guarded = f.kind() == FormulaKind::ExistsRelGuarded || f.kind() == FormulaKind::ForallRelGuarded;
        const bool existential = f.kind() == FormulaKind::ExistsRel || f.kind() == FormulaKind::ExistsRelGuarded;
        const int arity = guarded ? arity_of(f.guard()) : f.rel_arity();
        check_arity(arity, mode_, f.symbol());

        bound_.emplace_back(f.symbol(), arity);
        std::set<std::string> without = w;
        without.erase(f.symbol());
        Formula result;
        if (mode_ == EliminationMode::Sum && arity >= 1) {
            // The all-a tuple of the quantified relation is either absent or present; a guard
            // lacking its own all-a tuple leaves only the first option.
            Formula first = so_prefix(f, arity, go(f.body(), x, without));
            if (guarded && w.count(f.guard()) == 0) {
                result = first;
            } else {
                std::set<std::string> with = without;
                with.insert(f.symbol());
                Formula second = so_prefix(f, arity, go(f.body(), x, with));
                result = existential ? f_or(first, second) : f_and(first, second);
            }
        } else {
            result = so_prefix(f, arity, go(f.body(), x, without));
        }
        bound_.pop_back();
        return result;
    }

    Formula compute(const Formula& f, const std::set<std::string>& x, const std::set<std::string>& w)
    {
        switch (f.kind()) {
        case FormulaKind::True:
        case FormulaKind::False:
            return f;
        case FormulaKind::Atom:
            return atom(f, x, w);
        case FormulaKind::Equals:
            return equality(f, x);
        case FormulaKind::Not:
            return f_not(go(f.child(0), x, w));
        case FormulaKind::And:
            return f_and(go(f.child(0), x, w), go(f.child(1), x, w));
        case FormulaKind::Or:
            return f_or(go(f.child(0), x, w), go(f.child(1), x, w));
        case FormulaKind::Implies:
            return f_implies(go(f.child(0), x, w), go(f.child(1), x, w));
        case FormulaKind::Iff:
            return f_iff(go(f.child(0), x, w), go(f.child(1), x, w));
        case FormulaKind::Exists:
        case FormulaKind::Forall:
        case FormulaKind::Count: {
            std::set<std::string> inner = x;
            inner.erase(f.symbol());
            Formula in = go(f.body(), inner, w);
            inner.insert(f.symbol());
            Formula at_a = go(f.body(), inner, w);
            if (f.kind() == FormulaKind::Exists)
                return f_or(Formula::exists(f.symbol(), in), at_a);
            if (f.kind() == FormulaKind::Forall)
                return f_and(Formula::forall(f.symbol(), in), at_a);
            const int m = f.modulus();
            const int r = f.residue();
            Formula one_less = Formula::count((r + m - 1) % m, m, f.symbol(), in);
            Formula same = Formula::count(r, m, f.symbol(), in);
            return f_or(f_and(one_less, at_a), f_and(same, f_not(at_a)));
        }
        case FormulaKind::ExistsRel:
        case FormulaKind::ForallRel:
        case FormulaKind::ExistsRelGuarded:
        case FormulaKind::ForallRelGuarded:
            return second_order(f, x, w);
        }
        throw PreconditionError("unsupported formula node");
    }

    const Vocabulary& vocab_;
    EliminationMode mode_;
    int k_;
    std::vector<std::pair<std::string, int>> bound_;
    std::map<const void*, FreeInfo> info_;
    std::map<Key, Formula> memo_;
};

struct Plan {
    Vocabulary out_vocab;
    std::vector<GeneratedRelation> relations;
    std::vector<std::string> decided; // sum mode: relations whose all-a tuple picks the output
};

Plan plan(const ClassSpec& spec, EliminationMode mode)
{
    const int k = spec.vocab.num_constants;
    if (k < 1)
        throw PreconditionError("no constant to eliminate");
    Plan p;
    p.out_vocab.num_constants = k - 1;
    std::set<std::string> taken = relation_names(spec.vocab);
    for (const auto& r : spec.vocab.relations) {
        check_arity(r.arity, mode, r.name);
        for (const auto& a : components(r.arity, mode)) {
            GeneratedRelation g;
            g.name = component_name(r.name, r.arity, a, k, mode);
            g.source = r.name;
            g.positions = a;
            g.arity = r.arity - static_cast<int>(a.size());
            g.role = role_of(r.arity, a, mode);
            if (!a.empty() && taken.count(g.name))
                throw PreconditionError("generated name " + g.name + " clashes with an existing relation");
            p.out_vocab.relations.push_back({g.name, g.arity});
            p.relations.push_back(std::move(g));
        }
        if (mode == EliminationMode::Sum && r.arity >= 1)
            p.decided.push_back(r.name);
    }
    return p;
}

ClassSpec build_output(const ClassSpec& spec, const Formula& hygienic, const Plan& p, EliminationMode mode,
                       const CorrespondenceContext& ctx)
{
    Transformer t(spec.vocab, mode, ctx.removed_constant);
    Formula out = t.run(hygienic, ctx.sent_to_a, ctx.with_a);
    out = normalize_hygiene(out, relation_names(p.out_vocab));
    return make_class_spec(p.out_vocab, out);
}

} // namespace

std::string component_name(const std::string& base, int arity, const std::vector<int>& positions,
                           int removed_constant, EliminationMode mode)
{
    if (positions.empty())
        return base;
    const std::string k = std::to_string(removed_constant);
    if (mode != EliminationMode::HigherArity && arity <= 2)
        return base + "$" + role_of(arity, positions, mode) + k;
    std::string s = base + "$" + k + "{";
    for (std::size_t i = 0; i < positions.size(); ++i)
        s += (i ? "," : "") + std::to_string(positions[i]);
    return s + "}";
}

Formula transform_formula(const Formula& f, const Vocabulary& vocab, const CorrespondenceContext& ctx,
                          EliminationMode mode)
{
    Transformer t(vocab, mode, ctx.removed_constant);
    return t.run(f, ctx.sent_to_a, ctx.with_a);
}

EliminationResult eliminate_one_sum(const ClassSpec& spec)
{
    const Plan p = plan(spec, EliminationMode::Sum);
    const Formula hygienic = normalize_hygiene(spec.sentence, relation_names(spec.vocab));
    EliminationResult result;
    result.mode = EliminationMode::Sum;
    result.relations = p.relations;
    const std::size_t choices = p.decided.size();
    if (choices > 20)
        throw BudgetExceeded("sum elimination would produce 2^" + std::to_string(choices) + " classes");
    for (std::uint64_t mask = 0; mask < (std::uint64_t{1} << choices); ++mask) {
        CorrespondenceContext ctx;
        ctx.removed_constant = spec.vocab.num_constants;
        for (std::size_t i = 0; i < choices; ++i)
            if ((mask >> i) & 1U)
                ctx.with_a.insert(p.decided[i]);
        result.outputs.push_back(build_output(spec, hygienic, p, EliminationMode::Sum, ctx));
        result.contexts.push_back(std::move(ctx));
    }
    return result;
}

namespace {

EliminationResult eliminate_single(const ClassSpec& spec, EliminationMode mode)
{
    const Plan p = plan(spec, mode);
    CorrespondenceContext ctx;
    ctx.removed_constant = spec.vocab.num_constants;
    EliminationResult result;
    result.mode = mode;
    result.relations = p.relations;
    const Formula hygienic = normalize_hygiene(spec.sentence, relation_names(spec.vocab));
    result.outputs.push_back(build_output(spec, hygienic, p, mode, ctx));
    result.contexts.push_back(ctx);
    return result;
}

} // namespace

EliminationResult eliminate_many_one(const ClassSpec& spec)
{
    if (spec.vocab.num_constants == 0) {
        for (const auto& r : spec.vocab.relations)
            check_arity(r.arity, EliminationMode::ManyOne, r.name);
        EliminationResult result;
        result.mode = EliminationMode::ManyOne;
        result.outputs.push_back(spec);
        result.noop = true;
        return result;
    }
    return eliminate_single(spec, EliminationMode::ManyOne);
}

EliminationResult eliminate_higher_arity(const ClassSpec& spec)
{
    return eliminate_single(spec, EliminationMode::HigherArity);
}

EliminationResult eliminate(const ClassSpec& spec, EliminationMode mode)
{
    switch (mode) {
    case EliminationMode::Sum: return eliminate_one_sum(spec);
    case EliminationMode::ManyOne: return eliminate_many_one(spec);
    case EliminationMode::HigherArity: return eliminate_higher_arity(spec);
    }
    throw PreconditionError("unknown mode");
}

ClassSpec eliminate_all(const ClassSpec& spec, EliminationMode mode)
{
    if (mode == EliminationMode::Sum)
        throw PreconditionError("sum elimination yields several classes; eliminate them one at a time");
    ClassSpec current = spec;
    while (current.vocab.num_constants > 0)
        current = eliminate(current, mode).outputs.front();
    return current;
}

ClassSpec simulate_nullary(const ClassSpec& spec)
{
    Vocabulary vocab = spec.vocab;
    std::map<std::string, std::string> unary;
    std::set<std::string> taken = relation_names(vocab);
    for (auto& r : vocab.relations) {
        if (r.arity != 0)
            continue;
        std::string fresh = r.name + "$U";
        if (taken.count(fresh))
            throw PreconditionError("generated name " + fresh + " clashes with an existing relation");
        unary[r.name] = fresh;
        r.name = fresh;
        r.arity = 1;
    }
    if (unary.empty())
        return spec;
    Formula body = rewrite_atoms(spec.sentence, [&](const Formula& atom) -> std::optional<Formula> {
        auto it = unary.find(atom.symbol());
        if (it == unary.end() || !atom.terms().empty())
            return std::nullopt;
        return Formula::exists("x", Formula::atom(it->second, {Term::var("x")}));
    });
    std::vector<Formula> parts;
    for (const auto& [_, u] : unary)
        parts.push_back(Formula::forall_all(
            {"x", "y"}, Formula::iff(Formula::atom(u, {Term::var("x")}), Formula::atom(u, {Term::var("y")}))));
    parts.push_back(body);
    return make_class_spec(vocab, normalize_hygiene(Formula::conj_all(parts), relation_names(vocab)));
}

Correspondent correspond(const Structure& m, const EliminationResult& result)
{
    if (result.noop)
        return Correspondent{0, m};
    const int n = m.universe_size();
    if (n < 1)
        throw PreconditionError("cannot remove a constant from an empty universe");
    const int a = n;
    std::size_t output = 0;
    if (result.mode == EliminationMode::Sum) {
        std::set<std::string> with_a;
        for (const auto& r : m.vocab().relations)
            if (r.arity >= 1 && m.holds(r.name, std::vector<int>(static_cast<std::size_t>(r.arity), a)))
                with_a.insert(r.name);
        for (; output < result.contexts.size(); ++output)
            if (result.contexts[output].with_a == with_a)
                break;
        if (output == result.contexts.size())
            throw PreconditionError("structure does not belong to any output class");
    }
    Structure image(result.outputs[output].vocab, n - 1);
    for (const auto& g : result.relations) {
        const int source_arity = g.arity + static_cast<int>(g.positions.size());
        std::vector<int> y(static_cast<std::size_t>(g.arity), 1);
        std::vector<int> t(static_cast<std::size_t>(source_arity));
        if (g.arity > 0 && n - 1 == 0)
            continue;
        for (;;) {
            std::size_t yi = 0, pi = 0;
            for (int pos = 1; pos <= source_arity; ++pos) {
                if (pi < g.positions.size() && g.positions[pi] == pos) {
                    t[static_cast<std::size_t>(pos - 1)] = a;
                    ++pi;
                } else {
                    t[static_cast<std::size_t>(pos - 1)] = y[yi++];
                }
            }
            if (m.holds(g.source, t))
                image.set(g.name, y);
            int i = g.arity - 1;
            while (i >= 0 && y[static_cast<std::size_t>(i)] == n - 1)
                y[static_cast<std::size_t>(i--)] = 1;
            if (i < 0)
                break;
            ++y[static_cast<std::size_t>(i)];
        }
    }
    return Correspondent{output, std::move(image)};
}

} // namespace mcf
