#include "mcf/formula.hpp"

#include "mcf/error.hpp"

#include <algorithm>
#include <map>

namespace mcf {

struct Formula::Node {
    FormulaKind kind = FormulaKind::True;
    std::string symbol;
    std::string guard;
    std::vector<Term> terms;
    std::vector<Formula> children;
    int residue = 0;
    int modulus = 0;
    int rel_arity = 0;
};

const char* to_string(FormulaKind kind)
{
    switch (kind) {
    case FormulaKind::True: return "true";
    case FormulaKind::False: return "false";
    case FormulaKind::Atom: return "atom";
    case FormulaKind::Equals: return "=";
    case FormulaKind::Not: return "not";
    case FormulaKind::And: return "and";
    case FormulaKind::Or: return "or";
    case FormulaKind::Implies: return "implies";
    case FormulaKind::Iff: return "iff";
    case FormulaKind::Exists: return "exists";
    case FormulaKind::Forall: return "forall";
    case FormulaKind::Count: return "count";
    case FormulaKind::ExistsRel: return "existsrel";
    case FormulaKind::ForallRel: return "forallrel";
    case FormulaKind::ExistsRelGuarded: return "existsrel-sub";
    case FormulaKind::ForallRelGuarded: return "forallrel-sub";
    }
    return "?";
}

Formula Formula::make(Node node)
{
    return Formula(std::make_shared<const Node>(std::move(node)));
}

Formula::Formula() : Formula(truth()) {}

Formula Formula::truth()
{
    static const Formula t = make(Node{FormulaKind::True, {}, {}, {}, {}, 0, 0, 0});
    return t;
}

Formula Formula::falsity()
{
    static const Formula f = make(Node{FormulaKind::False, {}, {}, {}, {}, 0, 0, 0});
    return f;
}

Formula Formula::atom(std::string relation, std::vector<Term> args)
{
    return make(Node{FormulaKind::Atom, std::move(relation), {}, std::move(args), {}, 0, 0, 0});
}

Formula Formula::equals(Term left, Term right)
{
    return make(Node{FormulaKind::Equals, {}, {}, {std::move(left), std::move(right)}, {}, 0, 0, 0});
}

Formula Formula::negate(Formula f)
{
    return make(Node{FormulaKind::Not, {}, {}, {}, {std::move(f)}, 0, 0, 0});
}

Formula Formula::conj(Formula a, Formula b)
{
    return make(Node{FormulaKind::And, {}, {}, {}, {std::move(a), std::move(b)}, 0, 0, 0});
}

Formula Formula::disj(Formula a, Formula b)
{
    return make(Node{FormulaKind::Or, {}, {}, {}, {std::move(a), std::move(b)}, 0, 0, 0});
}

Formula Formula::implies(Formula a, Formula b)
{
    return make(Node{FormulaKind::Implies, {}, {}, {}, {std::move(a), std::move(b)}, 0, 0, 0});
}

Formula Formula::iff(Formula a, Formula b)
{
    return make(Node{FormulaKind::Iff, {}, {}, {}, {std::move(a), std::move(b)}, 0, 0, 0});
}

Formula Formula::exists(std::string variable, Formula body)
{
    return make(Node{FormulaKind::Exists, std::move(variable), {}, {}, {std::move(body)}, 0, 0, 0});
}

Formula Formula::forall(std::string variable, Formula body)
{
    return make(Node{FormulaKind::Forall, std::move(variable), {}, {}, {std::move(body)}, 0, 0, 0});
}

Formula Formula::count(int residue, int modulus, std::string variable, Formula body)
{
    return make(Node{FormulaKind::Count, std::move(variable), {}, {}, {std::move(body)}, residue,
                     modulus, 0});
}

Formula Formula::exists_rel(std::string relation, int arity, Formula body)
{
    return make(
        Node{FormulaKind::ExistsRel, std::move(relation), {}, {}, {std::move(body)}, 0, 0, arity});
}

Formula Formula::forall_rel(std::string relation, int arity, Formula body)
{
    return make(
        Node{FormulaKind::ForallRel, std::move(relation), {}, {}, {std::move(body)}, 0, 0, arity});
}

Formula Formula::exists_rel_sub(std::string relation, std::string guard, Formula body)
{
    return make(Node{FormulaKind::ExistsRelGuarded, std::move(relation), std::move(guard), {},
                     {std::move(body)}, 0, 0, 0});
}

Formula Formula::forall_rel_sub(std::string relation, std::string guard, Formula body)
{
    return make(Node{FormulaKind::ForallRelGuarded, std::move(relation), std::move(guard), {},
                     {std::move(body)}, 0, 0, 0});
}

Formula Formula::conj_all(const std::vector<Formula>& parts)
{
    if (parts.empty())
        return truth();
    Formula acc = parts.back();
    for (auto it = parts.rbegin() + 1; it != parts.rend(); ++it)
        acc = conj(*it, acc);
    return acc;
}

Formula Formula::disj_all(const std::vector<Formula>& parts)
{
    if (parts.empty())
        return falsity();
    Formula acc = parts.back();
    for (auto it = parts.rbegin() + 1; it != parts.rend(); ++it)
        acc = disj(*it, acc);
    return acc;
}

Formula Formula::exists_all(std::initializer_list<std::string> variables, Formula body)
{
    std::vector<std::string> vars(variables);
    for (auto it = vars.rbegin(); it != vars.rend(); ++it)
        body = exists(*it, std::move(body));
    return body;
}

Formula Formula::forall_all(std::initializer_list<std::string> variables, Formula body)
{
    std::vector<std::string> vars(variables);
    for (auto it = vars.rbegin(); it != vars.rend(); ++it)
        body = forall(*it, std::move(body));
    return body;
}

FormulaKind Formula::kind() const noexcept { return node_->kind; }
const std::string& Formula::symbol() const noexcept { return node_->symbol; }
const std::string& Formula::guard() const noexcept { return node_->guard; }
const std::vector<Term>& Formula::terms() const noexcept { return node_->terms; }
const std::vector<Formula>& Formula::children() const noexcept { return node_->children; }
int Formula::residue() const noexcept { return node_->residue; }
int Formula::modulus() const noexcept { return node_->modulus; }
int Formula::rel_arity() const noexcept { return node_->rel_arity; }

bool Formula::is_quantifier() const noexcept
{
    switch (kind()) {
    case FormulaKind::Exists:
    case FormulaKind::Forall:
    case FormulaKind::Count:
        return true;
    default:
        return is_second_order();
    }
}

bool Formula::is_second_order() const noexcept
{
    switch (kind()) {
    case FormulaKind::ExistsRel:
    case FormulaKind::ForallRel:
    case FormulaKind::ExistsRelGuarded:
    case FormulaKind::ForallRelGuarded:
        return true;
    default:
        return false;
    }
}

bool operator==(const Formula& a, const Formula& b)
{
    if (a.node_ == b.node_)
        return true;
    const auto& x = *a.node_;
    const auto& y = *b.node_;
    return x.kind == y.kind && x.symbol == y.symbol && x.guard == y.guard && x.terms == y.terms &&
           x.residue == y.residue && x.modulus == y.modulus && x.rel_arity == y.rel_arity &&
           x.children == y.children;
}

Formula with_children(const Formula& f, std::vector<Formula> children)
{
    if (f.children().empty())
        return f;
    if (children.size() != f.children().size())
        throw PreconditionError("with_children: child count mismatch");
    switch (f.kind()) {
    case FormulaKind::Not: return Formula::negate(children[0]);
    case FormulaKind::And: return Formula::conj(children[0], children[1]);
    case FormulaKind::Or: return Formula::disj(children[0], children[1]);
    case FormulaKind::Implies: return Formula::implies(children[0], children[1]);
    case FormulaKind::Iff: return Formula::iff(children[0], children[1]);
    case FormulaKind::Exists: return Formula::exists(f.symbol(), children[0]);
    case FormulaKind::Forall: return Formula::forall(f.symbol(), children[0]);
    case FormulaKind::Count:
        return Formula::count(f.residue(), f.modulus(), f.symbol(), children[0]);
    case FormulaKind::ExistsRel: return Formula::exists_rel(f.symbol(), f.rel_arity(), children[0]);
    case FormulaKind::ForallRel: return Formula::forall_rel(f.symbol(), f.rel_arity(), children[0]);
    case FormulaKind::ExistsRelGuarded:
        return Formula::exists_rel_sub(f.symbol(), f.guard(), children[0]);
    case FormulaKind::ForallRelGuarded:
        return Formula::forall_rel_sub(f.symbol(), f.guard(), children[0]);
    default:
        return f;
    }
}

std::size_t formula_size(const Formula& f)
{
    std::size_t n = 1;
    for (const auto& c : f.children())
        n += formula_size(c);
    return n;
}

int quantifier_depth(const Formula& f)
{
    int best = 0;
    for (const auto& c : f.children())
        best = std::max(best, quantifier_depth(c));
    return best + (f.is_quantifier() ? 1 : 0);
}

namespace {

bool binds_variable(const Formula& f)
{
    return f.kind() == FormulaKind::Exists || f.kind() == FormulaKind::Forall ||
           f.kind() == FormulaKind::Count;
}

void collect_free_vars(const Formula& f, std::multiset<std::string>& bound,
                       std::set<std::string>& out)
{
    for (const Term& t : f.terms())
        if (t.is_variable() && !bound.count(t.variable))
            out.insert(t.variable);
    if (binds_variable(f)) {
        auto it = bound.insert(f.symbol());
        collect_free_vars(f.body(), bound, out);
        bound.erase(it);
        return;
    }
    for (const auto& c : f.children())
        collect_free_vars(c, bound, out);
}

void collect_free_rels(const Formula& f, std::multiset<std::string>& bound,
                       std::set<std::string>& out)
{
    if (f.kind() == FormulaKind::Atom && !bound.count(f.symbol()))
        out.insert(f.symbol());
    if (f.is_second_order()) {
        if (!f.guard().empty() && !bound.count(f.guard()))
            out.insert(f.guard());
        auto it = bound.insert(f.symbol());
        collect_free_rels(f.body(), bound, out);
        bound.erase(it);
        return;
    }
    for (const auto& c : f.children())
        collect_free_rels(c, bound, out);
}

} // namespace

std::set<std::string> free_variables(const Formula& f)
{
    std::multiset<std::string> bound;
    std::set<std::string> out;
    collect_free_vars(f, bound, out);
    return out;
}

std::set<std::string> free_relations(const Formula& f)
{
    std::multiset<std::string> bound;
    std::set<std::string> out;
    collect_free_rels(f, bound, out);
    return out;
}

namespace {

struct Validator {
    const Vocabulary& vocab;
    std::vector<std::pair<std::string, int>> rel_scope; // innermost last
    std::vector<std::string> out;

    std::optional<int> arity_of(const std::string& name) const
    {
        for (auto it = rel_scope.rbegin(); it != rel_scope.rend(); ++it)
            if (it->first == name)
                return it->second;
        if (const auto* r = vocab.find(name))
            return r->arity;
        return std::nullopt;
    }

    void check_term(const Term& t)
    {
        if (t.is_constant()) {
            if (t.constant < 1 || t.constant > vocab.num_constants)
                out.push_back("constant index out of range: a" + std::to_string(t.constant) +
                              " (vocabulary has " + std::to_string(vocab.num_constants) + ")");
        } else {
            check_variable_name(t.variable);
        }
    }

    void check_variable_name(const std::string& v)
    {
        if (v.empty() || looks_like_constant(v) || is_reserved_word(v))
            out.push_back("invalid variable name '" + v + "'");
    }

    void visit(const Formula& f)
    {
        switch (f.kind()) {
        case FormulaKind::True:
        case FormulaKind::False:
            return;
        case FormulaKind::Atom: {
            auto arity = arity_of(f.symbol());
            if (!arity)
                out.push_back("unknown relation " + f.symbol());
            else if (*arity != static_cast<int>(f.terms().size()))
                out.push_back("arity mismatch for " + f.symbol() + ": expected " +
                              std::to_string(*arity) + ", got " +
                              std::to_string(f.terms().size()));
            for (const auto& t : f.terms())
                check_term(t);
            return;
        }
        case FormulaKind::Equals:
            for (const auto& t : f.terms())
                check_term(t);
            return;
        case FormulaKind::Exists:
        case FormulaKind::Forall:
            check_variable_name(f.symbol());
            visit(f.body());
            return;
        case FormulaKind::Count:
            check_variable_name(f.symbol());
            if (f.modulus() < 2)
                out.push_back("counting modulus must be >= 2, got " + std::to_string(f.modulus()));
            else if (f.residue() < 0 || f.residue() >= f.modulus())
                out.push_back("counting residue " + std::to_string(f.residue()) +
                              " outside [0," + std::to_string(f.modulus()) + ")");
            visit(f.body());
            return;
        case FormulaKind::ExistsRel:
        case FormulaKind::ForallRel:
            if (f.rel_arity() < 0)
                out.push_back("negative arity for quantified relation " + f.symbol());
            bind(f.symbol(), f.rel_arity(), f.body());
            return;
        case FormulaKind::ExistsRelGuarded:
        case FormulaKind::ForallRelGuarded: {
            auto arity = arity_of(f.guard());
            if (!arity) {
                out.push_back("unknown guard relation " + f.guard());
                bind(f.symbol(), 0, f.body());
            } else {
                bind(f.symbol(), *arity, f.body());
            }
            return;
        }
        default:
            for (const auto& c : f.children())
                visit(c);
        }
    }

    void bind(const std::string& name, int arity, const Formula& body)
    {
        if (name.empty() || is_reserved_word(name) || looks_like_constant(name))
            out.push_back("invalid quantified relation name '" + name + "'");
        rel_scope.emplace_back(name, arity);
        visit(body);
        rel_scope.pop_back();
    }
};

} // namespace

std::vector<std::string> validate_formula(const Formula& f, const Vocabulary& vocab,
                                          bool require_closed)
{
    Validator v{vocab, {}, {}};
    v.visit(f);
    if (require_closed) {
        auto fv = free_variables(f);
        for (const auto& name : fv)
            v.out.push_back("free variable " + name);
    }
    return std::move(v.out);
}

namespace {

std::string stem_of(const std::string& name)
{
    auto pos = name.find('$');
    return pos == std::string::npos ? name : name.substr(0, pos);
}

struct Hygiene {
    std::set<std::string> used_vars;
    std::set<std::string> used_rels;
    std::map<std::string, int> counters;
    std::vector<std::pair<std::string, std::string>> var_scope;
    std::vector<std::pair<std::string, std::string>> rel_scope;

    static std::string lookup(const std::vector<std::pair<std::string, std::string>>& scope,
                              const std::string& name)
    {
        for (auto it = scope.rbegin(); it != scope.rend(); ++it)
            if (it->first == name)
                return it->second;
        return name;
    }

    std::string claim(std::set<std::string>& used, const std::string& name)
    {
        if (used.insert(name).second)
            return name;
        const std::string stem = stem_of(name);
        int& k = counters[stem];
        for (;;) {
            std::string fresh = stem + "$" + std::to_string(++k);
            if (used.insert(fresh).second)
                return fresh;
        }
    }

    Term term(const Term& t) const
    {
        if (t.is_constant())
            return t;
        return Term::var(lookup(var_scope, t.variable));
    }

    Formula visit(const Formula& f)
    {
        switch (f.kind()) {
        case FormulaKind::True:
        case FormulaKind::False:
            return f;
        case FormulaKind::Atom: {
            std::vector<Term> args;
            for (const auto& t : f.terms())
                args.push_back(term(t));
            return Formula::atom(lookup(rel_scope, f.symbol()), std::move(args));
        }
        case FormulaKind::Equals:
            return Formula::equals(term(f.terms()[0]), term(f.terms()[1]));
        case FormulaKind::Exists:
        case FormulaKind::Forall:
        case FormulaKind::Count: {
            std::string fresh = claim(used_vars, f.symbol());
            var_scope.emplace_back(f.symbol(), fresh);
            Formula body = visit(f.body());
            var_scope.pop_back();
            if (f.kind() == FormulaKind::Exists)
                return Formula::exists(fresh, body);
            if (f.kind() == FormulaKind::Forall)
                return Formula::forall(fresh, body);
            return Formula::count(f.residue(), f.modulus(), fresh, body);
        }
        case FormulaKind::ExistsRel:
        case FormulaKind::ForallRel:
        case FormulaKind::ExistsRelGuarded:
        case FormulaKind::ForallRelGuarded: {
            std::string guard = f.guard().empty() ? f.guard() : lookup(rel_scope, f.guard());
            std::string fresh = claim(used_rels, f.symbol());
            rel_scope.emplace_back(f.symbol(), fresh);
            Formula body = visit(f.body());
            rel_scope.pop_back();
            switch (f.kind()) {
            case FormulaKind::ExistsRel: return Formula::exists_rel(fresh, f.rel_arity(), body);
            case FormulaKind::ForallRel: return Formula::forall_rel(fresh, f.rel_arity(), body);
            case FormulaKind::ExistsRelGuarded: return Formula::exists_rel_sub(fresh, guard, body);
            default: return Formula::forall_rel_sub(fresh, guard, body);
            }
        }
        default: {
            std::vector<Formula> kids;
            for (const auto& c : f.children())
                kids.push_back(visit(c));
            return with_children(f, std::move(kids));
        }
        }
    }
};

void collect_binders(const Formula& f, std::vector<std::string>& vars,
                     std::vector<std::string>& rels)
{
    if (binds_variable(f))
        vars.push_back(f.symbol());
    if (f.is_second_order())
        rels.push_back(f.symbol());
    for (const auto& c : f.children())
        collect_binders(c, vars, rels);
}

} // namespace

Formula normalize_hygiene(const Formula& f, const std::set<std::string>& reserved_relations)
{
    Hygiene h;
    h.used_vars = free_variables(f);
    h.used_rels = free_relations(f);
    h.used_rels.insert(reserved_relations.begin(), reserved_relations.end());
    return h.visit(f);
}

bool is_hygienic(const Formula& f, const std::set<std::string>& reserved_relations)
{
    std::vector<std::string> vars, rels;
    collect_binders(f, vars, rels);
    std::set<std::string> seen_vars = free_variables(f);
    for (const auto& v : vars)
        if (!seen_vars.insert(v).second)
            return false;
    std::set<std::string> seen_rels = free_relations(f);
    seen_rels.insert(reserved_relations.begin(), reserved_relations.end());
    for (const auto& r : rels)
        if (!seen_rels.insert(r).second)
            return false;
    return true;
}

bool LogicFeatures::within(const LogicFeatures& other) const
{
    if (counting && !other.counting)
        return false;
    if (guarded && !other.guarded)
        return false;
    return max_so_arity <= other.max_so_arity;
}

LogicFeatures logic_features(const Formula& f)
{
    LogicFeatures out;
    switch (f.kind()) {
    case FormulaKind::Count: out.counting = true; break;
    case FormulaKind::ExistsRel:
    case FormulaKind::ForallRel: out.max_so_arity = f.rel_arity(); break;
    case FormulaKind::ExistsRelGuarded:
    case FormulaKind::ForallRelGuarded: out.guarded = true; break;
    default: break;
    }
    for (const auto& c : f.children()) {
        LogicFeatures sub = logic_features(c);
        out.counting |= sub.counting;
        out.guarded |= sub.guarded;
        out.max_so_arity = std::max(out.max_so_arity, sub.max_so_arity);
    }
    return out;
}

} // namespace mcf
