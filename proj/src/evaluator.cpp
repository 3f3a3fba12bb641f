#include "mcf/evaluator.hpp"

#include "mcf/error.hpp"

#include <algorithm>

namespace mcf {

struct Evaluator::Compiler {
    Evaluator& ev;
    const Vocabulary& vocab;
    const BitLayout layout;
    EvalLimits limits;
    std::vector<std::pair<std::string, int>> var_scope;
    std::vector<RelRef> rel_scope;
    int next_var_slot = 0;

    Compiler(Evaluator& e, const Vocabulary& v, int universe, EvalLimits l)
        : ev(e), vocab(v), layout(v, universe), limits(l)
    {
    }

    int push(Node n)
    {
        ev.nodes_.push_back(n);
        return static_cast<int>(ev.nodes_.size()) - 1;
    }

    RelRef resolve(const std::string& name) const
    {
        for (auto it = rel_scope.rbegin(); it != rel_scope.rend(); ++it)
            if (it->name == name)
                return *it;
        if (auto idx = vocab.index_of(name))
            return RelRef{name, false, *idx, vocab.relations[static_cast<std::size_t>(*idx)].arity};
        throw ValidationError("unknown relation " + name);
    }

    Arg arg(const Term& t) const
    {
        if (t.is_constant()) {
            if (t.constant < 1 || t.constant > vocab.num_constants)
                throw ValidationError("constant index out of range: a" + std::to_string(t.constant));
            return Arg{-1, ev.universe_ - vocab.num_constants + t.constant - 1};
        }
        for (auto it = var_scope.rbegin(); it != var_scope.rend(); ++it)
            if (it->first == t.variable)
                return Arg{it->second, 0};
        throw ValidationError("unbound variable " + t.variable);
    }

    int bound_slot(int arity)
    {
        const std::int64_t size = layout.power(arity);
        if (size > limits.max_quantified_tuples)
            throw BudgetExceeded("second-order quantifier over " + std::to_string(size) +
                                 " tuples exceeds limit " +
                                 std::to_string(limits.max_quantified_tuples));
        ev.initial_.bound.emplace_back(static_cast<std::size_t>(size), 0);
        return static_cast<int>(ev.initial_.bound.size()) - 1;
    }

    int compile(const Formula& f)
    {
        Node n;
        switch (f.kind()) {
        case FormulaKind::True: n.op = Op::True; return push(n);
        case FormulaKind::False: n.op = Op::False; return push(n);
        case FormulaKind::Atom: {
            RelRef r = resolve(f.symbol());
            if (r.arity != static_cast<int>(f.terms().size()))
                throw ValidationError("arity mismatch for " + f.symbol());
            n.op = r.bound ? Op::BoundAtom : Op::Atom;
            n.arity = r.arity;
            n.args_begin = static_cast<int>(ev.args_.size());
            for (const auto& t : f.terms())
                ev.args_.push_back(arg(t));
            if (r.bound)
                n.slot = r.index;
            else
                n.offset = layout.offset(r.index);
            return push(n);
        }
        case FormulaKind::Equals:
            n.op = Op::Equals;
            n.args_begin = static_cast<int>(ev.args_.size());
            ev.args_.push_back(arg(f.terms()[0]));
            ev.args_.push_back(arg(f.terms()[1]));
            return push(n);
        case FormulaKind::Not:
            n.op = Op::Not;
            n.a = compile(f.child(0));
            return push(n);
        case FormulaKind::And:
        case FormulaKind::Or:
        case FormulaKind::Implies:
        case FormulaKind::Iff:
            n.op = f.kind() == FormulaKind::And       ? Op::And
                   : f.kind() == FormulaKind::Or      ? Op::Or
                   : f.kind() == FormulaKind::Implies ? Op::Implies
                                                      : Op::Iff;
            n.a = compile(f.child(0));
            n.b = compile(f.child(1));
            return push(n);
        case FormulaKind::Exists:
        case FormulaKind::Forall:
        case FormulaKind::Count: {
            n.op = f.kind() == FormulaKind::Exists   ? Op::Exists
                   : f.kind() == FormulaKind::Forall ? Op::Forall
                                                     : Op::Count;
            n.residue = f.residue();
            n.modulus = f.modulus();
            if (n.op == Op::Count && n.modulus < 2)
                throw ValidationError("counting modulus must be >= 2");
            n.slot = next_var_slot++;
            var_scope.emplace_back(f.symbol(), n.slot);
            n.a = compile(f.body());
            var_scope.pop_back();
            return push(n);
        }
        case FormulaKind::ExistsRel:
        case FormulaKind::ForallRel: {
            n.op = f.kind() == FormulaKind::ExistsRel ? Op::SoExists : Op::SoForall;
            n.arity = f.rel_arity();
            n.slot = bound_slot(n.arity);
            rel_scope.push_back(RelRef{f.symbol(), true, n.slot, n.arity});
            n.a = compile(f.body());
            rel_scope.pop_back();
            return push(n);
        }
        case FormulaKind::ExistsRelGuarded:
        case FormulaKind::ForallRelGuarded: {
            n.op = f.kind() == FormulaKind::ExistsRelGuarded ? Op::SoExistsSub : Op::SoForallSub;
            RelRef guard = resolve(f.guard());
            n.arity = guard.arity;
            n.slot = bound_slot(n.arity);
            if (guard.bound)
                n.guard_slot = guard.index;
            else
                n.guard_offset = layout.offset(guard.index);
            rel_scope.push_back(RelRef{f.symbol(), true, n.slot, n.arity});
            n.a = compile(f.body());
            rel_scope.pop_back();
            return push(n);
        }
        }
        throw ValidationError("unsupported formula node");
    }
};

Evaluator::Evaluator(const Formula& f, const Vocabulary& vocab, int universe_size,
                     const Assignment& free, EvalLimits limits)
    : universe_(universe_size)
{
    if (universe_size < vocab.num_constants)
        throw PreconditionError("universe too small for the constants");
    Compiler c(*this, vocab, universe_size, limits);
    for (int k = 0; k <= 8; ++k)
        powers_.push_back(k == 0 ? 1 : powers_.back() * universe_size);

    std::vector<int> free_values;
    for (const auto& [name, value] : free.elements) {
        if (value < 1 || value > universe_size)
            throw ValidationError("assigned element out of range for " + name);
        c.var_scope.emplace_back(name, c.next_var_slot++);
        free_values.push_back(value - 1);
    }
    for (const auto& [name, rv] : free.relations) {
        int slot = c.bound_slot(rv.arity);
        auto& bits = initial_.bound[static_cast<std::size_t>(slot)];
        for (const auto& tuple : rv.tuples) {
            if (static_cast<int>(tuple.size()) != rv.arity)
                throw ValidationError("tuple arity mismatch for assigned relation " + name);
            std::int64_t idx = 0;
            for (int e : tuple) {
                if (e < 1 || e > universe_size)
                    throw ValidationError("assigned tuple outside universe for " + name);
                idx = idx * universe_size + (e - 1);
            }
            bits[static_cast<std::size_t>(idx)] = 1;
        }
        c.rel_scope.push_back(RelRef{name, true, slot, rv.arity});
    }
    root_ = c.compile(f);
    initial_.env.assign(static_cast<std::size_t>(c.next_var_slot), 0);
    std::copy(free_values.begin(), free_values.end(), initial_.env.begin());
}

Evaluator::Scratch Evaluator::make_scratch() const { return initial_; }

std::int64_t Evaluator::tuple_index(const Node& n, const Scratch& s) const
{
    std::int64_t idx = 0;
    const Arg* a = args_.data() + n.args_begin;
    for (int k = 0; k < n.arity; ++k) {
        const int e = a[k].var_slot >= 0 ? s.env[static_cast<std::size_t>(a[k].var_slot)] : a[k].element;
        idx = idx * universe_ + e;
    }
    return idx;
}

namespace {

inline bool read_bit(std::span<const std::uint64_t> bits, std::int64_t index)
{
    return (bits[static_cast<std::size_t>(index >> 6)] >> (index & 63)) & 1U;
}

} // namespace

bool Evaluator::eval(int id, std::span<const std::uint64_t> bits, Scratch& s,
                     std::int64_t& cert) const
{
    const Node& n = nodes_[static_cast<std::size_t>(id)];
    switch (n.op) {
    case Op::True:
        cert = -1;
        return true;
    case Op::False:
        cert = -1;
        return false;
    case Op::Atom: {
        const std::int64_t idx = n.offset + tuple_index(n, s);
        cert = idx;
        return read_bit(bits, idx);
    }
    case Op::BoundAtom:
        cert = -1;
        return s.bound[static_cast<std::size_t>(n.slot)][static_cast<std::size_t>(tuple_index(n, s))] != 0;
    case Op::Equals: {
        cert = -1;
        const Arg& l = args_[static_cast<std::size_t>(n.args_begin)];
        const Arg& r = args_[static_cast<std::size_t>(n.args_begin) + 1];
        const int lv = l.var_slot >= 0 ? s.env[static_cast<std::size_t>(l.var_slot)] : l.element;
        const int rv = r.var_slot >= 0 ? s.env[static_cast<std::size_t>(r.var_slot)] : r.element;
        return lv == rv;
    }
    case Op::Not:
        return !eval(n.a, bits, s, cert);
    case Op::And:
    case Op::Or: {
        // The deciding value is false for And, true for Or; keep the smallest deciding child.
        const bool decide = n.op == Op::Or;
        std::int64_t ca = -1, cb = -1;
        const bool va = eval(n.a, bits, s, ca);
        if (va == decide && ca <= s.floor) {
            cert = ca;
            return decide;
        }
        const bool vb = eval(n.b, bits, s, cb);
        if (va == decide && vb == decide)
            cert = std::min(ca, cb);
        else if (va == decide)
            cert = ca;
        else if (vb == decide)
            cert = cb;
        else
            cert = std::max(ca, cb);
        return va == decide || vb == decide ? decide : !decide;
    }
    case Op::Implies: {
        std::int64_t ca = -1, cb = -1;
        const bool va = eval(n.a, bits, s, ca);
        if (!va && ca <= s.floor) {
            cert = ca;
            return true;
        }
        const bool vb = eval(n.b, bits, s, cb);
        if (!va && vb)
            cert = std::min(ca, cb);
        else if (!va)
            cert = ca;
        else if (vb)
            cert = cb;
        else
            cert = std::max(ca, cb);
        return !va || vb;
    }
    case Op::Iff: {
        std::int64_t ca = -1, cb = -1;
        const bool va = eval(n.a, bits, s, ca);
        const bool vb = eval(n.b, bits, s, cb);
        cert = std::max(ca, cb);
        return va == vb;
    }
    case Op::Exists:
    case Op::Forall: {
        const bool decide = n.op == Op::Exists;
        int& var = s.env[static_cast<std::size_t>(n.slot)];
        std::int64_t all = -1;
        std::int64_t best = -1;
        bool decided = false;
        for (int v = 0; v < universe_; ++v) {
            var = v;
            std::int64_t c = -1;
            if (eval(n.a, bits, s, c) == decide) {
                if (c <= s.floor) {
                    cert = c;
                    return decide;
                }
                best = decided ? std::min(best, c) : c;
                decided = true;
            } else {
                all = std::max(all, c);
            }
        }
        cert = decided ? best : all;
        return decided ? decide : !decide;
    }
    case Op::Count: {
        int& var = s.env[static_cast<std::size_t>(n.slot)];
        std::int64_t all = -1;
        int hits = 0;
        for (int v = 0; v < universe_; ++v) {
            var = v;
            std::int64_t c = -1;
            if (eval(n.a, bits, s, c))
                ++hits;
            all = std::max(all, c);
        }
        cert = all;
        return hits % n.modulus == n.residue;
    }
    case Op::SoExists:
    case Op::SoForall:
    case Op::SoExistsSub:
    case Op::SoForallSub:
        return so_enumerate(n, bits, s, cert);
    }
    cert = -1;
    return false;
}

bool Evaluator::so_enumerate(const Node& n, std::span<const std::uint64_t> bits, Scratch& s,
                             std::int64_t& cert) const
{
    const bool want = n.op == Op::SoExists || n.op == Op::SoExistsSub;
    auto& rel = s.bound[static_cast<std::size_t>(n.slot)];
    const std::size_t size = rel.size();

    // Positions the quantified relation may contain.
    std::vector<std::size_t> candidates;
    std::int64_t base = -1;
    if (n.op == Op::SoExists || n.op == Op::SoForall) {
        for (std::size_t i = 0; i < size; ++i)
            candidates.push_back(i);
    } else if (n.guard_slot >= 0) {
        const auto& guard = s.bound[static_cast<std::size_t>(n.guard_slot)];
        for (std::size_t i = 0; i < size; ++i)
            if (guard[i])
                candidates.push_back(i);
    } else {
        for (std::size_t i = 0; i < size; ++i)
            if (read_bit(bits, n.guard_offset + static_cast<std::int64_t>(i)))
                candidates.push_back(i);
        if (size > 0)
            base = n.guard_offset + static_cast<std::int64_t>(size) - 1;
    }

    const std::vector<std::uint8_t> saved = rel;
    std::int64_t acc = base;
    const std::uint64_t combos = std::uint64_t{1} << candidates.size();
    bool result = !want;
    for (std::uint64_t mask = 0; mask < combos; ++mask) {
        std::fill(rel.begin(), rel.end(), 0);
        for (std::size_t k = 0; k < candidates.size(); ++k)
            if ((mask >> k) & 1U)
                rel[candidates[k]] = 1;
        std::int64_t c = -1;
        if (eval(n.a, bits, s, c) == want) {
            acc = std::max(base, c);
            result = want;
            break;
        }
        acc = std::max(acc, c);
    }
    rel = saved;
    cert = acc;
    return result;
}

Outcome Evaluator::run(std::span<const std::uint64_t> bits, Scratch& scratch) const
{
    Outcome out;
    out.value = eval(root_, bits, scratch, out.certificate);
    return out;
}

bool Evaluator::operator()(const Structure& s) const
{
    if (s.universe_size() != universe_)
        throw PreconditionError("structure universe does not match compiled universe");
    Scratch scratch = make_scratch();
    return run(s.words(), scratch).value;
}

bool evaluate(const Structure& s, const Formula& f, const Assignment& asg, EvalLimits limits)
{
    Evaluator ev(f, s.vocab(), s.universe_size(), asg, limits);
    return ev(s);
}

} // namespace mcf
