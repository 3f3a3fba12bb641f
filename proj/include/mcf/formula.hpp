#pragma once

#include "mcf/vocabulary.hpp"

#include <cstddef>
#include <initializer_list>
#include <memory>
#include <set>
#include <string>
#include <vector>

namespace mcf {

/// A variable or a hard-wired constant referenced by its 1-based index.
struct Term {
    enum class Kind { Variable, Constant };

    Kind kind = Kind::Variable;
    std::string variable;
    int constant = 0;

    static Term var(std::string name) { return Term{Kind::Variable, std::move(name), 0}; }
    static Term cst(int index) { return Term{Kind::Constant, {}, index}; }

    bool is_variable() const noexcept { return kind == Kind::Variable; }
    bool is_constant() const noexcept { return kind == Kind::Constant; }

    friend bool operator==(const Term&, const Term&) = default;
};

enum class FormulaKind {
    True,
    False,
    Atom,
    Equals,
    Not,
    And,
    Or,
    Implies,
    Iff,
    Exists,
    Forall,
    Count,
    ExistsRel,
    ForallRel,
    ExistsRelGuarded,
    ForallRelGuarded,
};

const char* to_string(FormulaKind kind);

/// Immutable sentence/formula tree. Copies share structure.
///
/// Field use by kind:
///   Atom            symbol = relation, terms = arguments
///   Equals          terms = {left, right}
///   Not..Iff        children
///   Exists/Forall   symbol = variable, children = {body}
///   Count           symbol = variable, residue/modulus, children = {body}
///   ExistsRel/...   symbol = relation, rel_arity, children = {body}
///   ...Guarded      symbol = relation, guard = guarding relation, children = {body}
class Formula {
public:
    Formula();

    static Formula truth();
    static Formula falsity();
    static Formula boolean(bool value) { return value ? truth() : falsity(); }
    static Formula atom(std::string relation, std::vector<Term> args);
    static Formula equals(Term left, Term right);
    static Formula negate(Formula f);
    static Formula conj(Formula a, Formula b);
    static Formula disj(Formula a, Formula b);
    static Formula implies(Formula a, Formula b);
    static Formula iff(Formula a, Formula b);
    static Formula exists(std::string variable, Formula body);
    static Formula forall(std::string variable, Formula body);
    static Formula count(int residue, int modulus, std::string variable, Formula body);
    static Formula exists_rel(std::string relation, int arity, Formula body);
    static Formula forall_rel(std::string relation, int arity, Formula body);
    static Formula exists_rel_sub(std::string relation, std::string guard, Formula body);
    static Formula forall_rel_sub(std::string relation, std::string guard, Formula body);

    /// Right-nested conjunction; empty input gives true.
    static Formula conj_all(const std::vector<Formula>& parts);
    /// Right-nested disjunction; empty input gives false.
    static Formula disj_all(const std::vector<Formula>& parts);
    /// Nested quantifier prefix, outermost first.
    static Formula exists_all(std::initializer_list<std::string> variables, Formula body);
    static Formula forall_all(std::initializer_list<std::string> variables, Formula body);

    FormulaKind kind() const noexcept;
    const std::string& symbol() const noexcept;
    const std::string& guard() const noexcept;
    const std::vector<Term>& terms() const noexcept;
    const std::vector<Formula>& children() const noexcept;
    const Formula& child(std::size_t i) const { return children().at(i); }
    const Formula& body() const { return children().at(0); }
    int residue() const noexcept;
    int modulus() const noexcept;
    int rel_arity() const noexcept;

    bool is_quantifier() const noexcept;
    bool is_second_order() const noexcept;

    /// Node identity; equal for copies of the same node.
    const void* id() const noexcept { return node_.get(); }

    friend bool operator==(const Formula& a, const Formula& b);

private:
    struct Node;
    explicit Formula(std::shared_ptr<const Node> node) : node_(std::move(node)) {}
    static Formula make(Node node);

    std::shared_ptr<const Node> node_;
};

/// Number of nodes, counting shared subtrees once per occurrence.
std::size_t formula_size(const Formula& f);

/// Longest chain of nested quantifiers.
int quantifier_depth(const Formula& f);

std::set<std::string> free_variables(const Formula& f);

/// Relation symbols used by atoms or guards without an enclosing binder.
std::set<std::string> free_relations(const Formula& f);

/// Arity violations, unknown relations, constant indices outside [1, numConstants],
/// malformed counting quantifiers, and (when require_closed) free variables.
std::vector<std::string> validate_formula(const Formula& f, const Vocabulary& vocab,
                                          bool require_closed = false);

/// Renames bound variables and bound relation symbols so each is bound once and never
/// clashes with a free symbol or with anything in reserved_relations. Names that are already
/// unique are kept, so hygienic input comes back unchanged.
Formula normalize_hygiene(const Formula& f, const std::set<std::string>& reserved_relations = {});

bool is_hygienic(const Formula& f, const std::set<std::string>& reserved_relations = {});

/// Syntactic logic features, used to check that transformations stay within a logic.
struct LogicFeatures {
    bool counting = false;      // modular counting quantifiers
    int max_so_arity = -1;      // largest arity of an unguarded quantified relation, -1 if none
    bool guarded = false;       // guarded second-order quantifiers

    bool is_first_order() const { return !counting && max_so_arity < 0 && !guarded; }
    /// Whether every construct used here is also available in `other`.
    bool within(const LogicFeatures& other) const;
};

LogicFeatures logic_features(const Formula& f);

/// Replaces atoms through `rewrite`; any atom for which it returns nullopt is kept.
template <typename Fn>
Formula rewrite_atoms(const Formula& f, Fn&& rewrite);

} // namespace mcf

#include "mcf/detail/formula_rewrite.hpp"
