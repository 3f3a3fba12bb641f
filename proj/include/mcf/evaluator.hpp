#pragma once

#include "mcf/formula.hpp"
#include "mcf/structure.hpp"

#include <cstdint>
#include <map>
#include <set>
#include <span>
#include <string>
#include <vector>

namespace mcf {

struct EvalLimits {
    /// Largest tuple space N^arity a second-order quantifier may range over.
    std::int64_t max_quantified_tuples = 16;
};

struct RelationValue {
    int arity = 0;
    std::set<std::vector<int>> tuples; // 1-based elements
};

/// Values for free variables and free (quantifiable) relation symbols.
struct Assignment {
    std::map<std::string, int> elements; // 1-based
    std::map<std::string, RelationValue> relations;
};

/// Truth value plus a certificate: every interpretation agreeing with the evaluated one on
/// bits [0, certificate] gives the same value (-1 when no bit matters).
struct Outcome {
    bool value = false;
    std::int64_t certificate = -1;
};

/// A formula compiled against a vocabulary and a fixed universe size.
class Evaluator {
public:
    /// Per-thread working memory for run().
    struct Scratch {
        std::vector<int> env;
        /// Certificates at or below this index are taken as soon as they are found.
        std::int64_t floor = -1;
        std::vector<std::vector<std::uint8_t>> bound;
    };

    Evaluator(const Formula& f, const Vocabulary& vocab, int universe_size,
              const Assignment& free = {}, EvalLimits limits = {});

    Scratch make_scratch() const;
    /// Evaluates with certificates kept as small as cheaply possible: failing conjuncts and
    /// universal instances (and succeeding disjuncts and witnesses) report the smallest one.
    Outcome run(std::span<const std::uint64_t> bits, Scratch& scratch) const;

    bool operator()(const Structure& s) const;

    int universe_size() const noexcept { return universe_; }

private:
    enum class Op : std::uint8_t {
        True, False, Atom, BoundAtom, Equals, Not, And, Or, Implies, Iff,
        Exists, Forall, Count, SoExists, SoForall, SoExistsSub, SoForallSub,
    };

    struct Arg {
        int var_slot = -1; // >= 0: variable slot, otherwise `element`
        int element = 0;   // 0-based
    };

    struct Node {
        Op op = Op::True;
        int a = -1;
        int b = -1;
        int slot = -1;         // variable slot or bound-relation slot
        int residue = 0;
        int modulus = 0;
        int arity = 0;
        int args_begin = 0;
        std::int64_t offset = 0; // structure bit offset for Atom / structure guard
        int guard_slot = -1;     // bound guard slot, or -1 when the guard lives in the structure
        std::int64_t guard_offset = 0;
    };

    struct RelRef {
        std::string name;
        bool bound = false;
        int index = 0; // structure relation index or bound slot
        int arity = 0;
    };

    struct Compiler;

    bool eval(int id, std::span<const std::uint64_t> bits, Scratch& s, std::int64_t& cert) const;
    std::int64_t tuple_index(const Node& n, const Scratch& s) const;
    bool so_enumerate(const Node& n, std::span<const std::uint64_t> bits, Scratch& s,
                      std::int64_t& cert) const;

    int universe_;
    std::vector<Node> nodes_;
    std::vector<Arg> args_;
    std::vector<std::int64_t> powers_;
    int root_ = 0;
    Scratch initial_;
};

/// Tarskian truth of `f` in `s` under `asg`. Throws ValidationError for unbound variables
/// or unknown relations and BudgetExceeded when a second-order quantifier is too large.
bool evaluate(const Structure& s, const Formula& f, const Assignment& asg = {},
              EvalLimits limits = {});

} // namespace mcf
