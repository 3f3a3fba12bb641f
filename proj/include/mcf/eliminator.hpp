#pragma once

#include "mcf/class_spec.hpp"
#include "mcf/structure.hpp"

#include <map>
#include <set>
#include <string>
#include <vector>

namespace mcf {

enum class EliminationMode { Sum, ManyOne, HigherArity };

const char* to_string(EliminationMode mode);
EliminationMode parse_elimination_mode(const std::string& text);

/// State of the transformation below some node. The removed constant is a_k with
/// k = removed_constant; a variable in sent_to_a stands for that element. In sum mode the
/// relations listed in with_a decide their all-a tuple (U(a), R(a, a)); they are unused otherwise.
struct CorrespondenceContext {
    int removed_constant = 1;
    std::set<std::string> sent_to_a;
    std::set<std::string> with_a;

    friend bool operator==(const CorrespondenceContext&, const CorrespondenceContext&) = default;
};

/// One relation of an output vocabulary and the part of a source relation it stores:
/// target(y) iff source(t) where t has a at `positions` and y elsewhere, in order.
struct GeneratedRelation {
    std::string name;
    std::string source;
    std::vector<int> positions; // 1-based, sorted
    int arity = 0;
    std::string role;           // "R", "I", "O", "S", "D" or "R{...}"
};

struct EliminationResult {
    EliminationMode mode = EliminationMode::ManyOne;
    std::vector<ClassSpec> outputs;
    /// Sum mode: one context per output giving its with_a sets; otherwise a single context.
    std::vector<CorrespondenceContext> contexts;
    std::vector<GeneratedRelation> relations;
    bool noop = false;
};

/// Name of the component of `base` (arity `arity`) with a at `positions`.
/// Sum and many-one modes use the role tags $S (unary), $O, $I, $D (binary).
std::string component_name(const std::string& base, int arity, const std::vector<int>& positions,
                           int removed_constant, EliminationMode mode);

/// phi'_X for one context. f must be hygienic; variables in ctx.sent_to_a are dropped from the
/// free variables of the result. Throws PreconditionError for arities the mode cannot handle.
Formula transform_formula(const Formula& f, const Vocabulary& vocab, const CorrespondenceContext& ctx,
                          EliminationMode mode);

/// Removes the last constant, splitting into 2^(#unary + #binary) classes whose counts sum to
/// the input's. Relations must have arity at most 2.
EliminationResult eliminate_one_sum(const ClassSpec& spec);

/// Removes the last constant with nullary relations S/D and unary I/O. Arity at most 2.
/// Zero constants gives the input back with noop set.
EliminationResult eliminate_many_one(const ClassSpec& spec);

/// Removes the last constant, replacing each relation of arity r by 2^r relations.
EliminationResult eliminate_higher_arity(const ClassSpec& spec);

EliminationResult eliminate(const ClassSpec& spec, EliminationMode mode);

/// Repeats many-one or higher-arity elimination until no constants remain.
ClassSpec eliminate_all(const ClassSpec& spec, EliminationMode mode);

/// Replaces each nullary Z by a unary Z$U that is forced to be empty or everything.
/// Counts agree for every universe of size at least 1.
ClassSpec simulate_nullary(const ClassSpec& spec);

/// The structure-level correspondence: the output index and the image over [N-1] of a
/// structure m over [N] for the input of `result`.
struct Correspondent {
    std::size_t output = 0;
    Structure image;
};

Correspondent correspond(const Structure& m, const EliminationResult& result);

} // namespace mcf
