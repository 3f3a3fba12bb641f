#pragma once

#include "mcf/formula.hpp"
#include "mcf/vocabulary.hpp"

#include <string>
#include <vector>

namespace mcf {

/// A vocabulary paired with a closed sentence: the class of its finite models.
struct ClassSpec {
    Vocabulary vocab;
    Formula sentence;

    friend bool operator==(const ClassSpec&, const ClassSpec&) = default;
};

/// Vocabulary problems, formula problems, free variables and free relation symbols
/// missing from the vocabulary.
std::vector<std::string> validate_class_spec(const ClassSpec& spec);

/// Validates and throws ValidationError listing every violation.
ClassSpec make_class_spec(Vocabulary vocab, Formula sentence);

/// Relation names of the vocabulary, for reserving them during hygiene normalization.
std::set<std::string> relation_names(const Vocabulary& vocab);

} // namespace mcf
