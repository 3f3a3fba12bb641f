#pragma once

#include <optional>
#include <string>
#include <vector>

namespace mcf {

struct RelationSymbol {
    std::string name;
    int arity = 0;

    friend bool operator==(const RelationSymbol&, const RelationSymbol&) = default;
};

/// Relation symbols with arities plus a number of hard-wired constants.
/// Constant i (1-based) always denotes universe element n + i.
struct Vocabulary {
    std::vector<RelationSymbol> relations;
    int num_constants = 0;

    std::optional<int> index_of(const std::string& name) const;
    const RelationSymbol* find(const std::string& name) const;
    int max_arity() const;

    friend bool operator==(const Vocabulary&, const Vocabulary&) = default;
};

/// Every duplicate-name, negative-arity, or malformed-name problem. Empty means valid.
std::vector<std::string> validate_vocabulary(const Vocabulary& vocab);

/// Names the text grammar reserves for keywords.
bool is_reserved_word(const std::string& name);

/// True for tokens of the form a<digits>, which always denote constants.
bool looks_like_constant(const std::string& token);

} // namespace mcf
