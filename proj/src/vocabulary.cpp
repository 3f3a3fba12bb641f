#include "mcf/vocabulary.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <set>

namespace mcf {

std::optional<int> Vocabulary::index_of(const std::string& name) const
{
    for (std::size_t i = 0; i < relations.size(); ++i)
        if (relations[i].name == name)
            return static_cast<int>(i);
    return std::nullopt;
}

const RelationSymbol* Vocabulary::find(const std::string& name) const
{
    auto idx = index_of(name);
    return idx ? &relations[static_cast<std::size_t>(*idx)] : nullptr;
}

int Vocabulary::max_arity() const
{
    int best = -1;
    for (const auto& r : relations)
        best = std::max(best, r.arity);
    return best;
}

bool is_reserved_word(const std::string& name)
{
    static const std::array<const char*, 19> words = {
        "true",   "false",     "not",       "and",           "or",
        "implies", "iff",      "exists",    "forall",        "count",
        "existsrel", "forallrel", "existsrel-sub", "forallrel-sub", "=",
        "vocab",  "rel",       "consts",    "sentence"};
    return std::find(words.begin(), words.end(), name) != words.end();
}

bool looks_like_constant(const std::string& token)
{
    if (token.size() < 2 || token[0] != 'a')
        return false;
    return std::all_of(token.begin() + 1, token.end(),
                       [](unsigned char c) { return std::isdigit(c) != 0; });
}

namespace {

bool is_symbol_char(unsigned char c)
{
    return std::isgraph(c) != 0 && c != '(' && c != ')' && c != ';';
}

} // namespace

std::vector<std::string> validate_vocabulary(const Vocabulary& vocab)
{
    std::vector<std::string> out;
    std::set<std::string> seen;
    for (const auto& r : vocab.relations) {
        if (r.name.empty() || !std::all_of(r.name.begin(), r.name.end(), is_symbol_char))
            out.push_back("malformed relation name '" + r.name + "'");
        else if (is_reserved_word(r.name) || looks_like_constant(r.name))
            out.push_back("relation name '" + r.name + "' is reserved");
        if (r.arity < 0)
            out.push_back("negative arity " + std::to_string(r.arity) + " for " + r.name);
        if (!seen.insert(r.name).second)
            out.push_back("duplicate name " + r.name);
    }
    if (vocab.num_constants < 0)
        out.push_back("negative constant count " + std::to_string(vocab.num_constants));
    return out;
}

} // namespace mcf
