#pragma once

#include <optional>
#include <utility>
#include <vector>

namespace mcf {

/// Same node with its children replaced (leaves are returned unchanged).
Formula with_children(const Formula& f, std::vector<Formula> children);

template <typename Fn>
Formula rewrite_atoms(const Formula& f, Fn&& rewrite)
{
    if (f.kind() == FormulaKind::Atom) {
        std::optional<Formula> replaced = rewrite(f);
        return replaced ? *replaced : f;
    }
    if (f.children().empty())
        return f;
    std::vector<Formula> kids;
    kids.reserve(f.children().size());
    for (const Formula& c : f.children())
        kids.push_back(rewrite_atoms(c, rewrite));
    return with_children(f, std::move(kids));
}

} // namespace mcf
