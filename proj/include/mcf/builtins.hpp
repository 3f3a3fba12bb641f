#pragma once

#include "mcf/class_spec.hpp"

#include <string>
#include <vector>

namespace mcf {

/// Named classes over one binary relation E:
///   equivalence, partialOrder, quasiOrder, transitive
///   restrictedBell(r)  equivalence with r constants in pairwise distinct classes
///   evenDegreeGraph    simple graphs with every degree even (uses a counting quantifier)
///   eq2                equivalences with exactly two classes of equal size (second order)
///   phiM, phiMp(p)     the ternary iterated-matching sentences with one constant
/// Throws ValidationError on an unknown name or bad parameters.
ClassSpec builtin_class(const std::string& name, const std::vector<int>& params = {});

/// Parses "name", "name:1,2" or "name(1,2)" and builds the class.
ClassSpec builtin_class_from_text(const std::string& text);

std::vector<std::string> builtin_names();

} // namespace mcf
