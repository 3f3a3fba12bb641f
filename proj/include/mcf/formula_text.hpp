#pragma once

#include "mcf/class_spec.hpp"

#include <string>
#include <string_view>

namespace mcf {

/// Parses "(vocab (rel NAME INT)* (consts INT)) (sentence FORMULA)".
/// Throws ParseError (with line/column) on syntax errors and ValidationError if the result
/// does not validate. ';' starts a comment running to end of line.
ClassSpec parse_class_spec(std::string_view text);

/// Parses a single formula without validating it against any vocabulary.
Formula parse_formula(std::string_view text);

/// Canonical single-line rendering; parse_formula(print_formula(f)) == f.
std::string print_formula(const Formula& f);

std::string print_term(const Term& t);

/// Two lines (vocab block, sentence block) terminated by a newline.
std::string print_class_spec(const ClassSpec& spec);

} // namespace mcf
