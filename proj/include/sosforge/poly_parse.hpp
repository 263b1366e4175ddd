#pragma once

#include <string>

#include "sosforge/dpoly.hpp"

namespace sosforge {

// Parses a scalar polynomial expression over independent variables.
//
//   expr   := ['-'] term (('+' | '-') term)*
//   term   := factor ('*' factor)*
//   factor := base ('^' uint)?
//   base   := number | ident | '(' expr ')'
//
// Whitespace is free between tokens. Implicit multiplication is rejected.
// Failures throw ParseError with the byte offset of the offending token.
PPoly parse_ppoly(const std::string& expr);

}  // namespace sosforge
