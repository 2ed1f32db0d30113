#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <string_view>

#include "sttcbf/formula.hpp"

namespace sttcbf {

struct ParseError : std::invalid_argument {
  ParseError(const std::string& msg, std::size_t pos)
      : std::invalid_argument(msg + " at position " + std::to_string(pos)), position(pos) {}
  std::size_t position;
};

/// Parse the textual STL syntax. Predicates come back unbound; see
/// bind_predicates.
///
///   formula  := implies
///   implies  := or ("=>" implies)?
///   or       := and ("|" and)*
///   and      := unary ("&" unary)*
///   unary    := "!" unary | ("F"|"G") "[" num "," num "]" unary
///             | atom ("U" "[" num "," num "]" atom)?
///   atom     := ident | "true" | "(" formula ")"
///
/// `A => B` desugars to `!A | B`. `F` and `G` act as operators only when
/// followed by `[`, so regions may be named G or F.
FormulaPtr parse(std::string_view text);

}  // namespace sttcbf
