#pragma once

#include <string>

#include "cnctrans/ast.hpp"
#include "cnctrans/grammar.hpp"

namespace cnctrans {

/// Renders `node` as text of `grammar`.
///
/// Layout: lists of nodes without separator are printed one item per line;
/// when such a list sits between `{` and `}` it is indented by two spaces.
/// Every other element is printed inline. Output ends with a newline.
/// Throws Error(MalformedNode) when a field violates its production.
std::string pretty_print(const GrammarSpec& grammar, const AstNode& node);

}  // namespace cnctrans
