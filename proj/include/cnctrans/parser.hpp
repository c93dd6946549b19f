#pragma once

#include <string>
#include <string_view>

#include "cnctrans/ast.hpp"
#include "cnctrans/grammar.hpp"

namespace cnctrans {

/// Parses `text` as nonterminal `start` of `grammar`.
///
/// PEG semantics: ordered choice over interface alternatives, greedy lists,
/// and backtracking over optional elements within a production body. Keywords
/// of the grammar never match a `Name` token. On failure throws
/// Error(Syntax) reporting the farthest failure position and the terminals
/// expected there.
NodePtr parse_model(const GrammarSpec& grammar, std::string_view start, std::string_view text,
                    const std::string& file_name = "<input>");

}  // namespace cnctrans
