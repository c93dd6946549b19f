#pragma once

#include <string>
#include <string_view>

#include "cnctrans/grammar.hpp"

namespace cnctrans {

/// Suffixes of the per-nonterminal productions of a derived grammar.
namespace derived {
inline constexpr std::string_view kPat = "_Pat";
inline constexpr std::string_view kElem = "_Elem";
inline constexpr std::string_view kVarBlack = "_VarBlack";
inline constexpr std::string_view kVarWhite = "_VarWhite";
inline constexpr std::string_view kNeg = "_Neg";
inline constexpr std::string_view kRepl = "_Repl";

inline constexpr std::string_view kModule = "Module";
inline constexpr std::string_view kRule = "TransformationRule";

/// Splits `ComponentDef_Pat` into {"ComponentDef", "_Pat"}; empty suffix when
/// the name carries none of the suffixes above.
std::pair<std::string, std::string> split(std::string_view nonterminal);
}  // namespace derived

/// Derives the transformation language of `base`.
///
/// For every base nonterminal N the result defines N_Pat (N's body with
/// nonterminal references X turned into X_Elem and Name/QualifiedName tokens
/// into name patterns), N_Elem, N_VarBlack (`N $v;`), N_VarWhite
/// (`N $v [[ ... ]]`), N_Neg (`not [[ ... ]]`) and N_Repl
/// (`[[ left? :- right? ]]`), plus the module/control-flow layer and the
/// where-block expression language. Start symbol is `Module`.
///
/// Throws Error(Collision) when the base grammar uses a reserved word of the
/// transformation layer, defines a nonterminal whose name the derivation
/// needs, or contains a production that can match the empty string.
GrammarSpec derive_transformation_grammar(const GrammarSpec& base);

/// Renders a grammar in the `.mcg` format; parse_grammar of the result is
/// equal to `grammar`.
std::string emit_grammar_file(const GrammarSpec& grammar);

}  // namespace cnctrans
