#pragma once

#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

namespace cnctrans {

/// Built-in lexical tokens.
///
/// `Ident` is an identifier that ignores keyword reservation; `Var` is a
/// schema variable `$ident` (including `$_`).
enum class TokenKind { Name, Ident, Int, String, QualifiedName, Var };

std::string_view token_kind_name(TokenKind kind);
std::optional<TokenKind> token_kind_from_name(std::string_view name);

/// One element of a production body.
struct RhsElement {
    enum class Kind {
        Terminal,       ///< `"text"`
        Nonterminal,    ///< `label:Target`
        Token,          ///< `label:Name` etc.
        KeywordChoice,  ///< `label:["in"|"out"]`
        List,           ///< `label:X*`, `label:X+`, `(label:X || ",")*`
        Optional,       ///< `label:X?`, `"t"?`
    };

    Kind kind = Kind::Terminal;
    std::string text;                  ///< terminal text or nonterminal target
    TokenKind token = TokenKind::Name;
    std::vector<std::string> choices;  ///< keyword choice alternatives
    std::string label;                 ///< field label (empty for terminals)
    std::vector<RhsElement> inner;     ///< exactly one element for List/Optional
    int min_count = 0;                 ///< List only: 0 or 1
    std::string separator;             ///< List only: empty when unseparated

    static RhsElement terminal(std::string text);
    static RhsElement nonterminal(std::string target, std::string label);
    static RhsElement token_ref(TokenKind kind, std::string label);
    static RhsElement keyword_choice(std::vector<std::string> choices, std::string label);
    static RhsElement list(RhsElement element, int min_count, std::string separator = {});
    static RhsElement optional(RhsElement element);

    const RhsElement& element() const { return inner.front(); }

    bool operator==(const RhsElement&) const = default;
};

struct Production {
    std::string lhs;
    std::vector<RhsElement> body;

    /// Field element for `label`, looking through List/Optional wrappers.
    const RhsElement* field(std::string_view label) const;
    /// Top-level body element that carries `label` (possibly a List/Optional).
    const RhsElement* field_slot(std::string_view label) const;

    bool operator==(const Production&) const = default;
};

struct Interface {
    std::string name;
    std::vector<std::string> alternatives;

    bool operator==(const Interface&) const = default;
};

/// A context-free grammar as data.
///
/// Productions and interfaces keep declaration order, which doubles as the
/// ordered-choice priority of the parser. The start symbol is the first
/// declared rule.
class GrammarSpec {
public:
    std::string name;
    std::vector<Production> productions;
    std::vector<Interface> interfaces;
    std::string start_symbol;
    std::set<std::string> reserved_keywords;

    const Production* production(std::string_view nonterminal) const;
    const Interface* interface(std::string_view nonterminal) const;
    bool defines(std::string_view nonterminal) const;

    /// True when `nonterminal` equals `type` or reaches it through interfaces.
    bool is_subtype(std::string_view nonterminal, std::string_view type) const;

    /// Concrete productions that implement `type` (itself if concrete).
    std::vector<std::string> implementors(std::string_view type) const;

    /// All symbol-shaped (non-identifier) terminals, longest first.
    const std::vector<std::string>& symbols() const { return symbols_; }

    /// Recomputes reserved keywords and the symbol table, then checks the
    /// invariants. Throws Error(Grammar) on dangling references, empty
    /// interfaces, duplicate labels, or an undefined start symbol.
    void finalize();

    bool operator==(const GrammarSpec& other) const;

private:
    std::vector<std::string> symbols_;
};

bool is_identifier(std::string_view text);

/// Parses the `.mcg` grammar description format.
GrammarSpec parse_grammar(std::string_view text, const std::string& file_name = "<grammar>");

}  // namespace cnctrans
