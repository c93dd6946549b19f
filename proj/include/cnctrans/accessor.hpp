#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "cnctrans/ast.hpp"
#include "cnctrans/grammar.hpp"

namespace cnctrans {

using NameList = std::vector<std::string>;

/// Result of a where-expression.
using Value = std::variant<std::string, std::int64_t, bool, NameList>;

enum class ValueType { String, Int, Bool, NameList };

ValueType type_of(const Value& value);
std::string_view value_type_name(ValueType type);
/// `leftState`, `-1`, `true`, `[employee, admin]`.
std::string render_value(const Value& value);

/// A brace-form pattern of `pattern_nonterminal` whose `empty_field` list is
/// empty also matches nodes of `model_nonterminal`; pattern fields are read
/// from the model fields named in `field_map` (first item of a list).
struct PatternAlias {
    std::string pattern_nonterminal;
    std::string empty_field;
    std::string model_nonterminal;
    std::map<std::string, std::string> field_map;
};

/// The abstract-syntax signature visible to transformation rules: typed
/// accessor methods per nonterminal plus the language's pattern aliases.
class AccessorTable {
public:
    using Function = std::function<Value(const AstNode&)>;

    struct Accessor {
        ValueType result;
        Function fn;
    };

    /// Derives `get<Label>` for every token-valued field of every production.
    /// Single tokens yield String (Int for `Int` tokens); token lists yield
    /// NameList.
    explicit AccessorTable(GrammarSpec grammar);

    void add(const std::string& nonterminal, const std::string& method, ValueType result, Function fn);
    void add_alias(PatternAlias alias) { aliases_.push_back(std::move(alias)); }

    const Accessor* find(std::string_view nonterminal, std::string_view method) const;

    /// Static resolution for a receiver of declared type `type`: every
    /// implementing production must provide the method with one result type.
    std::optional<ValueType> resolve(std::string_view type, std::string_view method) const;

    /// Dispatches on the node's nonterminal. Throws Error(Evaluation).
    Value call(const AstNode& node, std::string_view method) const;

    const GrammarSpec& grammar() const noexcept { return grammar_; }
    const std::vector<PatternAlias>& aliases() const noexcept { return aliases_; }

    /// Sorted `Nonterminal.method` listing, for diagnostics and tests.
    std::vector<std::string> signatures() const;

private:
    GrammarSpec grammar_;
    std::map<std::pair<std::string, std::string>, Accessor, std::less<>> accessors_;
    std::vector<PatternAlias> aliases_;
};

/// `policy` -> `getPolicy`.
std::string accessor_name(std::string_view label);

/// Integer value of an Int token (`+1` -> 1).
std::int64_t int_token_value(const std::string& text);

}  // namespace cnctrans
