#pragma once

#include <map>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "cnctrans/accessor.hpp"
#include "cnctrans/ast.hpp"
#include "cnctrans/grammar.hpp"

namespace cnctrans {

/// A name slot of a pattern: `left`, `$name` or `$_`.
struct NameRef {
    enum class Kind { Literal, Var, Anon };
    Kind kind = Kind::Literal;
    std::string text;  ///< literal text, or variable name without `$`

    static NameRef literal(std::string text) { return {Kind::Literal, std::move(text)}; }
    static NameRef var(std::string name) { return {Kind::Var, std::move(name)}; }
    static NameRef anon() { return {Kind::Anon, {}}; }

    bool operator==(const NameRef&) const = default;
};

/// `$client.$_`: one NameRef per dot-separated segment.
struct QualifiedPattern {
    std::vector<NameRef> segments;
    bool operator==(const QualifiedPattern&) const = default;
};

/// Int, String or keyword text copied from the rule. Ints compare by value.
struct TokenLiteral {
    std::string text;
    bool is_int = false;
    bool operator==(const TokenLiteral&) const = default;
};

struct PatternElem;
using PatternPtr = std::shared_ptr<PatternElem>;
using PatternItem = std::variant<PatternPtr, NameRef, QualifiedPattern, TokenLiteral>;
using PatternField = std::variant<PatternItem, std::vector<PatternItem>>;

/// One node of a rule's pattern tree.
///
/// Concrete: `nonterminal` is a base production, `fields` mirror its labels.
/// VarBlack / VarWhite: `nonterminal` is the declared type, `var` the name;
/// white-box elements carry a Concrete `body`. Neg: `body` is the forbidden
/// Concrete pattern. Repl: `left` and/or `right`. For Neg and Repl
/// `nonterminal` names the slot type the element was written in.
struct PatternElem {
    enum class Kind { Concrete, VarBlack, VarWhite, Neg, Repl };

    Kind kind = Kind::Concrete;
    int id = -1;  ///< preorder number, unique within a rule
    std::string nonterminal;
    std::string var;
    std::map<std::string, PatternField> fields;
    PatternPtr body;
    PatternPtr left;
    PatternPtr right;
    std::optional<Span> span;
};

std::string_view pattern_kind_name(PatternElem::Kind kind);

/// Structural equality including ids; spans are ignored.
bool pattern_equal(const PatternElem& a, const PatternElem& b);
bool pattern_equal(const PatternPtr& a, const PatternPtr& b);

/// Deep copy keeping ids.
PatternPtr clone_pattern(const PatternElem& pattern);

/// `component $name { port [[ :- out $sp state ]]; }` style rendering.
std::string to_debug_string(const PatternElem& pattern);

struct Expr;
using ExprPtr = std::shared_ptr<const Expr>;

/// Where-block expression.
///
/// VarRef: `text` is the variable. MethodCall: `text` is the accessor,
/// operands = {receiver}. Concat: operands = {receiver, argument}.
/// StringLit / IntLit: `text` is the decoded literal. Cmp: `text` is the
/// operator. And / Or: two or more operands. Not: one operand.
struct Expr {
    enum class Kind { VarRef, MethodCall, Concat, StringLit, IntLit, Cmp, And, Or, Not };
    Kind kind = Kind::VarRef;
    std::string text;
    std::vector<ExprPtr> operands;
};

std::string to_string(const Expr& expr);

struct Assignment {
    std::string var;
    ExprPtr value;
};

struct Rule {
    std::string name;
    std::vector<PatternPtr> elements;  ///< top-level pattern elements in order
    std::vector<Assignment> assignments;
    ExprPtr constraint;                ///< null when absent
    std::optional<Span> span;
    /// Declared type of every element variable bound by the positive pattern.
    std::map<std::string, std::string> element_vars;
    /// Name variables bound by the positive pattern.
    std::vector<std::string> name_vars;
};

/// Negative element of a decomposed rule.
struct Nac {
    int scope_id = -1;  ///< enclosing Concrete pattern id; -1 at top level
    std::string label;  ///< field of the scope the element was written in
    std::optional<std::size_t> position;  ///< index in a list field or among top-level elements
    PatternPtr element;                   ///< the original Neg element
};

/// One right-hand-side change.
struct Edit {
    enum class Kind { Create, Delete, Replace };
    Kind kind = Kind::Create;
    int owner_id = -1;  ///< Concrete pattern owning the slot; -1 for the model root
    std::string label;
    std::optional<std::size_t> position;  ///< index in the owner's list field
    int target_id = -1;                   ///< Delete/Replace: id of the matched left side
    PatternPtr element;                   ///< the original Repl element
};

/// Left-hand side, negative elements and changes of a rule. Positive
/// patterns keep the ids of the rule, so match correspondences address edit
/// owners and targets directly.
struct Decomposition {
    std::vector<PatternPtr> lhs;
    std::vector<Nac> nacs;
    std::vector<Edit> edits;
};

Decomposition decompose(const Rule& rule);

/// Inverse of decompose: rebuilds the rule's top-level elements.
std::vector<PatternPtr> merge(const Decomposition& decomposition);

struct Statement {
    bool loop = false;
    std::string callee;
    std::optional<Span> span;

    std::string to_string() const { return (loop ? "loop " : "") + callee + "()"; }
};

struct InstrMethod {
    std::string name;
    std::vector<Statement> statements;
};

struct TransformationModule {
    std::string name;
    std::map<std::string, InstrMethod> instr_methods;
    std::map<std::string, Rule> rules;
    std::vector<std::string> rule_order;  ///< declaration order
    std::map<std::string, Decomposition> decompositions;

    const Rule& rule(const std::string& name) const;
    const Decomposition& decomposition(const std::string& name) const;
};

/// Parses a `.mtr` module with a grammar from derive_transformation_grammar.
/// Throws Error(Syntax).
NodePtr parse_module(const GrammarSpec& dstl, std::string_view text, const std::string& file_name = "<module>");

/// Builds the rule IR and checks the module. Throws Error(Compile) on
/// unbound or conflicting variables, undefined or misused methods, recursion
/// between instruction methods, unknown accessors and malformed templates.
TransformationModule compile_module(const NodePtr& module_ast, const AccessorTable& table);

/// parse_module + compile_module with the grammar derived from the table's
/// base grammar.
TransformationModule load_module(std::string_view text, const std::string& file_name, const AccessorTable& table);

/// Compiles a single pattern text (rule body without `transformation` frame)
/// as a rule named `name`; used for ad-hoc matching and tests.
Rule compile_rule_text(const GrammarSpec& dstl, std::string_view text, const AccessorTable& table,
                       const std::string& name = "pattern", const std::string& file_name = "<pattern>");

}  // namespace cnctrans
