#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "cnctrans/accessor.hpp"
#include "cnctrans/ast.hpp"
#include "cnctrans/grammar.hpp"

/// The component & connector ADL: grammar, normalization, typed views and
/// well-formedness checks.
namespace cnctrans::adl {

/// Text of the shipped `cnc.mcg`.
std::string_view cnc_grammar_text();

/// The shipped grammar, parsed once.
const GrammarSpec& cnc_grammar();

/// Parses and normalizes a `.arc` model.
NodePtr parse(std::string_view text, const std::string& file_name = "<input>");

/// Desugars comma groups: each subcomponent declaration names one instance
/// and all port sections of a component are merged into the first one.
/// Idempotent.
NodePtr normalize(const NodePtr& model);

struct PortView {
    std::string direction;
    std::string type;
    std::string name;
    NodePtr node;
};

struct SubcomponentRefView {
    std::string type;
    std::string name;
    NodePtr node;
};

struct ConnectorView {
    std::string source;
    std::string target;
    NodePtr node;
};

struct AccessView {
    enum class Variant { PortAccess, ComponentAccess };
    Variant variant = Variant::ComponentAccess;
    std::string port;
    std::vector<std::string> policies;
    NodePtr node;
};

struct IdentityLinkView {
    std::string prover;
    std::string verifier;
    NodePtr node;
};

struct ComponentView {
    std::string name;
    std::vector<PortView> ports;
    std::vector<SubcomponentRefView> sub_refs;
    std::vector<ComponentView> inner_defs;
    std::vector<ConnectorView> connectors;
    int trust_level = 0;  ///< declared relative level; 0 when absent
    bool has_trust_level = false;
    std::vector<AccessView> accesses;
    std::vector<IdentityLinkView> identity_links;
    NodePtr node;

    const PortView* port(std::string_view port_name) const;
};

ComponentView view_component(const NodePtr& component_def);
/// Views of the top-level component definitions.
std::vector<ComponentView> view_model(const NodePtr& model);

struct Diagnostic {
    enum class Severity { Warning, Error };
    Severity severity = Severity::Error;
    std::string message;
    std::optional<Span> span;

    bool is_error() const { return severity == Severity::Error; }
    /// `file:line:col: error: message`
    std::string to_string() const;
};

/// Context conditions over a normalized model. With `strict`, unresolved
/// subcomponent types are errors instead of warnings.
std::vector<Diagnostic> check_wellformed(const NodePtr& model, bool strict = false);

/// Accessors derived from the grammar plus `ComponentDef.getTrustlevel`, and
/// the alias letting `component $x {}` match subcomponent declarations.
const AccessorTable& accessor_table();

}  // namespace cnctrans::adl
