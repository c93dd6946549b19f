#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "cnctrans/accessor.hpp"
#include "cnctrans/ast.hpp"
#include "cnctrans/rule.hpp"

namespace cnctrans {

/// Variable bindings of a partial or complete match.
///
/// Element variables bind nodes by identity, name variables bind token text
/// by equality. `correspondence` maps pattern element ids to the nodes they
/// matched. `$_` is never a key.
struct BindingEnv {
    std::map<std::string, NodePtr> elements;
    std::map<std::string, std::string> names;
    std::map<int, NodePtr> correspondence;

    bool operator==(const BindingEnv&) const = default;
};

struct Match {
    std::string rule;
    BindingEnv env;
    std::map<std::string, Value> values;  ///< where-block assignments
    std::vector<NodePtr> top_nodes;       ///< node matched by each positive top-level element
};

/// All ways `pattern` matches `node` extending `env`. Subset semantics:
/// absent pattern fields are unconstrained, pattern lists match injective,
/// order-independent selections of the model list.
std::vector<BindingEnv> match_elem(const PatternElem& pattern, const NodePtr& node, const BindingEnv& env,
                                   const AccessorTable& table);

/// Matches of the rule's positive pattern anywhere in `model` that pass the
/// negative elements, the where-assignments and the constraint, ordered by
/// document position of the matched nodes. Throws Error(Evaluation) when a
/// where-expression cannot be evaluated.
std::vector<Match> find_matches(const Rule& rule, const Decomposition& decomposition, const NodePtr& model,
                                const AccessorTable& table);
std::vector<Match> find_matches(const Rule& rule, const NodePtr& model, const AccessorTable& table);

/// True when some match of the negative element's body exists within its scope.
bool nac_blocks(const Nac& nac, const BindingEnv& env, const NodePtr& model, const AccessorTable& table);

/// Nodes a negative element scoped at `scope` may match: descendants of
/// `scope` without entering nested nodes of the scope's own nonterminal.
std::vector<NodePtr> scope_closure(const NodePtr& scope);

Value eval_expr(const Expr& expr, const BindingEnv& env, const std::map<std::string, Value>& values,
                const AccessorTable& table);

/// `{$name=RemoteNode, $sp=RemoteNodeState}`; element variables render as
/// `Nonterminal@file:line`.
std::string render_bindings(const Match& match);

/// Span of the first matched top-level node, or of its nearest ancestor that
/// has one.
std::optional<Span> match_location(const Match& match, const NodePtr& model);

}  // namespace cnctrans
