#pragma once

#include <functional>

#include "cnctrans/accessor.hpp"
#include "cnctrans/ast.hpp"
#include "cnctrans/match.hpp"
#include "cnctrans/rule.hpp"

namespace cnctrans {

inline constexpr int kDefaultApplicationCap = 10000;

/// Builds a fresh node from a template: name variables become their text,
/// element variables deep copies of the bound nodes. A NameList value placed
/// in a list field contributes one item per name. Throws Error(Evaluation)
/// when a variable is unbound or a value does not fit its slot.
MutableNodePtr instantiate(const PatternElem& template_pattern, const Match& match);

struct ApplyResult {
    NodePtr model;
    bool changed = false;
};

/// Applies the rule's edits for one match, in rule order, to a copy of
/// `model`. Creations append to the owner's list (top-level creations to the
/// matching list of the root) and are skipped when an equal sibling exists.
/// Throws Error(StaleMatch) when the match refers to nodes not in `model`.
ApplyResult apply_match(const Decomposition& decomposition, const Match& match, const NodePtr& model,
                        const AccessorTable& table);

/// Called for every changing application with the match and the model it
/// was found in.
using ApplyObserver = std::function<void(const Match&, const NodePtr& before)>;

struct LoopResult {
    NodePtr model;
    int applications = 0;
};

/// Applies the first changing match until none is left. Throws
/// Error(CapExceeded) when a further changing match exists after `cap`
/// applications.
LoopResult apply_rule_loop(const Rule& rule, const Decomposition& decomposition, const NodePtr& model,
                           const AccessorTable& table, int cap = kDefaultApplicationCap,
                           const ApplyObserver& observer = nullptr);

/// Applies the first changing match, if any.
LoopResult apply_rule_once(const Rule& rule, const Decomposition& decomposition, const NodePtr& model,
                           const AccessorTable& table, const ApplyObserver& observer = nullptr);

}  // namespace cnctrans
