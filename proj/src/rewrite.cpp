#include "cnctrans/rewrite.hpp"

#include <algorithm>

#include "cnctrans/error.hpp"

namespace cnctrans {

namespace {

[[noreturn]] void fail(const std::string& message) { throw Error(ErrorKind::Evaluation, message); }

std::vector<std::string> name_values(const NameRef& ref, const Match& m) {
    switch (ref.kind) {
        case NameRef::Kind::Literal: return {ref.text};
        case NameRef::Kind::Anon: fail("$_ cannot be instantiated");
        case NameRef::Kind::Var: break;
    }
    if (auto it = m.env.names.find(ref.text); it != m.env.names.end()) return {it->second};
    auto it = m.values.find(ref.text);
    if (it == m.values.end()) fail("unbound variable $" + ref.text + " in template of " + m.rule);
    const Value& v = it->second;
    if (const auto* s = std::get_if<std::string>(&v)) return {*s};
    if (const auto* i = std::get_if<std::int64_t>(&v)) return {std::to_string(*i)};
    if (const auto* names = std::get_if<NameList>(&v)) return *names;
    fail("$" + ref.text + " holds a Bool, which cannot be placed in a model");
}

std::vector<Item> instantiate_item(const PatternItem& item, const Match& m) {
    if (const auto* p = std::get_if<PatternPtr>(&item)) return {NodePtr(instantiate(**p, m))};
    if (const auto* ref = std::get_if<NameRef>(&item)) {
        std::vector<Item> out;
        for (std::string& s : name_values(*ref, m)) out.emplace_back(std::move(s));
        return out;
    }
    if (const auto* q = std::get_if<QualifiedPattern>(&item)) {
        std::string joined;
        for (std::size_t i = 0; i < q->segments.size(); ++i) {
            std::vector<std::string> parts = name_values(q->segments[i], m);
            if (parts.size() != 1) fail("a list of names cannot form one segment of a qualified name");
            if (i) joined += ".";
            joined += parts.front();
        }
        return {joined};
    }
    return {std::get<TokenLiteral>(item).text};
}

/// Label of the root's list field that can hold a node of `nonterminal`.
std::string root_slot(const AstNode& root, const std::string& nonterminal, const GrammarSpec& g) {
    if (const Production* p = g.production(root.nonterminal())) {
        for (const RhsElement& slot : p->body) {
            if (slot.kind != RhsElement::Kind::List) continue;
            const RhsElement& e = slot.element();
            if (e.kind == RhsElement::Kind::Nonterminal && g.is_subtype(nonterminal, e.text)) return slot.label;
        }
    }
    fail("cannot add a " + nonterminal + " at the top level of a " + root.nonterminal());
}

bool is_list_slot(const AstNode& owner, const std::string& label, const GrammarSpec& g) {
    if (const FieldValue* f = owner.field(label)) return std::holds_alternative<std::vector<Item>>(*f);
    const Production* p = g.production(owner.nonterminal());
    const RhsElement* slot = p ? p->field_slot(label) : nullptr;
    if (!slot) fail(owner.nonterminal() + " has no field '" + label + "'");
    return slot->kind == RhsElement::Kind::List;
}

void insert_created(AstNode& owner, const std::string& label, NodePtr created, const GrammarSpec& g) {
    if (is_list_slot(owner, label, g)) {
        std::vector<Item>* list = owner.list(label);
        if (!list) {
            owner.set(label, std::vector<Item>{});
            list = owner.list(label);
        }
        Item item = created;
        for (const Item& existing : *list) {
            if (structurally_equal(existing, item)) return;
        }
        list->push_back(std::move(item));
        return;
    }
    if (const FieldValue* f = owner.field(label)) {
        if (const Item* existing = std::get_if<Item>(f); existing && structurally_equal(*existing, Item(created))) return;
    }
    owner.set(label, Item(std::move(created)));
}

/// Replaces (or with a null replacement removes) `target` inside `root`.
void substitute(const MutableNodePtr& root, const AstNode* target, const NodePtr& replacement) {
    auto links = parent_links(root);
    auto it = links.find(target);
    if (it == links.end()) {
        if (target == root.get()) fail("the model root cannot be deleted or replaced");
        return;  // already gone together with an ancestor
    }
    auto* parent = const_cast<AstNode*>(it->second.parent);
    const ParentLink& link = it->second;
    if (link.index) {
        std::vector<Item>& list = *parent->list(link.label);
        if (replacement) {
            list[*link.index] = replacement;
        } else {
            list.erase(list.begin() + static_cast<std::ptrdiff_t>(*link.index));
        }
    } else if (replacement) {
        parent->set(link.label, Item(replacement));
    } else {
        parent->erase(link.label);
    }
}

}  // namespace

MutableNodePtr instantiate(const PatternElem& t, const Match& m) {
    if (t.kind == PatternElem::Kind::VarBlack) {
        auto it = m.env.elements.find(t.var);
        if (it == m.env.elements.end()) fail("unbound variable $" + t.var + " in template of " + m.rule);
        return deep_copy(*it->second);
    }
    if (t.kind != PatternElem::Kind::Concrete) {
        fail("a " + std::string(pattern_kind_name(t.kind)) + " element cannot be instantiated");
    }
    auto node = std::make_shared<AstNode>(t.nonterminal);
    for (const auto& [label, field] : t.fields) {
        if (const auto* item = std::get_if<PatternItem>(&field)) {
            std::vector<Item> items = instantiate_item(*item, m);
            if (items.size() != 1) fail("field '" + label + "' of " + t.nonterminal + " takes exactly one value");
            node->set(label, std::move(items.front()));
            continue;
        }
        std::vector<Item> items;
        for (const PatternItem& i : std::get<std::vector<PatternItem>>(field)) {
            for (Item& produced : instantiate_item(i, m)) items.push_back(std::move(produced));
        }
        node->set(label, std::move(items));
    }
    return node;
}

ApplyResult apply_match(const Decomposition& d, const Match& match, const NodePtr& model,
                        const AccessorTable& table) {
    const GrammarSpec& g = table.grammar();
    std::map<const AstNode*, MutableNodePtr> mapping;
    MutableNodePtr root = deep_copy(*model, &mapping);
    for (const auto& [id, node] : match.env.correspondence) {
        if (!mapping.count(node.get())) {
            throw Error(ErrorKind::StaleMatch, "match of " + match.rule + " refers to a " + node->nonterminal() +
                                                   " that is not part of the model");
        }
    }
    auto resolve = [&](int id) -> AstNode* {
        auto it = match.env.correspondence.find(id);
        if (it == match.env.correspondence.end()) {
            throw Error(ErrorKind::StaleMatch, "match of " + match.rule + " lacks pattern element " + std::to_string(id));
        }
        return mapping.at(it->second.get()).get();
    };

    for (const Edit& edit : d.edits) {
        switch (edit.kind) {
            case Edit::Kind::Create: {
                NodePtr created = instantiate(*edit.element->right, match);
                if (edit.owner_id < 0) {
                    insert_created(*root, root_slot(*root, created->nonterminal(), g), created, g);
                } else {
                    insert_created(*resolve(edit.owner_id), edit.label, created, g);
                }
                break;
            }
            case Edit::Kind::Delete: substitute(root, resolve(edit.target_id), nullptr); break;
            case Edit::Kind::Replace: {
                NodePtr replacement = instantiate(*edit.element->right, match);
                substitute(root, resolve(edit.target_id), replacement);
                break;
            }
        }
    }
    ApplyResult result;
    result.changed = !structurally_equal(*model, *root);
    result.model = result.changed ? NodePtr(root) : model;
    return result;
}

namespace {

/// One step: applies the first changing match. Returns false at fixpoint.
bool step(const Rule& rule, const Decomposition& d, NodePtr& model, const AccessorTable& table,
          const ApplyObserver& observer, const std::function<void()>& before_apply) {
    for (const Match& m : find_matches(rule, d, model, table)) {
        ApplyResult r = apply_match(d, m, model, table);
        if (!r.changed) continue;
        if (before_apply) before_apply();
        if (observer) observer(m, model);
        model = r.model;
        return true;
    }
    return false;
}

}  // namespace

LoopResult apply_rule_loop(const Rule& rule, const Decomposition& d, const NodePtr& model,
                           const AccessorTable& table, int cap, const ApplyObserver& observer) {
    if (cap < 1) throw Error(ErrorKind::CapExceeded, "application cap must be at least 1");
    LoopResult result{model, 0};
    auto guard = [&] {
        if (result.applications >= cap) {
            throw Error(ErrorKind::CapExceeded, "transformation " + rule.name + " still changes the model after " +
                                                    std::to_string(cap) +
                                                    " applications; the loop probably does not terminate");
        }
    };
    while (step(rule, d, result.model, table, observer, guard)) ++result.applications;
    return result;
}

LoopResult apply_rule_once(const Rule& rule, const Decomposition& d, const NodePtr& model,
                           const AccessorTable& table, const ApplyObserver& observer) {
    LoopResult result{model, 0};
    if (step(rule, d, result.model, table, observer, nullptr)) result.applications = 1;
    return result;
}

}  // namespace cnctrans
