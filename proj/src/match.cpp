#include "cnctrans/match.hpp"

#include <algorithm>
#include <set>

#include "cnctrans/error.hpp"

namespace cnctrans {

namespace {

std::vector<std::string> split_dots(const std::string& text) {
    std::vector<std::string> parts;
    std::size_t start = 0;
    while (true) {
        std::size_t dot = text.find('.', start);
        parts.push_back(text.substr(start, dot == std::string::npos ? std::string::npos : dot - start));
        if (dot == std::string::npos) return parts;
        start = dot + 1;
    }
}

bool bind_name(const NameRef& ref, const std::string& text, BindingEnv& env) {
    switch (ref.kind) {
        case NameRef::Kind::Anon: return true;
        case NameRef::Kind::Literal: return ref.text == text;
        case NameRef::Kind::Var: {
            auto [it, inserted] = env.names.emplace(ref.text, text);
            return inserted || it->second == text;
        }
    }
    return false;
}

bool bind_element(const std::string& var, const NodePtr& node, BindingEnv& env) {
    if (var.empty() || var == "_") return true;
    auto [it, inserted] = env.elements.emplace(var, node);
    return inserted || it->second == node;
}

bool int_equal(const std::string& a, const std::string& b) {
    try {
        return int_token_value(a) == int_token_value(b);
    } catch (const Error&) {
        return a == b;
    }
}

class Matcher {
public:
    explicit Matcher(const AccessorTable& table) : table_(table), grammar_(table.grammar()) {}

    /// Cheap type pre-check used to filter top-level candidates.
    bool may_match(const PatternElem& p, const AstNode& node) const {
        if (grammar_.is_subtype(node.nonterminal(), p.nonterminal)) return true;
        return p.kind == PatternElem::Kind::Concrete && alias_for(p, node) != nullptr;
    }

    std::vector<BindingEnv> elem(const PatternElem& p, const NodePtr& node, const BindingEnv& env) const {
        std::vector<BindingEnv> out;
        switch (p.kind) {
            case PatternElem::Kind::VarBlack:
            case PatternElem::Kind::VarWhite: {
                if (!grammar_.is_subtype(node->nonterminal(), p.nonterminal)) return out;
                BindingEnv e = env;
                if (!bind_element(p.var, node, e)) return out;
                e.correspondence[p.id] = node;
                if (p.kind == PatternElem::Kind::VarBlack) {
                    out.push_back(std::move(e));
                    return out;
                }
                return elem(*p.body, node, e);
            }
            case PatternElem::Kind::Concrete: return concrete(p, node, env);
            case PatternElem::Kind::Neg:
            case PatternElem::Kind::Repl:
                throw Error(ErrorKind::Evaluation, "cannot match a " + std::string(pattern_kind_name(p.kind)) +
                                                       " element directly");
        }
        return out;
    }

private:
    const PatternAlias* alias_for(const PatternElem& p, const AstNode& node) const {
        for (const PatternAlias& a : table_.aliases()) {
            if (a.pattern_nonterminal != p.nonterminal || a.model_nonterminal != node.nonterminal()) continue;
            auto it = p.fields.find(a.empty_field);
            if (it == p.fields.end()) continue;
            const auto* items = std::get_if<std::vector<PatternItem>>(&it->second);
            if (items && items->empty()) return &a;
        }
        return nullptr;
    }

    std::vector<BindingEnv> concrete(const PatternElem& p, const NodePtr& node, const BindingEnv& env) const {
        std::vector<BindingEnv> envs;
        if (node->nonterminal() == p.nonterminal) {
            BindingEnv start = env;
            start.correspondence[p.id] = node;
            envs.push_back(std::move(start));
            for (const auto& [label, field] : p.fields) {
                std::vector<BindingEnv> next;
                for (const BindingEnv& e : envs) this->field(field, node->field(label), e, next);
                envs = std::move(next);
                if (envs.empty()) break;
            }
            return envs;
        }
        const PatternAlias* alias = alias_for(p, *node);
        if (!alias) return envs;
        BindingEnv e = env;
        e.correspondence[p.id] = node;
        for (const auto& [label, field] : p.fields) {
            if (label == alias->empty_field) continue;
            auto mapped = alias->field_map.find(label);
            const auto* item = std::get_if<PatternItem>(&field);
            if (mapped == alias->field_map.end() || !item) return {};
            const FieldValue* model_field = node->field(mapped->second);
            if (!model_field) return {};
            const Item* model_item = std::get_if<Item>(model_field);
            if (!model_item) {
                const auto& list = std::get<std::vector<Item>>(*model_field);
                if (list.empty()) return {};
                model_item = &list.front();
            }
            std::vector<BindingEnv> next;
            this->item(*item, *model_item, e, next);
            if (next.empty()) return {};
            // Alias fields are names; they bind deterministically.
            e = std::move(next.front());
        }
        envs.push_back(std::move(e));
        return envs;
    }

    void field(const PatternField& pattern, const FieldValue* model, const BindingEnv& env,
               std::vector<BindingEnv>& out) const {
        if (const auto* single = std::get_if<PatternItem>(&pattern)) {
            if (!model) return;
            const Item* model_item = std::get_if<Item>(model);
            if (!model_item) return;
            item(*single, *model_item, env, out);
            return;
        }
        const auto& items = std::get<std::vector<PatternItem>>(pattern);
        if (items.empty()) {
            out.push_back(env);
            return;
        }
        if (!model) return;
        const auto* model_items = std::get_if<std::vector<Item>>(model);
        if (!model_items || model_items->size() < items.size()) return;
        std::vector<bool> used(model_items->size(), false);
        list(items, 0, *model_items, used, env, out);
    }

    void list(const std::vector<PatternItem>& pattern, std::size_t i, const std::vector<Item>& model,
              std::vector<bool>& used, const BindingEnv& env, std::vector<BindingEnv>& out) const {
        if (i == pattern.size()) {
            out.push_back(env);
            return;
        }
        for (std::size_t j = 0; j < model.size(); ++j) {
            if (used[j]) continue;
            std::vector<BindingEnv> here;
            item(pattern[i], model[j], env, here);
            if (here.empty()) continue;
            used[j] = true;
            for (const BindingEnv& e : here) list(pattern, i + 1, model, used, e, out);
            used[j] = false;
        }
    }

    void item(const PatternItem& pattern, const Item& model, const BindingEnv& env,
              std::vector<BindingEnv>& out) const {
        if (const auto* p = std::get_if<PatternPtr>(&pattern)) {
            const auto* node = std::get_if<NodePtr>(&model);
            if (!node) return;
            for (BindingEnv& e : elem(**p, *node, env)) out.push_back(std::move(e));
            return;
        }
        const auto* text = std::get_if<std::string>(&model);
        if (!text) return;
        BindingEnv e = env;
        if (const auto* ref = std::get_if<NameRef>(&pattern)) {
            if (bind_name(*ref, *text, e)) out.push_back(std::move(e));
            return;
        }
        if (const auto* q = std::get_if<QualifiedPattern>(&pattern)) {
            std::vector<std::string> parts = split_dots(*text);
            if (parts.size() != q->segments.size()) return;
            for (std::size_t k = 0; k < parts.size(); ++k) {
                if (!bind_name(q->segments[k], parts[k], e)) return;
            }
            out.push_back(std::move(e));
            return;
        }
        const auto& literal = std::get<TokenLiteral>(pattern);
        if (literal.is_int ? int_equal(literal.text, *text) : literal.text == *text) out.push_back(std::move(e));
    }

    const AccessorTable& table_;
    const GrammarSpec& grammar_;
};

void collect_closure(const NodePtr& node, const std::string& stop, std::vector<NodePtr>& out) {
    for (const NodePtr& child : child_nodes(*node)) {
        out.push_back(child);
        if (child->nonterminal() != stop) collect_closure(child, stop, out);
    }
}

[[noreturn]] void type_error(const std::string& message) { throw Error(ErrorKind::Evaluation, message); }

}  // namespace

std::vector<BindingEnv> match_elem(const PatternElem& pattern, const NodePtr& node, const BindingEnv& env,
                                   const AccessorTable& table) {
    return Matcher(table).elem(pattern, node, env);
}

std::vector<NodePtr> scope_closure(const NodePtr& scope) {
    std::vector<NodePtr> out;
    collect_closure(scope, scope->nonterminal(), out);
    return out;
}

bool nac_blocks(const Nac& nac, const BindingEnv& env, const NodePtr& model, const AccessorTable& table) {
    std::vector<NodePtr> candidates;
    if (nac.scope_id < 0) {
        candidates = preorder(model);
    } else {
        auto it = env.correspondence.find(nac.scope_id);
        if (it == env.correspondence.end()) return false;
        candidates = scope_closure(it->second);
    }
    Matcher matcher(table);
    const PatternElem& body = *nac.element->body;
    for (const NodePtr& candidate : candidates) {
        if (!matcher.may_match(body, *candidate)) continue;
        if (!matcher.elem(body, candidate, env).empty()) return true;
    }
    return false;
}

Value eval_expr(const Expr& e, const BindingEnv& env, const std::map<std::string, Value>& values,
                const AccessorTable& table) {
    auto eval = [&](const ExprPtr& sub) { return eval_expr(*sub, env, values, table); };
    auto as_bool = [&](const ExprPtr& sub) {
        Value v = eval(sub);
        const bool* b = std::get_if<bool>(&v);
        if (!b) type_error("expected a boolean, got " + std::string(value_type_name(type_of(v))) + " from " + to_string(*sub));
        return *b;
    };
    switch (e.kind) {
        case Expr::Kind::VarRef: {
            if (auto it = values.find(e.text); it != values.end()) return it->second;
            if (auto it = env.names.find(e.text); it != env.names.end()) return it->second;
            if (env.elements.count(e.text)) type_error("element variable $" + e.text + " used as a value");
            type_error("unbound variable $" + e.text);
        }
        case Expr::Kind::MethodCall: {
            const Expr& receiver = *e.operands[0];
            if (receiver.kind == Expr::Kind::VarRef) {
                if (auto it = env.elements.find(receiver.text); it != env.elements.end()) {
                    return table.call(*it->second, e.text);
                }
            }
            Value v = eval(e.operands[0]);
            type_error("no accessor " + e.text + "() on " + std::string(value_type_name(type_of(v))));
        }
        case Expr::Kind::Concat: {
            Value left = eval(e.operands[0]);
            Value right = eval(e.operands[1]);
            const auto* s = std::get_if<std::string>(&left);
            if (!s) type_error("concat() needs a String receiver, got " + std::string(value_type_name(type_of(left))));
            if (const auto* r = std::get_if<std::string>(&right)) return *s + *r;
            if (const auto* r = std::get_if<std::int64_t>(&right)) return *s + std::to_string(*r);
            type_error("concat() cannot append a " + std::string(value_type_name(type_of(right))));
        }
        case Expr::Kind::StringLit: return e.text;
        case Expr::Kind::IntLit: return int_token_value(e.text);
        case Expr::Kind::Cmp: {
            Value left = eval(e.operands[0]);
            Value right = eval(e.operands[1]);
            if (left.index() != right.index()) {
                type_error("cannot compare " + std::string(value_type_name(type_of(left))) + " with " +
                           std::string(value_type_name(type_of(right))));
            }
            if (e.text == "==") return left == right;
            if (e.text == "!=") return left != right;
            const auto* l = std::get_if<std::int64_t>(&left);
            if (!l) type_error("operator " + e.text + " needs Int operands, got " + std::string(value_type_name(type_of(left))));
            std::int64_t r = std::get<std::int64_t>(right);
            if (e.text == "<") return *l < r;
            if (e.text == "<=") return *l <= r;
            if (e.text == ">") return *l > r;
            if (e.text == ">=") return *l >= r;
            type_error("unknown operator " + e.text);
        }
        case Expr::Kind::And:
            for (const ExprPtr& op : e.operands) {
                if (!as_bool(op)) return false;
            }
            return true;
        case Expr::Kind::Or:
            for (const ExprPtr& op : e.operands) {
                if (as_bool(op)) return true;
            }
            return false;
        case Expr::Kind::Not: return !as_bool(e.operands[0]);
    }
    type_error("unknown expression");
}

std::vector<Match> find_matches(const Rule& rule, const Decomposition& d, const NodePtr& model,
                                const AccessorTable& table) {
    Matcher matcher(table);
    std::vector<NodePtr> nodes = preorder(model);
    std::map<const AstNode*, std::size_t> position;
    for (std::size_t i = 0; i < nodes.size(); ++i) position.emplace(nodes[i].get(), i);

    struct Partial {
        BindingEnv env;
        std::vector<NodePtr> tops;
    };
    std::vector<Partial> partials(1);
    for (const PatternPtr& top : d.lhs) {
        std::vector<NodePtr> candidates;
        for (const NodePtr& n : nodes) {
            if (matcher.may_match(*top, *n)) candidates.push_back(n);
        }
        std::vector<Partial> next;
        for (const Partial& partial : partials) {
            for (const NodePtr& n : candidates) {
                bool taken = std::find(partial.tops.begin(), partial.tops.end(), n) != partial.tops.end();
                if (taken) {
                    bool same_var = top->kind != PatternElem::Kind::Concrete && top->var != "_" &&
                                    partial.env.elements.count(top->var) && partial.env.elements.at(top->var) == n;
                    if (!same_var) continue;
                }
                for (BindingEnv& e : matcher.elem(*top, n, partial.env)) {
                    Partial extended{std::move(e), partial.tops};
                    extended.tops.push_back(n);
                    next.push_back(std::move(extended));
                }
            }
        }
        partials = std::move(next);
        if (partials.empty()) return {};
    }

    struct Keyed {
        std::vector<std::size_t> key;
        std::vector<std::pair<std::string, std::string>> names;
        Match match;
    };
    std::vector<Keyed> keyed;
    for (Partial& partial : partials) {
        bool blocked = false;
        for (const Nac& nac : d.nacs) {
            if (nac_blocks(nac, partial.env, model, table)) {
                blocked = true;
                break;
            }
        }
        if (blocked) continue;
        Match m;
        m.rule = rule.name;
        m.env = std::move(partial.env);
        m.top_nodes = std::move(partial.tops);
        for (const Assignment& a : rule.assignments) m.values[a.var] = eval_expr(*a.value, m.env, m.values, table);
        if (rule.constraint) {
            Value ok = eval_expr(*rule.constraint, m.env, m.values, table);
            const bool* b = std::get_if<bool>(&ok);
            if (!b) type_error("constraint of " + rule.name + " is not a boolean");
            if (!*b) continue;
        }
        Keyed k;
        for (const NodePtr& n : m.top_nodes) k.key.push_back(position.at(n.get()));
        for (const auto& [id, n] : m.env.correspondence) k.key.push_back(position.at(n.get()));
        k.names.assign(m.env.names.begin(), m.env.names.end());
        k.match = std::move(m);
        keyed.push_back(std::move(k));
    }
    std::stable_sort(keyed.begin(), keyed.end(), [](const Keyed& a, const Keyed& b) {
        if (a.key != b.key) return a.key < b.key;
        return a.names < b.names;
    });
    std::vector<Match> out;
    for (std::size_t i = 0; i < keyed.size(); ++i) {
        if (i > 0 && keyed[i].key == keyed[i - 1].key && keyed[i].match.env == out.back().env) continue;
        out.push_back(std::move(keyed[i].match));
    }
    return out;
}

std::vector<Match> find_matches(const Rule& rule, const NodePtr& model, const AccessorTable& table) {
    return find_matches(rule, decompose(rule), model, table);
}

std::string render_bindings(const Match& match) {
    std::map<std::string, std::string> rendered;
    for (const auto& [var, node] : match.env.elements) {
        std::string text = node->nonterminal();
        if (node->span()) text += "@" + node->span()->file_name() + ":" + std::to_string(node->span()->line);
        rendered[var] = text;
    }
    for (const auto& [var, text] : match.env.names) rendered[var] = text;
    for (const auto& [var, value] : match.values) rendered[var] = render_value(value);
    std::string out = "{";
    bool first = true;
    for (const auto& [var, text] : rendered) {
        if (!first) out += ", ";
        first = false;
        out += "$" + var + "=" + text;
    }
    return out + "}";
}

std::optional<Span> match_location(const Match& match, const NodePtr& model) {
    if (match.top_nodes.empty()) return model ? model->span() : std::nullopt;
    const AstNode* node = match.top_nodes.front().get();
    if (node->span()) return node->span();
    auto links = parent_links(model);
    while (node) {
        if (node->span()) return node->span();
        auto it = links.find(node);
        node = it == links.end() ? nullptr : it->second.parent;
    }
    return std::nullopt;
}

}  // namespace cnctrans
