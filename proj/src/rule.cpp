#include "cnctrans/rule.hpp"

#include <algorithm>
#include <functional>
#include <set>

#include "cnctrans/derive.hpp"
#include "cnctrans/error.hpp"
#include "cnctrans/parser.hpp"

namespace cnctrans {

std::string_view pattern_kind_name(PatternElem::Kind kind) {
    switch (kind) {
        case PatternElem::Kind::Concrete: return "Concrete";
        case PatternElem::Kind::VarBlack: return "VarBlack";
        case PatternElem::Kind::VarWhite: return "VarWhite";
        case PatternElem::Kind::Neg: return "Neg";
        case PatternElem::Kind::Repl: return "Repl";
    }
    return "?";
}

namespace {

bool item_equal(const PatternItem& a, const PatternItem& b) {
    if (a.index() != b.index()) return false;
    if (const auto* pa = std::get_if<PatternPtr>(&a)) return pattern_equal(*pa, std::get<PatternPtr>(b));
    return a == b;
}

bool field_equal(const PatternField& a, const PatternField& b) {
    if (a.index() != b.index()) return false;
    if (const auto* ia = std::get_if<PatternItem>(&a)) return item_equal(*ia, std::get<PatternItem>(b));
    const auto& la = std::get<std::vector<PatternItem>>(a);
    const auto& lb = std::get<std::vector<PatternItem>>(b);
    if (la.size() != lb.size()) return false;
    for (std::size_t i = 0; i < la.size(); ++i) {
        if (!item_equal(la[i], lb[i])) return false;
    }
    return true;
}

PatternItem clone_item(const PatternItem& item) {
    if (const auto* p = std::get_if<PatternPtr>(&item)) return *p ? clone_pattern(**p) : PatternPtr();
    return item;
}

std::string name_ref_text(const NameRef& ref) {
    switch (ref.kind) {
        case NameRef::Kind::Literal: return ref.text;
        case NameRef::Kind::Var: return "$" + ref.text;
        case NameRef::Kind::Anon: return "$_";
    }
    return {};
}

std::string item_text(const PatternItem& item) {
    if (const auto* p = std::get_if<PatternPtr>(&item)) return *p ? to_debug_string(**p) : "null";
    if (const auto* n = std::get_if<NameRef>(&item)) return name_ref_text(*n);
    if (const auto* q = std::get_if<QualifiedPattern>(&item)) {
        std::string out;
        for (std::size_t i = 0; i < q->segments.size(); ++i) {
            if (i) out += ".";
            out += name_ref_text(q->segments[i]);
        }
        return out;
    }
    return std::get<TokenLiteral>(item).text;
}

}  // namespace

bool pattern_equal(const PatternElem& a, const PatternElem& b) {
    if (a.kind != b.kind || a.id != b.id || a.nonterminal != b.nonterminal || a.var != b.var) return false;
    if (!pattern_equal(a.body, b.body) || !pattern_equal(a.left, b.left) || !pattern_equal(a.right, b.right)) {
        return false;
    }
    if (a.fields.size() != b.fields.size()) return false;
    for (auto ia = a.fields.begin(), ib = b.fields.begin(); ia != a.fields.end(); ++ia, ++ib) {
        if (ia->first != ib->first || !field_equal(ia->second, ib->second)) return false;
    }
    return true;
}

bool pattern_equal(const PatternPtr& a, const PatternPtr& b) {
    if (!a || !b) return !a && !b;
    return pattern_equal(*a, *b);
}

PatternPtr clone_pattern(const PatternElem& pattern) {
    auto out = std::make_shared<PatternElem>(pattern);
    if (pattern.body) out->body = clone_pattern(*pattern.body);
    if (pattern.left) out->left = clone_pattern(*pattern.left);
    if (pattern.right) out->right = clone_pattern(*pattern.right);
    for (auto& [label, field] : out->fields) {
        if (auto* item = std::get_if<PatternItem>(&field)) {
            *item = clone_item(*item);
        } else {
            for (PatternItem& i : std::get<std::vector<PatternItem>>(field)) i = clone_item(i);
        }
    }
    return out;
}

std::string to_debug_string(const PatternElem& p) {
    switch (p.kind) {
        case PatternElem::Kind::VarBlack: return p.nonterminal + " $" + p.var;
        case PatternElem::Kind::VarWhite: return p.nonterminal + " $" + p.var + " [[ " + to_debug_string(*p.body) + " ]]";
        case PatternElem::Kind::Neg: return "not [[ " + to_debug_string(*p.body) + " ]]";
        case PatternElem::Kind::Repl:
            return "[[ " + (p.left ? to_debug_string(*p.left) + " " : std::string()) + ":-" +
                   (p.right ? " " + to_debug_string(*p.right) : std::string()) + " ]]";
        case PatternElem::Kind::Concrete: break;
    }
    std::string out = p.nonterminal + "{";
    bool first = true;
    for (const auto& [label, field] : p.fields) {
        if (!first) out += ", ";
        first = false;
        out += label + "=";
        if (const auto* item = std::get_if<PatternItem>(&field)) {
            out += item_text(*item);
        } else {
            out += "[";
            const auto& items = std::get<std::vector<PatternItem>>(field);
            for (std::size_t i = 0; i < items.size(); ++i) {
                if (i) out += ", ";
                out += item_text(items[i]);
            }
            out += "]";
        }
    }
    return out + "}";
}

namespace {

int precedence(const Expr& e) {
    switch (e.kind) {
        case Expr::Kind::Or: return 1;
        case Expr::Kind::And: return 2;
        case Expr::Kind::Not: return 3;
        case Expr::Kind::Cmp: return 4;
        default: return 5;
    }
}

// Renders `e` with parentheses when it binds weaker than `min`.
std::string operand(const Expr& e, int min) {
    std::string text = to_string(e);
    return precedence(e) < min ? "(" + text + ")" : text;
}

}  // namespace

std::string to_string(const Expr& e) {
    switch (e.kind) {
        case Expr::Kind::VarRef: return "$" + e.text;
        case Expr::Kind::MethodCall: return operand(*e.operands[0], 5) + "." + e.text + "()";
        case Expr::Kind::Concat: return operand(*e.operands[0], 5) + ".concat(" + to_string(*e.operands[1]) + ")";
        case Expr::Kind::StringLit: {
            std::string out = "\"";
            for (char c : e.text) {
                if (c == '"' || c == '\\') out += '\\';
                out += c;
            }
            return out + "\"";
        }
        case Expr::Kind::IntLit: return e.text;
        case Expr::Kind::Cmp: return operand(*e.operands[0], 5) + " " + e.text + " " + operand(*e.operands[1], 5);
        case Expr::Kind::And:
        case Expr::Kind::Or: {
            std::string out;
            for (std::size_t i = 0; i < e.operands.size(); ++i) {
                if (i) out += e.kind == Expr::Kind::And ? " && " : " || ";
                out += operand(*e.operands[i], precedence(e) + 1);
            }
            return out;
        }
        case Expr::Kind::Not: return "!" + operand(*e.operands[0], 5);
    }
    return {};
}

// ---------------------------------------------------------------------------
// Decomposition

namespace {

class Decomposer {
public:
    Decomposition run(const Rule& rule) {
        for (std::size_t i = 0; i < rule.elements.size(); ++i) {
            if (PatternPtr kept = visit_slot(rule.elements[i], -1, "", i)) out_.lhs.push_back(kept);
        }
        auto by_element_id = [](const auto& a, const auto& b) { return a.element->id < b.element->id; };
        std::sort(out_.nacs.begin(), out_.nacs.end(), by_element_id);
        std::sort(out_.edits.begin(), out_.edits.end(), by_element_id);
        return std::move(out_);
    }

private:
    /// Returns the positive remainder of an element placed in a slot, or null.
    PatternPtr visit_slot(const PatternPtr& p, int owner, const std::string& label,
                          std::optional<std::size_t> position) {
        if (p->kind == PatternElem::Kind::Neg) {
            out_.nacs.push_back({owner, label, position, p});
            return nullptr;
        }
        if (p->kind == PatternElem::Kind::Repl) {
            Edit edit;
            edit.owner_id = owner;
            edit.label = label;
            edit.position = position;
            edit.element = p;
            if (!p->left) {
                edit.kind = Edit::Kind::Create;
                out_.edits.push_back(std::move(edit));
                return nullptr;
            }
            edit.kind = p->right ? Edit::Kind::Replace : Edit::Kind::Delete;
            edit.target_id = p->left->id;
            out_.edits.push_back(std::move(edit));
            return strip(*p->left);
        }
        return strip(*p);
    }

    PatternPtr strip(const PatternElem& p) {
        auto out = std::make_shared<PatternElem>();
        out->kind = p.kind;
        out->id = p.id;
        out->nonterminal = p.nonterminal;
        out->var = p.var;
        out->span = p.span;
        if (p.body) out->body = strip(*p.body);
        for (const auto& [label, field] : p.fields) {
            if (const auto* item = std::get_if<PatternItem>(&field)) {
                if (const auto* child = std::get_if<PatternPtr>(item)) {
                    if (PatternPtr kept = visit_slot(*child, p.id, label, std::nullopt)) out->fields[label] = PatternItem(kept);
                } else {
                    out->fields[label] = *item;
                }
                continue;
            }
            std::vector<PatternItem> kept_items;
            const auto& items = std::get<std::vector<PatternItem>>(field);
            for (std::size_t i = 0; i < items.size(); ++i) {
                if (const auto* child = std::get_if<PatternPtr>(&items[i])) {
                    if (PatternPtr kept = visit_slot(*child, p.id, label, i)) kept_items.emplace_back(kept);
                } else {
                    kept_items.push_back(items[i]);
                }
            }
            // A list holding only negative or created elements is no longer
            // written empty, so it must not enable the empty-body alias.
            if (!kept_items.empty() || items.empty()) out->fields[label] = std::move(kept_items);
        }
        return out;
    }

    Decomposition out_;
};

void index_patterns(const PatternPtr& p, std::map<int, PatternElem*>& index) {
    if (!p) return;
    index[p->id] = p.get();
    index_patterns(p->body, index);
    index_patterns(p->left, index);
    index_patterns(p->right, index);
    for (auto& [label, field] : p->fields) {
        if (auto* item = std::get_if<PatternItem>(&field)) {
            if (auto* child = std::get_if<PatternPtr>(item)) index_patterns(*child, index);
        } else {
            for (PatternItem& i : std::get<std::vector<PatternItem>>(field)) {
                if (auto* child = std::get_if<PatternPtr>(&i)) index_patterns(*child, index);
            }
        }
    }
}

bool replace_target(PatternPtr& slot, int target_id, const PatternPtr& replacement) {
    if (!slot) return false;
    if (slot->id == target_id) {
        slot = replacement;
        return true;
    }
    if (replace_target(slot->body, target_id, replacement)) return true;
    for (auto& [label, field] : slot->fields) {
        if (auto* item = std::get_if<PatternItem>(&field)) {
            if (auto* child = std::get_if<PatternPtr>(item); child && replace_target(*child, target_id, replacement)) {
                return true;
            }
        } else {
            for (PatternItem& i : std::get<std::vector<PatternItem>>(field)) {
                if (auto* child = std::get_if<PatternPtr>(&i); child && replace_target(*child, target_id, replacement)) {
                    return true;
                }
            }
        }
    }
    return false;
}

}  // namespace

Decomposition decompose(const Rule& rule) { return Decomposer().run(rule); }

std::vector<PatternPtr> merge(const Decomposition& d) {
    std::vector<PatternPtr> top;
    for (const PatternPtr& p : d.lhs) top.push_back(clone_pattern(*p));

    for (const Edit& e : d.edits) {
        if (e.kind == Edit::Kind::Create) continue;
        PatternPtr repl = clone_pattern(*e.element);
        for (PatternPtr& p : top) {
            if (replace_target(p, e.target_id, repl)) break;
        }
    }

    struct Insertion {
        std::optional<std::size_t> position;
        PatternPtr element;
    };
    std::map<std::pair<int, std::string>, std::vector<Insertion>> inserts;
    for (const Edit& e : d.edits) {
        if (e.kind == Edit::Kind::Create) inserts[{e.owner_id, e.label}].push_back({e.position, clone_pattern(*e.element)});
    }
    for (const Nac& n : d.nacs) {
        inserts[{n.scope_id, n.label}].push_back({n.position, clone_pattern(*n.element)});
    }

    std::map<int, PatternElem*> index;
    for (const PatternPtr& p : top) index_patterns(p, index);

    for (auto& [key, items] : inserts) {
        std::stable_sort(items.begin(), items.end(), [](const Insertion& a, const Insertion& b) {
            return a.position.value_or(0) < b.position.value_or(0);
        });
        if (key.first < 0) {
            for (const Insertion& ins : items) {
                std::size_t at = std::min(ins.position.value_or(top.size()), top.size());
                top.insert(top.begin() + static_cast<std::ptrdiff_t>(at), ins.element);
            }
            continue;
        }
        PatternElem* owner = index.at(key.first);
        for (const Insertion& ins : items) {
            if (!ins.position) {
                owner->fields[key.second] = PatternItem(ins.element);
                continue;
            }
            auto& field = owner->fields[key.second];
            if (!std::holds_alternative<std::vector<PatternItem>>(field)) field = std::vector<PatternItem>{};
            auto& list = std::get<std::vector<PatternItem>>(field);
            std::size_t at = std::min(*ins.position, list.size());
            list.insert(list.begin() + static_cast<std::ptrdiff_t>(at), PatternItem(ins.element));
        }
    }
    return top;
}

const Rule& TransformationModule::rule(const std::string& rule_name) const {
    auto it = rules.find(rule_name);
    if (it == rules.end()) throw Error(ErrorKind::Compile, "module " + name + " has no transformation " + rule_name);
    return it->second;
}

const Decomposition& TransformationModule::decomposition(const std::string& rule_name) const {
    auto it = decompositions.find(rule_name);
    if (it == decompositions.end()) {
        throw Error(ErrorKind::Compile, "module " + name + " has no transformation " + rule_name);
    }
    return it->second;
}

// ---------------------------------------------------------------------------
// Compilation

namespace {

std::string location(const std::optional<Span>& span) {
    if (!span) return {};
    return span->file_name() + ":" + std::to_string(span->line) + ": ";
}

std::string strip_dollar(const std::string& var) { return var.size() > 1 && var[0] == '$' ? var.substr(1) : var; }

std::string decode_string(const std::string& lexeme) {
    std::string out;
    for (std::size_t i = 1; i + 1 < lexeme.size(); ++i) {
        char c = lexeme[i];
        if (c == '\\' && i + 2 < lexeme.size()) {
            char n = lexeme[++i];
            out += n == 'n' ? '\n' : n == 't' ? '\t' : n;
        } else {
            out += c;
        }
    }
    return out;
}

class RuleCompiler {
public:
    RuleCompiler(const AccessorTable& table, std::string rule_name, std::optional<Span> span)
        : table_(table), grammar_(table.grammar()), rule_name_(std::move(rule_name)), span_(std::move(span)) {}

    Rule compile(const NodePtr& rule_ast) {
        Rule rule;
        rule.name = rule_name_;
        rule.span = span_;
        for (const NodePtr& element : rule_ast->children("elements")) rule.elements.push_back(decode(element));
        if (NodePtr where = rule_ast->child("where")) {
            for (const NodePtr& a : where->children("assignments")) {
                rule.assignments.push_back({strip_dollar(*a->token("var")), decode_expr(a->child("value"))});
            }
            if (NodePtr c = where->child("constraint")) rule.constraint = decode_expr(c);
        }
        check(rule);
        return rule;
    }

private:
    [[noreturn]] void fail(const std::string& message, const std::optional<Span>& at = std::nullopt) const {
        throw Error(ErrorKind::Compile,
                    location(at ? at : span_) + "transformation " + rule_name_ + ": " + message);
    }

    // -- decoding -----------------------------------------------------------

    PatternPtr decode(const NodePtr& n) {
        auto [base, suffix] = derived::split(n->nonterminal());
        auto p = std::make_shared<PatternElem>();
        p->id = next_id_++;
        p->span = n->span();
        p->nonterminal = base;
        if (suffix == derived::kPat) {
            p->kind = PatternElem::Kind::Concrete;
            for (const auto& [label, value] : n->fields()) {
                if (const auto* item = std::get_if<Item>(&value)) {
                    p->fields[label] = decode_item(base, label, *item);
                } else {
                    std::vector<PatternItem> items;
                    for (const Item& i : std::get<std::vector<Item>>(value)) items.push_back(decode_item(base, label, i));
                    p->fields[label] = std::move(items);
                }
            }
        } else if (suffix == derived::kVarBlack || suffix == derived::kVarWhite) {
            p->kind = suffix == derived::kVarBlack ? PatternElem::Kind::VarBlack : PatternElem::Kind::VarWhite;
            p->var = strip_dollar(*n->token("var"));
            if (p->kind == PatternElem::Kind::VarWhite) p->body = decode(n->child("body"));
        } else if (suffix == derived::kNeg) {
            p->kind = PatternElem::Kind::Neg;
            p->body = decode(n->child("body"));
        } else if (suffix == derived::kRepl) {
            p->kind = PatternElem::Kind::Repl;
            if (NodePtr l = n->child("left")) p->left = decode(l);
            if (NodePtr r = n->child("right")) p->right = decode(r);
        } else {
            fail("unexpected pattern node " + n->nonterminal(), n->span());
        }
        return p;
    }

    static NameRef decode_name(const NodePtr& n) {
        if (n->nonterminal() == "NameVar") {
            std::string var = strip_dollar(*n->token("var"));
            return var == "_" ? NameRef::anon() : NameRef::var(var);
        }
        return NameRef::literal(*n->token("name"));
    }

    PatternItem decode_item(const std::string& owner, const std::string& label, const Item& item) {
        if (const auto* text = std::get_if<std::string>(&item)) {
            bool is_int = false;
            if (const Production* prod = grammar_.production(owner)) {
                const RhsElement* e = prod->field(label);
                is_int = e && e->kind == RhsElement::Kind::Token && e->token == TokenKind::Int;
            }
            return TokenLiteral{*text, is_int};
        }
        const NodePtr& node = std::get<NodePtr>(item);
        const std::string& kind = node->nonterminal();
        if (kind == "NameVar" || kind == "NameLit") return decode_name(node);
        if (kind == "QualifiedNamePat") {
            QualifiedPattern q;
            for (const NodePtr& segment : node->children("segments")) q.segments.push_back(decode_name(segment));
            return q;
        }
        return decode(node);
    }

    ExprPtr decode_expr(const NodePtr& n) {
        auto e = std::make_shared<Expr>();
        const std::string& kind = n->nonterminal();
        if (kind == "OrExpr" || kind == "AndExpr") {
            std::vector<NodePtr> ops = n->children("operands");
            if (ops.size() == 1) return decode_expr(ops[0]);
            e->kind = kind == "OrExpr" ? Expr::Kind::Or : Expr::Kind::And;
            for (const NodePtr& op : ops) e->operands.push_back(decode_expr(op));
        } else if (kind == "NotExpr") {
            e->kind = Expr::Kind::Not;
            e->operands.push_back(decode_expr(n->child("operand")));
        } else if (kind == "CmpExpr") {
            ExprPtr left = decode_expr(n->child("left"));
            NodePtr tail = n->child("tail");
            if (!tail) return left;
            e->kind = Expr::Kind::Cmp;
            e->text = *tail->token("op");
            e->operands = {left, decode_expr(tail->child("right"))};
        } else if (kind == "PostfixExpr") {
            ExprPtr current = decode_expr(n->child("primary"));
            for (const NodePtr& call : n->children("calls")) {
                auto c = std::make_shared<Expr>();
                std::string method = *call->token("method");
                std::vector<NodePtr> args = call->children("args");
                if (method == "concat") {
                    if (args.size() != 1) fail("concat() takes exactly one argument", call->span());
                    c->kind = Expr::Kind::Concat;
                    c->operands = {current, decode_expr(args[0])};
                } else {
                    if (!args.empty()) fail(method + "() takes no arguments", call->span());
                    c->kind = Expr::Kind::MethodCall;
                    c->text = method;
                    c->operands = {current};
                }
                current = c;
            }
            return current;
        } else if (kind == "VarExpr") {
            e->kind = Expr::Kind::VarRef;
            e->text = strip_dollar(*n->token("var"));
            if (e->text == "_") fail("$_ cannot be used in an expression", n->span());
        } else if (kind == "StringExpr") {
            e->kind = Expr::Kind::StringLit;
            e->text = decode_string(*n->token("value"));
        } else if (kind == "IntExpr") {
            e->kind = Expr::Kind::IntLit;
            e->text = std::to_string(int_token_value(*n->token("value")));
        } else if (kind == "ParenExpr") {
            return decode_expr(n->child("inner"));
        } else {
            fail("unexpected expression node " + kind, n->span());
        }
        return e;
    }

    // -- checks -------------------------------------------------------------

    enum class Context { Positive, Negative, Template };

    static void for_each_child(const PatternElem& p, const std::function<void(const PatternPtr&)>& fn) {
        for (const auto& [label, field] : p.fields) {
            if (const auto* item = std::get_if<PatternItem>(&field)) {
                if (const auto* child = std::get_if<PatternPtr>(item)) fn(*child);
            } else {
                for (const PatternItem& i : std::get<std::vector<PatternItem>>(field)) {
                    if (const auto* child = std::get_if<PatternPtr>(&i)) fn(*child);
                }
            }
        }
    }

    static void for_each_name(const PatternElem& p, const std::function<void(const NameRef&)>& fn) {
        auto visit = [&](const PatternItem& item) {
            if (const auto* n = std::get_if<NameRef>(&item)) fn(*n);
            if (const auto* q = std::get_if<QualifiedPattern>(&item)) {
                for (const NameRef& s : q->segments) fn(s);
            }
        };
        for (const auto& [label, field] : p.fields) {
            if (const auto* item = std::get_if<PatternItem>(&field)) {
                visit(*item);
            } else {
                for (const PatternItem& i : std::get<std::vector<PatternItem>>(field)) visit(i);
            }
        }
    }

    void collect(const PatternElem& p, Context ctx, Rule& rule) {
        switch (p.kind) {
            case PatternElem::Kind::Neg:
                if (ctx != Context::Positive) fail("negative element inside a negative element or template", p.span);
                collect(*p.body, Context::Negative, rule);
                return;
            case PatternElem::Kind::Repl:
                if (ctx != Context::Positive) fail("replacement inside a negative element or template", p.span);
                if (!p.left && !p.right) fail("replacement with neither side", p.span);
                if (p.left) collect(*p.left, Context::Positive, rule);
                if (p.right) {
                    templates_.push_back(p.right.get());
                    collect(*p.right, Context::Template, rule);
                }
                return;
            case PatternElem::Kind::VarWhite:
                if (ctx == Context::Template) fail("white-box variable $" + p.var + " inside a template", p.span);
                if (!grammar_.is_subtype(p.body->nonterminal, p.nonterminal)) {
                    fail("white-box variable $" + p.var + " of type " + p.nonterminal + " cannot hold a " +
                             p.body->nonterminal,
                         p.span);
                }
                [[fallthrough]];
            case PatternElem::Kind::VarBlack:
                if (p.var == "_") {
                    if (ctx == Context::Template) fail("$_ cannot be instantiated", p.span);
                } else {
                    note_element_var(p.var, p.nonterminal, ctx, rule, p.span);
                }
                if (p.body) collect(*p.body, ctx, rule);
                return;
            case PatternElem::Kind::Concrete: break;
        }
        for_each_name(p, [&](const NameRef& n) {
            if (n.kind == NameRef::Kind::Anon) {
                if (ctx == Context::Template) fail("$_ cannot be instantiated", p.span);
                return;
            }
            if (n.kind == NameRef::Kind::Var) note_name_var(n.text, ctx, rule, p.span);
        });
        for_each_child(p, [&](const PatternPtr& child) { collect(*child, ctx, rule); });
    }

    void note_element_var(const std::string& var, const std::string& type, Context ctx, Rule& rule,
                          const std::optional<Span>& at) {
        if (name_like_.count(var)) fail("$" + var + " is used both as a name and as an element variable", at);
        element_like_.insert(var);
        if (ctx == Context::Positive) {
            rule.element_vars.emplace(var, type);
        } else if (ctx == Context::Template) {
            used_.emplace_back(var, at);
        }
    }

    void note_name_var(const std::string& var, Context ctx, Rule& rule, const std::optional<Span>& at) {
        if (element_like_.count(var)) fail("$" + var + " is used both as a name and as an element variable", at);
        name_like_.insert(var);
        if (ctx == Context::Positive) {
            if (std::find(rule.name_vars.begin(), rule.name_vars.end(), var) == rule.name_vars.end()) {
                rule.name_vars.push_back(var);
            }
        } else if (ctx == Context::Template) {
            used_.emplace_back(var, at);
        }
    }

    void check_complete(const PatternElem& t) {
        if (t.kind != PatternElem::Kind::Concrete) return;
        const Production* prod = grammar_.production(t.nonterminal);
        if (!prod) fail("unknown production " + t.nonterminal, t.span);
        for (const RhsElement& slot : prod->body) {
            if (slot.label.empty() || slot.kind == RhsElement::Kind::Optional) continue;
            auto it = t.fields.find(slot.label);
            bool missing = it == t.fields.end();
            if (!missing && slot.kind == RhsElement::Kind::List && slot.min_count > 0) {
                const auto* items = std::get_if<std::vector<PatternItem>>(&it->second);
                missing = !items || items->empty();
            }
            if (slot.kind == RhsElement::Kind::List && slot.min_count == 0) missing = false;
            if (missing) {
                fail("template " + t.nonterminal + " lacks mandatory field '" + slot.label + "'", t.span);
            }
        }
        for_each_child(t, [&](const PatternPtr& child) { check_complete(*child); });
    }

    std::optional<ValueType> infer(const Expr& e, const Rule& rule, const std::map<std::string, ValueType>& assigned) {
        switch (e.kind) {
            case Expr::Kind::VarRef: {
                if (rule.element_vars.count(e.text)) fail("element variable $" + e.text + " used as a value");
                if (auto it = assigned.find(e.text); it != assigned.end()) return it->second;
                if (std::find(rule.name_vars.begin(), rule.name_vars.end(), e.text) != rule.name_vars.end()) {
                    return ValueType::String;
                }
                fail("unbound variable $" + e.text);
            }
            case Expr::Kind::MethodCall: {
                const Expr& receiver = *e.operands[0];
                if (receiver.kind == Expr::Kind::VarRef) {
                    if (auto it = rule.element_vars.find(receiver.text); it != rule.element_vars.end()) {
                        std::optional<ValueType> result = table_.resolve(it->second, e.text);
                        if (!result) fail("unknown accessor " + e.text + "() on " + it->second);
                        return result;
                    }
                }
                std::optional<ValueType> type = infer(receiver, rule, assigned);
                fail("unknown accessor " + e.text + "() on " +
                     (type ? std::string(value_type_name(*type)) : std::string("value")));
            }
            case Expr::Kind::Concat:
                infer(*e.operands[0], rule, assigned);
                infer(*e.operands[1], rule, assigned);
                return ValueType::String;
            case Expr::Kind::StringLit: return ValueType::String;
            case Expr::Kind::IntLit: return ValueType::Int;
            case Expr::Kind::Cmp:
            case Expr::Kind::And:
            case Expr::Kind::Or:
            case Expr::Kind::Not:
                for (const ExprPtr& op : e.operands) infer(*op, rule, assigned);
                return ValueType::Bool;
        }
        return std::nullopt;
    }

    void check(Rule& rule) {
        for (const PatternPtr& p : rule.elements) collect(*p, Context::Positive, rule);
        for (const PatternElem* t : templates_) check_complete(*t);

        std::map<std::string, ValueType> assigned;
        for (const Assignment& a : rule.assignments) {
            if (rule.element_vars.count(a.var) ||
                std::find(rule.name_vars.begin(), rule.name_vars.end(), a.var) != rule.name_vars.end()) {
                fail("$" + a.var + " is bound by the pattern and cannot be assigned");
            }
            if (assigned.count(a.var)) fail("$" + a.var + " is assigned twice");
            std::optional<ValueType> type = infer(*a.value, rule, assigned);
            assigned[a.var] = type.value_or(ValueType::String);
        }
        if (rule.constraint) infer(*rule.constraint, rule, assigned);

        for (const auto& [var, at] : used_) {
            bool bound = rule.element_vars.count(var) || assigned.count(var) ||
                         std::find(rule.name_vars.begin(), rule.name_vars.end(), var) != rule.name_vars.end();
            if (!bound) fail("unbound variable $" + var, at);
            if (element_like_.count(var) && !rule.element_vars.count(var)) fail("unbound variable $" + var, at);
        }
    }

    const AccessorTable& table_;
    const GrammarSpec& grammar_;
    std::string rule_name_;
    std::optional<Span> span_;
    int next_id_ = 0;
    std::vector<const PatternElem*> templates_;
    std::vector<std::pair<std::string, std::optional<Span>>> used_;
    std::set<std::string> name_like_;
    std::set<std::string> element_like_;
};

void check_calls(const TransformationModule& m, const std::optional<Span>& module_span) {
    if (!m.instr_methods.count("main")) {
        throw Error(ErrorKind::Compile, location(module_span) + "module " + m.name + " has no main() method");
    }
    for (const auto& [name, method] : m.instr_methods) {
        for (const Statement& s : method.statements) {
            bool is_rule = m.rules.count(s.callee) != 0;
            bool is_instr = m.instr_methods.count(s.callee) != 0;
            if (!is_rule && !is_instr) {
                throw Error(ErrorKind::Compile, location(s.span) + "method " + name + " calls undefined method " +
                                                    s.callee + "()");
            }
            if (s.loop && !is_rule) {
                throw Error(ErrorKind::Compile, location(s.span) + "loop needs a transformation method, but " +
                                                    s.callee + "() is an instruction method");
            }
        }
    }
    // Depth-first search for cycles among instruction methods.
    std::map<std::string, int> state;  // 1 = on stack, 2 = done
    std::function<void(const std::string&, std::vector<std::string>&)> dfs = [&](const std::string& name,
                                                                                  std::vector<std::string>& path) {
        state[name] = 1;
        path.push_back(name);
        for (const Statement& s : m.instr_methods.at(name).statements) {
            if (!m.instr_methods.count(s.callee)) continue;
            if (state[s.callee] == 1) {
                std::string cycle;
                auto it = std::find(path.begin(), path.end(), s.callee);
                for (; it != path.end(); ++it) cycle += *it + "() -> ";
                throw Error(ErrorKind::Compile, location(s.span) + "recursive instruction methods: " + cycle +
                                                    s.callee + "()");
            }
            if (state[s.callee] == 0) dfs(s.callee, path);
        }
        path.pop_back();
        state[name] = 2;
    };
    for (const auto& [name, method] : m.instr_methods) {
        std::vector<std::string> path;
        if (state[name] == 0) dfs(name, path);
    }
}

}  // namespace

NodePtr parse_module(const GrammarSpec& dstl, std::string_view text, const std::string& file_name) {
    return parse_model(dstl, derived::kModule, text, file_name);
}

TransformationModule compile_module(const NodePtr& module_ast, const AccessorTable& table) {
    if (!module_ast || module_ast->nonterminal() != derived::kModule) {
        throw Error(ErrorKind::Compile, "not a transformation module");
    }
    TransformationModule m;
    m.name = *module_ast->token("name");
    for (const NodePtr& member : module_ast->children("members")) {
        std::string name = *member->token("name");
        if (m.rules.count(name) || m.instr_methods.count(name)) {
            throw Error(ErrorKind::Compile, location(member->span()) + "method " + name + "() defined twice");
        }
        if (member->nonterminal() == "TrafoMethod") {
            RuleCompiler compiler(table, name, member->span());
            Rule rule = compiler.compile(member->child("rule"));
            m.decompositions.emplace(name, decompose(rule));
            m.rules.emplace(name, std::move(rule));
            m.rule_order.push_back(name);
        } else {
            InstrMethod method;
            method.name = name;
            for (const NodePtr& s : member->children("statements")) {
                method.statements.push_back({s->has("loop"), *s->token("callee"), s->span()});
            }
            m.instr_methods.emplace(name, std::move(method));
        }
    }
    check_calls(m, module_ast->span());
    return m;
}

TransformationModule load_module(std::string_view text, const std::string& file_name, const AccessorTable& table) {
    GrammarSpec dstl = derive_transformation_grammar(table.grammar());
    return compile_module(parse_module(dstl, text, file_name), table);
}

Rule compile_rule_text(const GrammarSpec& dstl, std::string_view text, const AccessorTable& table,
                       const std::string& name, const std::string& file_name) {
    NodePtr ast = parse_model(dstl, derived::kRule, text, file_name);
    RuleCompiler compiler(table, name, ast->span());
    return compiler.compile(ast);
}

}  // namespace cnctrans
