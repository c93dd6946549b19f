#include "cnctrans/ast.hpp"

#include <sstream>

namespace cnctrans {

const FieldValue* AstNode::field(const std::string& label) const {
    auto it = fields_.find(label);
    return it == fields_.end() ? nullptr : &it->second;
}

FieldValue* AstNode::field(const std::string& label) {
    auto it = fields_.find(label);
    return it == fields_.end() ? nullptr : &it->second;
}

NodePtr AstNode::child(const std::string& label) const {
    const FieldValue* f = field(label);
    if (!f) return nullptr;
    if (const Item* item = std::get_if<Item>(f)) {
        if (const NodePtr* n = std::get_if<NodePtr>(item)) return *n;
    }
    return nullptr;
}

const std::string* AstNode::token(const std::string& label) const {
    const FieldValue* f = field(label);
    if (!f) return nullptr;
    if (const Item* item = std::get_if<Item>(f)) return std::get_if<std::string>(item);
    return nullptr;
}

std::vector<NodePtr> AstNode::children(const std::string& label) const {
    std::vector<NodePtr> out;
    if (const auto* items = list(label)) {
        for (const Item& item : *items) {
            if (const NodePtr* n = std::get_if<NodePtr>(&item)) out.push_back(*n);
        }
    }
    return out;
}

std::vector<std::string> AstNode::tokens(const std::string& label) const {
    std::vector<std::string> out;
    if (const auto* items = list(label)) {
        for (const Item& item : *items) {
            if (const auto* s = std::get_if<std::string>(&item)) out.push_back(*s);
        }
    }
    return out;
}

const std::vector<Item>* AstNode::list(const std::string& label) const {
    const FieldValue* f = field(label);
    return f ? std::get_if<std::vector<Item>>(f) : nullptr;
}

std::vector<Item>* AstNode::list(const std::string& label) {
    FieldValue* f = field(label);
    return f ? std::get_if<std::vector<Item>>(f) : nullptr;
}

bool structurally_equal(const Item& a, const Item& b) {
    if (a.index() != b.index()) return false;
    if (const auto* s = std::get_if<std::string>(&a)) return *s == std::get<std::string>(b);
    return structurally_equal(std::get<NodePtr>(a), std::get<NodePtr>(b));
}

namespace {

bool field_equal(const FieldValue& a, const FieldValue& b) {
    if (a.index() != b.index()) return false;
    if (const Item* ia = std::get_if<Item>(&a)) return structurally_equal(*ia, std::get<Item>(b));
    const auto& la = std::get<std::vector<Item>>(a);
    const auto& lb = std::get<std::vector<Item>>(b);
    if (la.size() != lb.size()) return false;
    for (std::size_t i = 0; i < la.size(); ++i) {
        if (!structurally_equal(la[i], lb[i])) return false;
    }
    return true;
}

}  // namespace

bool structurally_equal(const AstNode& a, const AstNode& b) {
    if (&a == &b) return true;
    if (a.nonterminal() != b.nonterminal()) return false;
    if (a.fields().size() != b.fields().size()) return false;
    auto ia = a.fields().begin();
    auto ib = b.fields().begin();
    for (; ia != a.fields().end(); ++ia, ++ib) {
        if (ia->first != ib->first || !field_equal(ia->second, ib->second)) return false;
    }
    return true;
}

bool structurally_equal(const NodePtr& a, const NodePtr& b) {
    if (!a || !b) return a == b;
    return structurally_equal(*a, *b);
}

MutableNodePtr deep_copy(const AstNode& node, std::map<const AstNode*, MutableNodePtr>* mapping) {
    auto copy = std::make_shared<AstNode>(node.nonterminal(), node.span());
    if (mapping) (*mapping)[&node] = copy;
    auto copy_item = [&](const Item& item) -> Item {
        if (const NodePtr* n = std::get_if<NodePtr>(&item)) {
            return NodePtr(deep_copy(**n, mapping));
        }
        return item;
    };
    for (const auto& [label, value] : node.fields()) {
        if (const Item* item = std::get_if<Item>(&value)) {
            copy->set(label, copy_item(*item));
        } else {
            std::vector<Item> items;
            for (const Item& item : std::get<std::vector<Item>>(value)) items.push_back(copy_item(item));
            copy->set(label, std::move(items));
        }
    }
    return copy;
}

std::vector<NodePtr> child_nodes(const AstNode& node) {
    std::vector<NodePtr> out;
    for (const auto& [label, value] : node.fields()) {
        if (const Item* item = std::get_if<Item>(&value)) {
            if (const NodePtr* n = std::get_if<NodePtr>(item)) out.push_back(*n);
        } else {
            for (const Item& item : std::get<std::vector<Item>>(value)) {
                if (const NodePtr* n = std::get_if<NodePtr>(&item)) out.push_back(*n);
            }
        }
    }
    return out;
}

void for_each_node(const NodePtr& root, const std::function<void(const NodePtr&)>& visit) {
    if (!root) return;
    visit(root);
    for (const NodePtr& child : child_nodes(*root)) for_each_node(child, visit);
}

std::vector<NodePtr> preorder(const NodePtr& root) {
    std::vector<NodePtr> out;
    for_each_node(root, [&](const NodePtr& n) { out.push_back(n); });
    return out;
}

std::map<const AstNode*, ParentLink> parent_links(const NodePtr& root) {
    std::map<const AstNode*, ParentLink> links;
    for_each_node(root, [&](const NodePtr& n) {
        for (const auto& [label, value] : n->fields()) {
            if (const Item* item = std::get_if<Item>(&value)) {
                if (const NodePtr* c = std::get_if<NodePtr>(item)) {
                    links[c->get()] = ParentLink{n.get(), label, std::nullopt};
                }
            } else {
                const auto& items = std::get<std::vector<Item>>(value);
                for (std::size_t i = 0; i < items.size(); ++i) {
                    if (const NodePtr* c = std::get_if<NodePtr>(&items[i])) {
                        links[c->get()] = ParentLink{n.get(), label, i};
                    }
                }
            }
        }
    });
    return links;
}

namespace {

void debug_item(std::ostringstream& out, const Item& item) {
    if (const auto* s = std::get_if<std::string>(&item)) {
        out << *s;
    } else {
        out << to_debug_string(*std::get<NodePtr>(item));
    }
}

}  // namespace

std::string to_debug_string(const AstNode& node) {
    std::ostringstream out;
    out << node.nonterminal() << '{';
    bool first = true;
    for (const auto& [label, value] : node.fields()) {
        if (!first) out << ", ";
        first = false;
        out << label << '=';
        if (const Item* item = std::get_if<Item>(&value)) {
            debug_item(out, *item);
        } else {
            out << '[';
            const auto& items = std::get<std::vector<Item>>(value);
            for (std::size_t i = 0; i < items.size(); ++i) {
                if (i) out << ", ";
                debug_item(out, items[i]);
            }
            out << ']';
        }
    }
    out << '}';
    return out.str();
}

}  // namespace cnctrans
