#pragma once

#include <cstddef>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <variant>
#include <vector>

namespace cnctrans {

/// Location of a parsed node. Synthesized nodes carry no span.
struct Span {
    std::shared_ptr<const std::string> file;
    std::size_t begin = 0;
    std::size_t end = 0;
    unsigned line = 0;
    unsigned column = 0;

    std::string file_name() const { return file ? *file : std::string("<input>"); }
};

class AstNode;
using NodePtr = std::shared_ptr<const AstNode>;
using MutableNodePtr = std::shared_ptr<AstNode>;

/// A field entry: a child node or the text of a token.
using Item = std::variant<NodePtr, std::string>;

/// A field holds one item or a list of items. Absent fields are not stored.
using FieldValue = std::variant<Item, std::vector<Item>>;

/// Generic syntax tree node: nonterminal name plus labelled fields.
///
/// Nodes are shared by pointer; identity (pointer equality) is what element
/// schema variables bind to, while `structurally_equal` compares content and
/// ignores spans.
class AstNode {
public:
    AstNode() = default;
    explicit AstNode(std::string nonterminal, std::optional<Span> span = std::nullopt)
        : nonterminal_(std::move(nonterminal)), span_(std::move(span)) {}

    const std::string& nonterminal() const noexcept { return nonterminal_; }
    const std::optional<Span>& span() const noexcept { return span_; }
    void set_span(std::optional<Span> span) { span_ = std::move(span); }

    const std::map<std::string, FieldValue>& fields() const noexcept { return fields_; }
    std::map<std::string, FieldValue>& fields() noexcept { return fields_; }

    bool has(const std::string& label) const { return fields_.count(label) != 0; }
    const FieldValue* field(const std::string& label) const;
    FieldValue* field(const std::string& label);

    void set(const std::string& label, FieldValue value) { fields_[label] = std::move(value); }
    void erase(const std::string& label) { fields_.erase(label); }

    /// Convenience accessors; they return null/empty when the field is absent
    /// or has a different shape.
    NodePtr child(const std::string& label) const;
    const std::string* token(const std::string& label) const;
    std::vector<NodePtr> children(const std::string& label) const;
    std::vector<std::string> tokens(const std::string& label) const;
    const std::vector<Item>* list(const std::string& label) const;
    std::vector<Item>* list(const std::string& label);

private:
    std::string nonterminal_;
    std::optional<Span> span_;
    std::map<std::string, FieldValue> fields_;
};

bool structurally_equal(const AstNode& a, const AstNode& b);
bool structurally_equal(const NodePtr& a, const NodePtr& b);
bool structurally_equal(const Item& a, const Item& b);

/// Deep copy. `mapping`, when given, receives old-node -> new-node pairs.
MutableNodePtr deep_copy(const AstNode& node,
                         std::map<const AstNode*, MutableNodePtr>* mapping = nullptr);

/// Pre-order traversal over all nodes (the node itself first).
void for_each_node(const NodePtr& root, const std::function<void(const NodePtr&)>& visit);
std::vector<NodePtr> preorder(const NodePtr& root);

/// Direct child nodes in field-label order, list items in stored order.
std::vector<NodePtr> child_nodes(const AstNode& node);

/// Where a node lives inside its parent.
struct ParentLink {
    const AstNode* parent = nullptr;
    std::string label;
    std::optional<std::size_t> index;  ///< set for list fields
};
std::map<const AstNode*, ParentLink> parent_links(const NodePtr& root);

/// Debug rendering, e.g. `ComponentDef{name=A, elements=[...]}`.
std::string to_debug_string(const AstNode& node);

}  // namespace cnctrans
