#include "cnctrans/printer.hpp"

#include <algorithm>

#include "cnctrans/error.hpp"

namespace cnctrans {

namespace {

class Writer {
public:
    void token(const std::string& t) {
        if (at_line_start_) {
            out_.append(static_cast<std::size_t>(indent_) * 2, ' ');
        } else if (needs_space(t)) {
            out_ += ' ';
        }
        out_ += t;
        last_ = t;
        at_line_start_ = false;
    }

    void newline() {
        out_ += '\n';
        at_line_start_ = true;
    }

    void blank_line() {
        if (!at_line_start_) newline();
        out_ += '\n';
    }

    void indent() { ++indent_; }
    void dedent() { --indent_; }

    std::string finish() {
        if (!at_line_start_) newline();
        return std::move(out_);
    }

private:
    bool needs_space(const std::string& t) const {
        if (t == "," || t == ";" || t == ")" || t == ".") return false;
        if (last_ == "(" || last_ == ".") return false;
        return true;
    }

    std::string out_;
    std::string last_;
    int indent_ = 0;
    bool at_line_start_ = true;
};

[[noreturn]] void malformed(const AstNode& node, const std::string& message) {
    throw Error(ErrorKind::MalformedNode, node.nonterminal() + ": " + message);
}

class Printer {
public:
    explicit Printer(const GrammarSpec& g) : g_(g) {}

    std::string run(const AstNode& node) {
        print_node(node, 0);
        return w_.finish();
    }

private:
    void print_node(const AstNode& node, int depth) {
        const Production* p = g_.production(node.nonterminal());
        if (!p) malformed(node, "no production for this nonterminal");
        for (const auto& [label, value] : node.fields()) {
            if (!p->field_slot(label)) malformed(node, "unexpected field '" + label + "'");
        }
        for (std::size_t i = 0; i < p->body.size(); ++i) {
            const RhsElement& e = p->body[i];
            switch (e.kind) {
                case RhsElement::Kind::Terminal: w_.token(e.text); break;
                case RhsElement::Kind::Optional: {
                    if (e.label.empty()) break;  // optional terminals are not recorded
                    const FieldValue* f = node.field(e.label);
                    if (!f) break;
                    print_single(node, e.element(), *f, depth);
                    break;
                }
                case RhsElement::Kind::List: {
                    const FieldValue* f = node.field(e.label);
                    const std::vector<Item> empty;
                    const std::vector<Item>* items = &empty;
                    if (f) {
                        items = std::get_if<std::vector<Item>>(f);
                        if (!items) malformed(node, "field '" + e.label + "' must be a list");
                    }
                    if (static_cast<int>(items->size()) < e.min_count) {
                        malformed(node, "list '" + e.label + "' needs at least one item");
                    }
                    bool braced = i > 0 && p->body[i - 1].kind == RhsElement::Kind::Terminal &&
                                  p->body[i - 1].text == "{";
                    print_list(node, e, *items, braced, depth);
                    break;
                }
                default: {
                    const FieldValue* f = node.field(e.label);
                    if (!f) malformed(node, "missing field '" + e.label + "'");
                    print_single(node, e, *f, depth);
                }
            }
        }
    }

    void print_single(const AstNode& owner, const RhsElement& e, const FieldValue& f, int depth) {
        const Item* item = std::get_if<Item>(&f);
        if (!item) malformed(owner, "field '" + e.label + "' must not be a list");
        print_item(owner, e, *item, depth);
    }

    void print_item(const AstNode& owner, const RhsElement& e, const Item& item, int depth) {
        if (e.kind == RhsElement::Kind::Nonterminal) {
            const NodePtr* n = std::get_if<NodePtr>(&item);
            if (!n || !*n) malformed(owner, "field '" + e.label + "' must hold a node");
            if (!g_.is_subtype((*n)->nonterminal(), e.text)) {
                malformed(owner, "field '" + e.label + "' holds " + (*n)->nonterminal() + ", expected " + e.text);
            }
            print_node(**n, depth + 1);
            return;
        }
        const std::string* s = std::get_if<std::string>(&item);
        if (!s || s->empty()) malformed(owner, "field '" + e.label + "' must hold a token");
        if (e.kind == RhsElement::Kind::KeywordChoice &&
            std::find(e.choices.begin(), e.choices.end(), *s) == e.choices.end()) {
            malformed(owner, "field '" + e.label + "' holds '" + *s + "', not one of its keywords");
        }
        w_.token(*s);
    }

    void print_list(const AstNode& owner, const RhsElement& e, const std::vector<Item>& items, bool braced,
                    int depth) {
        const RhsElement& inner = e.element();
        bool block = inner.kind == RhsElement::Kind::Nonterminal && e.separator.empty();
        if (!block) {
            for (std::size_t k = 0; k < items.size(); ++k) {
                if (k && !e.separator.empty()) w_.token(e.separator);
                print_item(owner, inner, items[k], depth);
            }
            return;
        }
        if (braced) {
            w_.indent();
            for (const Item& item : items) {
                w_.newline();
                print_item(owner, inner, item, depth);
            }
            w_.dedent();
            w_.newline();
            return;
        }
        for (std::size_t k = 0; k < items.size(); ++k) {
            if (k) {
                if (depth == 0) w_.blank_line();
                else w_.newline();
            }
            print_item(owner, inner, items[k], depth);
        }
    }

    const GrammarSpec& g_;
    Writer w_;
};

}  // namespace

std::string pretty_print(const GrammarSpec& grammar, const AstNode& node) {
    Printer printer(grammar);
    return printer.run(node);
}

}  // namespace cnctrans
