#include "cnctrans/accessor.hpp"

#include <cctype>
#include <charconv>

#include "cnctrans/error.hpp"

namespace cnctrans {

ValueType type_of(const Value& value) {
    switch (value.index()) {
        case 0: return ValueType::String;
        case 1: return ValueType::Int;
        case 2: return ValueType::Bool;
        default: return ValueType::NameList;
    }
}

std::string_view value_type_name(ValueType type) {
    switch (type) {
        case ValueType::String: return "String";
        case ValueType::Int: return "Int";
        case ValueType::Bool: return "Bool";
        case ValueType::NameList: return "NameList";
    }
    return "?";
}

std::string render_value(const Value& value) {
    if (const auto* s = std::get_if<std::string>(&value)) return *s;
    if (const auto* i = std::get_if<std::int64_t>(&value)) return std::to_string(*i);
    if (const auto* b = std::get_if<bool>(&value)) return *b ? "true" : "false";
    std::string out = "[";
    const auto& names = std::get<NameList>(value);
    for (std::size_t i = 0; i < names.size(); ++i) {
        if (i) out += ", ";
        out += names[i];
    }
    return out + "]";
}

std::string accessor_name(std::string_view label) {
    std::string out = "get";
    out += label;
    out[3] = static_cast<char>(std::toupper(static_cast<unsigned char>(out[3])));
    return out;
}

std::int64_t int_token_value(const std::string& text) {
    std::string_view digits = text;
    if (!digits.empty() && digits.front() == '+') digits.remove_prefix(1);
    std::int64_t value = 0;
    auto [ptr, ec] = std::from_chars(digits.data(), digits.data() + digits.size(), value);
    if (ec != std::errc() || ptr != digits.data() + digits.size()) {
        throw Error(ErrorKind::Evaluation, "not an integer: '" + text + "'");
    }
    return value;
}

AccessorTable::AccessorTable(GrammarSpec grammar) : grammar_(std::move(grammar)) {
    for (const Production& p : grammar_.productions) {
        for (const RhsElement& slot : p.body) {
            if (slot.label.empty()) continue;
            const RhsElement& e =
                (slot.kind == RhsElement::Kind::List || slot.kind == RhsElement::Kind::Optional) ? slot.element()
                                                                                                 : slot;
            if (e.kind != RhsElement::Kind::Token && e.kind != RhsElement::Kind::KeywordChoice) continue;
            std::string label = slot.label;
            std::string owner = p.lhs;
            if (slot.kind == RhsElement::Kind::List) {
                add(owner, accessor_name(label), ValueType::NameList, [label](const AstNode& n) -> Value {
                    return n.tokens(label);
                });
                continue;
            }
            bool is_int = e.kind == RhsElement::Kind::Token && e.token == TokenKind::Int;
            add(owner, accessor_name(label), is_int ? ValueType::Int : ValueType::String,
                [label, is_int, owner](const AstNode& n) -> Value {
                    const std::string* t = n.token(label);
                    if (!t) throw Error(ErrorKind::Evaluation, owner + " has no " + label);
                    if (is_int) return int_token_value(*t);
                    return *t;
                });
        }
    }
}

void AccessorTable::add(const std::string& nonterminal, const std::string& method, ValueType result,
                        Function fn) {
    accessors_[{nonterminal, method}] = Accessor{result, std::move(fn)};
}

const AccessorTable::Accessor* AccessorTable::find(std::string_view nonterminal, std::string_view method) const {
    auto it = accessors_.find(std::make_pair(std::string(nonterminal), std::string(method)));
    return it == accessors_.end() ? nullptr : &it->second;
}

std::optional<ValueType> AccessorTable::resolve(std::string_view type, std::string_view method) const {
    std::vector<std::string> impls = grammar_.implementors(type);
    if (impls.empty()) return std::nullopt;
    std::optional<ValueType> result;
    for (const std::string& impl : impls) {
        const Accessor* a = find(impl, method);
        if (!a) return std::nullopt;
        if (result && *result != a->result) return std::nullopt;
        result = a->result;
    }
    return result;
}

Value AccessorTable::call(const AstNode& node, std::string_view method) const {
    const Accessor* a = find(node.nonterminal(), method);
    if (!a) {
        throw Error(ErrorKind::Evaluation,
                    "no accessor " + std::string(method) + "() on " + node.nonterminal());
    }
    return a->fn(node);
}

std::vector<std::string> AccessorTable::signatures() const {
    std::vector<std::string> out;
    for (const auto& [key, acc] : accessors_) out.push_back(key.first + "." + key.second);
    return out;
}

}  // namespace cnctrans
