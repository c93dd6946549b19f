#include "cnctrans/parser.hpp"

#include <algorithm>
#include <cctype>
#include <optional>
#include <set>
#include <unordered_map>

#include "cnctrans/error.hpp"

namespace cnctrans {

namespace {

using Fields = std::map<std::string, FieldValue>;

struct RuleResult {
    NodePtr node;
    std::size_t end = 0;
    bool ok = false;
};

bool ident_start(char c) { return std::isalpha(static_cast<unsigned char>(c)) || c == '_'; }
bool ident_char(char c) { return std::isalnum(static_cast<unsigned char>(c)) || c == '_'; }

class PegParser {
public:
    PegParser(const GrammarSpec& g, std::string_view text, const std::string& file)
        : g_(g), text_(text), file_(std::make_shared<const std::string>(file)) {
        line_starts_.push_back(0);
        for (std::size_t i = 0; i < text_.size(); ++i) {
            if (text_[i] == '\n') line_starts_.push_back(i + 1);
        }
        int idx = 0;
        for (const Production& p : g_.productions) rule_index_[p.lhs] = idx++;
        for (const Interface& i : g_.interfaces) rule_index_[i.name] = idx++;
    }

    NodePtr run(std::string_view start) {
        if (!g_.defines(start)) {
            throw Error(ErrorKind::Grammar, "start symbol '" + std::string(start) + "' is not defined");
        }
        RuleResult r = rule(std::string(start), 0);
        std::size_t tail = skip(r.ok ? r.end : 0);
        if (r.ok && tail == text_.size()) return r.node;
        if (r.ok && farthest_ < tail) {
            fail_at(tail, "syntax error: unexpected input");
        }
        std::string expected;
        for (const std::string& e : expected_) {
            if (!expected.empty()) expected += ", ";
            expected += e;
        }
        fail_at(farthest_, "syntax error: expected " + expected);
    }

private:
    // -- lexical layer -----------------------------------------------------

    std::size_t skip(std::size_t p) const {
        while (p < text_.size()) {
            char c = text_[p];
            if (std::isspace(static_cast<unsigned char>(c))) {
                ++p;
            } else if (text_.compare(p, 2, "//") == 0) {
                while (p < text_.size() && text_[p] != '\n') ++p;
            } else if (text_.compare(p, 2, "/*") == 0) {
                std::size_t close = text_.find("*/", p + 2);
                p = close == std::string_view::npos ? text_.size() : close + 2;
            } else {
                break;
            }
        }
        return p;
    }

    std::size_t ident_end(std::size_t p) const {
        if (p >= text_.size() || !ident_start(text_[p])) return p;
        while (p < text_.size() && ident_char(text_[p])) ++p;
        return p;
    }

    void expect(std::size_t p, const std::string& what) {
        if (p > farthest_) {
            farthest_ = p;
            expected_.clear();
        }
        if (p == farthest_) expected_.insert(what);
    }

    std::optional<std::size_t> terminal(const std::string& t, std::size_t from) {
        std::size_t p = skip(from);
        if (is_identifier(t)) {
            std::size_t e = ident_end(p);
            if (e > p && text_.substr(p, e - p) == t) return e;
        } else if (text_.compare(p, t.size(), t) == 0 && longest_symbol(p) == t.size()) {
            return p + t.size();
        }
        expect(p, "'" + t + "'");
        return std::nullopt;
    }

    std::size_t longest_symbol(std::size_t p) const {
        for (const std::string& s : g_.symbols()) {
            if (text_.compare(p, s.size(), s) == 0) return s.size();
        }
        return 0;
    }

    std::optional<std::size_t> name_at(std::size_t p, bool reserve) const {
        std::size_t e = ident_end(p);
        if (e == p) return std::nullopt;
        if (reserve && g_.reserved_keywords.count(std::string(text_.substr(p, e - p)))) return std::nullopt;
        return e;
    }

    /// Returns (begin, end) of the token on success.
    std::optional<std::pair<std::size_t, std::size_t>> token(TokenKind kind, std::size_t from) {
        std::size_t p = skip(from);
        std::optional<std::size_t> end;
        switch (kind) {
            case TokenKind::Name: end = name_at(p, true); break;
            case TokenKind::Ident: end = name_at(p, false); break;
            case TokenKind::QualifiedName: {
                end = name_at(p, true);
                while (end && *end < text_.size() && text_[*end] == '.') {
                    auto next = name_at(*end + 1, true);
                    if (!next) break;
                    end = next;
                }
                break;
            }
            case TokenKind::Var:
                if (p < text_.size() && text_[p] == '$') {
                    std::size_t e = ident_end(p + 1);
                    if (e > p + 1) end = e;
                }
                break;
            case TokenKind::Int: {
                std::size_t q = p;
                if (q < text_.size() && (text_[q] == '+' || text_[q] == '-')) ++q;
                std::size_t digits = q;
                while (q < text_.size() && std::isdigit(static_cast<unsigned char>(text_[q]))) ++q;
                if (q > digits && (q >= text_.size() || !ident_char(text_[q]))) end = q;
                break;
            }
            case TokenKind::String:
                if (p < text_.size() && text_[p] == '"') {
                    std::size_t q = p + 1;
                    while (q < text_.size() && text_[q] != '"' && text_[q] != '\n') {
                        if (text_[q] == '\\' && q + 1 < text_.size()) ++q;
                        ++q;
                    }
                    if (q < text_.size() && text_[q] == '"') end = q + 1;
                }
                break;
        }
        if (!end) {
            expect(p, std::string(token_kind_name(kind)));
            return std::nullopt;
        }
        return std::make_pair(p, *end);
    }

    // -- syntactic layer ---------------------------------------------------

    RuleResult rule(const std::string& name, std::size_t pos) {
        auto idx_it = rule_index_.find(name);
        std::size_t key = static_cast<std::size_t>(idx_it->second) * (text_.size() + 2) + pos;
        if (auto it = memo_.find(key); it != memo_.end()) return it->second;
        memo_[key] = RuleResult{};  // left-recursion guard: re-entry fails
        RuleResult result;
        if (const Production* p = g_.production(name)) {
            result = production(*p, pos);
        } else {
            for (const std::string& alt : g_.interface(name)->alternatives) {
                result = rule(alt, pos);
                if (result.ok) break;
            }
        }
        memo_[key] = result;
        return result;
    }

    RuleResult production(const Production& p, std::size_t pos) {
        Fields fields;
        std::size_t end = pos;
        if (!sequence(p.body, 0, pos, fields, end)) return {};
        std::size_t begin = skip(pos);
        if (end < begin) begin = end;
        Span span;
        span.file = file_;
        span.begin = begin;
        span.end = end;
        auto it = std::upper_bound(line_starts_.begin(), line_starts_.end(), begin);
        std::size_t line_idx = static_cast<std::size_t>(it - line_starts_.begin()) - 1;
        span.line = static_cast<unsigned>(line_idx + 1);
        span.column = static_cast<unsigned>(begin - line_starts_[line_idx] + 1);
        auto node = std::make_shared<AstNode>(p.lhs, span);
        node->fields() = std::move(fields);
        return {node, end, true};
    }

    bool sequence(const std::vector<RhsElement>& body, std::size_t i, std::size_t pos, Fields& fields,
                  std::size_t& end) {
        if (i == body.size()) {
            end = pos;
            return true;
        }
        const RhsElement& e = body[i];
        if (e.kind == RhsElement::Kind::Optional) {
            std::optional<Item> item;
            std::size_t after = pos;
            if (single(e.element(), pos, item, after)) {
                if (item) fields[e.label] = *item;
                if (sequence(body, i + 1, after, fields, end)) return true;
                if (item) fields.erase(e.label);
            }
            return sequence(body, i + 1, pos, fields, end);
        }
        std::size_t after = pos;
        if (e.kind == RhsElement::Kind::List) {
            std::vector<Item> items;
            if (!list(e, pos, items, after)) return false;
            fields[e.label] = std::move(items);
        } else {
            std::optional<Item> item;
            if (!single(e, pos, item, after)) return false;
            if (item) fields[e.label] = *item;
        }
        return sequence(body, i + 1, after, fields, end);
    }

    /// Parses a non-list element. Terminals yield no item.
    bool single(const RhsElement& e, std::size_t pos, std::optional<Item>& item, std::size_t& end) {
        switch (e.kind) {
            case RhsElement::Kind::Terminal: {
                auto r = terminal(e.text, pos);
                if (!r) return false;
                end = *r;
                return true;
            }
            case RhsElement::Kind::Nonterminal: {
                RuleResult r = rule(e.text, pos);
                if (!r.ok) return false;
                item = r.node;
                end = r.end;
                return true;
            }
            case RhsElement::Kind::Token: {
                auto r = token(e.token, pos);
                if (!r) return false;
                item = std::string(text_.substr(r->first, r->second - r->first));
                end = r->second;
                return true;
            }
            case RhsElement::Kind::KeywordChoice:
                for (const std::string& choice : e.choices) {
                    if (auto r = terminal(choice, pos)) {
                        item = choice;
                        end = *r;
                        return true;
                    }
                }
                return false;
            default:
                throw Error(ErrorKind::Grammar, "nested list/optional is not supported");
        }
    }

    bool list(const RhsElement& e, std::size_t pos, std::vector<Item>& items, std::size_t& end) {
        const RhsElement& inner = e.element();
        std::size_t p = pos;
        std::optional<Item> item;
        std::size_t after = p;
        if (single(inner, p, item, after)) {
            if (item) items.push_back(*item);
            p = after;
            while (true) {
                std::size_t q = p;
                if (!e.separator.empty()) {
                    auto s = terminal(e.separator, q);
                    if (!s) break;
                    q = *s;
                }
                item.reset();
                if (!single(inner, q, item, after) || after == p) break;
                if (item) items.push_back(*item);
                p = after;
            }
        }
        if (static_cast<int>(items.size()) < e.min_count) return false;
        end = p;
        return true;
    }

    [[noreturn]] void fail_at(std::size_t p, const std::string& message) const {
        auto it = std::upper_bound(line_starts_.begin(), line_starts_.end(), p);
        std::size_t line_idx = static_cast<std::size_t>(it - line_starts_.begin()) - 1;
        std::string found;
        if (p >= text_.size()) {
            found = "end of input";
        } else {
            std::size_t e = ident_end(p);
            if (e == p) e = p + 1;
            found = "'" + std::string(text_.substr(p, e - p)) + "'";
        }
        throw Error(ErrorKind::Syntax, *file_ + ":" + std::to_string(line_idx + 1) + ":" +
                                           std::to_string(p - line_starts_[line_idx] + 1) + ": " + message +
                                           ", found " + found);
    }

    const GrammarSpec& g_;
    std::string_view text_;
    std::shared_ptr<const std::string> file_;
    std::vector<std::size_t> line_starts_;
    std::unordered_map<std::string, int> rule_index_;
    std::unordered_map<std::size_t, RuleResult> memo_;
    std::size_t farthest_ = 0;
    std::set<std::string> expected_;
};

}  // namespace

NodePtr parse_model(const GrammarSpec& grammar, std::string_view start, std::string_view text,
                    const std::string& file_name) {
    PegParser parser(grammar, text, file_name);
    return parser.run(start);
}

}  // namespace cnctrans
