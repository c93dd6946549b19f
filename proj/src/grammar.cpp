#include "cnctrans/grammar.hpp"

#include <algorithm>
#include <cctype>
#include <sstream>

#include "cnctrans/error.hpp"

namespace cnctrans {

std::string_view token_kind_name(TokenKind kind) {
    switch (kind) {
        case TokenKind::Name: return "Name";
        case TokenKind::Ident: return "Ident";
        case TokenKind::Int: return "Int";
        case TokenKind::String: return "String";
        case TokenKind::QualifiedName: return "QualifiedName";
        case TokenKind::Var: return "Var";
    }
    return "?";
}

std::optional<TokenKind> token_kind_from_name(std::string_view name) {
    for (TokenKind k : {TokenKind::Name, TokenKind::Ident, TokenKind::Int, TokenKind::String,
                        TokenKind::QualifiedName, TokenKind::Var}) {
        if (token_kind_name(k) == name) return k;
    }
    return std::nullopt;
}

RhsElement RhsElement::terminal(std::string text) {
    RhsElement e;
    e.kind = Kind::Terminal;
    e.text = std::move(text);
    return e;
}

RhsElement RhsElement::nonterminal(std::string target, std::string label) {
    RhsElement e;
    e.kind = Kind::Nonterminal;
    e.text = std::move(target);
    e.label = std::move(label);
    return e;
}

RhsElement RhsElement::token_ref(TokenKind kind, std::string label) {
    RhsElement e;
    e.kind = Kind::Token;
    e.token = kind;
    e.label = std::move(label);
    return e;
}

RhsElement RhsElement::keyword_choice(std::vector<std::string> choices, std::string label) {
    RhsElement e;
    e.kind = Kind::KeywordChoice;
    e.choices = std::move(choices);
    e.label = std::move(label);
    return e;
}

RhsElement RhsElement::list(RhsElement element, int min_count, std::string separator) {
    RhsElement e;
    e.kind = Kind::List;
    e.label = element.label;
    e.min_count = min_count;
    e.separator = std::move(separator);
    e.inner.push_back(std::move(element));
    return e;
}

RhsElement RhsElement::optional(RhsElement element) {
    RhsElement e;
    e.kind = Kind::Optional;
    e.label = element.label;
    e.inner.push_back(std::move(element));
    return e;
}

const RhsElement* Production::field_slot(std::string_view label) const {
    for (const RhsElement& e : body) {
        if (!e.label.empty() && e.label == label) return &e;
    }
    return nullptr;
}

const RhsElement* Production::field(std::string_view label) const {
    const RhsElement* slot = field_slot(label);
    if (slot && (slot->kind == RhsElement::Kind::List || slot->kind == RhsElement::Kind::Optional)) {
        return &slot->element();
    }
    return slot;
}

bool is_identifier(std::string_view text) {
    if (text.empty()) return false;
    if (!(std::isalpha(static_cast<unsigned char>(text[0])) || text[0] == '_')) return false;
    return std::all_of(text.begin(), text.end(), [](char c) {
        return std::isalnum(static_cast<unsigned char>(c)) || c == '_';
    });
}

const Production* GrammarSpec::production(std::string_view nonterminal) const {
    for (const Production& p : productions) {
        if (p.lhs == nonterminal) return &p;
    }
    return nullptr;
}

const Interface* GrammarSpec::interface(std::string_view nonterminal) const {
    for (const Interface& i : interfaces) {
        if (i.name == nonterminal) return &i;
    }
    return nullptr;
}

bool GrammarSpec::defines(std::string_view nonterminal) const {
    return production(nonterminal) || interface(nonterminal);
}

bool GrammarSpec::is_subtype(std::string_view nonterminal, std::string_view type) const {
    if (nonterminal == type) return true;
    const Interface* iface = interface(type);
    if (!iface) return false;
    for (const std::string& alt : iface->alternatives) {
        if (alt != type && is_subtype(nonterminal, alt)) return true;
    }
    return false;
}

std::vector<std::string> GrammarSpec::implementors(std::string_view type) const {
    std::vector<std::string> out;
    if (production(type)) {
        out.emplace_back(type);
        return out;
    }
    if (const Interface* iface = interface(type)) {
        for (const std::string& alt : iface->alternatives) {
            if (alt == type) continue;
            for (std::string& impl : implementors(alt)) {
                if (std::find(out.begin(), out.end(), impl) == out.end()) out.push_back(std::move(impl));
            }
        }
    }
    return out;
}

namespace {

[[noreturn]] void grammar_error(const std::string& grammar, const std::string& message) {
    throw Error(ErrorKind::Grammar, "grammar " + grammar + ": " + message);
}

void collect_terminals(const RhsElement& e, std::set<std::string>& keywords, std::set<std::string>& symbols) {
    auto add = [&](const std::string& t) {
        if (is_identifier(t)) keywords.insert(t);
        else symbols.insert(t);
    };
    switch (e.kind) {
        case RhsElement::Kind::Terminal: add(e.text); break;
        case RhsElement::Kind::KeywordChoice:
            for (const auto& c : e.choices) add(c);
            break;
        case RhsElement::Kind::List:
            if (!e.separator.empty()) add(e.separator);
            collect_terminals(e.element(), keywords, symbols);
            break;
        case RhsElement::Kind::Optional: collect_terminals(e.element(), keywords, symbols); break;
        default: break;
    }
}

void check_references(const GrammarSpec& g, const Production& p, const RhsElement& e, int depth) {
    switch (e.kind) {
        case RhsElement::Kind::Nonterminal:
            if (!g.defines(e.text)) {
                grammar_error(g.name, "undefined nonterminal '" + e.text + "' in production " + p.lhs);
            }
            break;
        case RhsElement::Kind::List:
        case RhsElement::Kind::Optional:
            if (e.inner.size() != 1) grammar_error(g.name, "malformed list/optional in " + p.lhs);
            if (depth > 0) grammar_error(g.name, "nested list/optional in production " + p.lhs);
            check_references(g, p, e.element(), depth + 1);
            break;
        case RhsElement::Kind::Terminal:
            if (e.text.empty()) grammar_error(g.name, "empty terminal in production " + p.lhs);
            break;
        default: break;
    }
}

}  // namespace

void GrammarSpec::finalize() {
    std::set<std::string> seen;
    for (const Production& p : productions) {
        if (token_kind_from_name(p.lhs)) grammar_error(name, "'" + p.lhs + "' is a built-in token");
        if (!seen.insert(p.lhs).second) grammar_error(name, "duplicate definition of '" + p.lhs + "'");
    }
    for (const Interface& i : interfaces) {
        if (token_kind_from_name(i.name)) grammar_error(name, "'" + i.name + "' is a built-in token");
        if (!seen.insert(i.name).second) grammar_error(name, "duplicate definition of '" + i.name + "'");
    }
    std::set<std::string> keywords;
    std::set<std::string> symbols;
    for (const Production& p : productions) {
        std::set<std::string> labels;
        for (const RhsElement& e : p.body) {
            check_references(*this, p, e, 0);
            collect_terminals(e, keywords, symbols);
            if (!e.label.empty() && !labels.insert(e.label).second) {
                grammar_error(name, "duplicate field label '" + e.label + "' in production " + p.lhs);
            }
        }
    }
    for (const Interface& i : interfaces) {
        if (i.alternatives.empty()) grammar_error(name, "interface '" + i.name + "' has no alternatives");
        for (const std::string& alt : i.alternatives) {
            if (!defines(alt)) {
                grammar_error(name, "undefined nonterminal '" + alt + "' in interface " + i.name);
            }
        }
    }
    if (start_symbol.empty() || !defines(start_symbol)) {
        grammar_error(name, "start symbol '" + start_symbol + "' is not defined");
    }
    reserved_keywords = std::move(keywords);
    symbols_.assign(symbols.begin(), symbols.end());
    std::stable_sort(symbols_.begin(), symbols_.end(),
                     [](const std::string& a, const std::string& b) { return a.size() > b.size(); });
}

bool GrammarSpec::operator==(const GrammarSpec& other) const {
    return name == other.name && productions == other.productions && interfaces == other.interfaces &&
           start_symbol == other.start_symbol && reserved_keywords == other.reserved_keywords;
}

// ---------------------------------------------------------------------------
// .mcg reader

namespace {

struct McgToken {
    enum class Kind { Ident, String, Punct, End } kind;
    std::string text;
    unsigned line;
    unsigned column;
};

class McgLexer {
public:
    McgLexer(std::string_view text, std::string file) : text_(text), file_(std::move(file)) {}

    std::vector<McgToken> run() {
        std::vector<McgToken> out;
        while (true) {
            skip_blank();
            if (pos_ >= text_.size()) {
                out.push_back({McgToken::Kind::End, "", line_, col()});
                return out;
            }
            unsigned line = line_;
            unsigned column = col();
            char c = text_[pos_];
            if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
                std::size_t start = pos_;
                while (pos_ < text_.size() &&
                       (std::isalnum(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '_')) {
                    ++pos_;
                }
                out.push_back({McgToken::Kind::Ident, std::string(text_.substr(start, pos_ - start)), line, column});
            } else if (c == '"') {
                out.push_back({McgToken::Kind::String, read_string(line, column), line, column});
            } else if (text_.substr(pos_, 2) == "||") {
                pos_ += 2;
                out.push_back({McgToken::Kind::Punct, "||", line, column});
            } else if (std::string_view("{}=;|:*+?()[]").find(c) != std::string_view::npos) {
                ++pos_;
                out.push_back({McgToken::Kind::Punct, std::string(1, c), line, column});
            } else {
                fail(line, column, std::string("unexpected character '") + c + "'");
            }
        }
    }

    [[noreturn]] void fail(unsigned line, unsigned column, const std::string& message) const {
        throw Error(ErrorKind::Syntax,
                    file_ + ":" + std::to_string(line) + ":" + std::to_string(column) + ": " + message);
    }

private:
    unsigned col() const { return static_cast<unsigned>(pos_ - line_start_) + 1; }

    void newline() {
        ++line_;
        line_start_ = pos_ + 1;
    }

    void skip_blank() {
        while (pos_ < text_.size()) {
            char c = text_[pos_];
            if (c == '\n') {
                newline();
                ++pos_;
            } else if (std::isspace(static_cast<unsigned char>(c))) {
                ++pos_;
            } else if (text_.substr(pos_, 2) == "//") {
                while (pos_ < text_.size() && text_[pos_] != '\n') ++pos_;
            } else if (text_.substr(pos_, 2) == "/*") {
                unsigned line = line_;
                unsigned column = col();
                pos_ += 2;
                while (pos_ < text_.size() && text_.substr(pos_, 2) != "*/") {
                    if (text_[pos_] == '\n') newline();
                    ++pos_;
                }
                if (pos_ >= text_.size()) fail(line, column, "unterminated comment");
                pos_ += 2;
            } else {
                break;
            }
        }
    }

    std::string read_string(unsigned line, unsigned column) {
        ++pos_;
        std::string out;
        while (pos_ < text_.size() && text_[pos_] != '"') {
            if (text_[pos_] == '\n') fail(line, column, "unterminated string");
            if (text_[pos_] == '\\' && pos_ + 1 < text_.size()) ++pos_;
            out += text_[pos_++];
        }
        if (pos_ >= text_.size()) fail(line, column, "unterminated string");
        ++pos_;
        return out;
    }

    std::string_view text_;
    std::string file_;
    std::size_t pos_ = 0;
    std::size_t line_start_ = 0;
    unsigned line_ = 1;
};

std::string default_label(const std::string& target) {
    std::string label = target;
    if (!label.empty()) label[0] = static_cast<char>(std::tolower(static_cast<unsigned char>(label[0])));
    return label;
}

class McgParser {
public:
    McgParser(std::vector<McgToken> tokens, McgLexer& lexer) : toks_(std::move(tokens)), lexer_(lexer) {}

    GrammarSpec run() {
        GrammarSpec g;
        expect_ident("grammar");
        g.name = ident("grammar name");
        expect("{");
        while (!is("}")) {
            if (peek().kind == McgToken::Kind::End) fail("expected '}'");
            std::string rule_name;
            if (is_ident("interface")) {
                ++i_;
                Interface iface;
                iface.name = ident("interface name");
                expect("=");
                iface.alternatives.push_back(ident("alternative"));
                while (accept("|")) iface.alternatives.push_back(ident("alternative"));
                expect(";");
                rule_name = iface.name;
                g.interfaces.push_back(std::move(iface));
            } else {
                Production p;
                p.lhs = ident("production name");
                expect("=");
                while (!is(";")) p.body.push_back(element());
                expect(";");
                rule_name = p.lhs;
                g.productions.push_back(std::move(p));
            }
            if (g.start_symbol.empty()) g.start_symbol = rule_name;
        }
        expect("}");
        if (peek().kind != McgToken::Kind::End) fail("trailing input after grammar");
        g.finalize();
        return g;
    }

private:
    RhsElement element() {
        RhsElement atom_elem = atom();
        bool separated = atom_elem.kind == RhsElement::Kind::List;  // placeholder from "(x || sep)"
        if (separated) {
            if (accept("*")) return atom_elem;
            if (accept("+")) {
                atom_elem.min_count = 1;
                return atom_elem;
            }
            fail("separated list must be followed by '*' or '+'");
        }
        if (accept("*")) return RhsElement::list(std::move(atom_elem), 0);
        if (accept("+")) return RhsElement::list(std::move(atom_elem), 1);
        if (accept("?")) return RhsElement::optional(std::move(atom_elem));
        return atom_elem;
    }

    RhsElement atom() {
        const McgToken& t = peek();
        if (t.kind == McgToken::Kind::String) {
            ++i_;
            if (t.text.empty()) fail("empty terminal");
            return RhsElement::terminal(t.text);
        }
        if (accept("(")) {
            RhsElement inner = labelled_ref();
            expect("||");
            if (peek().kind != McgToken::Kind::String) fail("expected separator string");
            std::string sep = toks_[i_++].text;
            expect(")");
            return RhsElement::list(std::move(inner), 0, sep);
        }
        return labelled_ref();
    }

    RhsElement labelled_ref() {
        std::string first = ident("label or nonterminal");
        std::string label;
        std::string target;
        if (accept(":")) {
            label = first;
            if (accept("[")) {
                std::vector<std::string> choices;
                do {
                    if (peek().kind != McgToken::Kind::String) fail("expected keyword string");
                    choices.push_back(toks_[i_++].text);
                } while (accept("|"));
                expect("]");
                return RhsElement::keyword_choice(std::move(choices), label);
            }
            target = ident("nonterminal");
        } else {
            target = first;
            label = default_label(first);
        }
        if (auto kind = token_kind_from_name(target)) return RhsElement::token_ref(*kind, label);
        return RhsElement::nonterminal(target, label);
    }

    const McgToken& peek() const { return toks_[i_]; }
    bool is(std::string_view punct) const {
        return peek().kind == McgToken::Kind::Punct && peek().text == punct;
    }
    bool is_ident(std::string_view word) const {
        return peek().kind == McgToken::Kind::Ident && peek().text == word;
    }
    bool accept(std::string_view punct) {
        if (!is(punct)) return false;
        ++i_;
        return true;
    }
    void expect(std::string_view punct) {
        if (!accept(punct)) fail("expected '" + std::string(punct) + "'");
    }
    void expect_ident(std::string_view word) {
        if (!is_ident(word)) fail("expected '" + std::string(word) + "'");
        ++i_;
    }
    std::string ident(const std::string& what) {
        if (peek().kind != McgToken::Kind::Ident) fail("expected " + what);
        return toks_[i_++].text;
    }
    [[noreturn]] void fail(const std::string& message) const {
        const McgToken& t = peek();
        std::string found = t.kind == McgToken::Kind::End ? "end of input" : "'" + t.text + "'";
        lexer_.fail(t.line, t.column, message + ", found " + found);
    }

    std::vector<McgToken> toks_;
    McgLexer& lexer_;
    std::size_t i_ = 0;
};

}  // namespace

GrammarSpec parse_grammar(std::string_view text, const std::string& file_name) {
    McgLexer lexer(text, file_name);
    McgParser parser(lexer.run(), lexer);
    return parser.run();
}

}  // namespace cnctrans
