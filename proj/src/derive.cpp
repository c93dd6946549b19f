#include "cnctrans/derive.hpp"

#include <algorithm>
#include <array>
#include <set>

#include "cnctrans/error.hpp"

namespace cnctrans {

namespace derived {

std::pair<std::string, std::string> split(std::string_view nonterminal) {
    for (std::string_view suffix : {kPat, kElem, kVarBlack, kVarWhite, kNeg, kRepl}) {
        if (nonterminal.size() > suffix.size() &&
            nonterminal.substr(nonterminal.size() - suffix.size()) == suffix) {
            return {std::string(nonterminal.substr(0, nonterminal.size() - suffix.size())), std::string(suffix)};
        }
    }
    return {std::string(nonterminal), std::string()};
}

}  // namespace derived

namespace {

using E = RhsElement;

constexpr std::array<std::string_view, 8> kReservedWords = {"not", "where", "module", "transformation",
                                                            "loop", ":-", "[[", "]]"};

constexpr std::array<std::string_view, 26> kFixedNames = {
    "Module",     "ModuleMember", "TrafoMethod", "InstrMethod", "Stmt",       "TransformationRule",
    "TopElem",    "WhereBlock",   "Assignment",  "OrExpr",      "AndExpr",    "UnaryExpr",
    "NotExpr",    "CmpExpr",      "CmpTail",     "PostfixExpr", "MethodCall", "PrimaryExpr",
    "VarExpr",    "StringExpr",   "IntExpr",     "ParenExpr",   "NamePat",    "NameVar",
    "NameLit",    "QualifiedNamePat"};

[[noreturn]] void collision(const std::string& message) {
    throw Error(ErrorKind::Collision, "cannot derive transformation language: " + message);
}

void collect_terminals(const RhsElement& e, std::set<std::string>& out) {
    switch (e.kind) {
        case E::Kind::Terminal: out.insert(e.text); break;
        case E::Kind::KeywordChoice: out.insert(e.choices.begin(), e.choices.end()); break;
        case E::Kind::List:
            if (!e.separator.empty()) out.insert(e.separator);
            collect_terminals(e.element(), out);
            break;
        case E::Kind::Optional: collect_terminals(e.element(), out); break;
        default: break;
    }
}

std::set<std::string> nullable_rules(const GrammarSpec& g) {
    std::set<std::string> nullable;
    auto element_nullable = [&](const RhsElement& e, auto&& self) -> bool {
        switch (e.kind) {
            case E::Kind::Nonterminal: return nullable.count(e.text) != 0;
            case E::Kind::Optional: return true;
            case E::Kind::List: return e.min_count == 0 || self(e.element(), self);
            default: return false;
        }
    };
    bool changed = true;
    while (changed) {
        changed = false;
        for (const Production& p : g.productions) {
            if (nullable.count(p.lhs)) continue;
            bool all = std::all_of(p.body.begin(), p.body.end(),
                                   [&](const RhsElement& e) { return element_nullable(e, element_nullable); });
            if (all) changed = nullable.insert(p.lhs).second || changed;
        }
        for (const Interface& i : g.interfaces) {
            if (nullable.count(i.name)) continue;
            bool any = std::any_of(i.alternatives.begin(), i.alternatives.end(),
                                   [&](const std::string& a) { return nullable.count(a) != 0; });
            if (any) changed = nullable.insert(i.name).second || changed;
        }
    }
    return nullable;
}

void check_base(const GrammarSpec& base) {
    std::set<std::string> terminals;
    for (const Production& p : base.productions) {
        for (const RhsElement& e : p.body) collect_terminals(e, terminals);
    }
    for (std::string_view word : kReservedWords) {
        if (terminals.count(std::string(word))) {
            collision("base grammar " + base.name + " uses '" + std::string(word) +
                      "', which the transformation language reserves");
        }
    }
    auto check_name = [&](const std::string& name) {
        if (std::find(kFixedNames.begin(), kFixedNames.end(), name) != kFixedNames.end()) {
            collision("base nonterminal '" + name + "' clashes with a transformation-language nonterminal");
        }
        if (!derived::split(name).second.empty()) {
            collision("base nonterminal '" + name + "' ends with a reserved derivation suffix");
        }
    };
    for (const Production& p : base.productions) check_name(p.lhs);
    for (const Interface& i : base.interfaces) check_name(i.name);
    for (const std::string& n : nullable_rules(base)) {
        collision("nonterminal '" + n + "' can match the empty string and cannot stand alone in a pattern");
    }
}

std::string suffixed(const std::string& base, std::string_view suffix) { return base + std::string(suffix); }

RhsElement to_pattern(const RhsElement& e) {
    switch (e.kind) {
        case E::Kind::Nonterminal: return E::nonterminal(suffixed(e.text, derived::kElem), e.label);
        case E::Kind::Token:
            if (e.token == TokenKind::Name) return E::nonterminal("NamePat", e.label);
            if (e.token == TokenKind::QualifiedName) return E::nonterminal("QualifiedNamePat", e.label);
            return e;
        case E::Kind::List: {
            RhsElement out = E::list(to_pattern(e.element()), e.min_count, e.separator);
            out.label = e.label;
            return out;
        }
        case E::Kind::Optional: {
            RhsElement out = E::optional(to_pattern(e.element()));
            out.label = e.label;
            return out;
        }
        default: return e;
    }
}

/// Base nonterminal names, productions before interfaces, start symbol last.
std::vector<std::string> ordered_names(const GrammarSpec& base, bool concrete_only) {
    std::vector<std::string> names;
    for (const Production& p : base.productions) names.push_back(p.lhs);
    if (!concrete_only) {
        for (const Interface& i : base.interfaces) names.push_back(i.name);
    }
    auto it = std::find(names.begin(), names.end(), base.start_symbol);
    if (it != names.end()) std::rotate(it, it + 1, names.end());
    return names;
}

void add_control_layer(GrammarSpec& g) {
    auto& P = g.productions;
    P.push_back({"Module",
                 {E::terminal("module"), E::token_ref(TokenKind::Ident, "name"), E::terminal("{"),
                  E::list(E::nonterminal("ModuleMember", "members"), 0), E::terminal("}")}});
    g.interfaces.push_back({"ModuleMember", {"TrafoMethod", "InstrMethod"}});
    P.push_back({"TrafoMethod",
                 {E::terminal("transformation"), E::token_ref(TokenKind::Ident, "name"), E::terminal("("),
                  E::terminal(")"), E::terminal("{"), E::nonterminal("TransformationRule", "rule"),
                  E::terminal("}")}});
    P.push_back({"InstrMethod",
                 {E::token_ref(TokenKind::Ident, "name"), E::terminal("("), E::terminal(")"), E::terminal("{"),
                  E::list(E::nonterminal("Stmt", "statements"), 0), E::terminal("}")}});
    P.push_back({"Stmt",
                 {E::optional(E::keyword_choice({"loop"}, "loop")), E::token_ref(TokenKind::Ident, "callee"),
                  E::terminal("("), E::terminal(")"), E::terminal(";")}});
}

void add_rule_layer(GrammarSpec& g, const GrammarSpec& base) {
    auto& P = g.productions;
    P.push_back({"TransformationRule",
                 {E::list(E::nonterminal("TopElem", "elements"), 1),
                  E::optional(E::nonterminal("WhereBlock", "where"))}});
    Interface top{"TopElem", {}};
    for (const std::string& n : ordered_names(base, false)) top.alternatives.push_back(suffixed(n, derived::kElem));
    g.interfaces.push_back(std::move(top));
    P.push_back({"WhereBlock",
                 {E::terminal("where"), E::terminal("{"), E::list(E::nonterminal("Assignment", "assignments"), 0),
                  E::optional(E::nonterminal("OrExpr", "constraint")), E::terminal("}")}});
    P.push_back({"Assignment",
                 {E::token_ref(TokenKind::Var, "var"), E::terminal("="), E::nonterminal("OrExpr", "value"),
                  E::optional(E::terminal(";"))}});
}

void add_expression_layer(GrammarSpec& g) {
    auto& P = g.productions;
    P.push_back({"OrExpr", {E::list(E::nonterminal("AndExpr", "operands"), 1, "||")}});
    P.push_back({"AndExpr", {E::list(E::nonterminal("UnaryExpr", "operands"), 1, "&&")}});
    g.interfaces.push_back({"UnaryExpr", {"NotExpr", "CmpExpr"}});
    P.push_back({"NotExpr", {E::terminal("!"), E::nonterminal("UnaryExpr", "operand")}});
    P.push_back({"CmpExpr",
                 {E::nonterminal("PostfixExpr", "left"), E::optional(E::nonterminal("CmpTail", "tail"))}});
    P.push_back({"CmpTail",
                 {E::keyword_choice({"==", "!=", "<=", ">=", "<", ">"}, "op"),
                  E::nonterminal("PostfixExpr", "right")}});
    P.push_back({"PostfixExpr",
                 {E::nonterminal("PrimaryExpr", "primary"), E::list(E::nonterminal("MethodCall", "calls"), 0)}});
    P.push_back({"MethodCall",
                 {E::terminal("."), E::token_ref(TokenKind::Name, "method"), E::terminal("("),
                  E::list(E::nonterminal("OrExpr", "args"), 0, ","), E::terminal(")")}});
    g.interfaces.push_back({"PrimaryExpr", {"VarExpr", "StringExpr", "IntExpr", "ParenExpr"}});
    P.push_back({"VarExpr", {E::token_ref(TokenKind::Var, "var")}});
    P.push_back({"StringExpr", {E::token_ref(TokenKind::String, "value")}});
    P.push_back({"IntExpr", {E::token_ref(TokenKind::Int, "value")}});
    P.push_back({"ParenExpr", {E::terminal("("), E::nonterminal("OrExpr", "inner"), E::terminal(")")}});
}

void add_name_patterns(GrammarSpec& g) {
    g.interfaces.push_back({"NamePat", {"NameVar", "NameLit"}});
    g.productions.push_back({"NameVar", {E::token_ref(TokenKind::Var, "var")}});
    g.productions.push_back({"NameLit", {E::token_ref(TokenKind::Name, "name")}});
    g.productions.push_back({"QualifiedNamePat", {E::list(E::nonterminal("NamePat", "segments"), 1, ".")}});
}

void add_element_layer(GrammarSpec& g, const GrammarSpec& base) {
    Interface any{"AnyPat", {}};
    for (const std::string& n : ordered_names(base, true)) any.alternatives.push_back(suffixed(n, derived::kPat));
    g.interfaces.push_back(std::move(any));

    for (const std::string& n : ordered_names(base, false)) {
        const Interface* iface = base.interface(n);
        const std::string pat = suffixed(n, derived::kPat);

        Interface elem{suffixed(n, derived::kElem),
                       {suffixed(n, derived::kRepl), suffixed(n, derived::kNeg), suffixed(n, derived::kVarWhite),
                        suffixed(n, derived::kVarBlack)}};
        if (iface) {
            for (const std::string& alt : iface->alternatives) elem.alternatives.push_back(suffixed(alt, derived::kElem));
            Interface pat_iface{pat, {}};
            for (const std::string& alt : iface->alternatives) pat_iface.alternatives.push_back(suffixed(alt, derived::kPat));
            g.interfaces.push_back(std::move(pat_iface));
        } else {
            elem.alternatives.push_back(pat);
            Production pat_prod{pat, {}};
            const Production& src = *base.production(n);
            for (const RhsElement& e : src.body) pat_prod.body.push_back(to_pattern(e));
            if (!pat_prod.body.empty() && pat_prod.body.back().kind == E::Kind::Terminal &&
                pat_prod.body.back().text == ";") {
                pat_prod.body.back() = E::optional(E::terminal(";"));
            }
            g.productions.push_back(std::move(pat_prod));
        }
        g.interfaces.push_back(std::move(elem));

        g.productions.push_back({suffixed(n, derived::kRepl),
                                 {E::terminal("[["), E::optional(E::nonterminal(pat, "left")), E::terminal(":-"),
                                  E::optional(E::nonterminal(pat, "right")), E::terminal("]]"),
                                  E::optional(E::terminal(";"))}});
        g.productions.push_back({suffixed(n, derived::kNeg),
                                 {E::terminal("not"), E::terminal("[["), E::nonterminal("AnyPat", "body"),
                                  E::terminal("]]")}});
        g.productions.push_back({suffixed(n, derived::kVarWhite),
                                 {E::terminal(n), E::token_ref(TokenKind::Var, "var"), E::terminal("[["),
                                  E::nonterminal(pat, "body"), E::terminal("]]")}});
        g.productions.push_back({suffixed(n, derived::kVarBlack),
                                 {E::terminal(n), E::token_ref(TokenKind::Var, "var"), E::terminal(";")}});
    }
}

}  // namespace

GrammarSpec derive_transformation_grammar(const GrammarSpec& base) {
    check_base(base);
    GrammarSpec g;
    g.name = base.name + "Tr";
    add_control_layer(g);
    add_rule_layer(g, base);
    add_expression_layer(g);
    add_name_patterns(g);
    add_element_layer(g, base);
    g.start_symbol = std::string(derived::kModule);
    g.finalize();
    return g;
}

// ---------------------------------------------------------------------------

namespace {

std::string quote(const std::string& text) {
    std::string out = "\"";
    for (char c : text) {
        if (c == '"' || c == '\\') out += '\\';
        out += c;
    }
    return out + '"';
}

std::string emit_element(const RhsElement& e) {
    switch (e.kind) {
        case E::Kind::Terminal: return quote(e.text);
        case E::Kind::Nonterminal: return e.label + ":" + e.text;
        case E::Kind::Token: return e.label + ":" + std::string(token_kind_name(e.token));
        case E::Kind::KeywordChoice: {
            std::string out = e.label + ":[";
            for (std::size_t i = 0; i < e.choices.size(); ++i) {
                if (i) out += "|";
                out += quote(e.choices[i]);
            }
            return out + "]";
        }
        case E::Kind::List: {
            const char* suffix = e.min_count > 0 ? "+" : "*";
            if (!e.separator.empty()) {
                return "(" + emit_element(e.element()) + " || " + quote(e.separator) + ")" + suffix;
            }
            return emit_element(e.element()) + suffix;
        }
        case E::Kind::Optional: return emit_element(e.element()) + "?";
    }
    return {};
}

void emit_production(std::string& out, const Production& p) {
    out += "  " + p.lhs + " =";
    for (const RhsElement& e : p.body) out += " " + emit_element(e);
    out += " ;\n";
}

void emit_interface(std::string& out, const Interface& i) {
    out += "  interface " + i.name + " =";
    for (std::size_t k = 0; k < i.alternatives.size(); ++k) {
        out += (k ? " | " : " ") + i.alternatives[k];
    }
    out += " ;\n";
}

}  // namespace

std::string emit_grammar_file(const GrammarSpec& g) {
    std::string out = "grammar " + g.name + " {\n";
    if (const Production* p = g.production(g.start_symbol)) emit_production(out, *p);
    if (const Interface* i = g.interface(g.start_symbol)) emit_interface(out, *i);
    for (const Production& p : g.productions) {
        if (p.lhs != g.start_symbol) emit_production(out, p);
    }
    for (const Interface& i : g.interfaces) {
        if (i.name != g.start_symbol) emit_interface(out, i);
    }
    out += "}\n";
    return out;
}

}  // namespace cnctrans
