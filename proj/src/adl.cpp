#include "cnctrans/adl.hpp"

#include <algorithm>
#include <map>
#include <set>

#include "cnctrans/error.hpp"
#include "cnctrans/parser.hpp"

namespace cnctrans::detail {
extern const std::string_view kCncGrammarText;
}

namespace cnctrans::adl {

std::string_view cnc_grammar_text() { return detail::kCncGrammarText; }

const GrammarSpec& cnc_grammar() {
    static const GrammarSpec grammar = parse_grammar(cnc_grammar_text(), "cnc.mcg");
    return grammar;
}

NodePtr parse(std::string_view text, const std::string& file_name) {
    return normalize(parse_model(cnc_grammar(), cnc_grammar().start_symbol, text, file_name));
}

namespace {

NodePtr normalize_component(const NodePtr& def) {
    const auto* elements = def->list("elements");
    if (!elements) return def;
    auto out = std::make_shared<AstNode>(def->nonterminal(), def->span());
    out->fields() = def->fields();
    std::vector<Item> normalized;
    std::optional<std::size_t> port_section;
    std::vector<Item> merged_ports;
    for (const Item& item : *elements) {
        const NodePtr* n = std::get_if<NodePtr>(&item);
        if (!n) {
            normalized.push_back(item);
            continue;
        }
        const NodePtr& node = *n;
        if (node->nonterminal() == "SubcomponentDecl") {
            std::vector<std::string> instances = node->tokens("instances");
            if (instances.size() <= 1) {
                normalized.push_back(node);
                continue;
            }
            for (const std::string& instance : instances) {
                auto single = std::make_shared<AstNode>(node->nonterminal(), node->span());
                single->fields() = node->fields();
                single->set("instances", std::vector<Item>{instance});
                normalized.push_back(NodePtr(single));
            }
        } else if (node->nonterminal() == "PortSection") {
            if (const auto* ports = node->list("ports")) {
                merged_ports.insert(merged_ports.end(), ports->begin(), ports->end());
            }
            if (!port_section) {
                port_section = normalized.size();
                normalized.push_back(node);
            }
        } else if (node->nonterminal() == "ComponentDef") {
            normalized.push_back(normalize_component(node));
        } else {
            normalized.push_back(node);
        }
    }
    if (port_section) {
        const NodePtr& first = std::get<NodePtr>(normalized[*port_section]);
        if (first->list("ports")->size() != merged_ports.size()) {
            auto merged = std::make_shared<AstNode>(first->nonterminal(), first->span());
            merged->fields() = first->fields();
            merged->set("ports", std::move(merged_ports));
            normalized[*port_section] = NodePtr(merged);
        }
    }
    out->set("elements", std::move(normalized));
    return out;
}

}  // namespace

NodePtr normalize(const NodePtr& model) {
    if (!model) return model;
    if (model->nonterminal() == "ComponentDef") return normalize_component(model);
    const auto* components = model->list("components");
    if (!components) return model;
    auto out = std::make_shared<AstNode>(model->nonterminal(), model->span());
    out->fields() = model->fields();
    std::vector<Item> items;
    for (const Item& item : *components) {
        if (const NodePtr* n = std::get_if<NodePtr>(&item)) items.push_back(normalize_component(*n));
        else items.push_back(item);
    }
    out->set("components", std::move(items));
    return out;
}

const PortView* ComponentView::port(std::string_view port_name) const {
    for (const PortView& p : ports) {
        if (p.name == port_name) return &p;
    }
    return nullptr;
}

ComponentView view_component(const NodePtr& def) {
    ComponentView view;
    view.node = def;
    if (const std::string* name = def->token("name")) view.name = *name;
    for (const NodePtr& element : def->children("elements")) {
        const std::string& kind = element->nonterminal();
        if (kind == "PortSection") {
            for (const NodePtr& port : element->children("ports")) {
                PortView pv;
                pv.direction = *port->token("direction");
                if (const std::string* type = port->token("type")) pv.type = *type;
                pv.name = *port->token("name");
                pv.node = port;
                view.ports.push_back(std::move(pv));
            }
        } else if (kind == "SubcomponentDecl") {
            for (const std::string& instance : element->tokens("instances")) {
                view.sub_refs.push_back({*element->token("type"), instance, element});
            }
        } else if (kind == "ComponentDef") {
            view.inner_defs.push_back(view_component(element));
        } else if (kind == "Connector") {
            view.connectors.push_back({*element->token("source"), *element->token("target"), element});
        } else if (kind == "TrustLevel") {
            if (!view.has_trust_level) {
                view.trust_level = static_cast<int>(int_token_value(*element->token("value")));
                view.has_trust_level = true;
            }
        } else if (kind == "PortAccess" || kind == "ComponentAccess") {
            AccessView av;
            av.variant = kind == "PortAccess" ? AccessView::Variant::PortAccess
                                              : AccessView::Variant::ComponentAccess;
            if (const std::string* port = element->token("port")) av.port = *port;
            av.policies = element->tokens("policy");
            av.node = element;
            view.accesses.push_back(std::move(av));
        } else if (kind == "IdentityLink") {
            view.identity_links.push_back({*element->token("prover"), *element->token("verifier"), element});
        }
    }
    return view;
}

std::vector<ComponentView> view_model(const NodePtr& model) {
    std::vector<ComponentView> out;
    if (model->nonterminal() == "ComponentDef") {
        out.push_back(view_component(model));
        return out;
    }
    for (const NodePtr& def : model->children("components")) out.push_back(view_component(def));
    return out;
}

std::string Diagnostic::to_string() const {
    std::string out;
    if (span) {
        out += span->file_name() + ":" + std::to_string(span->line) + ":" + std::to_string(span->column) + ": ";
    }
    out += is_error() ? "error: " : "warning: ";
    return out + message;
}

namespace {

std::vector<std::string> split_qualified(const std::string& name) {
    std::vector<std::string> parts;
    std::size_t start = 0;
    while (true) {
        std::size_t dot = name.find('.', start);
        parts.push_back(name.substr(start, dot == std::string::npos ? std::string::npos : dot - start));
        if (dot == std::string::npos) return parts;
        start = dot + 1;
    }
}

class Checker {
public:
    Checker(const NodePtr& model, bool strict) : strict_(strict) {
        for_each_node(model, [&](const NodePtr& n) {
            if (n->nonterminal() == "ComponentDef") {
                if (const std::string* name = n->token("name")) defs_.emplace(*name, n);
            }
        });
    }

    void check(const ComponentView& c) {
        std::set<std::string> port_names;
        for (const PortView& p : c.ports) {
            if (!port_names.insert(p.name).second) {
                error(p.node, "duplicate port '" + p.name + "' in component " + c.name);
            }
            if (p.type.empty()) error(p.node, "port '" + p.name + "' of component " + c.name + " has no type");
        }
        std::set<std::string> sub_names;
        std::set<std::string> reported_types;
        for (const SubcomponentRefView& s : c.sub_refs) {
            if (!sub_names.insert(s.name).second) {
                error(s.node, "duplicate subcomponent '" + s.name + "' in component " + c.name);
            }
            if (!defs_.count(s.type) && reported_types.insert(s.type).second) {
                report(strict_ ? Diagnostic::Severity::Error : Diagnostic::Severity::Warning, s.node,
                       "unknown component type '" + s.type + "' in component " + c.name);
            }
        }
        for (const ComponentView& inner : c.inner_defs) {
            if (!sub_names.insert(inner.name).second) {
                error(inner.node, "duplicate subcomponent '" + inner.name + "' in component " + c.name);
            }
        }
        for (const ConnectorView& conn : c.connectors) check_connector(c, conn);
        for (const AccessView& a : c.accesses) {
            if (a.variant != AccessView::Variant::PortAccess) continue;
            const PortView* p = c.port(a.port);
            if (!p) {
                error(a.node, "access names unknown port '" + a.port + "' in component " + c.name);
            } else if (p->direction != "in") {
                error(a.node, "access names outgoing port '" + a.port + "' in component " + c.name);
            }
        }
        for (const IdentityLinkView& link : c.identity_links) {
            if (link.prover == link.verifier) {
                error(link.node, "identity link from '" + link.prover + "' to itself");
            }
        }
        for (const ComponentView& inner : c.inner_defs) check(inner);
    }

    std::vector<Diagnostic> take() { return std::move(diagnostics_); }

private:
    enum class Side { Source, Target };

    void check_connector(const ComponentView& c, const ConnectorView& conn) {
        if (conn.source == conn.target) {
            error(conn.node, "connector from '" + conn.source + "' to itself");
            return;
        }
        check_endpoint(c, conn, conn.source, Side::Source);
        check_endpoint(c, conn, conn.target, Side::Target);
    }

    void check_endpoint(const ComponentView& c, const ConnectorView& conn, const std::string& endpoint,
                        Side side) {
        std::vector<std::string> parts = split_qualified(endpoint);
        const char* role = side == Side::Source ? "source" : "target";
        if (parts.size() == 1) {
            const PortView* p = c.port(parts[0]);
            if (!p) {
                error(conn.node, std::string("connector ") + role + " '" + endpoint + "' is not a port of " + c.name);
                return;
            }
            const char* wanted = side == Side::Source ? "in" : "out";
            if (p->direction != wanted) {
                error(conn.node, std::string("connector ") + role + " '" + endpoint + "' must be an " +
                                     (side == Side::Source ? "incoming" : "outgoing") + " port of " + c.name);
            }
            return;
        }
        if (parts.size() != 2) {
            error(conn.node, std::string("connector ") + role + " '" + endpoint + "' is not 'port' or 'sub.port'");
            return;
        }
        std::optional<ComponentView> sub_def;
        bool known = false;
        for (const SubcomponentRefView& s : c.sub_refs) {
            if (s.name == parts[0]) {
                known = true;
                if (auto it = defs_.find(s.type); it != defs_.end()) sub_def = view_component(it->second);
                break;
            }
        }
        if (!known) {
            for (const ComponentView& inner : c.inner_defs) {
                if (inner.name == parts[0]) {
                    known = true;
                    sub_def = inner;
                    break;
                }
            }
        }
        if (!known) {
            error(conn.node, std::string("connector ") + role + " '" + endpoint + "' names unknown subcomponent '" +
                                 parts[0] + "'");
            return;
        }
        if (!sub_def) return;  // unresolved type; reported separately
        const PortView* p = sub_def->port(parts[1]);
        if (!p) {
            error(conn.node, std::string("connector ") + role + " '" + endpoint + "': " + parts[0] +
                                 " has no port '" + parts[1] + "'");
            return;
        }
        const char* wanted = side == Side::Source ? "out" : "in";
        if (p->direction != wanted) {
            error(conn.node, std::string("connector ") + role + " '" + endpoint + "' must be an " +
                                 (side == Side::Source ? "outgoing" : "incoming") + " port of subcomponent " +
                                 parts[0]);
        }
    }

    void error(const NodePtr& node, std::string message) {
        report(Diagnostic::Severity::Error, node, std::move(message));
    }

    void report(Diagnostic::Severity severity, const NodePtr& node, std::string message) {
        diagnostics_.push_back({severity, std::move(message), node ? node->span() : std::nullopt});
    }

    bool strict_;
    std::multimap<std::string, NodePtr> defs_;
    std::vector<Diagnostic> diagnostics_;
};

}  // namespace

std::vector<Diagnostic> check_wellformed(const NodePtr& model, bool strict) {
    Checker checker(model, strict);
    for (const ComponentView& c : view_model(model)) checker.check(c);
    return checker.take();
}

const AccessorTable& accessor_table() {
    static const AccessorTable table = [] {
        AccessorTable t(cnc_grammar());
        t.add("ComponentDef", "getTrustlevel", ValueType::Int, [](const AstNode& def) -> Value {
            for (const NodePtr& element : def.children("elements")) {
                if (element->nonterminal() == "TrustLevel") return int_token_value(*element->token("value"));
            }
            return std::int64_t{0};
        });
        t.add_alias(PatternAlias{"ComponentDef", "elements", "SubcomponentDecl", {{"name", "instances"}}});
        return t;
    }();
    return table;
}

}  // namespace cnctrans::adl
