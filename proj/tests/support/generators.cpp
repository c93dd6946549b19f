#include "generators.hpp"

#include "cnctrans/adl.hpp"
#include "cnctrans/ast.hpp"

namespace testing {

namespace {

const std::vector<std::string> kComponents = {"A", "B", "Client", "Server"};
const std::vector<std::string> kInstances = {"a", "b", "left", "monitor"};
const std::vector<std::string> kPorts = {"x", "y", "state", "order"};
const std::vector<std::string> kTypes = {"int", "T", "Order"};
const std::vector<std::string> kPolicies = {"employee", "admin"};

template <class T>
const T& pick(Rng& rng, const std::vector<T>& pool) {
    return pool[std::uniform_int_distribution<std::size_t>(0, pool.size() - 1)(rng)];
}

int roll(Rng& rng, int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng); }

std::string endpoint(Rng& rng) {
    if (roll(rng, 0, 1)) return pick(rng, kPorts);
    return pick(rng, roll(rng, 0, 1) ? kInstances : kComponents) + "." + pick(rng, kPorts);
}

std::string names(Rng& rng, const std::vector<std::string>& pool, int max) {
    std::string out = pick(rng, pool);
    for (int n = roll(rng, 1, max); n > 1; --n) out += ", " + pick(rng, pool);
    return out;
}

void component(Rng& rng, int depth, int& budget, const std::string& indent, std::string& out) {
    out += indent + "component " + pick(rng, kComponents) + " {\n";
    int members = roll(rng, 0, 4);
    for (int i = 0; i < members && budget > 0; ++i, --budget) {
        std::string in = indent + "  ";
        switch (roll(rng, 0, depth < 2 ? 8 : 7)) {
            case 0:
            case 1: {
                out += in + "port ";
                for (int p = roll(rng, 1, 2); p > 0; --p) {
                    out += std::string(roll(rng, 0, 1) ? "in " : "out ") + pick(rng, kTypes) + " " + pick(rng, kPorts);
                    out += p > 1 ? ", " : ";\n";
                }
                break;
            }
            case 2: out += in + "component " + pick(rng, kComponents) + " " + names(rng, kInstances, 2) + ";\n"; break;
            case 3:
            case 4: out += in + "connect " + endpoint(rng) + " -> " + endpoint(rng) + ";\n"; break;
            case 5: out += in + "trustlevel " + pick(rng, std::vector<std::string>{"-1", "0", "+1", "2"}) + ";\n"; break;
            case 6:
                if (roll(rng, 0, 1)) {
                    out += in + "access " + pick(rng, kPorts) + " (" + names(rng, kPolicies, 2) + ");\n";
                } else {
                    out += in + "access (" + names(rng, kPolicies, 2) + ");\n";
                }
                break;
            case 7: out += in + "identity " + endpoint(rng) + " -> " + endpoint(rng) + ";\n"; break;
            default: component(rng, depth + 1, budget, in, out); break;
        }
    }
    out += indent + "}\n";
}

}  // namespace

std::string random_model_text(Rng& rng, int max_elements) {
    std::string out;
    int budget = max_elements;
    int components = roll(rng, 1, 3);
    for (int i = 0; i < components; ++i) {
        if (i) out += "\n";
        component(rng, 0, budget, "", out);
    }
    return out;
}

std::string random_small_model_text(Rng& rng, std::size_t max_nodes) {
    while (true) {
        std::string text = random_model_text(rng, roll(rng, 2, 10));
        if (cnctrans::preorder(cnctrans::adl::parse(text)).size() <= max_nodes) return text;
    }
}

std::string random_grammar_text(Rng& rng) {
    int count = roll(rng, 2, 5);
    std::vector<std::string> names;
    for (int i = 0; i < count; ++i) names.push_back("N" + std::to_string(i));
    std::string out = "grammar R" + std::to_string(roll(rng, 0, 999)) + " {\n";
    out += "  Root = (items:Item || \";\")+ ;\n";
    out += "  interface Item = " + names[0];
    for (int i = 1; i < count; ++i) out += " | " + names[i];
    out += " ;\n";
    for (int i = 0; i < count; ++i) {
        out += "  " + names[i] + " = \"kw" + std::to_string(i) + "\"";
        int fields = roll(rng, 1, 4);
        for (int f = 0; f < fields; ++f) {
            std::string label = "f" + std::to_string(f);
            switch (roll(rng, 0, 7)) {
                case 0: out += " " + label + ":Name"; break;
                case 1: out += " " + label + ":Int?"; break;
                case 2: out += " " + label + ":QualifiedName"; break;
                case 3: out += " " + label + ":[\"on\"|\"off\"]"; break;
                case 4: out += " \"(\" (" + label + ":Name || \",\")* \")\""; break;
                case 5: out += " \"{\" " + label + ":" + pick(rng, names) + "* \"}\""; break;
                case 6: out += " " + label + ":String"; break;
                default: out += " \"[\" " + label + ":Item? \"]\""; break;
            }
        }
        out += " ;\n";
    }
    return out + "}\n";
}

const std::vector<std::string>& pattern_library() {
    static const std::vector<std::string> library = {
        "component $c { port in $t $p; }",
        "component $c { port in $t $p, in $t $q; }",
        "component $c { port in $t $p, out $t $q; }",
        "component $_ { component $ty $n; }",
        "component $c { not [[ out $_ state ]] }",
        "SecArcComponent $S [[ component $s { Access $A; } ]]",
        "connect $a.$p -> $b.$q;",
        "component $c { component $x {} }",
        "PortDecl $p; PortDecl $q;",
        "component $c { trustlevel 1; }",
        "component $c { port out $t $p; connect $x -> $p; } where { $t != \"int\" }",
        "component $a { component $b { port in $t $x; } }",
        "connect $x -> $y; not [[ connect $y -> $x; ]]",
        "component $c { access $p ($r); port in $t $p; }",
        "ComponentDef $c; ComponentDef $c;",
        "component $c { [[ port in $t $n :- ]] }",
        "identity $a -> $b;",
        "component $c { component $t $n; not [[ connect $n.$_ -> $_; ]] }",
        "ComponentDef $C [[ component $n { Access $A; } ]] where { $C.getTrustlevel() > 0 }",
        "Access $A; TrustLevel $T; where { $T.getValue() >= 0 }",
        "component $c { port in $t x; [[ :- port out $t y; ]] }",
        "component $c { access ($r, admin); }",
        "component $c { Element $e; Element $f; } where { $c == \"A\" || $c == \"B\" }",
    };
    return library;
}

}  // namespace testing
