#include "doctest.h"

#include "cnctrans/adl.hpp"
#include "cnctrans/error.hpp"
#include "cnctrans/match.hpp"
#include "cnctrans/pipeline.hpp"
#include "cnctrans/rewrite.hpp"
#include "fixtures.hpp"

using namespace cnctrans;

namespace {

const Language& cnc() { return *Language::cnc(); }

Rule rule(const std::string& body) { return compile_rule_text(cnc().dstl(), body, cnc().table()); }

std::vector<Match> matches(const std::string& pattern, const NodePtr& model) {
    return find_matches(rule(pattern), model, cnc().table());
}

std::vector<Match> matches(const std::string& pattern, const std::string& model_text) {
    return matches(pattern, adl::parse(model_text, "m.arc"));
}

NodePtr first_component(const NodePtr& model) { return model->children("components").at(0); }

std::string name_of(const NodePtr& n) { return *n->token("name"); }

}  // namespace

TEST_SUITE("match") {

TEST_CASE("component pattern binds the name") {
    NodePtr model = testing::fixture_model("remote_node.arc");
    Rule r = rule("component $name { }");
    auto envs = match_elem(*r.elements[0], first_component(model), {}, cnc().table());
    REQUIRE(envs.size() == 1);
    CHECK(envs[0].names == std::map<std::string, std::string>{{"name", "RemoteNode"}});
    CHECK(envs[0].elements.empty());
}

TEST_CASE("anonymous variable binds nothing") {
    NodePtr port = adl::parse("component A { port out RemoteNodeState state; }")
                       ->children("components")[0]
                       ->children("elements")[0]
                       ->children("ports")[0];
    Rule r = rule("out $_ state");
    auto envs = match_elem(*r.elements[0], port, {}, cnc().table());
    REQUIRE(envs.size() == 1);
    CHECK(envs[0].names.empty());
    CHECK(envs[0].elements.empty());
    CHECK(match_elem(*rule("in $_ state").elements[0], port, {}, cnc().table()).empty());
    CHECK(match_elem(*rule("out $_ other").elements[0], port, {}, cnc().table()).empty());
}

TEST_CASE("injectivity among siblings") {
    NodePtr model = testing::fixture_model("remote_node.arc");
    NodePtr c = first_component(model);
    CHECK(match_elem(*rule("component $x { port in int el; port in int el; }").elements[0], c, {}, cnc().table()).empty());
    CHECK(match_elem(*rule("component $x { port in int el, in int el; }").elements[0], c, {}, cnc().table()).empty());
    CHECK(match_elem(*rule("component $x { port in int el, in int er; }").elements[0], c, {}, cnc().table()).size() == 1);
    // Two port patterns over two ports: both assignments.
    auto envs = match_elem(*rule("component $x { port in int $a, in int $b; }").elements[0], c, {}, cnc().table());
    CHECK(envs.size() == 2);
}

TEST_CASE("name variables require equal text") {
    CHECK(matches("component $c { port in $t $p, in $t $q; }", testing::fixture_model("remote_node.arc")).size() == 2);
    CHECK(matches("component $c { port in $t $p, out $t $q; }", "component A { port in int a, out bool b; }").empty());
    CHECK(matches("connect $x -> $x;", "component A { connect a -> a; connect a -> b; }").size() == 1);
}

TEST_CASE("addPorts on the two-component system") {
    TransformationModule m = testing::fixture_module("add_monitoring.mtr");
    NodePtr model = testing::fixture_model("remote_node_system.arc");
    auto found = find_matches(m.rule("addPorts"), m.decomposition("addPorts"), model, cnc().table());
    REQUIRE(found.size() == 2);
    CHECK(found[0].env.names.at("name") == "RemoteNode");
    CHECK(std::get<std::string>(found[0].values.at("sp")) == "RemoteNodeState");
    CHECK(found[1].env.names.at("name") == "Actuator");

    LoopResult after = apply_rule_loop(m.rule("addPorts"), m.decomposition("addPorts"), model, cnc().table());
    CHECK(find_matches(m.rule("addPorts"), m.decomposition("addPorts"), after.model, cnc().table()).empty());
}

TEST_CASE("accessPort with and without a trust gap") {
    TransformationModule m = testing::fixture_module("client_auth.mtr");
    auto found = find_matches(m.rule("accessPort"), testing::fixture_model("shop.arc"), cnc().table());
    REQUIRE(found.size() == 1);
    CHECK(std::get<NameList>(found[0].values.at("policy")) == NameList{"employee"});
    CHECK(found[0].env.names.at("client") == "Client");
    CHECK(found[0].env.names.at("server") == "Server");
    CHECK(found[0].env.names.at("someInPort") == "order");
    CHECK(name_of(found[0].env.elements.at("C")) == "Client");
    CHECK(found[0].env.elements.at("A")->nonterminal() == "ComponentAccess");

    CHECK(find_matches(m.rule("accessPort"), testing::fixture_model("shop_equal_trust.arc"), cnc().table()).empty());
}

TEST_CASE("a model matches itself") {
    for (const std::string& name : testing::corpus_models()) {
        NodePtr model = testing::fixture_model(name);
        std::string normalized = cnc().print(*model);
        CHECK_MESSAGE(!matches(normalized, model).empty(), name);
    }
}

TEST_CASE("empty brace pattern also matches subcomponent declarations") {
    NodePtr model = testing::fixture_model("remote_node.arc");
    auto found = matches("component $c { component $x {} }", model);
    REQUIRE(found.size() == 2);
    CHECK(found[0].env.names.at("x") == "left");
    CHECK(found[1].env.names.at("x") == "right");
    // Reference form does not match definitions.
    CHECK(matches("component $t $n;", "component A { component B {} }").empty());
    // A non-empty body does not match declarations.
    CHECK(matches("component $c { component $x { port in int effort; } }", model).empty());
}

TEST_CASE("top-level elements anywhere in the tree") {
    NodePtr model = testing::fixture_model("corpus/bank.arc");
    auto levels = matches("TrustLevel $t;", model);
    CHECK(levels.size() == 2);
    auto ports = matches("in Request $p", model);
    CHECK(ports.size() == 3);
}

TEST_CASE("distinct top-level nodes unless the same variable") {
    NodePtr model = adl::parse("component A { port in int x; }");
    CHECK(matches("PortDecl $p; PortDecl $q;", model).empty());
    CHECK(matches("PortDecl $p; PortDecl $p;", model).size() == 1);
    CHECK(matches("component A {} component A {}", model).empty());
    CHECK(matches("ComponentDef $c; ComponentDef $c [[ component A {} ]]", model).size() == 1);
}

TEST_CASE("negative elements") {
    SUBCASE("scoped to the matched parent") {
        std::string model = "component A { component B { port out int state; } }\ncomponent C { port out int x; }";
        auto found = matches("component $c { not [[ out $_ state ]] }", model);
        std::vector<std::string> names;
        for (const Match& m : found) names.push_back(m.env.names.at("c"));
        // The search below A stops at the nested component B.
        CHECK(names == std::vector<std::string>{"A", "C"});
    }
    SUBCASE("bound variables inside the negative element") {
        std::string model = "component A { port in int x, out int y; connect x -> y; }";
        CHECK(matches("connect $x -> $y; not [[ connect $y -> $x; ]]", model).size() == 1);
        CHECK(matches("connect $x -> $y; not [[ connect $x -> $y; ]]", model).empty());
    }
    SUBCASE("top level covers the whole model") {
        CHECK(matches("component $c {} not [[ trustlevel 1; ]]", "component A {}\ncomponent B { trustlevel +1; }").empty());
        CHECK(matches("component $c {} not [[ trustlevel 2; ]]", "component A {}\ncomponent B { trustlevel +1; }").size() == 2);
    }
}

TEST_CASE("constraints and assignments") {
    std::string model = "component A { trustlevel 2; }\ncomponent B {}\ncomponent C { trustlevel -3; }";
    auto found = matches("ComponentDef $c; where { $c.getTrustlevel() >= 0 }", model);
    CHECK(found.size() == 2);
    found = matches("component $n {} where { $x = $n.concat(\"!\"); $x == \"B!\" }", model);
    REQUIRE(found.size() == 1);
    CHECK(std::get<std::string>(found[0].values.at("x")) == "B!");
}

TEST_CASE("expression evaluation") {
    BindingEnv env;
    env.names["name"] = "left";
    Rule r = rule("component $name {} where { $sp = $name.concat(\"State\"); }");
    CHECK(std::get<std::string>(eval_expr(*r.assignments[0].value, env, {}, cnc().table())) == "leftState");

    NodePtr shop = testing::fixture_model("shop.arc");
    auto inner = adl::view_model(shop)[0].inner_defs;
    BindingEnv trust;
    trust.elements["C"] = inner[0].node;
    trust.elements["S"] = inner[1].node;
    trust.elements["A"] = inner[0].accesses[0].node;
    Rule auth = testing::fixture_module("client_auth.mtr").rule("accessPort");
    CHECK(std::get<bool>(eval_expr(*auth.constraint, trust, {}, cnc().table())) == true);
    CHECK(std::get<NameList>(eval_expr(*auth.assignments[0].value, trust, {}, cnc().table())) == NameList{"employee"});

    Rule bad = rule("component $a {} where { $a < \"b\" }");
    BindingEnv strings;
    strings.names["a"] = "x";
    try {
        eval_expr(*bad.constraint, strings, {}, cnc().table());
        FAIL("strings were ordered");
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::Evaluation);
    }

    Rule equality = rule("Access $A; where { $A.getPolicy() == $A.getPolicy() && \"x\" != \"y\" && -1 < 0 }");
    CHECK(std::get<bool>(eval_expr(*equality.constraint, trust, {}, cnc().table())) == true);
}

TEST_CASE("evaluation errors surface from find_matches") {
    CHECK_THROWS_AS(matches("component $a {} where { $a < \"b\" }", "component A {}"), Error);
}

TEST_CASE("deterministic ordering and rendering") {
    NodePtr model = testing::fixture_model("corpus/pipeline.arc");
    auto first = matches("connect $a.$p -> $b.$q;", model);
    auto second = matches("connect $a.$p -> $b.$q;", model);
    REQUIRE(first.size() == 2);
    REQUIRE(second.size() == first.size());
    for (std::size_t i = 0; i < first.size(); ++i) CHECK(render_bindings(first[i]) == render_bindings(second[i]));
    CHECK(render_bindings(first[0]) == "{$a=first, $b=second, $p=clean, $q=raw}");
    CHECK(render_bindings(first[1]) == "{$a=second, $b=third, $p=clean, $q=raw}");

    auto with_element = matches("Connector $c [[ connect $a.$p -> third.$q; ]]", model);
    REQUIRE(with_element.size() == 1);
    CHECK(render_bindings(with_element[0]) == "{$a=second, $c=Connector@corpus/pipeline.arc:12, $p=clean, $q=raw}");
    CHECK(match_location(with_element[0], model)->line == 12);
}

TEST_CASE("variable semantics on the corpus") {
    for (const std::string& name : testing::corpus_models()) {
        NodePtr model = testing::fixture_model(name);
        for (const Match& m : matches("component $c { port in $_ $p; component $_ $n; }", model)) {
            CHECK(m.env.names.count("_") == 0);
            CHECK(m.env.elements.count("_") == 0);
        }
    }
}

}
