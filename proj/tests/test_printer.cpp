#include "doctest.h"

#include "cnctrans/adl.hpp"
#include "cnctrans/error.hpp"
#include "cnctrans/parser.hpp"
#include "cnctrans/printer.hpp"
#include "fixtures.hpp"
#include "generators.hpp"

using namespace cnctrans;

namespace {

const GrammarSpec& cnc() { return adl::cnc_grammar(); }

NodePtr raw(const std::string& text) { return parse_model(cnc(), "Model", text); }

}  // namespace

TEST_SUITE("printer") {

TEST_CASE("empty component") {
    CHECK(pretty_print(cnc(), *raw("component A {}")) == "component A {\n}\n");
}

TEST_CASE("canonical layout") {
    std::string printed = pretty_print(cnc(), *raw(testing::fixture("remote_node.arc")));
    CHECK(printed ==
          "component RemoteNode {\n"
          "  port in int el, in int er;\n"
          "  component Actuator left, right;\n"
          "  connect el -> left.effort;\n"
          "  connect er -> right.effort;\n"
          "}\n");
}

TEST_CASE("nesting and separators") {
    std::string text =
        "component A {\n"
        "  component B {\n"
        "    trustlevel -1;\n"
        "    access p (x, y);\n"
        "    access (z);\n"
        "  }\n"
        "  identity B -> c.d;\n"
        "}\n"
        "\n"
        "component C {\n"
        "}\n";
    CHECK(pretty_print(cnc(), *raw(text)) == text);
}

TEST_CASE("round trip of the remote node model") {
    NodePtr first = raw(testing::fixture("remote_node.arc"));
    NodePtr second = raw(pretty_print(cnc(), *first));
    CHECK(structurally_equal(first, second));
}

TEST_CASE("missing mandatory field") {
    auto node = std::make_shared<AstNode>("Connector");
    node->set("source", Item{std::string("a")});
    try {
        pretty_print(cnc(), *node);
        FAIL("malformed node was printed");
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::MalformedNode);
        CHECK(std::string(e.what()).find("target") != std::string::npos);
    }
}

TEST_CASE("field shape violations") {
    SUBCASE("token where a node is expected") {
        auto model = std::make_shared<AstNode>("Model");
        model->set("components", std::vector<Item>{std::string("oops")});
        CHECK_THROWS_AS(pretty_print(cnc(), *model), Error);
    }
    SUBCASE("empty mandatory list") {
        auto model = std::make_shared<AstNode>("Model");
        model->set("components", std::vector<Item>{});
        CHECK_THROWS_AS(pretty_print(cnc(), *model), Error);
    }
    SUBCASE("keyword outside its choice") {
        auto port = std::make_shared<AstNode>("PortDecl");
        port->set("direction", Item{std::string("sideways")});
        port->set("type", Item{std::string("int")});
        port->set("name", Item{std::string("x")});
        CHECK_THROWS_AS(pretty_print(cnc(), *port), Error);
    }
    SUBCASE("wrong child nonterminal") {
        auto section = std::make_shared<AstNode>("PortSection");
        section->set("ports", std::vector<Item>{NodePtr(std::make_shared<AstNode>("Connector"))});
        CHECK_THROWS_AS(pretty_print(cnc(), *section), Error);
    }
    SUBCASE("unknown nonterminal") { CHECK_THROWS_AS(pretty_print(cnc(), AstNode("Nope")), Error); }
}

TEST_CASE("random models round trip") {
    testing::Rng rng(11);
    for (int i = 0; i < 200; ++i) {
        std::string text = testing::random_model_text(rng);
        NodePtr first = raw(text);
        std::string printed = pretty_print(cnc(), *first);
        NodePtr second = raw(printed);
        REQUIRE_MESSAGE(structurally_equal(first, second), text);
        CHECK(pretty_print(cnc(), *second) == printed);
    }
}

}
