#include "doctest.h"

#include "cnctrans/adl.hpp"
#include "cnctrans/derive.hpp"
#include "cnctrans/error.hpp"
#include "cnctrans/parser.hpp"
#include "fixtures.hpp"
#include "generators.hpp"

using namespace cnctrans;

namespace {

const GrammarSpec& dstl() {
    static const GrammarSpec g = derive_transformation_grammar(adl::cnc_grammar());
    return g;
}

ErrorKind derive_error(const std::string& base) {
    try {
        derive_transformation_grammar(parse_grammar(base));
    } catch (const Error& e) {
        return e.kind();
    }
    FAIL("derivation accepted: " << base);
    return ErrorKind::Io;
}

}  // namespace

TEST_SUITE("derive") {

TEST_CASE("per-nonterminal productions") {
    const GrammarSpec& g = dstl();
    CHECK(g.start_symbol == "Module");
    for (const Production& p : adl::cnc_grammar().productions) {
        for (std::string_view suffix : {derived::kPat, derived::kRepl, derived::kNeg, derived::kVarWhite, derived::kVarBlack}) {
            CHECK_MESSAGE(g.production(p.lhs + std::string(suffix)) != nullptr, p.lhs << suffix);
        }
        const Interface* elem = g.interface(p.lhs + "_Elem");
        REQUIRE(elem != nullptr);
        CHECK(elem->alternatives == std::vector<std::string>{p.lhs + "_Repl", p.lhs + "_Neg", p.lhs + "_VarWhite",
                                                             p.lhs + "_VarBlack", p.lhs + "_Pat"});
    }
    for (const Interface& i : adl::cnc_grammar().interfaces) {
        CHECK(g.interface(i.name + "_Pat") != nullptr);
        CHECK(g.production(i.name + "_VarBlack") != nullptr);
    }
    for (const char* p : {"Module", "InstrMethod", "TrafoMethod", "Stmt", "TransformationRule", "WhereBlock", "Assignment"}) {
        CHECK_MESSAGE(g.defines(p), p);
    }
    for (const char* kw : {"not", "where", "module", "transformation", "loop"}) CHECK(g.reserved_keywords.count(kw) == 1);
}

TEST_CASE("pattern bodies mirror the base productions") {
    const Production* port = dstl().production("PortDecl_Pat");
    REQUIRE(port != nullptr);
    CHECK(port->field("name")->text == "NamePat");
    CHECK(port->field("direction")->kind == RhsElement::Kind::KeywordChoice);
    const Production* def = dstl().production("ComponentDef_Pat");
    CHECK(def->field("elements")->text == "Element_Elem");
    CHECK(dstl().production("Connector_Pat")->field("source")->text == "QualifiedNamePat");
    CHECK(dstl().production("TrustLevel_Pat")->field("value")->token == TokenKind::Int);
}

TEST_CASE("split") {
    CHECK(derived::split("ComponentDef_Pat") == std::pair<std::string, std::string>{"ComponentDef", "_Pat"});
    CHECK(derived::split("Access_VarBlack") == std::pair<std::string, std::string>{"Access", "_VarBlack"});
    CHECK(derived::split("Module") == std::pair<std::string, std::string>{"Module", ""});
}

TEST_CASE("shipped modules parse") {
    NodePtr monitoring = parse_model(dstl(), "Module", testing::fixture("add_monitoring.mtr"));
    CHECK(*monitoring->token("name") == "AddMonitoring");
    CHECK(monitoring->children("members").size() == 4);
    NodePtr auth = parse_model(dstl(), "Module", testing::fixture("client_auth.mtr"));
    CHECK(auth->children("members").size() == 2);
}

TEST_CASE("every model is a pattern") {
    for (const std::string& name : testing::corpus_models()) {
        std::string text = testing::fixture(name);
        CHECK_NOTHROW_MESSAGE(parse_model(dstl(), "TransformationRule", text), name);
    }
    testing::Rng rng(3);
    for (int i = 0; i < 200; ++i) {
        std::string text = testing::random_model_text(rng);
        REQUIRE_NOTHROW_MESSAGE(parse_model(dstl(), "TransformationRule", text), text);
    }
}

TEST_CASE("emitted file round trips") {
    std::string text = emit_grammar_file(dstl());
    CHECK(parse_grammar(text) == dstl());
    CHECK(emit_grammar_file(parse_grammar(text)) == text);
}

TEST_CASE("minimal base grammar") {
    GrammarSpec d = derive_transformation_grammar(parse_grammar("grammar T { A = \"a\" ; }"));
    std::string text = emit_grammar_file(d);
    for (const char* p : {"A_Pat =", "A_VarBlack =", "A_VarWhite =", "A_Neg =", "A_Repl =", "interface A_Elem ="}) {
        CHECK_MESSAGE(text.find(p) != std::string::npos, p);
    }
    NodePtr rule = parse_model(d, "TransformationRule", "a [[ a :- ]] not [[ a ]] A $x; A $y [[ a ]]");
    CHECK(rule->children("elements").size() == 5);
}

TEST_CASE("collisions") {
    CHECK(derive_error("grammar T { A = \"not\" x:Name ; }") == ErrorKind::Collision);
    CHECK(derive_error("grammar T { A = \"where\" ; }") == ErrorKind::Collision);
    CHECK(derive_error("grammar T { A = \"module\" ; }") == ErrorKind::Collision);
    CHECK(derive_error("grammar T { A = \"transformation\" ; }") == ErrorKind::Collision);
    CHECK(derive_error("grammar T { A = \"loop\" ; }") == ErrorKind::Collision);
    CHECK(derive_error("grammar T { A = \"a\" \":-\" ; }") == ErrorKind::Collision);
    CHECK(derive_error("grammar T { A = \"[[\" ; }") == ErrorKind::Collision);
    CHECK(derive_error("grammar T { A = \"]]\" ; }") == ErrorKind::Collision);
    CHECK(derive_error("grammar T { A = x:Name* ; }") == ErrorKind::Collision);
    CHECK(derive_error("grammar T { A = \"a\" ; B_Pat = \"b\" ; }") == ErrorKind::Collision);
    CHECK(derive_error("grammar T { A = \"a\" ; Module = \"m\" ; }") == ErrorKind::Collision);
}

TEST_CASE("random grammars: total, deterministic, round-tripping") {
    testing::Rng rng(17);
    for (int i = 0; i < 100; ++i) {
        std::string text = testing::random_grammar_text(rng);
        GrammarSpec base = parse_grammar(text);
        GrammarSpec first;
        REQUIRE_NOTHROW_MESSAGE(first = derive_transformation_grammar(base), text);
        CHECK(derive_transformation_grammar(base) == first);
        std::string emitted = emit_grammar_file(first);
        GrammarSpec reparsed = parse_grammar(emitted);
        CHECK(reparsed == first);
        for (const Production& p : base.productions) CHECK(reparsed.production(p.lhs + "_Pat") != nullptr);
    }
}

}
