#include "doctest.h"

#include <algorithm>
#include <filesystem>

#include "cnctrans/adl.hpp"
#include "cnctrans/derive.hpp"
#include "cnctrans/grammar.hpp"
#include "cnctrans/pipeline.hpp"
#include "fixtures.hpp"

namespace fs = std::filesystem;
using namespace cnctrans;

namespace {

std::string shell_arg(const std::string& path) { return "'" + path + "'"; }

std::string fx(const std::string& name) { return shell_arg(testing::fixture_path(name)); }

std::string grammar_path() { return shell_arg(std::string(CNCTRANS_FIXTURE_DIR) + "/../../grammars/cnc.mcg"); }

std::size_t count_lines(const std::string& text) { return std::count(text.begin(), text.end(), '\n'); }

}  // namespace

TEST_SUITE("cli") {

TEST_CASE("derive-grammar") {
    std::string dir = testing::temp_dir("derive");
    std::string out = dir + "/cnctr.mcg";
    auto r = testing::run_cli("derive-grammar " + grammar_path() + " -o " + shell_arg(out));
    REQUIRE(r.exit_code == 0);
    GrammarSpec derived = parse_grammar(read_file(out), out);
    CHECK(derived.start_symbol == "Module");
    CHECK(derived.production("ComponentDef_Pat") != nullptr);

    auto to_stdout = testing::run_cli("derive-grammar " + grammar_path());
    CHECK(to_stdout.exit_code == 0);
    CHECK(to_stdout.out == read_file(out));

    auto missing = testing::run_cli("derive-grammar " + shell_arg(dir + "/missing.mcg"));
    CHECK(missing.exit_code == 4);
    CHECK(missing.err.find("error:") != std::string::npos);

    // A base production named like a generated one collides.
    write_file(dir + "/clash.mcg", "grammar G { A = \"a\" B; B = \"b\"; A_Pat = \"x\"; }");
    auto clash = testing::run_cli("derive-grammar " + shell_arg(dir + "/clash.mcg"));
    CHECK(clash.exit_code == 3);

    write_file(dir + "/broken.mcg", "grammar G { A = \"a\" ; ");
    CHECK(testing::run_cli("derive-grammar " + shell_arg(dir + "/broken.mcg")).exit_code == 1);
}

TEST_CASE("transform writes the expected models") {
    std::string dir = testing::temp_dir("transform");
    auto r = testing::run_cli("transform " + fx("add_monitoring.mtr") + " " + fx("remote_node_system.arc") + " -o " +
                              shell_arg(dir));
    REQUIRE_MESSAGE(r.exit_code == 0, r.err);
    CHECK(r.out == "loop addPorts(): 2\nloop addMonitor(): 1\nloop connect(): 3\ntotal: 6 (changed)\n");
    NodePtr got = adl::parse(read_file(dir + "/remote_node_system.arc"));
    NodePtr want = testing::fixture_model("golden/add_monitoring_literal.arc");
    CHECK(structurally_equal(got, want));

    std::string auth_dir = testing::temp_dir("transform");
    auto auth = testing::run_cli("transform " + fx("client_auth.mtr") + " " + fx("shop.arc") + " -o " + shell_arg(auth_dir));
    REQUIRE(auth.exit_code == 0);
    CHECK(structurally_equal(adl::parse(read_file(auth_dir + "/shop.arc")),
                             testing::fixture_model("golden/client_auth.arc")));
}

TEST_CASE("transform in place and option errors") {
    std::string dir = testing::temp_dir("inplace");
    std::string model = dir + "/shop.arc";
    fs::copy_file(testing::fixture_path("shop.arc"), model);
    auto r = testing::run_cli("transform " + fx("client_auth.mtr") + " " + shell_arg(model) + " --in-place");
    REQUIRE(r.exit_code == 0);
    CHECK(structurally_equal(adl::parse(read_file(model)), testing::fixture_model("golden/client_auth.arc")));
    auto again = testing::run_cli("transform " + fx("client_auth.mtr") + " " + shell_arg(model) + " --in-place");
    CHECK(again.out == "loop accessPort(): 0\ntotal: 0 (unchanged)\n");

    // Neither or both output modes.
    CHECK(testing::run_cli("transform " + fx("client_auth.mtr") + " " + shell_arg(model)).exit_code == 1);
    CHECK(testing::run_cli("transform " + fx("client_auth.mtr") + " " + shell_arg(model) + " --in-place -o " + shell_arg(dir))
              .exit_code == 1);
    CHECK(testing::run_cli("transform").exit_code == 1);
    CHECK(testing::run_cli("no-such-command").exit_code == 1);
}

TEST_CASE("application cap") {
    std::string dir = testing::temp_dir("cap");
    std::string base = "transform " + fx("add_monitoring.mtr") + " " + fx("remote_node_system.arc") + " -o " + shell_arg(dir);
    auto capped = testing::run_cli(base + " --max-apply 1");
    CHECK(capped.exit_code == 3);
    CHECK(capped.err.find("addPorts") != std::string::npos);
    CHECK(testing::run_cli(base, "CNCTRANS_MAX_APPLY=1").exit_code == 3);
    CHECK(testing::run_cli(base, "CNCTRANS_MAX_APPLY=3").exit_code == 0);
    CHECK(testing::run_cli(base + " --max-apply 0").exit_code == 1);

    auto looping = testing::run_cli("transform " + fx("self_feeding.mtr") + " " + fx("shop.arc") + " -o " + shell_arg(dir),
                                    "CNCTRANS_MAX_APPLY=50");
    CHECK(looping.exit_code == 3);
}

TEST_CASE("errors map to exit codes") {
    std::string dir = testing::temp_dir("errors");
    write_file(dir + "/bad.arc", "component {\n}\n");
    auto syntax = testing::run_cli("fmt " + shell_arg(dir + "/bad.arc"));
    CHECK(syntax.exit_code == 1);
    CHECK(syntax.err.find("bad.arc:1:11: syntax error") != std::string::npos);

    write_file(dir + "/bad.mtr", "module M { main() { missing(); } }");
    CHECK(testing::run_cli("transform " + shell_arg(dir + "/bad.mtr") + " " + fx("shop.arc") + " -o " + shell_arg(dir))
              .exit_code == 1);
    CHECK(testing::run_cli("fmt " + shell_arg(dir + "/absent.arc")).exit_code == 4);
}

TEST_CASE("match") {
    auto r = testing::run_cli("match " + fx("add_monitoring.mtr") + " " + fx("remote_node_system.arc") + " --rule addPorts");
    REQUIRE(r.exit_code == 0);
    CHECK(count_lines(r.out) == 3);
    CHECK(r.out.find("bindings {$name=RemoteNode, $sp=RemoteNodeState}") != std::string::npos);
    CHECK(r.out.find("\n2 matches\n") != std::string::npos);

    auto one = testing::run_cli("match " + fx("client_auth.mtr") + " " + fx("shop.arc") + " --rule accessPort");
    CHECK(one.out.find("\n1 match\n") != std::string::npos);
    auto none = testing::run_cli("match " + fx("client_auth.mtr") + " " + fx("shop_equal_trust.arc") + " --rule accessPort");
    CHECK(none.out == "0 matches\n");
    CHECK(testing::run_cli("match " + fx("client_auth.mtr") + " " + fx("shop.arc") + " --rule nope").exit_code != 0);
}

TEST_CASE("check") {
    auto lenient = testing::run_cli("check " + fx("remote_node.arc"));
    CHECK(lenient.exit_code == 0);
    CHECK(lenient.out.find("warning:") != std::string::npos);
    CHECK(lenient.out.find("0 error(s)") != std::string::npos);
    auto strict = testing::run_cli("check --strict " + fx("remote_node.arc"));
    CHECK(strict.exit_code == 2);
    CHECK(strict.out.find("error") != std::string::npos);
    CHECK(testing::run_cli("check " + fx("remote_node_system.arc")).out == "0 error(s), 0 warning(s)\n");
}

TEST_CASE("fmt is stable") {
    for (const std::string& name : testing::corpus_models()) {
        auto first = testing::run_cli("fmt " + fx(name));
        REQUIRE_MESSAGE(first.exit_code == 0, name);
        std::string dir = testing::temp_dir("fmt");
        write_file(dir + "/x.arc", first.out);
        auto second = testing::run_cli("fmt " + shell_arg(dir + "/x.arc"));
        CHECK_MESSAGE(second.out == first.out, name);
        CHECK(first.out == testing::run_cli("fmt " + fx(name)).out);
    }
}

TEST_CASE("trace") {
    std::string dir = testing::temp_dir("trace");
    auto r = testing::run_cli("transform --trace " + fx("client_auth.mtr") + " " + fx("shop.arc") + " -o " + shell_arg(dir));
    REQUIRE(r.exit_code == 0);
    CHECK(r.out.rfind("accessPort @ ", 0) == 0);
    CHECK(r.out.find("shop.arc:2 bindings {$A=ComponentAccess@") != std::string::npos);
    CHECK(count_lines(r.out) == 3);
}

TEST_CASE("a custom grammar only parses") {
    std::string dir = testing::temp_dir("custom");
    write_file(dir + "/g.mcg", "grammar Tiny { Root = items:Item+ ; Item = \"item\" name:Name \";\"; }");
    write_file(dir + "/m.txt", "item a; item b;");
    write_file(dir + "/r.mtr", "module R { main() { loop ren(); } transformation ren() { [[ item a; :- item c; ]] } }");
    std::string g = " --grammar " + shell_arg(dir + "/g.mcg");
    auto fmt = testing::run_cli("fmt" + g + " " + shell_arg(dir + "/m.txt"));
    REQUIRE_MESSAGE(fmt.exit_code == 0, fmt.err);
    auto r = testing::run_cli("transform" + g + " " + shell_arg(dir + "/r.mtr") + " " + shell_arg(dir + "/m.txt") + " -o " +
                              shell_arg(dir + "/out"));
    REQUIRE_MESSAGE(r.exit_code == 0, r.err);
    std::string result = read_file(dir + "/out/m.txt");
    CHECK(result.find("item c;") != std::string::npos);
    CHECK(result.find("item b;") != std::string::npos);
    CHECK(result.find("item a;") == std::string::npos);
}

}
