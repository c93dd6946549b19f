// cnctrans: derive transformation languages, run transformation modules on
// architecture models, and inspect models.

#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "cnctrans/derive.hpp"
#include "cnctrans/match.hpp"
#include "cnctrans/modexec.hpp"
#include "cnctrans/pipeline.hpp"

namespace fs = std::filesystem;
using namespace cnctrans;

namespace {

struct Options {
    std::string grammar_path;
    std::string base_grammar;
    std::string output;
    std::string module_path;
    std::vector<std::string> models;
    std::string model;
    std::string rule;
    bool in_place = false;
    bool trace = false;
    bool strict = false;
    std::optional<int> max_apply;
};

std::shared_ptr<const Language> language(const Options& o) {
    if (o.grammar_path.empty()) return Language::cnc();
    return Language::from_grammar_text(read_file(o.grammar_path), o.grammar_path);
}

int default_cap() {
    const char* env = std::getenv("CNCTRANS_MAX_APPLY");
    if (!env || !*env) return kDefaultApplicationCap;
    try {
        int cap = std::stoi(env);
        if (cap >= 1) return cap;
    } catch (const std::exception&) {
    }
    std::cerr << "warning: ignoring CNCTRANS_MAX_APPLY=" << env << "\n";
    return kDefaultApplicationCap;
}

/// Prints diagnostics; returns true when any of them is an error.
bool report(const std::vector<adl::Diagnostic>& diagnostics) {
    bool errors = false;
    for (const adl::Diagnostic& d : diagnostics) {
        std::cerr << d.to_string() << "\n";
        errors = errors || d.is_error();
    }
    return errors;
}

int cmd_derive(const Options& o) {
    GrammarSpec base = parse_grammar(read_file(o.base_grammar), o.base_grammar);
    std::string text = emit_grammar_file(derive_transformation_grammar(base));
    if (o.output.empty() || o.output == "-") {
        std::cout << text;
    } else {
        write_file(o.output, text);
    }
    return 0;
}

int cmd_transform(const Options& o) {
    if (o.in_place == !o.output.empty()) {
        std::cerr << "error: transform needs exactly one of -o DIR and --in-place\n";
        return 1;
    }
    auto lang = language(o);
    TransformationModule module = lang->load_module(read_file(o.module_path), o.module_path);

    std::vector<NodePtr> roots;
    for (const std::string& path : o.models) roots.push_back(lang->parse(read_file(path), path));
    NodePtr model = merge_models(roots);
    if (report(lang->check(model, o.strict))) return kExitWellFormedness;

    RunOptions run;
    run.cap = o.max_apply.value_or(default_cap());
    if (o.trace) run.trace = [](const std::string& line) { std::cout << line << "\n"; };
    RunResult result = run_module(module, model, lang->table(), run);

    std::vector<NodePtr> parts = split_models(result.model, roots, o.models);
    if (!o.in_place) fs::create_directories(o.output);
    for (std::size_t k = 0; k < o.models.size(); ++k) {
        std::string target = o.in_place ? o.models[k] : (fs::path(o.output) / fs::path(o.models[k]).filename()).string();
        write_file(target, parts[k] ? lang->print(*parts[k]) : std::string());
    }
    std::cout << result.report.summary();
    for (const std::string& d : result.report.diagnostics) std::cerr << "note: " << d << "\n";
    return 0;
}

int cmd_match(const Options& o) {
    auto lang = language(o);
    TransformationModule module = lang->load_module(read_file(o.module_path), o.module_path);
    NodePtr model = lang->parse(read_file(o.model), o.model);
    if (report(lang->check(model, o.strict))) return kExitWellFormedness;
    std::vector<Match> matches =
        find_matches(module.rule(o.rule), module.decomposition(o.rule), model, lang->table());
    for (const Match& m : matches) std::cout << trace_line(m, model) << "\n";
    std::cout << matches.size() << (matches.size() == 1 ? " match" : " matches") << "\n";
    return 0;
}

int cmd_check(const Options& o) {
    auto lang = language(o);
    NodePtr model = lang->parse(read_file(o.model), o.model);
    std::vector<adl::Diagnostic> diagnostics = lang->check(model, o.strict);
    std::size_t errors = 0;
    for (const adl::Diagnostic& d : diagnostics) {
        std::cout << d.to_string() << "\n";
        if (d.is_error()) ++errors;
    }
    std::cout << errors << " error(s), " << diagnostics.size() - errors << " warning(s)\n";
    return errors ? kExitWellFormedness : 0;
}

int cmd_fmt(const Options& o) {
    auto lang = language(o);
    std::cout << lang->print(*lang->parse(read_file(o.model), o.model));
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Derive transformation languages from grammars and apply transformation modules to models"};
    app.require_subcommand(1);
    Options o;

    auto* derive = app.add_subcommand("derive-grammar", "Write the transformation grammar derived from a base grammar");
    derive->add_option("base", o.base_grammar, "Base grammar (.mcg)")->required();
    derive->add_option("-o,--output", o.output, "Output file (default: standard output)");

    auto* transform = app.add_subcommand("transform", "Run a transformation module on models");
    transform->add_option("module", o.module_path, "Transformation module (.mtr)")->required();
    transform->add_option("models", o.models, "Models (.arc); combined into one model")->required();
    transform->add_option("-o,--output", o.output, "Output directory");
    transform->add_flag("--in-place", o.in_place, "Overwrite the input models");
    transform->add_option("--max-apply", o.max_apply, "Application cap per loop (default $CNCTRANS_MAX_APPLY or 10000)")
        ->check(CLI::PositiveNumber);
    transform->add_flag("--trace", o.trace, "Print one line per changing application");
    transform->add_flag("--strict", o.strict, "Treat unresolved component types as errors");

    auto* match = app.add_subcommand("match", "List the matches of one transformation");
    match->add_option("module", o.module_path, "Transformation module (.mtr)")->required();
    match->add_option("model", o.model, "Model (.arc)")->required();
    match->add_option("--rule", o.rule, "Transformation method name")->required();
    match->add_flag("--strict", o.strict, "Treat unresolved component types as errors");

    auto* check = app.add_subcommand("check", "Check a model for well-formedness");
    check->add_option("model", o.model, "Model (.arc)")->required();
    check->add_flag("--strict", o.strict, "Treat unresolved component types as errors");

    auto* fmt = app.add_subcommand("fmt", "Print a model in normalized form");
    fmt->add_option("model", o.model, "Model (.arc)")->required();

    for (CLI::App* sub : {transform, match, check, fmt}) {
        sub->add_option("--grammar", o.grammar_path, "Base grammar instead of the built-in one");
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? 0 : 1;
    }

    try {
        if (*derive) return cmd_derive(o);
        if (*transform) return cmd_transform(o);
        if (*match) return cmd_match(o);
        if (*check) return cmd_check(o);
        if (*fmt) return cmd_fmt(o);
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return exit_code(e.kind());
    } catch (const fs::filesystem_error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return exit_code(ErrorKind::Io);
    }
    return 1;
}
