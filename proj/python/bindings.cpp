#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "cnctrans/derive.hpp"
#include "cnctrans/match.hpp"
#include "cnctrans/modexec.hpp"
#include "cnctrans/pipeline.hpp"

namespace py = pybind11;
using namespace cnctrans;

namespace {

const char* kind_name(ErrorKind kind) {
    switch (kind) {
        case ErrorKind::Syntax: return "syntax";
        case ErrorKind::Grammar: return "grammar";
        case ErrorKind::Collision: return "collision";
        case ErrorKind::Compile: return "compile";
        case ErrorKind::MalformedNode: return "malformed-node";
        case ErrorKind::Evaluation: return "evaluation";
        case ErrorKind::CapExceeded: return "cap-exceeded";
        case ErrorKind::StaleMatch: return "stale-match";
        case ErrorKind::Io: return "io";
    }
    return "unknown";
}

std::shared_ptr<const Language> language(const std::optional<std::string>& grammar) {
    if (!grammar) return Language::cnc();
    return Language::from_grammar_text(*grammar, "<grammar>");
}

py::dict transform(const std::string& module_text, const std::string& model_text, std::optional<int> max_apply,
                   const std::optional<std::string>& grammar, const std::string& model_name) {
    auto lang = language(grammar);
    TransformationModule module = lang->load_module(module_text, "<module>");
    NodePtr model = lang->parse(model_text, model_name);
    std::vector<std::string> trace;
    RunOptions options;
    if (max_apply) options.cap = *max_apply;
    options.trace = [&](const std::string& line) { trace.push_back(line); };
    RunResult result = run_module(module, model, lang->table(), options);

    py::list statements;
    for (const StatementReport& s : result.report.statements) {
        statements.append(py::make_tuple(s.statement, s.applications));
    }
    py::dict out;
    out["model"] = lang->print(*result.model);
    out["changed"] = result.report.changed;
    out["total"] = result.report.total_applications;
    out["statements"] = statements;
    out["summary"] = result.report.summary();
    out["diagnostics"] = result.report.diagnostics;
    out["trace"] = trace;
    return out;
}

std::vector<std::string> match(const std::string& module_text, const std::string& model_text, const std::string& rule,
                               const std::optional<std::string>& grammar, const std::string& model_name) {
    auto lang = language(grammar);
    TransformationModule module = lang->load_module(module_text, "<module>");
    NodePtr model = lang->parse(model_text, model_name);
    std::vector<std::string> out;
    for (const Match& m : find_matches(module.rule(rule), module.decomposition(rule), model, lang->table())) {
        out.push_back(trace_line(m, model));
    }
    return out;
}

std::vector<std::string> check(const std::string& model_text, bool strict, const std::string& model_name) {
    auto lang = Language::cnc();
    std::vector<std::string> out;
    for (const adl::Diagnostic& d : lang->check(lang->parse(model_text, model_name), strict)) out.push_back(d.to_string());
    return out;
}

}  // namespace

PYBIND11_MODULE(_cnctrans, m) {
    m.doc() = "Grammar-derived transformation languages for component & connector models";

    // Kept alive for the interpreter's lifetime.
    static PyObject* error = py::exception<Error>(m, "Error").release().ptr();
    py::register_exception_translator([](std::exception_ptr p) {
        try {
            if (p) std::rethrow_exception(p);
        } catch (const Error& e) {
            PyErr_SetObject(error, py::make_tuple(kind_name(e.kind()), e.what()).ptr());
        }
    });

    m.def("cnc_grammar", [] { return std::string(adl::cnc_grammar_text()); }, "Text of the built-in grammar.");
    m.def(
        "derive_grammar",
        [](const std::string& grammar_text) {
            return emit_grammar_file(derive_transformation_grammar(parse_grammar(grammar_text, "<grammar>")));
        },
        py::arg("grammar_text"), "Transformation grammar derived from a base grammar, in grammar file format.");
    m.def(
        "format_model",
        [](const std::string& text, const std::optional<std::string>& grammar, const std::string& model_name) {
            auto lang = language(grammar);
            return lang->print(*lang->parse(text, model_name));
        },
        py::arg("text"), py::kw_only(), py::arg("grammar") = py::none(), py::arg("model_name") = "<model>",
        "Parse and pretty-print a model.");
    m.def("check", &check, py::arg("text"), py::kw_only(), py::arg("strict") = false,
          py::arg("model_name") = "<model>", "Well-formedness diagnostics of a CnC model.");
    m.def("transform", &transform, py::arg("module_text"), py::arg("model_text"), py::kw_only(),
          py::arg("max_apply") = py::none(), py::arg("grammar") = py::none(), py::arg("model_name") = "<model>",
          "Run a transformation module on a model.");
    m.def("match", &match, py::arg("module_text"), py::arg("model_text"), py::arg("rule"), py::kw_only(),
          py::arg("grammar") = py::none(), py::arg("model_name") = "<model>",
          "Matches of one transformation method, one line each.");
    m.attr("DEFAULT_MAX_APPLY") = kDefaultApplicationCap;
}
