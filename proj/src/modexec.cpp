#include "cnctrans/modexec.hpp"

#include "cnctrans/error.hpp"
#include "cnctrans/match.hpp"

namespace cnctrans {

std::string RunReport::summary() const {
    std::string out;
    for (const StatementReport& s : statements) {
        out += s.statement + ": " + std::to_string(s.applications) + "\n";
    }
    out += "total: " + std::to_string(total_applications) + (changed ? " (changed)" : " (unchanged)") + "\n";
    return out;
}

std::string trace_line(const Match& match, const NodePtr& model) {
    std::string where = "?";
    if (std::optional<Span> span = match_location(match, model)) {
        where = span->file_name() + ":" + std::to_string(span->line);
    }
    return match.rule + " @ " + where + " bindings " + render_bindings(match);
}

namespace {

class Executor {
public:
    Executor(const TransformationModule& module, const AccessorTable& table, const RunOptions& options)
        : module_(module), table_(table), options_(options) {}

    void run(const std::string& method, NodePtr& model, RunReport& report) {
        for (const Statement& s : module_.instr_methods.at(method).statements) {
            if (module_.instr_methods.count(s.callee)) {
                run(s.callee, model, report);
                continue;
            }
            const Rule& rule = module_.rule(s.callee);
            const Decomposition& d = module_.decomposition(s.callee);
            ApplyObserver observer;
            if (options_.trace) {
                observer = [this](const Match& m, const NodePtr& before) { options_.trace(trace_line(m, before)); };
            }
            LoopResult r = s.loop ? apply_rule_loop(rule, d, model, table_, options_.cap, observer)
                                  : apply_rule_once(rule, d, model, table_, observer);
            model = r.model;
            report.statements.push_back({s.to_string(), rule.name, r.applications});
            report.total_applications += r.applications;
            if (r.applications == 0 && !s.loop) {
                report.diagnostics.push_back(s.to_string() + " found no applicable match");
            }
        }
    }

private:
    const TransformationModule& module_;
    const AccessorTable& table_;
    const RunOptions& options_;
};

}  // namespace

RunResult run_module(const TransformationModule& module, const NodePtr& model, const AccessorTable& table,
                     const RunOptions& options) {
    if (!module.instr_methods.count("main")) {
        throw Error(ErrorKind::Compile, "module " + module.name + " has no main() method");
    }
    RunResult result{model, {}};
    Executor(module, table, options).run("main", result.model, result.report);
    result.report.changed = !structurally_equal(*model, *result.model);
    return result;
}

}  // namespace cnctrans
