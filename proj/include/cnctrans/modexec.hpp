#pragma once

#include <functional>
#include <string>
#include <vector>

#include "cnctrans/accessor.hpp"
#include "cnctrans/ast.hpp"
#include "cnctrans/rewrite.hpp"
#include "cnctrans/rule.hpp"

namespace cnctrans {

struct StatementReport {
    std::string statement;  ///< `loop addPorts()`
    std::string rule;
    int applications = 0;
};

struct RunReport {
    std::vector<StatementReport> statements;
    int total_applications = 0;
    std::vector<std::string> diagnostics;
    bool changed = false;

    /// `addPorts: 2` lines followed by a total line.
    std::string summary() const;
};

struct RunOptions {
    int cap = kDefaultApplicationCap;
    /// Receives one line per changing application when set.
    std::function<void(const std::string&)> trace;
};

struct RunResult {
    NodePtr model;
    RunReport report;
};

/// Executes `main()`: plain calls apply a rule at most once, loops until no
/// changing match is left, instruction methods run inline.
RunResult run_module(const TransformationModule& module, const NodePtr& model, const AccessorTable& table,
                     const RunOptions& options = {});

/// `addPorts @ model.arc:1 bindings {$name=RemoteNode, $sp=RemoteNodeState}`
std::string trace_line(const Match& match, const NodePtr& model);

}  // namespace cnctrans
