#pragma once

#include <string>
#include <vector>

#include "cnctrans/ast.hpp"
#include "cnctrans/rule.hpp"

namespace testing {

std::string fixture_path(const std::string& name);
std::string fixture(const std::string& name);

/// Parsed and normalized CnC model from tests/fixtures.
cnctrans::NodePtr fixture_model(const std::string& name);
cnctrans::TransformationModule fixture_module(const std::string& name);

/// All `.arc` files of the fixture corpus, sorted.
std::vector<std::string> corpus_models();

struct CliResult {
    int exit_code = -1;
    std::string out;  ///< standard output
    std::string err;  ///< standard error
};

/// Runs the command-line tool with `args` (already shell-quoted as needed).
CliResult run_cli(const std::string& args, const std::string& env = {});

/// Fresh empty directory under the system temp dir.
std::string temp_dir(const std::string& tag);

}  // namespace testing
