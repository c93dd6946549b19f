#include "fixtures.hpp"

#include <algorithm>
#include <atomic>
#include <cstdio>
#include <filesystem>
#include <sys/wait.h>
#include <unistd.h>

#include "cnctrans/adl.hpp"
#include "cnctrans/pipeline.hpp"

namespace fs = std::filesystem;

namespace testing {

std::string fixture_path(const std::string& name) { return std::string(CNCTRANS_FIXTURE_DIR) + "/" + name; }

std::string fixture(const std::string& name) { return cnctrans::read_file(fixture_path(name)); }

cnctrans::NodePtr fixture_model(const std::string& name) {
    return cnctrans::adl::parse(fixture(name), name);
}

cnctrans::TransformationModule fixture_module(const std::string& name) {
    return cnctrans::Language::cnc()->load_module(fixture(name), name);
}

std::vector<std::string> corpus_models() {
    std::vector<std::string> out;
    for (const auto& entry : fs::recursive_directory_iterator(CNCTRANS_FIXTURE_DIR)) {
        if (entry.is_regular_file() && entry.path().extension() == ".arc") {
            out.push_back(fs::relative(entry.path(), CNCTRANS_FIXTURE_DIR).string());
        }
    }
    std::sort(out.begin(), out.end());
    return out;
}

std::string temp_dir(const std::string& tag) {
    static std::atomic<int> counter{0};
    fs::path dir = fs::temp_directory_path() /
                   ("cnctrans-" + tag + "-" + std::to_string(::getpid()) + "-" + std::to_string(counter++));
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir.string();
}

CliResult run_cli(const std::string& args, const std::string& env) {
    std::string err_file = temp_dir("stderr") + "/err.txt";
    std::string command = env + (env.empty() ? "" : " ") + "'" + CNCTRANS_CLI_PATH + "' " + args + " 2>'" + err_file + "'";
    CliResult result;
    FILE* pipe = ::popen(command.c_str(), "r");
    if (!pipe) return result;
    char buffer[4096];
    std::size_t n;
    while ((n = std::fread(buffer, 1, sizeof buffer, pipe)) > 0) result.out.append(buffer, n);
    int status = ::pclose(pipe);
    result.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    try {
        result.err = cnctrans::read_file(err_file);
    } catch (const cnctrans::Error&) {
    }
    return result;
}

}  // namespace testing
