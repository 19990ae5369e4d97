// resetlab: simulate and analyze ODE systems with periodic state resets.

#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "resetlab/commands.hpp"
#include "resetlab/config.hpp"
#include "resetlab/errors.hpp"

namespace {

struct Options {
    std::string config_path;
    std::string out_dir;
    std::vector<std::string> sets;
    bool strict = false;
    std::string method;
};

void add_run_options(CLI::App* cmd, Options& opt) {
    cmd->add_option("--config", opt.config_path, "Configuration file (key = value per line)");
    cmd->add_option("--out", opt.out_dir, "Output directory");
    cmd->add_option("--set", opt.sets, "Override a configuration key: key=value (repeatable)");
    cmd->add_flag("--strict", opt.strict, "Treat negative replenishment as an error");
    cmd->add_option("--method", opt.method, "Fixed-point method")->check(CLI::IsMember({"picard", "newton", "auto"}));
}

resetlab::RunConfig load(const Options& opt) {
    std::string text;
    if (!opt.config_path.empty()) {
        std::ifstream is(opt.config_path);
        if (!is) throw resetlab::ValidationError("cannot open config file '" + opt.config_path + "'");
        std::ostringstream ss;
        ss << is.rdbuf();
        text = ss.str();
    }
    std::vector<std::string> overrides = opt.sets;
    if (!opt.out_dir.empty()) overrides.push_back("out=" + opt.out_dir);
    if (opt.strict) overrides.emplace_back("strict=true");
    if (!opt.method.empty()) overrides.push_back("method=" + opt.method);
    return resetlab::parse_config(text, overrides);
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"resetlab: hybrid simulation and stroboscopic-map analysis of periodically reset ODEs"};
    app.require_subcommand(1);

    Options opt;
    app.add_subcommand("models", "List the model catalog");
    auto* simulate = app.add_subcommand("simulate", "Simulate a hybrid trajectory and write trajectory.csv");
    auto* fixpoint = app.add_subcommand("fixpoint", "Find and classify a fixed point of the stroboscopic map");
    auto* basin = app.add_subcommand("basin", "Measure the basin of attraction on a grid");
    auto* sweep = app.add_subcommand("sweep", "Fixed points across a parameter sweep");
    for (auto* cmd : {simulate, fixpoint, basin, sweep}) add_run_options(cmd, opt);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : resetlab::kExitInvalidInput;
    }

    try {
        if (app.got_subcommand("models")) {
            resetlab::run_models(std::cout);
            return resetlab::kExitOk;
        }
        const resetlab::RunConfig cfg = load(opt);
        if (simulate->parsed()) resetlab::run_simulate(cfg, std::cout);
        if (fixpoint->parsed()) resetlab::run_fixpoint(cfg, std::cout);
        if (basin->parsed()) resetlab::run_basin(cfg, std::cout);
        if (sweep->parsed()) resetlab::run_sweep(cfg, std::cout);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return resetlab::exit_code_for(e);
    }
    return resetlab::kExitOk;
}
