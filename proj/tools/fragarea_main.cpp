// Command-line front end: validate / moments / simulate / verify over a
// JSON config. See README.md for the schema and exit codes.

#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "fragarea/config.hpp"
#include "fragarea/errors.hpp"

int main(int argc, char** argv) {
    CLI::App app{"area statistics of self-similar fragmentation processes"};
    app.require_subcommand(1);

    std::string config_path;
    fragarea::CliOverrides overrides;
    std::uint64_t seed = 0;
    std::string format, out;
    int workers = 0;

    const auto add_common = [&](CLI::App* cmd) {
        cmd->add_option("--config", config_path, "JSON config file")->required();
        cmd->add_option("--seed", seed, "override the config seed");
        cmd->add_option("--format", format, "output format: csv or json");
        cmd->add_option("--out", out, "output path ('-' for stdout)");
        cmd->add_option("--workers", workers, "worker threads (1 = serial, 0 = auto)");
    };

    CLI::App* validate = app.add_subcommand("validate", "check the measure specification");
    CLI::App* moments = app.add_subcommand("moments", "exact moment table and bounds");
    CLI::App* simulate = app.add_subcommand("simulate", "Monte Carlo estimators");
    CLI::App* verify = app.add_subcommand("verify", "residual batteries for the area law");
    for (CLI::App* cmd : {validate, moments, simulate, verify}) add_common(cmd);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) ? 1 : 0;
    }

    try {
        if (validate->count("--seed")) overrides.seed = seed;
        if (moments->count("--seed") || simulate->count("--seed") || verify->count("--seed"))
            overrides.seed = seed;
        if (!format.empty()) overrides.format = format;
        if (!out.empty()) overrides.out = out;
        for (CLI::App* cmd : {validate, moments, simulate, verify})
            if (cmd->count("--workers")) overrides.workers = workers;

        const fragarea::RunConfig cfg = fragarea::load_config(config_path, overrides);
        if (app.got_subcommand(validate))
            return fragarea::run_validate(cfg, std::cout, std::cerr);
        if (app.got_subcommand(moments)) return fragarea::run_moments(cfg, std::cout, std::cerr);
        if (app.got_subcommand(simulate))
            return fragarea::run_simulate(cfg, std::cout, std::cerr);
        return fragarea::run_verify(cfg, std::cout, std::cerr);
    } catch (const std::exception& e) {
        std::cerr << e.what() << "\n";
        return fragarea::exit_code_for(e);
    }
}
