#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "nullwave/cli.hpp"
#include "nullwave/errors.hpp"

int main(int argc, char** argv) {
    CLI::App app{"Half-line wave systems with null structure: simulation and checks"};
    app.require_subcommand(1);

    std::string config_path;
    std::string out_dir;
    for (const auto& name : nullwave::subcommand_names()) {
        auto* sub = app.add_subcommand(name);
        sub->add_option("--config", config_path, "key = value config file (defaults if omitted)");
        sub->add_option("--out", out_dir, "output directory (overrides the config's out)");
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? nullwave::kExitPass : nullwave::kExitConfig;
    }

    const std::string subcommand = app.get_subcommands().front()->get_name();
    nullwave::RunConfig config;
    try {
        if (!config_path.empty()) config = nullwave::load_config(config_path);
    } catch (const nullwave::ConfigError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return nullwave::kExitConfig;
    }
    if (!out_dir.empty()) config.out = out_dir;
    return nullwave::dispatch(subcommand, config, config.out, std::cout);
}
