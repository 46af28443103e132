#include <cstdio>
#include <exception>
#include <functional>
#include <map>

#include <CLI11.hpp>

#include "cheyette_lv/errors.hpp"
#include "commands.hpp"

namespace {

struct Command {
    const char* name;
    const char* help;
    int (*run)(const cli::RunConfig&);
};

constexpr Command commands[] = {
    {"localvol", "local vol grid CSV and arbitrage diagnostics from a variance surface",
     cli::cmd_localvol},
    {"roundtrip", "simulate with first- and third-order local vol and compare recovered smiles",
     cli::cmd_roundtrip},
    {"mueff", "effective mean reversion of the two-factor model over a maturity grid",
     cli::cmd_mueff},
    {"calibrate-swaption", "calibrate the short-rate variance slice to a swaption smile",
     cli::cmd_calibrate_swaption},
    {"ig-check", "inverse Gaussian moment checks and the expansion-order table", cli::cmd_ig_check},
};

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Explicit local volatility for Cheyette rate models.\n"
                 "Settings come from --config and may be overridden per key, e.g. --mc.seed 7.\n"
                 "Outputs go to output_dir, or $" +
                 std::string(cli::output_dir_env) + " when that is empty."};
    app.require_subcommand(1);

    std::string config_path;
    bool show_config = false;
    std::map<std::string, CLI::App*> subs;
    for (const Command& c : commands) {
        CLI::App* sub = app.add_subcommand(c.name, c.help);
        sub->add_option("--config", config_path, "JSON run configuration");
        sub->add_flag("--show-config", show_config, "print the merged configuration and exit");
        sub->allow_extras();
        sub->footer("Any other --dotted.key value pair overrides that configuration key.");
        subs[c.name] = sub;
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : cli::exit_input;
    }

    for (const Command& c : commands) {
        CLI::App* sub = subs[c.name];
        if (!sub->parsed())
            continue;
        try {
            const auto overrides = cli::parse_overrides(sub->remaining());
            const cli::RunConfig config = cli::load_run_config(c.name, config_path, overrides);
            if (show_config) {
                std::printf("%s\n", config.document.dump(2).c_str());
                return cli::exit_ok;
            }
            return c.run(config);
        } catch (const cheyette::Error& e) {
            std::fprintf(stderr, "error: %s\n", e.what());
            return cli::exit_code_for(e.kind());
        } catch (const std::exception& e) {
            std::fprintf(stderr, "error: %s\n", e.what());
            return 1;
        }
    }
    return cli::exit_input;
}
