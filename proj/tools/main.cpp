// spreadout CLI: run / validate experiment configs and manage the result
// store.  Exit codes: 0 ok, 1 invalid input, 2 violated invariant, 3 size cap.

#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "spreadout/cli_io.hpp"
#include "spreadout/errors.hpp"

int main(int argc, char** argv) {
    CLI::App app{"spread-out contact process toolkit"};
    app.require_subcommand(1);

    std::string config_path;
    std::string store_root;

    CLI::App* run = app.add_subcommand("run", "run the experiment described by a config file");
    run->add_option("config", config_path, "INI config file")->required();
    run->add_option("--store", store_root, "result store root (default $SPREADOUT_STORE)");

    std::string validate_path;
    CLI::App* validate =
        app.add_subcommand("validate", "parse and validate a config file without running it");
    validate->add_option("config", validate_path, "INI config file")->required();

    CLI::App* cache = app.add_subcommand("cache", "result store maintenance");
    cache->require_subcommand(1);
    CLI::App* gc = cache->add_subcommand("gc", "remove corrupt store entries");
    gc->add_option("--store", store_root, "result store root (default $SPREADOUT_STORE)");

    CLI11_PARSE(app, argc, argv);

    try {
        if (run->parsed()) {
            const spreadout::ExperimentConfig cfg = spreadout::load_config(config_path);
            const spreadout::RunSummary summary = spreadout::run_experiment(cfg, store_root);
            std::cout << summary.json;
        } else if (validate->parsed()) {
            const spreadout::ExperimentConfig cfg = spreadout::load_config(validate_path);
            spreadout::validate_config(cfg);
            std::cout << "ok " << spreadout::config_hash(cfg) << "\n";
        } else if (gc->parsed()) {
            const spreadout::ResultStore store(store_root);
            std::cout << "removed " << store.gc() << " corrupt entries from " << store.root()
                      << "\n";
        }
    } catch (const spreadout::ValidationError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const spreadout::InvariantError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const spreadout::CapError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    }
    return 0;
}
