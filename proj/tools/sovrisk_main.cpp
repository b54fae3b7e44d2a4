#include <CLI11.hpp>

#include <cstdint>
#include <iostream>
#include <optional>
#include <string>

#include "sovrisk/config.hpp"
#include "sovrisk/error.hpp"
#include "sovrisk/pipeline.hpp"
#include "sovrisk/simulate.hpp"

int main(int argc, char** argv) {
    CLI::App app{"sovrisk: unrest events and sovereign-bond risk premia"};
    app.require_subcommand(1);

    std::string workspace = "workspace";
    std::string config_path;
    uint64_t seed = 1;

    auto* sim = app.add_subcommand("simulate", "generate a synthetic workspace");
    sim->add_option("--out", workspace, "output directory")->required();
    sim->add_option("--config", config_path, "INI config file");
    sim->add_option("--seed", seed, "rng seed");

    std::string monthly_csv, events_csv;
    std::optional<std::string> daily_csv;
    auto* ingest = app.add_subcommand("ingest", "validate inputs into a workspace");
    ingest->add_option("--monthly", monthly_csv, "monthly series csv")->required();
    ingest->add_option("--events", events_csv, "event catalog csv")->required();
    ingest->add_option("--daily", daily_csv, "daily quote csv");
    ingest->add_option("--workspace", workspace, "workspace directory")->required();

    auto add_cfg_cmd = [&](const char* name, const char* help, bool with_seed) {
        auto* cmd = app.add_subcommand(name, help);
        cmd->add_option("--workspace", workspace, "workspace directory")->required();
        cmd->add_option("--config", config_path, "INI config file")->required();
        if (with_seed) cmd->add_option("--seed", seed, "rng seed");
        return cmd;
    };
    auto* features = add_cfg_cmd("features", "build derived feature columns", false);
    auto* eventstudy =
        add_cfg_cmd("eventstudy", "event-study abnormal-return tests", false);
    auto* garch = add_cfg_cmd("garch", "volatility-model estimation", true);
    auto* select = add_cfg_cmd("select", "selection and IV estimation", false);

    auto* report = app.add_subcommand("report", "combine workspace reports");
    report->add_option("--workspace", workspace, "workspace directory")->required();

    CLI11_PARSE(app, argc, argv);

    try {
        sovrisk::Config cfg;
        if (!config_path.empty()) cfg = sovrisk::Config::parse_file(config_path);
        if (sim->parsed()) {
            sovrisk::simulate_workspace(cfg, seed, workspace);
            std::cout << "wrote synthetic workspace to " << workspace << "\n";
        } else if (ingest->parsed()) {
            sovrisk::IngestReport rep =
                sovrisk::cmd_ingest(monthly_csv, events_csv, daily_csv, workspace);
            std::cout << "ingested " << rep.monthly_rows << " monthly rows, "
                      << rep.event_count << " events";
            if (rep.daily_rows) std::cout << ", " << rep.daily_rows << " daily rows";
            std::cout << "\n";
            if (rep.events_empty_warning)
                std::cerr << "warning: the event catalog is empty\n";
        } else if (features->parsed()) {
            sovrisk::cmd_features(workspace, cfg);
            std::cout << "wrote " << workspace << "/features.csv\n";
        } else if (eventstudy->parsed()) {
            std::cout << sovrisk::cmd_eventstudy(workspace, cfg).to_text();
        } else if (garch->parsed()) {
            std::cout << sovrisk::cmd_garch(workspace, cfg, seed).to_text();
        } else if (select->parsed()) {
            std::cout << sovrisk::cmd_select(workspace, cfg).to_text();
        } else if (report->parsed()) {
            std::cout << sovrisk::cmd_report(workspace);
        }
    } catch (const sovrisk::DataError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const sovrisk::NumericError& e) {
        std::cerr << "numerical error: " << e.what() << "\n";
        return 2;
    }
    return 0;
}
