#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "unlbench/report.hpp"

int main(int argc, char** argv) {
    CLI::App app{"unlbench - seed-sensitivity benchmark harness for machine unlearning"};
    app.require_subcommand(1);

    std::string config_path;
    std::string out_path;
    int threads = 1;
    std::vector<std::string> in_csvs;

    auto* sweep_cmd = app.add_subcommand("sweep", "run the configured sweeps and write results csv");
    sweep_cmd->add_option("--config", config_path, "harness config json")->required();
    sweep_cmd->add_option("--out", out_path, "output directory (overrides config 'output')");
    sweep_cmd->add_option("--threads", threads, "worker threads; affects scheduling only, never results");

    auto* analyze_cmd = app.add_subcommand("analyze", "variance/quantile/w2 summary of results csv");
    analyze_cmd->add_option("--in", in_csvs, "results csv (repeat for a second protocol)")
        ->required();
    analyze_cmd->add_option("--out", out_path, "output json path")->required();

    auto* report_cmd = app.add_subcommand("report", "svg boxplot figures from results csv");
    report_cmd->add_option("--in", in_csvs, "results csv (repeat for a second protocol)")
        ->required();
    report_cmd->add_option("--out", out_path, "output directory for svg files")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) return app.exit(e);  // --help
        app.exit(e);
        return 2;  // bad invocation is a configuration error
    }

    if (sweep_cmd->parsed()) {
        return unlbench::cli::cmd_sweep(config_path, out_path, threads, std::cerr);
    }
    if (analyze_cmd->parsed()) {
        return unlbench::cli::cmd_analyze(in_csvs, out_path, std::cerr);
    }
    return unlbench::cli::cmd_report(in_csvs, out_path, std::cerr);
}
