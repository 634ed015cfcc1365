#include <cstdint>
#include <filesystem>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "repad/bench.hpp"

namespace {

// Scenario presets: the four look-back settings of the reference benchmark.
int scenario_lookback(int scenario) {
    switch (scenario) {
        case 1: return 3;
        case 2: return 30;
        case 3: return 60;
        case 4: return 90;
        default: throw CLI::ValidationError("--scenario", "scenario must be 1..4");
    }
}

struct Options {
    std::vector<std::string> data;
    std::string labels;
    std::vector<int> lookbacks;
    std::vector<int> scenarios;
    int k = 7;
    std::uint64_t seed = 1;
    int epochs = 50;
    double learning_rate = 0.005;
    int hidden_units = 10;
    std::string out = "out";
    bool trace = false;
    bool permissive = false;
    bool sequential = false;
};

void add_common_options(CLI::App* cmd, Options& o) {
    cmd->add_option("--labels", o.labels, "label JSON file (array of timestamps)");
    cmd->add_option("--k", o.k, "detection window half-width in points")
        ->check(CLI::Range(0, 1000000));
    cmd->add_option("--seed", o.seed, "RNG seed for every training event");
    cmd->add_option("--epochs", o.epochs, "training epochs per event")->check(CLI::PositiveNumber);
    cmd->add_option("--lr", o.learning_rate, "learning rate")
        ->check(CLI::Range(1e-12, 1.0));
    cmd->add_option("--hidden-units", o.hidden_units, "LSTM hidden units")
        ->check(CLI::Range(1, 4096));
    cmd->add_option("--out", o.out, "output directory");
    cmd->add_flag("--trace", o.trace, "also write trace.csv per run");
    cmd->add_flag("--permissive", o.permissive, "accept gaps in the timestamp grid");
}

repad::RunSpec base_spec(const Options& o) {
    repad::RunSpec spec;
    if (!o.labels.empty()) spec.labels_path = o.labels;
    spec.k = o.k;
    spec.seed = o.seed;
    spec.epochs = o.epochs;
    spec.learning_rate = o.learning_rate;
    spec.hidden_units = o.hidden_units;
    spec.output_dir = o.out;
    spec.permissive = o.permissive;
    spec.write_trace_file = o.trace;
    return spec;
}

std::vector<int> chosen_lookbacks(const Options& o, bool default_all_scenarios) {
    std::vector<int> values = o.lookbacks;
    for (int s : o.scenarios) values.push_back(scenario_lookback(s));
    if (values.empty()) {
        if (default_all_scenarios) {
            values = {3, 30, 60, 90};
        } else {
            values = {3};
        }
    }
    return values;
}

int do_run(const Options& o) {
    repad::RunSpec spec = base_spec(o);
    spec.data_path = o.data.front();
    spec.lookback = chosen_lookbacks(o, false).front();
    const repad::RunArtifacts art = repad::run(spec);
    std::cout << repad::run_report_json(art.report, spec);
    std::cerr << "report: " << (spec.output_dir / "report.json").string() << "\n";
    return 0;
}

int do_sweep(const Options& o) {
    std::vector<std::filesystem::path> data(o.data.begin(), o.data.end());
    const std::vector<int> lookbacks = chosen_lookbacks(o, true);
    const repad::SummaryTable table =
        repad::sweep(data, lookbacks, base_spec(o), !o.sequential);
    std::cout << repad::render_markdown(table);
    std::cerr << "summary: " << (std::filesystem::path(o.out) / "summary.md").string() << "\n";
    for (const repad::SummaryRow& row : table.rows) {
        if (!row.error.empty()) {
            std::cerr << "failed: " << row.dataset << " b=" << row.lookback << ": " << row.error
                      << "\n";
        }
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Streaming RePAD anomaly detector and look-back benchmark"};
    app.require_subcommand(1);
    Options o;

    CLI::App* run_cmd = app.add_subcommand("run", "detect anomalies in one series");
    run_cmd->add_option("--data", o.data, "input CSV (timestamp,value)")
        ->required()
        ->expected(1);
    run_cmd->add_option("--lookback", o.lookbacks, "look-back size b (at least 2)")
        ->expected(1)
        ->check(CLI::Range(2, 1000000));
    run_cmd->add_option("--scenario", o.scenarios, "preset 1..4 for b = 3/30/60/90")
        ->expected(1)
        ->check(CLI::Range(1, 4));
    add_common_options(run_cmd, o);

    CLI::App* sweep_cmd =
        app.add_subcommand("sweep", "run a look-back grid over one or more series");
    sweep_cmd->add_option("--data", o.data, "input CSV(s)")->required();
    sweep_cmd->add_option("--lookback", o.lookbacks, "look-back sizes (at least 2)")
        ->check(CLI::Range(2, 1000000));
    sweep_cmd->add_option("--scenario", o.scenarios, "presets 1..4 for b = 3/30/60/90")
        ->check(CLI::Range(1, 4));
    sweep_cmd->add_flag("--sequential", o.sequential, "run the grid one job at a time");
    add_common_options(sweep_cmd, o);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 1;
    }

    try {
        if (run_cmd->parsed()) return do_run(o);
        return do_sweep(o);
    } catch (const repad::SeriesIoError& e) {
        std::cerr << "data error: " << e.what();
        if (e.line() > 0) std::cerr << " (line " << e.line() << ")";
        std::cerr << "\n";
        return 2;
    } catch (const std::filesystem::filesystem_error& e) {
        std::cerr << "file error: " << e.what() << "\n";
        return 2;
    } catch (const repad::PredictorError& e) {
        std::cerr << "numeric error: " << e.what() << "\n";
        return 3;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    }
}
