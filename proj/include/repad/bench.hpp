#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "repad/detector.hpp"
#include "repad/metrics.hpp"

namespace repad {

// Everything one benchmark run needs. Defaults mirror the reference setup:
// 10 hidden units, 50 epochs, learning rate 0.005, detection half-width 7.
struct RunSpec {
    std::filesystem::path data_path;
    std::optional<std::filesystem::path> labels_path;
    int lookback = 3;
    int k = 7;
    std::uint64_t seed = 1;
    int epochs = 50;
    double learning_rate = 0.005;
    int hidden_units = 10;
    std::filesystem::path output_dir = "out";
    bool permissive = false;
    bool write_trace_file = false;
};

DetectorConfig detector_config(const RunSpec& spec);
EvalConfig eval_config(const RunSpec& spec);

struct RunArtifacts {
    EvalReport report;
    std::vector<StepOutcome> trace;
};

// Loads the data (and labels if given), streams it through the detector,
// and writes report.json (plus trace.csv when requested) under
// spec.output_dir, creating it if needed.
RunArtifacts run(const RunSpec& spec);

// JSON text written for a run: the report plus an echo of the spec.
std::string run_report_json(const EvalReport& report, const RunSpec& spec);

struct SummaryRow {
    std::string dataset;
    int lookback = 0;
    std::optional<EvalReport> report;  // empty when the run failed
    std::string error;                 // failure reason, if any
};

struct SummaryTable {
    std::vector<SummaryRow> rows;  // dataset-major, look-back order preserved
};

// Cartesian product of datasets and look-back values. Each run gets its own
// subdirectory <dataset>_b<lookback> under base.output_dir. Labels are found
// per dataset: explicit labels_path applies to single-dataset sweeps, else a
// sibling "<stem>_labels.json" is used when present. A failed run is captured
// in its row; it does not stop the sweep. With parallel=true runs execute
// concurrently; row order and contents do not depend on that.
SummaryTable sweep(std::span<const std::filesystem::path> data_paths,
                   std::span<const int> lookback_values, const RunSpec& base,
                   bool parallel = true);

// Markdown table over the sweep: accuracy, preparation period, retrain
// ratio, and timing per row, 4 decimal places, "n/a" for absent values.
std::string render_markdown(const SummaryTable& table);

}  // namespace repad
