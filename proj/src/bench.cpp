#include "repad/bench.hpp"

#include <atomic>
#include <cstdio>
#include <fstream>
#include <thread>

#include <json.hpp>

#include "repad/trace_io.hpp"

namespace repad {

namespace {

void write_text(const std::filesystem::path& path, const std::string& text) {
    std::ofstream out(path);
    if (!out) {
        throw SeriesIoError(SeriesIoError::Kind::FileUnreadable,
                            "cannot write '" + path.string() + "'");
    }
    out << text;
}

std::string fmt4(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.4f", v);
    return buf;
}

std::string fmt4(const std::optional<double>& v) {
    if (!v) return "n/a";
    return fmt4(*v);
}

}  // namespace

DetectorConfig detector_config(const RunSpec& spec) {
    DetectorConfig cfg;
    cfg.lookback = spec.lookback;
    cfg.train.hidden_units = spec.hidden_units;
    cfg.train.epochs = spec.epochs;
    cfg.train.learning_rate = spec.learning_rate;
    cfg.train.seed = spec.seed;
    return cfg;
}

EvalConfig eval_config(const RunSpec& spec) {
    EvalConfig cfg;
    cfg.k = spec.k;
    return cfg;
}

std::string run_report_json(const EvalReport& report, const RunSpec& spec) {
    nlohmann::json j = nlohmann::json::parse(report_to_json(report));
    nlohmann::json echo;
    echo["data"] = spec.data_path.generic_string();
    echo["labels"] = spec.labels_path ? nlohmann::json(spec.labels_path->generic_string())
                                      : nlohmann::json(nullptr);
    echo["lookback"] = spec.lookback;
    echo["k"] = spec.k;
    echo["seed"] = spec.seed;
    echo["epochs"] = spec.epochs;
    echo["learning_rate"] = spec.learning_rate;
    echo["hidden_units"] = spec.hidden_units;
    echo["permissive"] = spec.permissive;
    j["run"] = echo;
    return j.dump(2) + "\n";
}

RunArtifacts run(const RunSpec& spec) {
    const ParseOptions popts{spec.permissive};
    const Series series = load_series(spec.data_path, popts);
    std::optional<std::vector<std::size_t>> label_indices;
    if (spec.labels_path) {
        label_indices = align_labels(series, load_labels(*spec.labels_path));
    }
    const DetectorConfig cfg = detector_config(spec);

    RunArtifacts art;
    art.trace = run_series(series, cfg);
    art.report = build_report(art.trace, label_indices, cfg, eval_config(spec));
    art.report.dataset = series.name;

    std::filesystem::create_directories(spec.output_dir);
    write_text(spec.output_dir / "report.json", run_report_json(art.report, spec));
    if (spec.write_trace_file) {
        write_trace(spec.output_dir / "trace.csv", art.trace);
    }
    return art;
}

SummaryTable sweep(std::span<const std::filesystem::path> data_paths,
                   std::span<const int> lookback_values, const RunSpec& base,
                   bool parallel) {
    SummaryTable table;
    table.rows.resize(data_paths.size() * lookback_values.size());

    auto labels_for = [&](const std::filesystem::path& data)
        -> std::optional<std::filesystem::path> {
        if (base.labels_path && data_paths.size() == 1) return base.labels_path;
        const std::filesystem::path sibling =
            data.parent_path() / (data.stem().string() + "_labels.json");
        if (std::filesystem::exists(sibling)) return sibling;
        return std::nullopt;
    };

    std::filesystem::create_directories(base.output_dir);
    auto job = [&](std::size_t slot) {
        const std::size_t di = slot / lookback_values.size();
        const std::size_t bi = slot % lookback_values.size();
        const std::filesystem::path& data = data_paths[di];
        RunSpec spec = base;
        spec.data_path = data;
        spec.labels_path = labels_for(data);
        spec.lookback = lookback_values[bi];
        spec.output_dir =
            base.output_dir / (data.stem().string() + "_b" + std::to_string(spec.lookback));
        SummaryRow& row = table.rows[slot];
        row.dataset = data.stem().string();
        row.lookback = spec.lookback;
        try {
            row.report = run(spec).report;
        } catch (const std::exception& e) {
            row.error = e.what();
        }
    };

    const std::size_t jobs = table.rows.size();
    if (parallel && jobs > 1) {
        const std::size_t workers =
            std::min<std::size_t>(jobs, std::max(1u, std::thread::hardware_concurrency()));
        std::atomic<std::size_t> next{0};
        std::vector<std::thread> pool;
        pool.reserve(workers);
        for (std::size_t w = 0; w < workers; ++w) {
            pool.emplace_back([&] {
                for (std::size_t slot = next.fetch_add(1); slot < jobs;
                     slot = next.fetch_add(1)) {
                    job(slot);
                }
            });
        }
        for (std::thread& th : pool) th.join();
    } else {
        for (std::size_t slot = 0; slot < jobs; ++slot) job(slot);
    }

    write_text(base.output_dir / "summary.md", render_markdown(table));
    return table;
}

std::string render_markdown(const SummaryTable& table) {
    std::string md =
        "| Dataset | Look-back | Precision | Recall | F-score | PP | Retrains | "
        "Retrain ratio | mu_d (s) | sigma_d (s) | Note |\n"
        "|---|---|---|---|---|---|---|---|---|---|---|\n";
    for (const SummaryRow& row : table.rows) {
        md += "| " + row.dataset + " | " + std::to_string(row.lookback) + " | ";
        if (row.report) {
            const EvalReport& r = *row.report;
            md += fmt4(r.precision) + " | " + fmt4(r.recall) + " | " + fmt4(r.fscore) + " | " +
                  std::to_string(r.preparation_period) + " | " + std::to_string(r.retrain_count) +
                  " | " + fmt4(r.retrain_ratio) + " | " + fmt4(r.detect_time.mean) + " | " +
                  fmt4(r.detect_time.sigma) + " | |";
        } else {
            md += "n/a | n/a | n/a | n/a | n/a | n/a | n/a | n/a | failed: " + row.error + " |";
        }
        md += '\n';
    }
    return md;
}

}  // namespace repad
