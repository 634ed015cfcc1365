#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <stdexcept>
#include <string>
#include <vector>

namespace repad {

// One sample of a series: 0-based position, naive timestamp (seconds since
// 1970-01-01 00:00:00 with no time-zone or leap-second handling), value.
struct TimePoint {
    std::size_t index = 0;
    std::int64_t timestamp = 0;
    double value = 0.0;
};

struct Series {
    std::string name;
    std::vector<TimePoint> points;
    std::int64_t interval = 0;  // seconds between the first two points

    std::size_t size() const { return points.size(); }
};

// Timestamps of labeled anomalies, ascending, no duplicates.
struct LabelSet {
    std::vector<std::int64_t> timestamps;
};

class SeriesIoError : public std::runtime_error {
  public:
    enum class Kind {
        MissingHeader,
        MalformedRow,
        NonMonotonicTimestamp,
        NonUniformInterval,
        EmptySeries,
        MalformedLabelFile,
        UnparseableTimestamp,
        LabelNotInSeries,
        FileUnreadable,
    };

    SeriesIoError(Kind kind, const std::string& message, std::size_t line = 0)
        : std::runtime_error(message), kind_(kind), line_(line) {}

    Kind kind() const { return kind_; }
    // 1-based line number of the offending row, 0 when not tied to a line.
    std::size_t line() const { return line_; }

  private:
    Kind kind_;
    std::size_t line_;
};

// "YYYY-MM-DD HH:MM:SS" <-> naive seconds. Throws SeriesIoError
// (UnparseableTimestamp) on malformed text or out-of-range fields.
std::int64_t parse_timestamp(const std::string& text);
std::string format_timestamp(std::int64_t seconds);

struct ParseOptions {
    // Accept gaps in the timestamp grid (warn instead of throwing
    // NonUniformInterval). Rows must still be strictly increasing.
    bool permissive = false;
};

// Reads "timestamp,value" CSV. The header row is required verbatim.
Series parse_nab_csv(std::istream& in, std::string name, const ParseOptions& opts = {});
Series load_series(const std::filesystem::path& path, const ParseOptions& opts = {});
std::string serialize_nab_csv(const Series& series);

// Label files are JSON arrays of timestamp strings.
LabelSet parse_labels(std::istream& in);
LabelSet load_labels(const std::filesystem::path& path);
std::string serialize_labels(const LabelSet& labels);

// Maps each label timestamp to the index of the exactly matching point.
// Result is sorted ascending. Unmatched labels throw LabelNotInSeries.
std::vector<std::size_t> align_labels(const Series& series, const LabelSet& labels);

// Shortest round-trippable decimal form of a double (17 significant digits).
std::string format_real(double v);

}  // namespace repad
