#include "repad/trace_io.hpp"

#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>

namespace repad {

namespace {

using Kind = SeriesIoError::Kind;

constexpr const char* kHeader =
    "index,timestamp,value,predicted,aare,threshold,retrained,anomaly,detect_ms";

std::vector<std::string> split_fields(const std::string& line) {
    std::vector<std::string> fields;
    std::size_t start = 0;
    while (true) {
        const auto comma = line.find(',', start);
        if (comma == std::string::npos) {
            fields.push_back(line.substr(start));
            return fields;
        }
        fields.push_back(line.substr(start, comma - start));
        start = comma + 1;
    }
}

double parse_real(const std::string& text, std::size_t line_no) {
    try {
        std::size_t used = 0;
        const double v = std::stod(text, &used);
        if (used != text.size()) throw std::invalid_argument("trailing junk");
        return v;
    } catch (const std::exception&) {
        throw SeriesIoError(Kind::MalformedRow, "unparseable number '" + text + "'", line_no);
    }
}

bool parse_flag(const std::string& text, std::size_t line_no) {
    if (text == "0") return false;
    if (text == "1") return true;
    throw SeriesIoError(Kind::MalformedRow, "flag must be 0 or 1, got '" + text + "'", line_no);
}

}  // namespace

std::string serialize_trace(std::span<const StepOutcome> rows) {
    std::string out = kHeader;
    out += '\n';
    for (const StepOutcome& r : rows) {
        out += std::to_string(r.index);
        out += ',';
        out += format_timestamp(r.timestamp);
        out += ',';
        out += format_real(r.value);
        out += ',';
        if (r.predicted) out += format_real(*r.predicted);
        out += ',';
        if (r.aare) out += format_real(*r.aare);
        out += ',';
        if (r.threshold) out += format_real(r.threshold->thd);
        out += ',';
        out += r.retrained ? '1' : '0';
        out += ',';
        out += r.anomaly ? '1' : '0';
        out += ',';
        out += format_real(r.duration_s * 1000.0);
        out += '\n';
    }
    return out;
}

void write_trace(const std::filesystem::path& path, std::span<const StepOutcome> rows) {
    std::ofstream out(path);
    if (!out) {
        throw SeriesIoError(Kind::FileUnreadable, "cannot write '" + path.string() + "'");
    }
    out << serialize_trace(rows);
}

std::vector<StepOutcome> parse_trace(std::istream& in) {
    std::string line;
    if (!std::getline(in, line)) {
        throw SeriesIoError(Kind::MissingHeader, "empty trace", 1);
    }
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line != kHeader) {
        throw SeriesIoError(Kind::MissingHeader, "unexpected trace header '" + line + "'", 1);
    }
    std::vector<StepOutcome> rows;
    std::size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        const auto fields = split_fields(line);
        if (fields.size() != 9) {
            throw SeriesIoError(Kind::MalformedRow, "expected 9 columns, got " +
                                                        std::to_string(fields.size()),
                                line_no);
        }
        StepOutcome r;
        try {
            r.index = static_cast<std::size_t>(std::stoull(fields[0]));
        } catch (const std::exception&) {
            throw SeriesIoError(Kind::MalformedRow, "unparseable index '" + fields[0] + "'", line_no);
        }
        try {
            r.timestamp = parse_timestamp(fields[1]);
        } catch (const SeriesIoError& e) {
            throw SeriesIoError(e.kind(), e.what(), line_no);
        }
        r.value = parse_real(fields[2], line_no);
        if (!fields[3].empty()) r.predicted = parse_real(fields[3], line_no);
        if (!fields[4].empty()) r.aare = parse_real(fields[4], line_no);
        if (!fields[5].empty()) {
            const double nan = std::numeric_limits<double>::quiet_NaN();
            r.threshold = ThresholdStats{nan, nan, parse_real(fields[5], line_no)};
        }
        r.retrained = parse_flag(fields[6], line_no);
        r.anomaly = parse_flag(fields[7], line_no);
        r.duration_s = parse_real(fields[8], line_no) / 1000.0;
        rows.push_back(r);
    }
    return rows;
}

std::vector<StepOutcome> load_trace(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) {
        throw SeriesIoError(Kind::FileUnreadable, "cannot open '" + path.string() + "'");
    }
    return parse_trace(in);
}

}  // namespace repad
