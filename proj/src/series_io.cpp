#include "repad/series_io.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>

#include <json.hpp>

namespace repad {

namespace {

using Kind = SeriesIoError::Kind;

// Civil-calendar day arithmetic on the proleptic Gregorian calendar,
// exact over the full int64 range we care about.
std::int64_t days_from_civil(int y, int m, int d) {
    y -= m <= 2;
    const std::int64_t era = (y >= 0 ? y : y - 399) / 400;
    const unsigned yoe = static_cast<unsigned>(y - era * 400);
    const unsigned doy = (153u * static_cast<unsigned>(m + (m > 2 ? -3 : 9)) + 2u) / 5u +
                         static_cast<unsigned>(d) - 1u;
    const unsigned doe = yoe * 365u + yoe / 4u - yoe / 100u + doy;
    return era * 146097 + static_cast<std::int64_t>(doe) - 719468;
}

void civil_from_days(std::int64_t z, int& y, int& m, int& d) {
    z += 719468;
    const std::int64_t era = (z >= 0 ? z : z - 146096) / 146097;
    const unsigned doe = static_cast<unsigned>(z - era * 146097);
    const unsigned yoe = (doe - doe / 1460u + doe / 36524u - doe / 146096u) / 365u;
    const std::int64_t yy = static_cast<std::int64_t>(yoe) + era * 400;
    const unsigned doy = doe - (365u * yoe + yoe / 4u - yoe / 100u);
    const unsigned mp = (5u * doy + 2u) / 153u;
    d = static_cast<int>(doy - (153u * mp + 2u) / 5u + 1u);
    m = static_cast<int>(mp < 10 ? mp + 3 : mp - 9);
    y = static_cast<int>(yy + (m <= 2));
}

bool leap_year(int y) { return (y % 4 == 0 && y % 100 != 0) || y % 400 == 0; }

int days_in_month(int y, int m) {
    static const int kDays[] = {31, 28, 31, 30, 31, 30, 31, 31, 30, 31, 30, 31};
    if (m == 2 && leap_year(y)) return 29;
    return kDays[m - 1];
}

}  // namespace

std::int64_t parse_timestamp(const std::string& text) {
    auto fail = [&]() {
        return SeriesIoError(Kind::UnparseableTimestamp,
                             "unparseable timestamp '" + text + "' (want YYYY-MM-DD HH:MM:SS)");
    };
    if (text.size() != 19 || text[4] != '-' || text[7] != '-' || text[10] != ' ' ||
        text[13] != ':' || text[16] != ':') {
        throw fail();
    }
    auto num = [&](std::size_t pos, std::size_t len) {
        int v = 0;
        for (std::size_t i = pos; i < pos + len; ++i) {
            if (text[i] < '0' || text[i] > '9') throw fail();
            v = v * 10 + (text[i] - '0');
        }
        return v;
    };
    const int year = num(0, 4), month = num(5, 2), day = num(8, 2);
    const int hour = num(11, 2), minute = num(14, 2), second = num(17, 2);
    if (month < 1 || month > 12 || day < 1 || day > days_in_month(year, month) ||
        hour > 23 || minute > 59 || second > 59) {
        throw fail();
    }
    return days_from_civil(year, month, day) * 86400 +
           hour * 3600 + minute * 60 + second;
}

std::string format_timestamp(std::int64_t seconds) {
    std::int64_t days = seconds / 86400;
    std::int64_t sod = seconds % 86400;
    if (sod < 0) {
        sod += 86400;
        --days;
    }
    int y = 0, m = 0, d = 0;
    civil_from_days(days, y, m, d);
    char buf[64];
    std::snprintf(buf, sizeof buf, "%04d-%02d-%02d %02d:%02d:%02d", y, m, d,
                  static_cast<int>(sod / 3600), static_cast<int>((sod / 60) % 60),
                  static_cast<int>(sod % 60));
    return buf;
}

std::string format_real(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

Series parse_nab_csv(std::istream& in, std::string name, const ParseOptions& opts) {
    std::string line;
    if (!std::getline(in, line)) {
        throw SeriesIoError(Kind::MissingHeader, "empty input, expected 'timestamp,value' header", 1);
    }
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line != "timestamp,value") {
        throw SeriesIoError(Kind::MissingHeader,
                            "first line must be 'timestamp,value', got '" + line + "'", 1);
    }

    Series series;
    series.name = std::move(name);
    std::size_t line_no = 1;
    std::size_t gaps = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        const auto comma = line.find(',');
        if (comma == std::string::npos || line.find(',', comma + 1) != std::string::npos) {
            throw SeriesIoError(Kind::MalformedRow, "expected exactly two columns", line_no);
        }
        std::int64_t ts = 0;
        try {
            ts = parse_timestamp(line.substr(0, comma));
        } catch (const SeriesIoError& e) {
            throw SeriesIoError(e.kind(), e.what(), line_no);
        }
        const std::string value_text = line.substr(comma + 1);
        double value = 0.0;
        try {
            std::size_t used = 0;
            value = std::stod(value_text, &used);
            if (used != value_text.size()) throw std::invalid_argument("trailing junk");
        } catch (const std::exception&) {
            throw SeriesIoError(Kind::MalformedRow, "unparseable value '" + value_text + "'", line_no);
        }
        if (!std::isfinite(value)) {
            throw SeriesIoError(Kind::MalformedRow, "non-finite value '" + value_text + "'", line_no);
        }
        if (!series.points.empty()) {
            const std::int64_t prev = series.points.back().timestamp;
            if (ts <= prev) {
                throw SeriesIoError(Kind::NonMonotonicTimestamp,
                                    "timestamp " + format_timestamp(ts) + " does not advance past " +
                                        format_timestamp(prev),
                                    line_no);
            }
            if (series.points.size() == 1) {
                series.interval = ts - prev;
            } else if (ts - prev != series.interval) {
                if (!opts.permissive) {
                    throw SeriesIoError(Kind::NonUniformInterval,
                                        "spacing " + std::to_string(ts - prev) + "s differs from " +
                                            std::to_string(series.interval) + "s (use permissive mode "
                                            "to accept gaps)",
                                        line_no);
                }
                ++gaps;
            }
        }
        series.points.push_back({series.points.size(), ts, value});
    }
    if (series.points.empty()) {
        throw SeriesIoError(Kind::EmptySeries, "no data rows in '" + series.name + "'");
    }
    if (gaps > 0) {
        std::cerr << "warning: " << series.name << ": " << gaps
                  << " irregular timestamp gap(s) accepted\n";
    }
    return series;
}

Series load_series(const std::filesystem::path& path, const ParseOptions& opts) {
    std::ifstream in(path);
    if (!in) {
        throw SeriesIoError(Kind::FileUnreadable, "cannot open '" + path.string() + "'");
    }
    return parse_nab_csv(in, path.stem().string(), opts);
}

std::string serialize_nab_csv(const Series& series) {
    std::string out = "timestamp,value\n";
    for (const TimePoint& p : series.points) {
        out += format_timestamp(p.timestamp);
        out += ',';
        out += format_real(p.value);
        out += '\n';
    }
    return out;
}

LabelSet parse_labels(std::istream& in) {
    nlohmann::json doc;
    try {
        in >> doc;
    } catch (const nlohmann::json::exception& e) {
        throw SeriesIoError(Kind::MalformedLabelFile,
                            std::string("label file is not valid JSON: ") + e.what());
    }
    if (!doc.is_array()) {
        throw SeriesIoError(Kind::MalformedLabelFile, "label file must be a JSON array of timestamps");
    }
    LabelSet labels;
    for (const auto& item : doc) {
        if (!item.is_string()) {
            throw SeriesIoError(Kind::MalformedLabelFile, "label entries must be timestamp strings");
        }
        labels.timestamps.push_back(parse_timestamp(item.get<std::string>()));
    }
    std::sort(labels.timestamps.begin(), labels.timestamps.end());
    const auto dup = std::unique(labels.timestamps.begin(), labels.timestamps.end());
    if (dup != labels.timestamps.end()) {
        std::cerr << "warning: " << (labels.timestamps.end() - dup)
                  << " duplicate label timestamp(s) dropped\n";
        labels.timestamps.erase(dup, labels.timestamps.end());
    }
    return labels;
}

LabelSet load_labels(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) {
        throw SeriesIoError(Kind::FileUnreadable, "cannot open '" + path.string() + "'");
    }
    return parse_labels(in);
}

std::string serialize_labels(const LabelSet& labels) {
    nlohmann::json doc = nlohmann::json::array();
    for (std::int64_t ts : labels.timestamps) doc.push_back(format_timestamp(ts));
    return doc.dump(2) + "\n";
}

std::vector<std::size_t> align_labels(const Series& series, const LabelSet& labels) {
    std::vector<std::size_t> indices;
    indices.reserve(labels.timestamps.size());
    for (std::int64_t ts : labels.timestamps) {
        const auto it = std::lower_bound(
            series.points.begin(), series.points.end(), ts,
            [](const TimePoint& p, std::int64_t t) { return p.timestamp < t; });
        if (it == series.points.end() || it->timestamp != ts) {
            throw SeriesIoError(Kind::LabelNotInSeries,
                                "label " + format_timestamp(ts) + " matches no point in '" +
                                    series.name + "'");
        }
        indices.push_back(it->index);
    }
    return indices;
}

}  // namespace repad
