#pragma once

#include <filesystem>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "repad/detector.hpp"

namespace repad {

// Trace CSV: one row per consumed point, header
//   index,timestamp,value,predicted,aare,threshold,retrained,anomaly,detect_ms
// Absent optionals serialize as empty fields, booleans as 0/1, reals with
// 17 significant digits so a written trace reads back bit-exact.
std::string serialize_trace(std::span<const StepOutcome> rows);
void write_trace(const std::filesystem::path& path, std::span<const StepOutcome> rows);

// Reads a trace back into StepOutcomes. Only the bound itself is stored in
// the file, so threshold.mean and threshold.sigma come back as NaN.
std::vector<StepOutcome> parse_trace(std::istream& in);
std::vector<StepOutcome> load_trace(const std::filesystem::path& path);

}  // namespace repad
