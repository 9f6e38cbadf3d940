#pragma once

// Minimal CSV helpers shared by the file readers and writers. Fields never
// contain quotes or commas in the formats this library reads.

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

namespace yieldcycle::csv {

struct Row {
    std::size_t line = 0; // 1-based line number in the file
    std::vector<std::string> fields;
};

/// Reads the whole file, splitting on commas and trimming whitespace/CR.
/// Blank lines are skipped. Throws DataError if the file cannot be opened.
std::vector<Row> read_file(const std::filesystem::path& path);

std::vector<std::string> split(std::string_view line);

/// Parses a real number; throws DataError mentioning `context` on failure.
double parse_double(std::string_view text, const std::string& context);

/// Shortest representation that round-trips exactly.
std::string format_double(double value);

} // namespace yieldcycle::csv
