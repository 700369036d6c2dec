#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace childpen::io {

/// Splits one delimiter-separated record. Double-quoted fields may contain the
/// delimiter; a doubled quote inside a quoted field is a literal quote.
std::vector<std::string> split_record(std::string_view line, char delimiter);

/// Quotes a field when it contains the delimiter, a quote or leading/trailing blanks.
std::string quote_field(std::string_view field, char delimiter);

std::string trim(std::string_view text);

/// Strict numeric parse of a whole (trimmed) cell; nullopt on garbage or non-finite values.
std::optional<double> parse_double(std::string_view text);
std::optional<long long> parse_int(std::string_view text);

/// Shortest text that reads back as the identical double.
std::string format_double(double value);

/// Writes to `<path>.tmp` then renames over `path`.
void write_file_atomic(const std::filesystem::path& path, std::string_view contents);
std::string read_file(const std::filesystem::path& path);

std::string sha256_hex(std::string_view bytes);
std::string sha256_file(const std::filesystem::path& path);

}  // namespace childpen::io
