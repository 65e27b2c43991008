#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

namespace srxbar {

/// Builds a CSV document in memory: '#'-prefixed comment lines, one header
/// row, data rows. Fields never contain commas or quotes, so stripping the
/// comment lines leaves plain RFC-4180 content.
class CsvWriter {
public:
    void comment(std::string_view text);
    void columns(std::vector<std::string> names);
    void row(const std::vector<std::string>& fields);
    const std::string& str() const { return buf_; }

private:
    std::string buf_;
    std::size_t n_columns_ = 0;
    bool header_written_ = false;
};

/// Shortest round-trip representation (%.17g).
std::string format_double(double value);
/// Value in microsiemens at 12 significant digits; integral level sums
/// print without a fractional part.
std::string format_microsiemens(double siemens);

/// FNV-1a 64-bit hash, used to stamp a config fingerprint into CSV headers.
std::uint64_t fnv1a64(std::string_view bytes);

/// Write via temp file in the target directory, then rename into place.
void write_file_atomic(const std::filesystem::path& path, std::string_view content);

}  // namespace srxbar
