#include "srxbar/csv.hpp"

#include <cstdio>
#include <fstream>
#include <stdexcept>
#include <system_error>

namespace srxbar {

void CsvWriter::comment(std::string_view text) {
    if (header_written_) {
        throw std::logic_error("CsvWriter: comments must precede the header");
    }
    buf_ += "# ";
    buf_ += text;
    buf_ += "\n";
}

void CsvWriter::columns(std::vector<std::string> names) {
    if (header_written_) {
        throw std::logic_error("CsvWriter: header already written");
    }
    n_columns_ = names.size();
    for (std::size_t i = 0; i < names.size(); ++i) {
        if (i) buf_ += ",";
        buf_ += names[i];
    }
    buf_ += "\n";
    header_written_ = true;
}

void CsvWriter::row(const std::vector<std::string>& fields) {
    if (!header_written_ || fields.size() != n_columns_) {
        throw std::logic_error("CsvWriter: row arity does not match the header");
    }
    for (std::size_t i = 0; i < fields.size(); ++i) {
        if (i) buf_ += ",";
        buf_ += fields[i];
    }
    buf_ += "\n";
}

std::string format_double(double value) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", value);
    return buf;
}

std::string format_microsiemens(double siemens) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.12g", siemens * 1e6);
    return buf;
}

std::uint64_t fnv1a64(std::string_view bytes) {
    std::uint64_t h = 0xcbf29ce484222325ull;
    for (const char c : bytes) {
        h ^= static_cast<unsigned char>(c);
        h *= 0x100000001b3ull;
    }
    return h;
}

void write_file_atomic(const std::filesystem::path& path, std::string_view content) {
    const std::filesystem::path tmp =
        path.parent_path() / (path.filename().string() + ".tmp");
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) {
            throw std::runtime_error("write_file_atomic: cannot open " + tmp.string());
        }
        out.write(content.data(), static_cast<std::streamsize>(content.size()));
        if (!out.flush()) {
            throw std::runtime_error("write_file_atomic: short write to " + tmp.string());
        }
    }
    std::error_code ec;
    std::filesystem::rename(tmp, path, ec);
    if (ec) {
        std::filesystem::remove(tmp);
        throw std::runtime_error("write_file_atomic: rename failed: " + ec.message());
    }
}

}  // namespace srxbar
