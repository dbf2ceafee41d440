#pragma once

#include <charconv>
#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

namespace fairprune {

// Shortest decimal form that round-trips the exact double. Keeps every
// emitted CSV byte-stable across runs.
std::string format_double(double v);

// Strict numeric parsing; returns false on trailing garbage or empty input.
bool parse_double(std::string_view s, double& out);
bool parse_int(std::string_view s, long long& out);
bool parse_u64(std::string_view s, std::uint64_t& out);

std::vector<std::string> split_line(std::string_view line, char sep);

// FNV-1a 64-bit, used for artifact content hashes in manifests.
std::uint64_t fnv1a64(const void* data, std::size_t len);
std::string hash_file_hex(const std::filesystem::path& p);
std::string hash_bytes_hex(std::string_view bytes);

std::string read_text_file(const std::filesystem::path& p);
void write_text_file(const std::filesystem::path& p, std::string_view content);

}  // namespace fairprune
