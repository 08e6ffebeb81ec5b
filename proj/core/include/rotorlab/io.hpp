#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "rotorlab/common.hpp"

namespace rotorlab {

// Shortest round-trip decimal representation (std::to_chars).
std::string format_double(double x);

// FNV-1a 64-bit content hash, reported as 16 hex digits.
std::uint64_t fnv1a64(const void* data, std::size_t n);
std::string fnv1a64_hex(const std::string& content);

// Writes content to `path` atomically (temp file + rename).
void atomic_write_file(const std::filesystem::path& path, const std::string& content);

std::string read_file(const std::filesystem::path& path);

// Tab-separated table: first line holds column names, numbers use
// round-trip formatting so identical runs are byte-identical.
std::string render_table(const std::vector<std::string>& names,
                         const std::vector<const std::vector<double>*>& cols);
std::string render_series(const TimeSeries& series);

TimeSeries parse_series(const std::string& content);

} // namespace rotorlab
