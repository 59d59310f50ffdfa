#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace phase_engine {

// Shortest decimal that round-trips the exact double (to_chars). All file
// output goes through this so identical runs are byte-identical.
std::string format_double(double x);

// Parses a full double; throws std::invalid_argument on trailing junk.
double parse_double(const std::string& s);

std::string join_csv_row(const std::vector<std::string>& fields);

// Splits one CSV line on commas; no quoting (none of our fields need it).
std::vector<std::string> split_csv_row(const std::string& line);

// FNV-1a over bytes, used to fingerprint canonical config text.
std::uint64_t fnv1a64(const std::string& bytes);
std::string to_hex(std::uint64_t v);

void write_text_file(const std::string& path, const std::string& content);
std::string read_text_file(const std::string& path);

}  // namespace phase_engine
