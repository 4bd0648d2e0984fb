#pragma once

#include <string>

namespace fcs {

// Shortest decimal form that parses back to the identical double.
std::string format_double(double value);

double parse_double(const std::string& token, const std::string& context);
long long parse_int(const std::string& token, const std::string& context);

std::string read_text_file(const std::string& path);

// Writes to "<path>.tmp" in the same directory, then renames. A failed write
// leaves no partial file at the destination.
void write_file_atomic(const std::string& path, const std::string& content);

}  // namespace fcs
