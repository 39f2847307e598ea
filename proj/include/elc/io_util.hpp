#pragma once

#include <string>

namespace elc {

// Writes content to a temporary file in the target's directory, then
// renames. A crashed or interrupted run never leaves a half-written file
// at `path`.
void atomic_write_file(const std::string& path, const std::string& content);

std::string read_file(const std::string& path);

// Shortest decimal form that round-trips a double (%.17g).
std::string format_double(double v);

}  // namespace elc
