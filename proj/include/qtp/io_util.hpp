#pragma once

#include <filesystem>
#include <string>

namespace qtp {

/// printf("%.17g"); round-trips every finite double.
std::string format_double(double v);

std::string read_text_file(const std::filesystem::path& path);

/// Creates parent directories as needed.
void write_text_file(const std::filesystem::path& path, const std::string& text);

}  // namespace qtp
