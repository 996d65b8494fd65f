#pragma once

#include <filesystem>
#include <string>
#include <string_view>

#include <nlohmann/json.hpp>

namespace specforge {

std::string read_text_file(const std::filesystem::path& path);
// Writes through a temporary file in the same directory, then renames.
void write_text_file(const std::filesystem::path& path, std::string_view text);

// Parse errors are rethrown as ParseError with line and column.
nlohmann::json parse_json(std::string_view text, std::string_view context);
nlohmann::json read_json_file(const std::filesystem::path& path);

// Two-space indented, trailing newline; the byte-stable on-disk form.
std::string dump_json(const nlohmann::ordered_json& j);

}  // namespace specforge
