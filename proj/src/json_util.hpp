#pragma once

// Helpers shared by the file-format readers and writers.

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "hvis/error.hpp"
#include "hvis/mask.hpp"

namespace hvis::io_detail {

using nlohmann::json;

inline constexpr int kFormatVersion = 1;

std::string read_file(const std::filesystem::path& path);
// Writes through a temporary sibling and renames, so readers never see a
// partial file.
void write_file(const std::filesystem::path& path, std::string_view text);

// Parses a document; syntax errors become ParseError with line and column.
json parse_document(std::string_view text, std::string_view source);

const json& field(const json& obj, std::string_view key, std::string_view where);
int int_field(const json& obj, std::string_view key, std::string_view where);
double number_field(const json& obj, std::string_view key, std::string_view where);
std::string string_field(const json& obj, std::string_view key, std::string_view where);
void check_version(const json& doc, std::string_view where);

// Mask from an "rle" (array or space-separated string) or "polygon" field.
BinaryMask mask_field(const json& obj, int width, int height, std::string_view where);
json rle_json(const BinaryMask& mask);

// Rounds to 9 significant decimal digits.
double round9(double v);

}  // namespace hvis::io_detail
