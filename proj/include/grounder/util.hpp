#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace grounder {

std::string trim(const std::string& s);

// Collapses every run of whitespace (including newlines) to a single space
// and trims the ends.
std::string collapse_whitespace(const std::string& s);

std::vector<std::string> split_lines(const std::string& s);

std::string to_upper(const std::string& s);

std::string base64_encode(const unsigned char* data, std::size_t len);
std::string base64_encode(const std::string& bytes);

std::optional<std::string> read_file(const std::string& path);
void write_file(const std::string& path, const std::string& content);

std::int64_t now_ms();

std::optional<std::string> env_var(const std::string& name);

// Reads width/height from a PNG or JPEG header without decoding pixels.
std::optional<std::pair<int, int>> read_image_dims(const std::string& path);

}  // namespace grounder
