#include "grounder/util.hpp"

#include <cctype>
#include <chrono>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include "grounder/errors.hpp"

namespace grounder {

std::string trim(const std::string& s) {
    std::size_t begin = 0;
    std::size_t end = s.size();
    while (begin < end && std::isspace(static_cast<unsigned char>(s[begin]))) ++begin;
    while (end > begin && std::isspace(static_cast<unsigned char>(s[end - 1]))) --end;
    return s.substr(begin, end - begin);
}

std::string collapse_whitespace(const std::string& s) {
    std::string out;
    out.reserve(s.size());
    bool in_ws = false;
    for (char c : s) {
        if (std::isspace(static_cast<unsigned char>(c))) {
            in_ws = true;
            continue;
        }
        if (in_ws && !out.empty()) out.push_back(' ');
        in_ws = false;
        out.push_back(c);
    }
    return out;
}

std::vector<std::string> split_lines(const std::string& s) {
    std::vector<std::string> lines;
    std::string current;
    for (char c : s) {
        if (c == '\n') {
            lines.push_back(current);
            current.clear();
        } else if (c != '\r') {
            current.push_back(c);
        }
    }
    lines.push_back(current);
    return lines;
}

std::string to_upper(const std::string& s) {
    std::string out = s;
    for (char& c : out) c = static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
    return out;
}

std::string base64_encode(const unsigned char* data, std::size_t len) {
    static const char table[] = "ABCDEFGHIJKLMNOPQRSTUVWXYZabcdefghijklmnopqrstuvwxyz0123456789+/";
    std::string out;
    out.reserve(((len + 2) / 3) * 4);
    std::size_t i = 0;
    while (i + 2 < len) {
        unsigned v = (data[i] << 16) | (data[i + 1] << 8) | data[i + 2];
        out.push_back(table[(v >> 18) & 0x3f]);
        out.push_back(table[(v >> 12) & 0x3f]);
        out.push_back(table[(v >> 6) & 0x3f]);
        out.push_back(table[v & 0x3f]);
        i += 3;
    }
    if (i + 1 == len) {
        unsigned v = data[i] << 16;
        out.push_back(table[(v >> 18) & 0x3f]);
        out.push_back(table[(v >> 12) & 0x3f]);
        out.append("==");
    } else if (i + 2 == len) {
        unsigned v = (data[i] << 16) | (data[i + 1] << 8);
        out.push_back(table[(v >> 18) & 0x3f]);
        out.push_back(table[(v >> 12) & 0x3f]);
        out.push_back(table[(v >> 6) & 0x3f]);
        out.push_back('=');
    }
    return out;
}

std::string base64_encode(const std::string& bytes) {
    return base64_encode(reinterpret_cast<const unsigned char*>(bytes.data()), bytes.size());
}

std::optional<std::string> read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) return std::nullopt;
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw Error("cannot open for writing: " + path);
    out << content;
    if (!out) throw Error("write failed: " + path);
}

std::int64_t now_ms() {
    using namespace std::chrono;
    return duration_cast<milliseconds>(system_clock::now().time_since_epoch()).count();
}

std::optional<std::string> env_var(const std::string& name) {
    const char* v = std::getenv(name.c_str());
    if (v == nullptr || *v == '\0') return std::nullopt;
    return std::string(v);
}

namespace {

int be16(const unsigned char* p) { return (p[0] << 8) | p[1]; }

std::int64_t be32(const unsigned char* p) {
    return (static_cast<std::int64_t>(p[0]) << 24) | (p[1] << 16) | (p[2] << 8) | p[3];
}

}  // namespace

std::optional<std::pair<int, int>> read_image_dims(const std::string& path) {
    auto bytes = read_file(path);
    if (!bytes) return std::nullopt;
    const auto* p = reinterpret_cast<const unsigned char*>(bytes->data());
    std::size_t n = bytes->size();

    static const unsigned char png_sig[8] = {137, 80, 78, 71, 13, 10, 26, 10};
    if (n >= 24 && std::equal(png_sig, png_sig + 8, p)) {
        // IHDR is required to be the first chunk: width/height at offsets 16/20.
        return std::make_pair(static_cast<int>(be32(p + 16)), static_cast<int>(be32(p + 20)));
    }

    if (n >= 4 && p[0] == 0xff && p[1] == 0xd8) {
        std::size_t i = 2;
        while (i + 9 < n) {
            if (p[i] != 0xff) return std::nullopt;
            unsigned char marker = p[i + 1];
            if (marker == 0xd8 || (marker >= 0xd0 && marker <= 0xd7)) {
                i += 2;
                continue;
            }
            int seg_len = be16(p + i + 2);
            bool is_sof = marker >= 0xc0 && marker <= 0xcf && marker != 0xc4 && marker != 0xc8 &&
                          marker != 0xcc;
            if (is_sof) {
                int height = be16(p + i + 5);
                int width = be16(p + i + 7);
                return std::make_pair(width, height);
            }
            i += 2 + static_cast<std::size_t>(seg_len);
        }
    }
    return std::nullopt;
}

}  // namespace grounder
