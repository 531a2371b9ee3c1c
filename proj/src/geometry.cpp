#include "grounder/geometry.hpp"

#include <algorithm>
#include <cmath>

namespace grounder {

bool hit_test(Point p, const BBox& b) {
    return p.x >= b.x1 && p.x < b.x2 && p.y >= b.y1 && p.y < b.y2;
}

Point bbox_center(const BBox& b) {
    // Integer division floors for non-negative coordinates, which keeps the
    // center strictly inside the half-open box whenever the box is valid.
    return Point{(b.x1 + b.x2) / 2, (b.y1 + b.y2) / 2};
}

Point clamp_to_screen(Point p, const ScreenshotMeta& meta) {
    return Point{std::clamp(p.x, 0, meta.width - 1), std::clamp(p.y, 0, meta.height - 1)};
}

Point to_pixels(Point p, const CoordConvention& conv, const ScreenshotMeta& meta) {
    switch (conv.mode) {
        case CoordMode::AbsolutePixels:
            return p;
        case CoordMode::NormalizedThousand: {
            if (p.x > 1000 || p.y > 1000) {
                throw OutOfRange("normalized coordinate exceeds 1000: " + format_point(p));
            }
            Point scaled{
                static_cast<int>(std::llround(p.x * static_cast<double>(meta.width) / 1000.0)),
                static_cast<int>(std::llround(p.y * static_cast<double>(meta.height) / 1000.0))};
            return clamp_to_screen(scaled, meta);
        }
    }
    return p;
}

std::string format_point(Point p) {
    return "(" + std::to_string(p.x) + ", " + std::to_string(p.y) + ")";
}

const char* image_format_name(ImageFormat f) {
    return f == ImageFormat::Png ? "png" : "jpeg";
}

ImageFormat image_format_from_path(const std::string& path) {
    auto dot = path.find_last_of('.');
    if (dot == std::string::npos) return ImageFormat::Png;
    std::string ext = path.substr(dot + 1);
    for (char& c : ext) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    if (ext == "jpg" || ext == "jpeg") return ImageFormat::Jpeg;
    return ImageFormat::Png;
}

}  // namespace grounder
