#pragma once

#include <string>

#include "grounder/errors.hpp"

namespace grounder {

// Pixel coordinate, origin at the top-left of the screenshot.
struct Point {
    int x = 0;
    int y = 0;
    bool operator==(const Point&) const = default;
};

// Axis-aligned pixel rectangle; valid when x1 < x2 and y1 < y2.
struct BBox {
    int x1 = 0;
    int y1 = 0;
    int x2 = 0;
    int y2 = 0;
    bool valid() const { return x1 >= 0 && y1 >= 0 && x1 < x2 && y1 < y2; }
    bool operator==(const BBox&) const = default;
};

enum class ImageFormat { Png, Jpeg };

struct ScreenshotMeta {
    int width = 0;
    int height = 0;
    std::string image_ref;  // path to the encoded image; may be empty in scripted runs
    ImageFormat format = ImageFormat::Png;
    bool valid() const { return width > 0 && height > 0; }
};

struct GuiAction {
    enum class Kind { Click };
    Kind kind = Kind::Click;
    Point point;
    bool operator==(const GuiAction&) const = default;
};

enum class CoordMode { AbsolutePixels, NormalizedThousand };

// Coordinate frame a model emits in. Specialist families disagree on this,
// so the frame is per-endpoint configuration.
struct CoordConvention {
    CoordMode mode = CoordMode::AbsolutePixels;
    std::string note;
};

/// True iff p lies inside b. Edges are half-open: x2 and y2 are excluded.
bool hit_test(Point p, const BBox& b);

/// Center of b with floor rounding; always hits b.
Point bbox_center(const BBox& b);

/// Maps p into absolute pixels. AbsolutePixels is the identity;
/// NormalizedThousand scales a 0-1000 grid onto the screen and clamps to
/// [0, width-1] x [0, height-1]. Throws OutOfRange when a normalized
/// coordinate exceeds 1000.
Point to_pixels(Point p, const CoordConvention& conv, const ScreenshotMeta& meta);

Point clamp_to_screen(Point p, const ScreenshotMeta& meta);

std::string format_point(Point p);  // "(x, y)"

const char* image_format_name(ImageFormat f);
ImageFormat image_format_from_path(const std::string& path);

}  // namespace grounder
