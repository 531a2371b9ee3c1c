#pragma once

#include <optional>
#include <string>

#include "grounder/geometry.hpp"

namespace grounder {

/// Extracts the first coordinate expression in `text` and converts it to
/// absolute pixels for `meta`. The grammar ladder is tried in a fixed order
/// so box outputs are never misread as two separate tuples:
///
///   (a) box        (x1,y1),(x2,y2)   -> reduced to its floor center
///   (b) tuple      (x, y) or [x, y]
///   (c) key-value  "x": N ... "y": M
///
/// The result is always within [0, width-1] x [0, height-1].
/// Throws NoCoordinateFound when nothing matches; OutOfRange propagates
/// from the NormalizedThousand conversion.
Point parse_point(const std::string& text, const CoordConvention& conv,
                  const ScreenshotMeta& meta);

/// parse_point, with both failure modes folded into nullopt.
std::optional<Point> try_parse_point(const std::string& text, const CoordConvention& conv,
                                     const ScreenshotMeta& meta);

/// Removes every coordinate expression from `text`, collapsing leftover
/// whitespace runs and trimming the ends. Text without coordinates passes
/// through (modulo whitespace normalization).
std::string elide_coordinates(const std::string& text);

}  // namespace grounder
