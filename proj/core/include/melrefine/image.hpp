#pragma once

#include <string>

#include "melrefine/feature_map.hpp"

namespace melrefine {

// 8-bit grayscale PNG of a 2D map. Values are mapped linearly, min -> 0 and
// max -> 255 (a constant map renders 128), and the row axis is flipped so
// row 0 (the lowest mel band) lands at the bottom of the image.
void render_png(const Map2D& map, const std::string& path);

}  // namespace melrefine
