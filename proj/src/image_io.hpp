#pragma once

#include <string>

#include "raster.hpp"

namespace fpm::io {

// Decodes an 8-bit grayscale raster (PGM, PNG, TIFF; colour is converted).
RasterImage readGrayscale(const std::string& path);

// Writes a grayscale raster as-is; binary/skeleton rasters map 1 to 255.
// The format follows the extension (.pgm writes binary P5).
void writeImage(const RasterImage& img, const std::string& path);

}  // namespace fpm::io
