#pragma once

#include "glacier/grid.hpp"

#include <string>

namespace glacier {

// ASCII grid: six-line header (ncols, nrows, xllcorner, yllcorner, cellsize,
// NODATA_value; keys case-insensitive, NODATA_value optional) followed by
// whitespace-separated cell values, first data row = top row. Values are
// written in shortest round-trip form so write/read is bit-exact.
Grid read_esri_ascii(const std::string& path);
void write_esri_ascii(const Grid& g, const std::string& path);

// Raw float32 payload, little-endian, row-major, with a JSON sidecar at
// `path + ".json"` carrying width/height/cellsize/xllcorner/yllcorner/nodata.
Grid read_raw_f32(const std::string& path);
void write_raw_f32(const Grid& g, const std::string& path);

// Extension dispatch: .asc -> ASCII grid, .raw -> raw float32.
Grid read_grid(const std::string& path);
void write_grid(const Grid& g, const std::string& path);

// Throws structural_error unless every cell is 0, 1 or nodata.
void require_mask(const Grid& g, const std::string& name);

} // namespace glacier
