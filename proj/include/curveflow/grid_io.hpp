#pragma once

#include <filesystem>
#include <stdexcept>
#include <variant>

#include "curveflow/grid.hpp"

namespace curveflow {

// CSV: header line `# grid1d origin h n` or `# grid2d x1_origin h1 n1 x2_origin h2 n2 [zero|periodic]`,
// a `re,im` line, then one value per line (row-major in 2D).
// Binary: `CFGF`, version byte, dimension byte, boundary byte, header, float64 re/im payload,
// all little-endian.
enum class GridFileFormat { csv, binary };

class GridFormatError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// .cfgf selects the binary form, anything else CSV.
GridFileFormat format_for_path(const std::filesystem::path& path);

void write_grid(const GridFunction1D& f, const std::filesystem::path& path, GridFileFormat format);
void write_grid(const GridFunction2D& f, const std::filesystem::path& path, GridFileFormat format);
void write_grid(const GridFunction1D& f, const std::filesystem::path& path);
void write_grid(const GridFunction2D& f, const std::filesystem::path& path);

using AnyGrid = std::variant<GridFunction1D, GridFunction2D>;
// Detects the format from the content.
AnyGrid read_grid(const std::filesystem::path& path);
GridFunction1D read_grid_1d(const std::filesystem::path& path);
GridFunction2D read_grid_2d(const std::filesystem::path& path);

}  // namespace curveflow
