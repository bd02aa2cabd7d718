#pragma once

#include <filesystem>
#include <optional>

#include "pshenv/grid.hpp"

namespace pshenv {

/// PSHG binary layout, little-endian:
///   "PSHG" | version u32 | n u32 | node count per axis u32 x 2n | h f64 |
///   origin f64 x 2n | classification u8 per node (0 exterior, 1 interior,
///   2 band) in row-major order | [values f64 per node, NaN on exterior]
inline constexpr std::uint32_t kGridFileVersion = 1;

void write_grid(const std::filesystem::path& path, const Grid& grid);
void write_grid_function(const std::filesystem::path& path, const GridFunction& u);

struct GridFile {
    GridPtr grid;
    std::optional<GridFunction> values;  // present for grid-function files
};

/// Reads either kind of file. The stencil is the standard one for the stored
/// dimension unless `stencil` is given. Throws IoError on malformed input.
GridFile read_grid_file(const std::filesystem::path& path, const StencilSet* stencil = nullptr);

}  // namespace pshenv
