#pragma once

#include <filesystem>

#include "modspace/grid.hpp"

namespace modspace {

/// Grid file: a JSON header {"version": 1, "L", "N", "dtype": "c128", "data"}
/// whose "data" names a sidecar holding the N samples as little-endian
/// (re, im) float64 pairs. The sidecar path is relative to the header.
/// Writes `header` and `header` with extension ".c128".
void write_grid(const std::filesystem::path& header, const GridFunction& f);

/// Throws InvalidArgument on a malformed header, unsupported version or
/// dtype, missing sidecar or a sidecar of the wrong size.
GridFunction read_grid(const std::filesystem::path& header);

}  // namespace modspace
