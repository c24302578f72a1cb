// SVG rendering of reachable regions in the (entry, exit) occupation plane.
#pragma once

#include "qotto/cavity.hpp"

#include <filesystem>
#include <optional>
#include <string>

namespace qotto {

/// Unit square in probability coordinates (entry on x, exit on y, origin at
/// the bottom left): diagonal, both boundary lines, hot and cold regions,
/// the reflected cold region, their overlap, the two thermal lines, and the
/// maximizing operating point with its vertical work arrow when the regions
/// overlap. `attained` marks an operating point reached by actual contact
/// times. Every coordinate is taken from `geometry` or `attained`.
std::string render_region_svg(const RegionGeometry& geometry,
                              const std::optional<Point>& attained = {});

/// Renders region_geometry(hot, cold, gaps) with gaps (hot.delta(),
/// cold.delta()) and writes it atomically to `path`.
void emit_region_figure(const CavityParams& hot, const CavityParams& cold,
                        const std::filesystem::path& path);

} // namespace qotto
