#pragma once

// Synthetic split surfaces for the height-field test, as facet normals
// oriented consistently from one side to the other.

#include "splitpack/geometry.hpp"

#include <string>
#include <vector>

namespace surfaces {

using namespace splitpack;

struct Surface {
  std::string name;
  std::vector<Vec3> normals;
};

/// Planar, wavy-graph, sawtooth, dovetail, spherical-cap and tube surfaces,
/// none with its normals' hull touching the origin.
std::vector<Surface> split_surface_suite();

}  // namespace surfaces
