#pragma once

#include "splitpack/packer.hpp"
#include "splitpack/synthetic.hpp"
#include "splitpack/tetmesh.hpp"

#include <filesystem>
#include <random>
#include <string>
#include <vector>

namespace fixtures {

using namespace splitpack;

/// Unit cube as one central tetrahedron plus four corners.
TetMesh five_tet_cube();
/// (0,0,0),(1,0,0),(0,1,0),(0,0,1).
TetMesh unit_tet();
/// Two tetrahedra sharing the facet (1,0,0),(0,1,0),(0,0,1).
TetMesh two_tets();
/// 2x1x1 bar of two unit cells.
TetMesh two_cube_bar();
/// Three unit cells in an L.
TetMesh l_tricube();
/// Square frame of unit cells around an empty centre, one cell thick.
TetMesh hollow_frame(int outer = 3);
/// Cube shell with a hollow interior.
TetMesh hollow_box(int outer = 3);

/// Lattice cells each split into six tetrahedra around the main diagonal
/// (Kuhn triangulation); 6 * dims[0] * dims[1] * dims[2] elements.
TetMesh kuhn_solid(const std::array<int, 3>& dims);

PackPart box_part(const Vec3& extents);
/// Small random part: a box, a tetrahedron or an L of three cells.
PackPart random_part(std::mt19937_64& rng);

/// A random rigid motion.
RigidTransform random_motion(std::mt19937_64& rng, double max_shift = 5.0);

/// Fresh empty directory under the system temp dir.
std::filesystem::path temp_dir(const std::string& name);

/// Writes `mesh` as <dir>/<stem>.node/.ele and returns the stem path.
std::filesystem::path write_mesh(const TetMesh& mesh,
                                 const std::filesystem::path& dir,
                                 const std::string& stem);

}  // namespace fixtures
