#pragma once

#include "splitpack/geometry.hpp"

#include <cstdint>
#include <random>
#include <string_view>
#include <vector>

namespace splitpack {

/// Seed of an independent, named random stream derived from a master seed.
std::uint64_t derive_seed(std::uint64_t master, std::string_view stream);

/// Uniform double in [lo, hi) built from the raw 64-bit engine output, so
/// sequences are identical across standard library implementations.
double uniform_real(std::mt19937_64& rng, double lo, double hi);

/// Uniformly distributed unit quaternions by Marsaglia's rejection method:
/// (x1, y1) and (x2, y2) are drawn in (-1, 1)^2 until inside the unit disk,
/// then q = [x1, y1, x2 sqrt((1-s1)/s2), y2 sqrt((1-s1)/s2)] as (w, x, y, z).
std::vector<UnitQuaternion> sample_rotations(std::size_t count,
                                             std::uint64_t seed);

/// The six rotations giving a box each of its distinct axis-aligned
/// orientations (identity first).
const std::vector<UnitQuaternion>& axis_permutation_rotations();

/// Rotation set used by the packer: the axis-permutation rotations first
/// (as many as `count` allows), then Marsaglia samples for the remainder.
std::vector<UnitQuaternion> packing_rotations(std::size_t count,
                                              std::uint64_t seed);

}  // namespace splitpack
