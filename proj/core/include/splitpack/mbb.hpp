#pragma once

#include "splitpack/geometry.hpp"

#include <span>

namespace splitpack {

inline constexpr double kSegmentationEpsilon = 0.05;
inline constexpr double kContainerEpsilon = 0.01;

/// Approximate minimum-volume oriented bounding box.
///
/// Candidate frames are the world frame, the principal-component frame and
/// one frame per (deduplicated) hull face, where the face normal fixes one
/// axis and the minimum-area rectangle of the projected hull fixes the other
/// two. The best candidate is then refined by a coordinate descent over
/// small rotations whose finest step shrinks with `epsilon`. Degenerate
/// point sets (fewer than four points, flat, collinear) yield boxes with
/// zero extent along the degenerate directions.
///
/// Among equal volumes the frame closest to the identity rotation wins, and
/// the axes are permuted so the returned frame is the one of the 24
/// box-preserving variants nearest to the identity.
OrientedBox approximate_mbb(std::span<const Point3> points,
                            double epsilon = kSegmentationEpsilon);

/// Volume of the axis-aligned box of `points` expressed in `frame`
/// (rows of `frame` are the axes).
double frame_aabb_volume(std::span<const Point3> points, const Mat3& frame);

/// Oriented box with the given frame that tightly encloses `points`.
OrientedBox box_in_frame(std::span<const Point3> points, const Mat3& frame);

/// Rigid transform mapping the box to an axis-aligned box centered at the
/// origin.
RigidTransform axis_align(const OrientedBox& box);

RigidTransform axis_align(std::span<const Point3> points,
                          double epsilon = kContainerEpsilon);

}  // namespace splitpack
