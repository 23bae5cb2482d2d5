#pragma once

#include "core/types.hpp"

#include <cstdint>

namespace vgrasp {

// Pinhole back-projection of pixel (u, v) at the given depth (meters).
// Throws NonPositiveDepth for depth <= 0 and OutOfImage when (u, v) lies
// outside the intrinsics' image bounds.
Point3 backproject(double u, double v, double depth, const CameraIntrinsics& cam);

// Forward projection of a camera-frame point onto the image plane.
// Throws NonPositiveDepth when p.z() <= 0.
void project(const Point3& p, const CameraIntrinsics& cam, double* u, double* v);

// Back-projects every pixel with a valid (positive) depth inside bbox.
// The box is clamped to the image first. Throws EmptyRegion when no valid
// pixel remains.
PointCloud extract_region_cloud(const DepthMap& depth, const BoundingBox2D& bbox,
                                const CameraIntrinsics& cam);

// Keeps points whose depth lies within twice the object width of the
// reference center: |z - ref.z| <= 2 * obj_width. Throws EmptyResult when
// nothing survives.
PointCloud depth_threshold_filter(const PointCloud& cloud, const Point3& ref_center,
                                  double obj_width);

// Seeded k-means (k-means++ initialization, at most 50 iterations, centroid
// shift tolerance 1e-6 m). Returns all k clusters; some may be empty when
// the data collapses. Throws TooFewPoints when cloud.size() < k.
std::vector<PointCloud> kmeans_clusters(const PointCloud& cloud, int k, uint64_t seed);

// Runs kmeans_clusters and returns the non-empty cluster whose centroid is
// nearest to ref_point.
PointCloud kmeans_segment(const PointCloud& cloud, int k, const Point3& ref_point,
                          uint64_t seed);

// Axis-aligned extents, mean centroid, and max distance from the centroid.
// Throws EmptyCloud for an empty input.
SizeParams object_size(const PointCloud& cloud);

// Full object reconstruction from a depth image: region extraction, depth
// threshold filtering around the bbox-center back-projection, and k-means
// foreground selection. The depth threshold width is bootstrapped from the
// bbox width at the region's median depth when no prior size is known.
PointCloud reconstruct_object_cloud(const DepthMap& depth, const BoundingBox2D& bbox,
                                    const CameraIntrinsics& cam, int k, uint64_t seed);

}  // namespace vgrasp
