#include "core/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

namespace vgrasp {

namespace {

double squared_distance(const Point3& a, const Point3& b) { return (a - b).squaredNorm(); }

Point3 centroid_of(const PointCloud& cloud) {
  Point3 sum = Point3::Zero();
  for (const Point3& p : cloud) sum += p;
  return sum / static_cast<double>(cloud.size());
}

}  // namespace

Point3 backproject(double u, double v, double depth, const CameraIntrinsics& cam) {
  if (depth <= 0.0) {
    throw Error(ErrorCode::kNonPositiveDepth, "depth must be positive, got " + std::to_string(depth));
  }
  if (u < 0.0 || v < 0.0 || u >= cam.width || v >= cam.height) {
    throw Error(ErrorCode::kOutOfImage, "pixel (" + std::to_string(u) + ", " + std::to_string(v) +
                                            ") outside " + std::to_string(cam.width) + "x" +
                                            std::to_string(cam.height));
  }
  return Point3((u - cam.px) / cam.fx * depth, (v - cam.py) / cam.fy * depth, depth);
}

void project(const Point3& p, const CameraIntrinsics& cam, double* u, double* v) {
  if (p.z() <= 0.0) {
    throw Error(ErrorCode::kNonPositiveDepth, "point behind the camera");
  }
  *u = p.x() / p.z() * cam.fx + cam.px;
  *v = p.y() / p.z() * cam.fy + cam.py;
}

PointCloud extract_region_cloud(const DepthMap& depth, const BoundingBox2D& bbox,
                                const CameraIntrinsics& cam) {
  const int col0 = std::max(0, static_cast<int>(std::floor(bbox.u)));
  const int row0 = std::max(0, static_cast<int>(std::floor(bbox.v)));
  const int col1 = std::min(depth.width, static_cast<int>(std::ceil(bbox.u + bbox.w)));
  const int row1 = std::min(depth.height, static_cast<int>(std::ceil(bbox.v + bbox.h)));

  PointCloud cloud;
  for (int r = row0; r < row1; ++r) {
    for (int c = col0; c < col1; ++c) {
      const double z = depth.at(r, c);
      if (z > 0.0) {
        cloud.push_back(backproject(c, r, z, cam));
      }
    }
  }
  if (cloud.empty()) {
    throw Error(ErrorCode::kEmptyRegion, "no valid depth inside the bounding box");
  }
  return cloud;
}

PointCloud depth_threshold_filter(const PointCloud& cloud, const Point3& ref_center,
                                  double obj_width) {
  PointCloud kept;
  const double limit = 2.0 * obj_width;
  for (const Point3& p : cloud) {
    if (std::abs(p.z() - ref_center.z()) <= limit) {
      kept.push_back(p);
    }
  }
  if (kept.empty()) {
    throw Error(ErrorCode::kEmptyResult, "depth threshold removed every point");
  }
  return kept;
}

std::vector<PointCloud> kmeans_clusters(const PointCloud& cloud, int k, uint64_t seed) {
  if (k < 1) {
    throw Error(ErrorCode::kInvalidArgument, "k must be >= 1");
  }
  if (static_cast<int>(cloud.size()) < k) {
    throw Error(ErrorCode::kTooFewPoints,
                std::to_string(cloud.size()) + " points for k=" + std::to_string(k));
  }

  std::mt19937_64 rng(seed);
  const size_t n = cloud.size();

  // k-means++ seeding: first center uniform, then proportional to the
  // squared distance to the nearest chosen center.
  std::vector<Point3> centers;
  centers.reserve(k);
  std::uniform_int_distribution<size_t> uniform(0, n - 1);
  centers.push_back(cloud[uniform(rng)]);
  std::vector<double> d2(n, 0.0);
  while (static_cast<int>(centers.size()) < k) {
    double total = 0.0;
    for (size_t i = 0; i < n; ++i) {
      double best = std::numeric_limits<double>::max();
      for (const Point3& c : centers) best = std::min(best, squared_distance(cloud[i], c));
      d2[i] = best;
      total += best;
    }
    if (total <= 0.0) {
      // All points coincide with existing centers; duplicate one.
      centers.push_back(cloud[uniform(rng)]);
      continue;
    }
    std::uniform_real_distribution<double> pick(0.0, total);
    double target = pick(rng);
    size_t chosen = n - 1;
    for (size_t i = 0; i < n; ++i) {
      target -= d2[i];
      if (target <= 0.0) {
        chosen = i;
        break;
      }
    }
    centers.push_back(cloud[chosen]);
  }

  constexpr int kMaxIterations = 50;
  constexpr double kShiftTolerance = 1e-6;
  std::vector<int> assignment(n, 0);
  for (int iter = 0; iter < kMaxIterations; ++iter) {
    for (size_t i = 0; i < n; ++i) {
      double best = std::numeric_limits<double>::max();
      int best_c = 0;
      for (int c = 0; c < k; ++c) {
        const double d = squared_distance(cloud[i], centers[c]);
        if (d < best) {
          best = d;
          best_c = c;
        }
      }
      assignment[i] = best_c;
    }

    std::vector<Point3> sums(k, Point3::Zero());
    std::vector<int> counts(k, 0);
    for (size_t i = 0; i < n; ++i) {
      sums[assignment[i]] += cloud[i];
      counts[assignment[i]] += 1;
    }
    double max_shift = 0.0;
    for (int c = 0; c < k; ++c) {
      if (counts[c] == 0) continue;  // empty cluster keeps its center
      const Point3 next = sums[c] / counts[c];
      max_shift = std::max(max_shift, (next - centers[c]).norm());
      centers[c] = next;
    }
    if (max_shift < kShiftTolerance) break;
  }

  std::vector<PointCloud> clusters(k);
  for (size_t i = 0; i < n; ++i) clusters[assignment[i]].push_back(cloud[i]);
  return clusters;
}

PointCloud kmeans_segment(const PointCloud& cloud, int k, const Point3& ref_point,
                          uint64_t seed) {
  const std::vector<PointCloud> clusters = kmeans_clusters(cloud, k, seed);
  double best = std::numeric_limits<double>::max();
  const PointCloud* winner = nullptr;
  for (const PointCloud& cluster : clusters) {
    if (cluster.empty()) continue;
    const double d = (centroid_of(cluster) - ref_point).squaredNorm();
    if (d < best) {
      best = d;
      winner = &cluster;
    }
  }
  return *winner;  // at least one cluster is non-empty since cloud.size() >= k >= 1
}

SizeParams object_size(const PointCloud& cloud) {
  if (cloud.empty()) {
    throw Error(ErrorCode::kEmptyCloud, "cannot size an empty cloud");
  }
  Point3 lo = cloud.front();
  Point3 hi = cloud.front();
  for (const Point3& p : cloud) {
    lo = lo.cwiseMin(p);
    hi = hi.cwiseMax(p);
  }
  SizeParams size;
  size.extents = hi - lo;
  size.centroid = centroid_of(cloud);
  double max_d2 = 0.0;
  for (const Point3& p : cloud) max_d2 = std::max(max_d2, (p - size.centroid).squaredNorm());
  size.radius = std::sqrt(max_d2);
  return size;
}

PointCloud reconstruct_object_cloud(const DepthMap& depth, const BoundingBox2D& bbox,
                                    const CameraIntrinsics& cam, int k, uint64_t seed) {
  PointCloud region = extract_region_cloud(depth, bbox, cam);

  std::vector<double> depths;
  depths.reserve(region.size());
  for (const Point3& p : region) depths.push_back(p.z());
  std::nth_element(depths.begin(), depths.begin() + depths.size() / 2, depths.end());
  const double median_depth = depths[depths.size() / 2];

  const Point3 ref =
      backproject(bbox.u + bbox.w / 2.0, bbox.v + bbox.h / 2.0, median_depth, cam);
  // No prior physical size: estimate the metric width from the bbox at the
  // median depth.
  const double obj_width = bbox.w / cam.fx * median_depth;

  const PointCloud filtered = depth_threshold_filter(region, ref, obj_width);
  if (static_cast<int>(filtered.size()) < k) return filtered;
  return kmeans_segment(filtered, k, ref, seed);
}

}  // namespace vgrasp
