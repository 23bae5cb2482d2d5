#include "core/geometry.hpp"

#include <doctest.h>

#include <algorithm>
#include <cmath>

using namespace vgrasp;

namespace {

CameraIntrinsics test_camera() { return CameraIntrinsics{600.0, 600.0, 320.0, 240.0, 640, 480}; }

DepthMap flat_depth(int w, int h, double z) {
  DepthMap d;
  d.width = w;
  d.height = h;
  d.meters.assign(static_cast<size_t>(w) * h, z);
  return d;
}

}  // namespace

TEST_CASE("backproject maps the principal point onto the optical axis") {
  const Point3 p = backproject(320.0, 240.0, 0.5, test_camera());
  CHECK(p.x() == doctest::Approx(0.0));
  CHECK(p.y() == doctest::Approx(0.0));
  CHECK(p.z() == doctest::Approx(0.5));
}

TEST_CASE("backproject scales pixel offsets by depth over focal length") {
  // (620-320)/600*0.6 = 0.3 and (440-240)/600*0.6 = 0.2, worked by hand.
  const Point3 p = backproject(620.0, 440.0, 0.6, test_camera());
  CHECK(p.x() == doctest::Approx(0.3));
  CHECK(p.y() == doctest::Approx(0.2));
  CHECK(p.z() == doctest::Approx(0.6));
}

TEST_CASE("backproject rejects bad depth and out-of-image pixels") {
  CHECK_THROWS_WITH_AS(backproject(320, 240, 0.0, test_camera()), doctest::Contains("NonPositiveDepth"),
                       Error);
  CHECK_THROWS_AS(backproject(-1, 240, 0.5, test_camera()), Error);
  CHECK_THROWS_AS(backproject(640, 240, 0.5, test_camera()), Error);
  CHECK_THROWS_AS(backproject(320, 480, 0.5, test_camera()), Error);
}

TEST_CASE("project inverts backproject") {
  const CameraIntrinsics cam = test_camera();
  const Point3 p = backproject(101.25, 402.5, 0.73, cam);
  double u = 0.0, v = 0.0;
  project(p, cam, &u, &v);
  CHECK(u == doctest::Approx(101.25).epsilon(1e-12));
  CHECK(v == doctest::Approx(402.5).epsilon(1e-12));
}

TEST_CASE("extract_region_cloud clamps the box and skips invalid depth") {
  DepthMap depth = flat_depth(8, 8, 0.5);
  depth.meters[0] = 0.0;  // pixel (0,0) carries no measurement

  // Box hangs over the top-left corner; only the in-image pixels count.
  const BoundingBox2D bbox{-2.0, -2.0, 4.0, 4.0};
  const PointCloud cloud = extract_region_cloud(depth, bbox, test_camera());
  CHECK(cloud.size() == 3);  // 2x2 in-image region minus the invalid pixel
  for (const Point3& p : cloud) CHECK(p.z() == doctest::Approx(0.5));
}

TEST_CASE("extract_region_cloud with no valid pixels fails") {
  DepthMap depth = flat_depth(4, 4, 0.0);
  CHECK_THROWS_WITH_AS(extract_region_cloud(depth, BoundingBox2D{0, 0, 4, 4}, test_camera()),
                       doctest::Contains("EmptyRegion"), Error);
  // Fully outside the image.
  DepthMap valid = flat_depth(4, 4, 0.5);
  CHECK_THROWS_AS(extract_region_cloud(valid, BoundingBox2D{10, 10, 2, 2}, test_camera()), Error);
}

TEST_CASE("depth_threshold_filter keeps points within twice the object width") {
  const Point3 ref(0.0, 0.0, 0.5);
  PointCloud cloud{{0, 0, 0.5}, {0, 0, 0.59}, {0, 0, 0.61}, {0, 0, 0.41}, {0, 0, 0.7}};
  const PointCloud kept = depth_threshold_filter(cloud, ref, 0.05);
  REQUIRE(kept.size() == 3);
  CHECK(kept[0].z() == doctest::Approx(0.5));
  CHECK(kept[1].z() == doctest::Approx(0.59));
  CHECK(kept[2].z() == doctest::Approx(0.41));

  CHECK_THROWS_WITH_AS(depth_threshold_filter(cloud, Point3(0, 0, 5.0), 0.05),
                       doctest::Contains("EmptyResult"), Error);
}

TEST_CASE("kmeans_clusters separates two distant blobs") {
  PointCloud cloud;
  for (int i = 0; i < 20; ++i) {
    const double dx = 1e-3 * i;
    cloud.push_back(Point3(0.0 + dx, 0.0, 0.5));
    cloud.push_back(Point3(0.0 + dx, 0.0, 2.0));
  }
  const std::vector<PointCloud> clusters = kmeans_clusters(cloud, 2, 42);
  REQUIRE(clusters.size() == 2);
  REQUIRE(clusters[0].size() + clusters[1].size() == cloud.size());
  for (const PointCloud& cluster : clusters) {
    CHECK(cluster.size() == 20);
    const double z0 = cluster.front().z();
    for (const Point3& p : cluster) CHECK(p.z() == doctest::Approx(z0));
  }
}

TEST_CASE("kmeans_clusters is deterministic in the seed") {
  PointCloud cloud;
  for (int i = 0; i < 30; ++i) {
    cloud.push_back(Point3(std::sin(3.7 * i), std::cos(1.3 * i), 0.1 * (i % 7)));
  }
  const auto a = kmeans_clusters(cloud, 3, 7);
  const auto b = kmeans_clusters(cloud, 3, 7);
  REQUIRE(a.size() == b.size());
  for (size_t c = 0; c < a.size(); ++c) {
    REQUIRE(a[c].size() == b[c].size());
    for (size_t i = 0; i < a[c].size(); ++i) CHECK(a[c][i] == b[c][i]);
  }
}

TEST_CASE("kmeans needs at least k points") {
  PointCloud cloud{{0, 0, 1}, {0, 0, 2}};
  CHECK_THROWS_WITH_AS(kmeans_clusters(cloud, 3, 1), doctest::Contains("TooFewPoints"), Error);
}

TEST_CASE("kmeans_segment picks the cluster nearest the reference point") {
  PointCloud cloud;
  for (int i = 0; i < 10; ++i) {
    cloud.push_back(Point3(1e-4 * i, 0.0, 0.5));
    cloud.push_back(Point3(1e-4 * i, 0.0, 2.0));
  }
  const PointCloud seg = kmeans_segment(cloud, 2, Point3(0, 0, 0.45), 11);
  REQUIRE(seg.size() == 10);
  for (const Point3& p : seg) CHECK(p.z() == doctest::Approx(0.5));
}

TEST_CASE("object_size reports extents, centroid, and enclosing radius") {
  PointCloud cloud{{0, 0, 0}, {0.1, 0, 0}, {0, 0.2, 0}, {0.1, 0.2, 0.4}};
  const SizeParams size = object_size(cloud);
  CHECK(size.extents.x() == doctest::Approx(0.1));
  CHECK(size.extents.y() == doctest::Approx(0.2));
  CHECK(size.extents.z() == doctest::Approx(0.4));
  CHECK(size.centroid.x() == doctest::Approx(0.05));
  CHECK(size.centroid.y() == doctest::Approx(0.1));
  CHECK(size.centroid.z() == doctest::Approx(0.1));
  // Farthest point from the centroid is (0.1, 0.2, 0.4).
  CHECK(size.radius == doctest::Approx(std::sqrt(0.05 * 0.05 + 0.1 * 0.1 + 0.3 * 0.3)));

  CHECK_THROWS_WITH_AS(object_size(PointCloud{}), doctest::Contains("EmptyCloud"), Error);
}

TEST_CASE("reconstruct_object_cloud isolates the object inside the box") {
  // A 10x10-pixel object at 0.5 m; the bounding box also covers clutter at
  // 0.52 m, close enough to pass the depth gate, so the clustering has to
  // separate it.
  const CameraIntrinsics cam = test_camera();
  DepthMap depth = flat_depth(64, 64, 2.0);
  for (int r = 18; r < 32; ++r) {
    for (int c = 22; c < 36; ++c) depth.meters[static_cast<size_t>(r) * 64 + c] = 0.52;
  }
  for (int r = 20; r < 30; ++r) {
    for (int c = 24; c < 34; ++c) depth.meters[static_cast<size_t>(r) * 64 + c] = 0.5;
  }
  const BoundingBox2D bbox{22.0, 18.0, 14.0, 14.0};  // 196 px, object covers 100
  const PointCloud cloud = reconstruct_object_cloud(depth, bbox, cam, 2, 3);
  REQUIRE(cloud.size() == 100);
  for (const Point3& p : cloud) CHECK(p.z() == doctest::Approx(0.5));
}
