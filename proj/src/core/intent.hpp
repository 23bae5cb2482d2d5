#pragma once

#include "core/gesture.hpp"
#include "core/types.hpp"

#include <optional>

namespace vgrasp {

// Wrist positions in camera frame, ordered by time.
using WristTrack = std::vector<Point3>;

// 3D line fitted to a wrist track: the intersection of two regression
// planes, x = w1 y + w2 z + w0 (plane1_w) and y = w1 x + w2 z + w0
// (plane2_w). direction is unit length and oriented along the motion.
struct RegressionLine {
  Point3 point = Point3::Zero();
  Eigen::Vector3d direction = Eigen::Vector3d::UnitZ();
  Eigen::Vector3d plane1_w = Eigen::Vector3d::Zero();
  Eigen::Vector3d plane2_w = Eigen::Vector3d::Zero();

  double point_distance(const Point3& p) const {
    const Eigen::Vector3d r = p - point;
    return (r - direction * direction.dot(r)).norm();
  }
};

// Homogeneous plane ws = [wx, wy, wz, wd] containing the trajectory line
// and the vertical direction, with unit normal and wx < 0. Points with
// ws . [p, 1] > 0 lie in the left half-space.
struct SeparationPlane {
  Eigen::Vector4d ws = Eigen::Vector4d::Zero();

  double signed_value(const Point3& p) const {
    return ws[0] * p.x() + ws[1] * p.y() + ws[2] * p.z() + ws[3];
  }
};

struct SceneObject {
  std::string id;
  std::string object_class;
  Point3 position = Point3::Zero();
  std::optional<BoundingBox2D> bbox;
  std::optional<SizeParams> size;
  PointCloud cloud;
};

struct IntentEstimate {
  std::string target_id;
  double line_distance = 0.0;
  bool in_left_space = false;
  double confidence = 0.0;
  bool fallback_used = false;
};

struct RegistrationResult {
  Eigen::Matrix3d rotation = Eigen::Matrix3d::Identity();
  Eigen::Vector3d translation = Eigen::Vector3d::Zero();
  double rmse = 0.0;
  std::vector<double> rmse_history;  // nearest-neighbor RMSE per ICP iteration

  Point3 apply(const Point3& p) const { return rotation * p + translation; }
};

struct ValidationResult {
  bool ok = false;
  double rmse = 0.0;
};

// Fits the trajectory line to at least three positions. Each plane is a
// least-squares fit; rank-deficient systems (normal-matrix condition number
// above 1e10) take the minimum-norm solution. Exactly collinear tracks
// whose direction the two-plane form cannot represent fall back to the
// principal-axis line so that collinear input always yields a zero-residual
// line. Throws TooFewPositions and, for non-collinear tracks with parallel
// plane normals, ParallelPlanes.
RegressionLine fit_trajectory_line(const WristTrack& track);

// Throws DegenerateDirection when the line direction is parallel to the
// vertical axis (within 1e-6 rad) or has no forward component to orient
// the left/right split.
SeparationPlane separation_plane(const RegressionLine& line);

// Selects the target among objects in the preferred half-space (left of
// the line for the right hand) by smallest point-line distance. With no
// candidate in the half-space, selects the overall nearest object to the
// line and sets fallback_used. Ties break toward the lexicographically
// smaller id. Confidence is 1 - d_target / (d_target + d_runner_up), and
// 1.0 when only one object is considered.
IntentEstimate estimate_target(const RegressionLine& line,
                               const std::vector<SceneObject>& objects,
                               Handedness handedness);

// Proximity baseline: nearest object center within the given radius of the
// hand; nearest overall with fallback_used when none is in range.
IntentEstimate estimate_target_sphere_baseline(const Point3& hand,
                                               const std::vector<SceneObject>& objects,
                                               double radius);

// Rigid alignment of source onto target: coarse centroid plus principal-axis
// alignment choosing among the four axis-sign hypotheses by nearest-neighbor
// RMSE, then point-to-point ICP (at most 50 iterations, stopping when the
// relative RMSE change drops below 1e-8). Throws TooFewPoints when either
// cloud has fewer than four points.
RegistrationResult register_clouds(const PointCloud& source, const PointCloud& target);

// Shape gate for library entries: registration RMSE (or the extent
// difference when the entry carries no cloud) must stay within 10% of the
// observed radius.
ValidationResult validate_gesture_entry(const GestureLibraryEntry& entry,
                                        const PointCloud& observed_cloud,
                                        const SizeParams& observed_size);

}  // namespace vgrasp
