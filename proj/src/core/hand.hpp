#pragma once

#include "core/types.hpp"

namespace vgrasp {

// 21-keypoint hand convention: 0 wrist, 1-4 thumb (CMC to tip), 5-8 index,
// 9-12 middle, 13-16 ring, 17-20 pinky, each MCP to tip.
inline constexpr int kNumHandKeypoints = 21;
using HandKeypoints = std::array<Point3, kNumHandKeypoints>;

enum HandKeypointIndex : int {
  kWrist = 0,
  kThumbCmc = 1,
  kThumbTip = 4,
  kIndexMcp = 5,
  kIndexTip = 8,
  kMiddleMcp = 9,
  kMiddleTip = 12,
  kRingMcp = 13,
  kRingTip = 16,
  kPinkyMcp = 17,
  kPinkyTip = 20,
};

// Total-least-squares palm plane {p : normal . p = offset} through keypoints
// 0, 5, 9, 13 and 17. The unit normal points out of the back of the hand:
// its sign matches (k5 - k0) x (k17 - k0).
struct PalmPlane {
  Eigen::Vector3d normal = Eigen::Vector3d::UnitZ();
  double offset = 0.0;

  double signed_distance(const Point3& p) const { return normal.dot(p) - offset; }
};

// Expands a detection box to a square with side max(w, h) and the same
// centroid. Idempotent.
BoundingBox2D reshape_bbox(const BoundingBox2D& bbox);

// Throws CollinearPalm when the five palm keypoints do not span a plane.
PalmPlane fit_palm_plane(const HandKeypoints& keypoints);

// Joint angle vector in degrees. Finger bending is the angle between the
// MCP-to-tip segment and the palm plane, positive when the tip lies on the
// palmar side. Thumb rotation uses the same plane formula for segment 1->4;
// thumb bending is the angle between segment 1->4 and the thumb rotation
// axis direction k1->k5. Throws ZeroLengthSegment for coincident keypoints.
AngleVector extract_angle_vector(const HandKeypoints& keypoints);

}  // namespace vgrasp
