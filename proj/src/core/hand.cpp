#include "core/hand.hpp"

#include <Eigen/Dense>

#include <cmath>

namespace vgrasp {

namespace {

constexpr double kRadToDeg = 180.0 / M_PI;
constexpr std::array<int, 5> kPalmIndices{kWrist, kIndexMcp, kMiddleMcp, kRingMcp, kPinkyMcp};

// Angle in degrees between a segment and the palm plane, positive when the
// far end lies on the palmar side (opposite the oriented normal).
double plane_bending_deg(const Point3& from, const Point3& to, const PalmPlane& plane,
                         const char* what) {
  const Eigen::Vector3d seg = to - from;
  const double len = seg.norm();
  if (len <= 0.0) {
    throw Error(ErrorCode::kZeroLengthSegment, what);
  }
  const double s = std::clamp(seg.dot(plane.normal) / len, -1.0, 1.0);
  return -std::asin(s) * kRadToDeg;
}

}  // namespace

BoundingBox2D reshape_bbox(const BoundingBox2D& bbox) {
  const double side = std::max(bbox.w, bbox.h);
  const double cu = bbox.u + bbox.w / 2.0;
  const double cv = bbox.v + bbox.h / 2.0;
  return BoundingBox2D{cu - side / 2.0, cv - side / 2.0, side, side};
}

PalmPlane fit_palm_plane(const HandKeypoints& keypoints) {
  Eigen::Matrix<double, 5, 3> pts;
  Point3 centroid = Point3::Zero();
  for (size_t i = 0; i < kPalmIndices.size(); ++i) {
    pts.row(i) = keypoints[kPalmIndices[i]].transpose();
    centroid += keypoints[kPalmIndices[i]];
  }
  centroid /= static_cast<double>(kPalmIndices.size());
  pts.rowwise() -= centroid.transpose();

  Eigen::JacobiSVD<Eigen::Matrix<double, 5, 3>> svd(pts, Eigen::ComputeFullV);
  const Eigen::Vector3d sigma = svd.singularValues();
  constexpr double kSpanTolerance = 1e-9;
  if (sigma(0) <= kSpanTolerance || sigma(1) <= kSpanTolerance) {
    throw Error(ErrorCode::kCollinearPalm, "palm keypoints do not span a plane");
  }

  Eigen::Vector3d normal = svd.matrixV().col(2);
  const Eigen::Vector3d back = (keypoints[kIndexMcp] - keypoints[kWrist])
                                   .cross(keypoints[kPinkyMcp] - keypoints[kWrist]);
  if (normal.dot(back) < 0.0) normal = -normal;

  PalmPlane plane;
  plane.normal = normal;
  plane.offset = normal.dot(centroid);
  return plane;
}

AngleVector extract_angle_vector(const HandKeypoints& keypoints) {
  const PalmPlane plane = fit_palm_plane(keypoints);

  AngleVector angles{};
  angles[kDofPinky] =
      plane_bending_deg(keypoints[kPinkyMcp], keypoints[kPinkyTip], plane, "pinky segment");
  angles[kDofRing] =
      plane_bending_deg(keypoints[kRingMcp], keypoints[kRingTip], plane, "ring segment");
  angles[kDofMiddle] =
      plane_bending_deg(keypoints[kMiddleMcp], keypoints[kMiddleTip], plane, "middle segment");
  angles[kDofIndex] =
      plane_bending_deg(keypoints[kIndexMcp], keypoints[kIndexTip], plane, "index segment");
  angles[kDofThumbRot] =
      plane_bending_deg(keypoints[kThumbCmc], keypoints[kThumbTip], plane, "thumb segment");

  const Eigen::Vector3d thumb = keypoints[kThumbTip] - keypoints[kThumbCmc];
  const Eigen::Vector3d axis = keypoints[kIndexMcp] - keypoints[kThumbCmc];
  const double thumb_len = thumb.norm();
  const double axis_len = axis.norm();
  if (thumb_len <= 0.0 || axis_len <= 0.0) {
    throw Error(ErrorCode::kZeroLengthSegment, "thumb segment or rotation axis");
  }
  const double c = std::clamp(thumb.dot(axis) / (thumb_len * axis_len), -1.0, 1.0);
  angles[kDofThumbBend] = std::acos(c) * kRadToDeg;
  return angles;
}

}  // namespace vgrasp
