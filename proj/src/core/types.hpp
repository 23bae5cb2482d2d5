#pragma once

#include <Eigen/Core>
#include <Eigen/Geometry>

#include <array>
#include <stdexcept>
#include <string>
#include <vector>

namespace vgrasp {

using Point3 = Eigen::Vector3d;
using PointCloud = std::vector<Point3>;

// Degrees of freedom of the hand model, in the order used by every
// six-element angle vector in this library: pinky, ring, middle and index
// bending, thumb bending (measured against the thumb rotation axis) and
// thumb rotation (measured against the palm plane).
enum Dof : int {
  kDofPinky = 0,
  kDofRing = 1,
  kDofMiddle = 2,
  kDofIndex = 3,
  kDofThumbBend = 4,
  kDofThumbRot = 5,
};

inline constexpr int kNumDofs = 6;
inline constexpr std::array<const char*, kNumDofs> kDofKeys{"p", "r", "m", "i", "tb", "tr"};

// Joint angles in degrees, indexed by Dof.
using AngleVector = std::array<double, kNumDofs>;

enum class ErrorCode {
  // geometry
  kNonPositiveDepth,
  kOutOfImage,
  kEmptyRegion,
  kEmptyResult,
  kTooFewPoints,
  kEmptyCloud,
  // hand kinematics
  kDegenerateBox,
  kCollinearPalm,
  kZeroLengthSegment,
  // gesture model
  kTooFewSamples,
  kIllConditioned,
  kDegenerateRange,
  kClassNotFound,
  kGestureMismatch,
  // intent estimation
  kTooFewPositions,
  kParallelPlanes,
  kDegenerateDirection,
  kNoObjects,
  // controller
  kMissingLibraryEntry,
  kUnknownTarget,
  // metrics
  kZeroReferenceVariance,
  kEmptyTrials,
  // I/O and arguments
  kIoError,
  kSchemaError,
  kInvalidArgument,
};

const char* error_code_name(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(std::string(error_code_name(code)) + ": " + message), code_(code) {}

  ErrorCode code() const { return code_; }

 private:
  ErrorCode code_;
};

struct CameraIntrinsics {
  double fx = 0.0;
  double fy = 0.0;
  double px = 0.0;
  double py = 0.0;
  int width = 0;
  int height = 0;
};

// Top-left corner (u, v) plus extent in pixels. u is the column axis.
struct BoundingBox2D {
  double u = 0.0;
  double v = 0.0;
  double w = 0.0;
  double h = 0.0;
};

// Row-major depth image in meters. A value of zero marks a missing sample.
struct DepthMap {
  int width = 0;
  int height = 0;
  std::vector<double> meters;

  double at(int row, int col) const { return meters[static_cast<size_t>(row) * width + col]; }
  double& at(int row, int col) { return meters[static_cast<size_t>(row) * width + col]; }
};

// Axis-aligned extent description of an object cloud.
struct SizeParams {
  Eigen::Vector3d extents = Eigen::Vector3d::Zero();
  double radius = 0.0;
  Point3 centroid = Point3::Zero();
};

enum class Handedness { kRight, kLeft };

inline const char* handedness_name(Handedness h) {
  return h == Handedness::kRight ? "right" : "left";
}

}  // namespace vgrasp
