#pragma once

#include "core/types.hpp"

#include <filesystem>
#include <optional>

namespace vgrasp {

// One observation of the hand during an approach.
struct GestureSample {
  double distance = 0.0;  // hand-object distance in meters
  AngleVector angles{};   // degrees
};

// Per-DOF quartic angle-versus-distance model. Coefficients are stored
// highest power first: angle = a4 d^4 + a3 d^3 + a2 d^2 + a1 d + a0.
struct GestureFunction {
  std::array<std::array<double, 5>, kNumDofs> coeffs{};
  double d_end = 0.0;    // closest fitted distance
  double d_start = 0.0;  // farthest fitted distance
};

struct GestureLibraryEntry {
  std::string object_class;
  SizeParams size;
  PointCloud model_cloud;  // empty when the entry carries no cloud
  GestureFunction function;
};

struct GestureLibrary {
  std::vector<GestureLibraryEntry> entries;
};

// Euclidean distance between the wrist and the object position.
double hand_object_distance(const Point3& hand, const Point3& object);

// Least-squares quartic fit per DOF over the samples, solved with a
// rank-revealing QR factorization. Requires at least five samples
// (TooFewSamples) covering at least five distinct distances
// (IllConditioned). The fitted range is [min distance, max distance].
GestureFunction fit_gesture_function(const std::vector<GestureSample>& samples);

double eval_gesture_dof(const GestureFunction& f, int dof, double distance);

// Evaluates all six DOFs with the distance clamped into [d_end, d_start].
AngleVector eval_gesture(const GestureFunction& f, double distance);

// Approach progress in percent, clamped to [0, 100]. Throws DegenerateRange
// when d_start == d_end.
double degree_of_completion(double d_start, double d_ongo, double d_end);

// Adds an entry, replacing an existing same-class entry whose stored shape
// already matches the new one under the registration gate.
void library_insert(GestureLibrary& lib, GestureLibraryEntry entry);

// Returns the entry of the given class whose shape check against the
// observed cloud/size passes with the lowest registration error. Throws
// ClassNotFound when no entry has the class and GestureMismatch when none
// passes the check.
const GestureLibraryEntry& library_lookup(const GestureLibrary& lib,
                                          const std::string& object_class,
                                          const SizeParams& observed_size,
                                          const PointCloud& observed_cloud);

// JSON persistence. Model clouds are written as sidecar files next to the
// library and referenced by relative path.
void save_library(const GestureLibrary& lib, const std::filesystem::path& path);
GestureLibrary load_library(const std::filesystem::path& path);

}  // namespace vgrasp
