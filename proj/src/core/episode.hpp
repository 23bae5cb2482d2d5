#pragma once

#include "core/control.hpp"
#include "core/gesture.hpp"
#include "core/hand.hpp"
#include "core/intent.hpp"
#include "core/metrics.hpp"
#include "core/types.hpp"

#include <cstdint>
#include <filesystem>
#include <optional>

namespace vgrasp {

struct EpisodeMeta {
  std::string episode_id;
  Handedness handedness = Handedness::kRight;
  double fps = 30.0;
  std::optional<std::string> object_class;     // class grasped in a modeling episode
  std::optional<std::string> intended_target;  // ground-truth object id when known
};

struct EpisodeFrame {
  double t = 0.0;
  Point3 wrist = Point3::Zero();
  std::optional<HandKeypoints> keypoints;
  std::optional<BoundingBox2D> hand_bbox;
  std::vector<SceneObject> objects;
  std::optional<DepthMap> depth;
};

struct EpisodeRecord {
  EpisodeMeta meta;
  CameraIntrinsics camera;
  std::vector<EpisodeFrame> frames;
};

struct SceneObjectSpec {
  std::string id;
  std::string object_class;
  Point3 position = Point3::Zero();
  SizeParams size;
  ContactModel contact;
};

struct SceneSpec {
  std::vector<SceneObjectSpec> objects;
  double spacing_m = 0.0;  // minimum pairwise horizontal center distance
  uint64_t seed = 0;
  Point3 start = Point3::Zero();  // wrist rest position
  double duration_s = 1.5;
  double fps = 30.0;
};

struct TrajectorySpec {
  Point3 start = Point3::Zero();
  double duration_s = 1.5;
  double fps = 30.0;
  // Final wrist-to-target distance as a fraction of the gesture's d_end.
  // 1.0 stops exactly at the gesture boundary (modeling recordings);
  // smaller values overshoot so a controller reliably crosses d_end.
  double reach_depth = 1.0;
};

struct NoiseSpec {
  double pos_sigma_m = 0.0;
  double angle_sigma_deg = 0.0;
};

// Strict schema validation on load: at least one frame, strictly increasing
// timestamps, a finite wrist everywhere, 21 finite keypoints when present.
EpisodeRecord load_episode(const std::filesystem::path& path);
void save_episode(const EpisodeRecord& episode, const std::filesystem::path& path);

SceneSpec load_scene(const std::filesystem::path& path);
void save_scene(const SceneSpec& scene, const std::filesystem::path& path);

// Deterministic box-surface cloud used for synthetic objects: grid points on
// the six faces of the axis-aligned box spanned by extents around center.
PointCloud make_box_surface_cloud(const Eigen::Vector3d& extents, const Point3& center,
                                  int points_per_edge);

// Quartic gesture-function fixture: each DOF eases from start_deg to
// end_deg over [d_end, d_start] along a smoothstep, plus an optional
// mid-approach bump of wiggle_deg that vanishes at both ends. The result is
// an exact degree <= 4 polynomial in the distance.
GestureFunction make_smoothstep_gesture(const AngleVector& start_deg, const AngleVector& end_deg,
                                        const AngleVector& wiggle_deg, double d_end,
                                        double d_start);

// Synthesizes a grasping approach toward target_id: the wrist travels on a
// straight line from traj.start to a grasp point offset toward the thumb
// side of the target (so the target sits in the preferred half-space), with
// i.i.d. Gaussian position noise; hand keypoints are constructed so that
// extract_angle_vector reproduces eval_gesture(gesture, D) plus Gaussian
// angle noise at the frame's wrist-object distance D. Same seed, same
// episode.
EpisodeRecord generate_synthetic_episode(const SceneSpec& scene, const std::string& target_id,
                                         const TrajectorySpec& traj,
                                         const GestureFunction& gesture, const NoiseSpec& noise,
                                         uint64_t seed, Handedness handedness);

// Identifies the object a modeling episode demonstrates: the named
// intended target, else the only object, else the unique object of the
// episode's object class. Throws SchemaError when ambiguous.
std::string modeled_object_id(const EpisodeRecord& episode);

// (distance, angle-vector) samples for gesture fitting, restricted to
// frames that carry keypoints and to the approach: frames whose 3-frame
// median-smoothed distance sets a new running minimum.
std::vector<GestureSample> extract_gesture_samples(const EpisodeRecord& episode);

struct TrialTraceFrame {
  double t = 0.0;
  Stage stage = Stage::kIntentEstimation;
  double distance = 0.0;  // hand-object distance driving the command
  AngleVector commanded{};
  AngleVector actual{};
  std::array<double, kNumDofs> forces{};
  std::array<bool, kNumDofs> locked{};
  std::string selected;
};

struct TrialRow {
  int trial_id = 0;
  std::optional<double> spacing_m;
  std::string intended;
  std::string estimated;
  bool intent_ok = false;
  bool success = false;
  double duration_s = 0.0;
  double r2_mean = std::numeric_limits<double>::quiet_NaN();
  double rmse_mean_deg = std::numeric_limits<double>::quiet_NaN();
  std::vector<SceneObject> objects;              // positions only; no clouds
  std::vector<std::array<double, 4>> track;      // t, x, y, z of the wrist
  std::vector<TrialTraceFrame> trace;

  TrialRecord record() const {
    return TrialRecord{intended, estimated, success, duration_s, spacing_m};
  }
};

struct ReportMeta {
  uint64_t seed = 0;
  std::string library;
  std::string scene;
  Handedness handedness = Handedness::kRight;
  double pos_noise_m = 0.0;
  double angle_noise_deg = 0.0;
  double actuator_tau_s = 0.1;
};

struct ReportDoc {
  ReportMeta meta;
  std::vector<TrialRow> rows;
};

// A ".csv" path writes the summary table (one row per trial, the columns
// trial_id, spacing_m, intended, estimated, intent_ok, success, duration_s,
// r2_mean, rmse_mean_deg); any other extension writes the full JSON
// document including per-trial tracks and traces.
void export_report(const ReportDoc& report, const std::filesystem::path& path);
ReportDoc load_report(const std::filesystem::path& path);

}  // namespace vgrasp
