#pragma once

#include "core/gesture.hpp"
#include "core/intent.hpp"
#include "core/types.hpp"

#include <optional>

namespace vgrasp {

enum class Stage { kIntentEstimation, kGrasping, kGripTightening, kDone };

const char* stage_name(Stage stage);

struct ControllerConfig {
  double force_threshold_n = 4.0;        // grip force that locks a DOF
  double contraction_threshold_deg = 5.0;  // extra closing past the gesture's final angle
  int commit_count = 3;                  // consecutive identical estimates to commit
  double actuator_time_constant_s = 0.1;  // first-order lag; <= 0 means ideal
  Handedness handedness = Handedness::kRight;
  AngleVector standby_pose{};            // held during intent estimation
};

struct HandState {
  AngleVector angles{};             // degrees
  std::array<double, kNumDofs> forces{};  // newtons, >= 0
  std::array<bool, kNumDofs> locked{};
  std::array<bool, kNumDofs> locked_by_force{};
  Stage stage = Stage::kIntentEstimation;
};

struct ControlCommand {
  AngleVector target_angles{};
  Stage stage = Stage::kIntentEstimation;
  std::string selected_target;  // empty until a target is committed
};

// Linear contact: force = stiffness * max(0, angle - contact_angle).
struct ContactModel {
  std::array<double, kNumDofs> contact_angle_deg{};
  double stiffness_n_per_deg = 1.0;
};

struct TightenAction {
  bool lock = false;
  double target_deg = 0.0;
};

// Tightening policy for one DOF: lock once the grip force reaches the
// threshold; otherwise keep closing, but no further than the gesture's
// final angle plus the contraction threshold, where the DOF locks
// regardless of force.
TightenAction grip_tighten_dof(double angle_deg, double final_angle_deg, double force_n,
                               const ControllerConfig& cfg);

// Advances the hand by dt: unlocked DOFs follow a first-order lag toward
// the commanded angle (instantaneous when tau <= 0), locked DOFs keep their
// angle bit for bit, and forces follow the contact model.
HandState simulate_hand(const HandState& state, const ControlCommand& cmd,
                        const ContactModel& contact, double tau_s, double dt_s);

// Mid-range pose averaged over the library's gesture functions; a
// semi-closed fist to hold while the intent is still unknown.
AngleVector default_standby_pose(const GestureLibrary& lib);

struct FrameObservation {
  double t = 0.0;
  Point3 wrist = Point3::Zero();
  const std::vector<SceneObject>* objects = nullptr;
};

// Three-stage grasp controller. Per frame it emits the commanded pose and
// mutates hand.stage / hand.locked; the caller owns actuation through
// simulate_hand. Stages only move forward: intent estimation (standby pose,
// trajectory-based target selection, commit after commit_count consecutive
// identical estimates), grasping (gesture playback against the live
// hand-object distance until the gesture range is exhausted), grip
// tightening (per-DOF grip_tighten_dof until every DOF locks), done.
class GraspController {
 public:
  GraspController(ControllerConfig cfg, const GestureLibrary& lib);

  ControlCommand step(HandState& hand, const FrameObservation& obs);

  const std::optional<IntentEstimate>& committed() const { return committed_; }
  const GestureLibraryEntry* committed_entry() const { return entry_; }
  const WristTrack& track() const { return track_; }
  // Hand-object distance used for the most recent grasping command.
  double last_distance() const { return last_distance_; }

 private:
  ControlCommand step_intent(HandState& hand, const FrameObservation& obs);
  ControlCommand step_grasping(HandState& hand, const FrameObservation& obs);
  ControlCommand step_tightening(HandState& hand);

  ControllerConfig cfg_;
  const GestureLibrary& lib_;
  WristTrack track_;
  int streak_ = 0;
  std::string streak_id_;
  std::optional<IntentEstimate> committed_;
  const GestureLibraryEntry* entry_ = nullptr;
  Point3 target_position_ = Point3::Zero();
  AngleVector final_angles_{};
  double last_distance_ = 0.0;
};

}  // namespace vgrasp
