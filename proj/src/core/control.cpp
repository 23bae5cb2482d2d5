#include "core/control.hpp"

#include "core/geometry.hpp"

#include <algorithm>
#include <cmath>

namespace vgrasp {

namespace {

// A lagging actuator approaches its command asymptotically; a DOF counts as
// having reached the contraction limit once it is within this many degrees.
constexpr double kAngleReachToleranceDeg = 1e-3;

}  // namespace

const char* stage_name(Stage stage) {
  switch (stage) {
    case Stage::kIntentEstimation: return "IntentEstimation";
    case Stage::kGrasping: return "Grasping";
    case Stage::kGripTightening: return "GripTightening";
    case Stage::kDone: return "Done";
  }
  return "Unknown";
}

TightenAction grip_tighten_dof(double angle_deg, double final_angle_deg, double force_n,
                               const ControllerConfig& cfg) {
  if (force_n >= cfg.force_threshold_n) {
    return TightenAction{true, angle_deg};
  }
  const double limit = final_angle_deg + cfg.contraction_threshold_deg;
  if (angle_deg >= limit - kAngleReachToleranceDeg) {
    return TightenAction{true, limit};
  }
  return TightenAction{false, limit};
}

HandState simulate_hand(const HandState& state, const ControlCommand& cmd,
                        const ContactModel& contact, double tau_s, double dt_s) {
  HandState next = state;
  const double decay = tau_s > 0.0 ? std::exp(-dt_s / tau_s) : 0.0;
  for (int j = 0; j < kNumDofs; ++j) {
    if (!next.locked[j]) {
      const double target = cmd.target_angles[j];
      next.angles[j] = tau_s > 0.0 ? target + (state.angles[j] - target) * decay : target;
    }
    next.forces[j] =
        contact.stiffness_n_per_deg * std::max(0.0, next.angles[j] - contact.contact_angle_deg[j]);
  }
  return next;
}

AngleVector default_standby_pose(const GestureLibrary& lib) {
  AngleVector pose{};
  if (lib.entries.empty()) return pose;
  for (const GestureLibraryEntry& entry : lib.entries) {
    const AngleVector open = eval_gesture(entry.function, entry.function.d_start);
    const AngleVector closed = eval_gesture(entry.function, entry.function.d_end);
    for (int j = 0; j < kNumDofs; ++j) pose[j] += 0.5 * (open[j] + closed[j]);
  }
  for (int j = 0; j < kNumDofs; ++j) pose[j] /= static_cast<double>(lib.entries.size());
  return pose;
}

GraspController::GraspController(ControllerConfig cfg, const GestureLibrary& lib)
    : cfg_(std::move(cfg)), lib_(lib) {}

ControlCommand GraspController::step(HandState& hand, const FrameObservation& obs) {
  switch (hand.stage) {
    case Stage::kIntentEstimation:
      return step_intent(hand, obs);
    case Stage::kGrasping:
      return step_grasping(hand, obs);
    case Stage::kGripTightening:
      return step_tightening(hand);
    case Stage::kDone: {
      ControlCommand cmd;
      cmd.target_angles = hand.angles;
      cmd.stage = Stage::kDone;
      if (committed_) cmd.selected_target = committed_->target_id;
      return cmd;
    }
  }
  throw Error(ErrorCode::kInvalidArgument, "corrupt controller stage");
}

ControlCommand GraspController::step_intent(HandState& hand, const FrameObservation& obs) {
  track_.push_back(obs.wrist);

  if (track_.size() >= 3 && obs.objects != nullptr && !obs.objects->empty()) {
    RegressionLine line;
    bool have_line = true;
    try {
      line = fit_trajectory_line(track_);
    } catch (const Error& e) {
      // Three noisy positions span a unique plane, so both regression
      // planes coincide on the very first estimation frame; skip it and
      // try again with more of the track.
      if (e.code() != ErrorCode::kParallelPlanes) throw;
      have_line = false;
    }
    if (!have_line) {
      ControlCommand cmd;
      cmd.target_angles = cfg_.standby_pose;
      cmd.stage = Stage::kIntentEstimation;
      return cmd;
    }
    const IntentEstimate est = estimate_target(line, *obs.objects, cfg_.handedness);
    if (est.target_id == streak_id_) {
      ++streak_;
    } else {
      streak_ = 1;
      streak_id_ = est.target_id;
    }

    if (streak_ >= cfg_.commit_count) {
      const SceneObject* object = nullptr;
      for (const SceneObject& candidate : *obs.objects) {
        if (candidate.id == est.target_id) {
          object = &candidate;
          break;
        }
      }
      if (object == nullptr) {
        throw Error(ErrorCode::kUnknownTarget, "estimate points at unknown id " + est.target_id);
      }

      SizeParams size;
      if (object->size) {
        size = *object->size;
      } else if (!object->cloud.empty()) {
        size = object_size(object->cloud);
      } else {
        throw Error(ErrorCode::kMissingLibraryEntry,
                    "object '" + object->id + "' carries neither cloud nor size");
      }

      try {
        entry_ = &library_lookup(lib_, object->object_class, size, object->cloud);
      } catch (const Error& e) {
        throw Error(ErrorCode::kMissingLibraryEntry,
                    "no usable gesture for '" + object->object_class + "': " + e.what());
      }
      committed_ = est;
      target_position_ = object->position;
      final_angles_ = eval_gesture(entry_->function, entry_->function.d_end);
      hand.stage = Stage::kGrasping;
      return step_grasping(hand, obs);
    }
  }

  ControlCommand cmd;
  cmd.target_angles = cfg_.standby_pose;
  cmd.stage = Stage::kIntentEstimation;
  return cmd;
}

ControlCommand GraspController::step_grasping(HandState& hand, const FrameObservation& obs) {
  const double d = hand_object_distance(obs.wrist, target_position_);
  last_distance_ = d;
  if (d <= entry_->function.d_end) {
    hand.stage = Stage::kGripTightening;
    return step_tightening(hand);
  }
  ControlCommand cmd;
  cmd.target_angles = eval_gesture(entry_->function, d);
  cmd.stage = Stage::kGrasping;
  cmd.selected_target = committed_->target_id;
  return cmd;
}

ControlCommand GraspController::step_tightening(HandState& hand) {
  ControlCommand cmd;
  cmd.stage = Stage::kGripTightening;
  cmd.selected_target = committed_->target_id;

  bool all_locked = true;
  for (int j = 0; j < kNumDofs; ++j) {
    if (hand.locked[j]) {
      cmd.target_angles[j] = hand.angles[j];
      continue;
    }
    const TightenAction action =
        grip_tighten_dof(hand.angles[j], final_angles_[j], hand.forces[j], cfg_);
    if (action.lock) {
      hand.locked[j] = true;
      if (hand.forces[j] >= cfg_.force_threshold_n) {
        hand.locked_by_force[j] = true;
      } else {
        // Reached the contraction limit without contact; pin the angle to
        // the exact limit before freezing.
        hand.angles[j] = action.target_deg;
      }
      cmd.target_angles[j] = hand.angles[j];
    } else {
      cmd.target_angles[j] = action.target_deg;
      all_locked = false;
    }
  }

  if (all_locked) {
    hand.stage = Stage::kDone;
    cmd.stage = Stage::kDone;
  }
  return cmd;
}

}  // namespace vgrasp
