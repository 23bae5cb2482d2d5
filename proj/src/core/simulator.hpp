#pragma once

#include "core/episode.hpp"

#include <filesystem>
#include <map>
#include <string>
#include <vector>

namespace vgrasp {

struct BuildLibraryResult {
  GestureLibrary library;
  std::vector<std::string> log;  // one line per processed episode file
};

// Fits one library entry per modeling episode found in dir (*.json, sorted
// by name). Episodes that cannot be modeled (no keypoints, too few
// approach samples) are skipped with a log line. Throws when nothing
// usable remains.
BuildLibraryResult build_library_from_dir(const std::filesystem::path& dir);

struct SimulationOptions {
  uint64_t seed = 1;
  Handedness handedness = Handedness::kRight;
  double pos_noise_m = 0.0;
  double angle_noise_deg = 0.0;
  double actuator_tau_s = 0.1;
};

// Plays one episode through the grasp controller and the actuator model.
// The physical contact partner is the intended target (nearest object at
// the last frame when the episode does not name one); its contact model
// comes from `contacts` or, failing that, from the library entry of its
// class. When the episode ends before the grip locks, the last observation
// is held for up to ten extra seconds of simulated time.
TrialRow run_trial(const EpisodeRecord& episode, const GestureLibrary& lib,
                   const SimulationOptions& opts, int trial_id,
                   const std::map<std::string, ContactModel>& contacts = {});

// Runs n_trials synthetic grasps in the scene: per trial the intended
// target is drawn uniformly, the start point is jittered by 1 cm, the
// wrist follows a straight reach with the configured noise, and the
// library gesture of the target class drives the hand.
ReportDoc simulate_scene(const SceneSpec& scene, const GestureLibrary& lib, int n_trials,
                         const SimulationOptions& opts);

// Single-episode variant producing a one-row report.
ReportDoc simulate_episode(const EpisodeRecord& episode, const GestureLibrary& lib,
                           const SimulationOptions& opts);

// First-sphere-entry decision on a recorded wrist track: at the first
// sample with an object inside the radius, the nearest in-range object
// wins; if no sample enters any sphere, the object nearest to the last
// sample wins.
std::string sphere_track_decision(const std::vector<std::array<double, 4>>& track,
                                  const std::vector<SceneObject>& objects, double radius);

enum class BaselineKind { kNone, kSphere };

struct EvaluateOptions {
  bool group_by_spacing = false;
  BaselineKind baseline = BaselineKind::kNone;
  double sphere_radius_m = 0.15;
};

// Renders the aggregate table (accuracy, success rate, durations, gesture
// fidelity, optional sphere baseline) for a report. Baseline evaluation
// needs the stored tracks, so it rejects CSV reports.
std::string evaluate_report(const ReportDoc& report, const EvaluateOptions& opts);

// Writes a ready-to-use corpus under out_dir: eight modeling episodes
// (episodes/<class>_modeling.json) covering distinct object shapes and
// gesture profiles, plus a three-object scene (scene.json) with the given
// lateral spacing. Returns a short description of what was written.
std::string generate_demo(const std::filesystem::path& out_dir, uint64_t seed, double spacing_m);

}  // namespace vgrasp
