#include "core/simulator.hpp"

#include "core/geometry.hpp"
#include "core/json_util.hpp"
#include "core/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>

namespace vgrasp {

namespace {

constexpr double kTrialTimeoutS = 10.0;  // extra simulated time after the recording ends
constexpr double kStartJitterM = 0.01;
constexpr double kSimReachDepth = 0.9;  // overshoot so noisy reaches still cross d_end

uint64_t mix64(uint64_t x) {
  x += 0x9e3779b97f4a7c15ull;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
  return x ^ (x >> 31);
}

uint64_t trial_seed(uint64_t base, int trial) {
  return mix64(base ^ mix64(static_cast<uint64_t>(trial) + 1));
}

AngleVector gesture_final_angles(const GestureFunction& f) { return eval_gesture(f, f.d_end); }

// Contact recipe when a scene does not specify one: the strongly gripping
// DOFs (thumb bend, index, middle) meet the object shortly before the
// gesture's final angle and lock by force; the rest never build force and
// lock at the contraction limit instead.
ContactModel default_contact_model(const GestureFunction& f) {
  const AngleVector final = gesture_final_angles(f);
  ContactModel contact;
  for (int j = 0; j < kNumDofs; ++j) {
    const bool gripping = j == kDofThumbBend || j == kDofIndex || j == kDofMiddle;
    contact.contact_angle_deg[j] = gripping ? final[j] - 8.0 : final[j] + 30.0;
  }
  return contact;
}

const GestureLibraryEntry* find_entry_by_class(const GestureLibrary& lib,
                                               const std::string& object_class) {
  for (const GestureLibraryEntry& entry : lib.entries) {
    if (entry.object_class == object_class) return &entry;
  }
  return nullptr;
}

struct GroupStats {
  std::string label;
  size_t n = 0;
  double acc = 0.0;
  double suc = 0.0;
  DurationStats dur;
  double r2 = std::numeric_limits<double>::quiet_NaN();
  double rmse = std::numeric_limits<double>::quiet_NaN();
  double baseline_acc = std::numeric_limits<double>::quiet_NaN();
};

}  // namespace

BuildLibraryResult build_library_from_dir(const std::filesystem::path& dir) {
  std::vector<std::filesystem::path> files;
  std::error_code ec;
  for (const auto& e : std::filesystem::directory_iterator(dir, ec)) {
    if (e.is_regular_file() && e.path().extension() == ".json") files.push_back(e.path());
  }
  if (ec) throw Error(ErrorCode::kIoError, "cannot read directory " + dir.string());
  std::sort(files.begin(), files.end());

  BuildLibraryResult result;
  for (const std::filesystem::path& file : files) {
    try {
      const EpisodeRecord ep = load_episode(file);
      const std::string object_id = modeled_object_id(ep);

      GestureLibraryEntry entry;
      bool have_size = false;
      for (const EpisodeFrame& frame : ep.frames) {
        for (const SceneObject& obj : frame.objects) {
          if (obj.id != object_id) continue;
          entry.object_class = obj.object_class;
          if (!obj.cloud.empty()) entry.model_cloud = obj.cloud;
          if (obj.size) {
            entry.size = *obj.size;
            have_size = true;
          }
        }
      }
      if (!have_size) {
        if (entry.model_cloud.empty()) {
          throw Error(ErrorCode::kSchemaError, "object carries neither size nor cloud");
        }
        entry.size = object_size(entry.model_cloud);
      }

      const std::vector<GestureSample> samples = extract_gesture_samples(ep);
      entry.function = fit_gesture_function(samples);

      double sq_sum = 0.0;
      for (const GestureSample& s : samples) {
        const AngleVector fitted = eval_gesture(entry.function, s.distance);
        for (int j = 0; j < kNumDofs; ++j) {
          const double r = fitted[j] - s.angles[j];
          sq_sum += r * r;
        }
      }
      const double rmse = std::sqrt(sq_sum / (samples.size() * kNumDofs));

      std::ostringstream line;
      line << file.filename().string() << ": class=" << entry.object_class
           << " samples=" << samples.size() << " d=[" << entry.function.d_end << ", "
           << entry.function.d_start << "] fit_rmse_deg=" << rmse;
      result.log.push_back(line.str());
      library_insert(result.library, std::move(entry));
    } catch (const Error& e) {
      result.log.push_back("SKIP " + file.filename().string() + ": " + e.what());
    }
  }
  if (result.library.entries.empty()) {
    throw Error(ErrorCode::kTooFewSamples, "no usable modeling episode in " + dir.string());
  }
  return result;
}

TrialRow run_trial(const EpisodeRecord& ep, const GestureLibrary& lib,
                   const SimulationOptions& opts, int trial_id,
                   const std::map<std::string, ContactModel>& contacts) {
  ControllerConfig cfg;
  cfg.handedness = ep.meta.handedness;
  cfg.actuator_time_constant_s = opts.actuator_tau_s;
  cfg.standby_pose = default_standby_pose(lib);
  GraspController ctrl(cfg, lib);

  HandState hand;
  hand.angles = cfg.standby_pose;

  // Per-object state merged across frames: positions update every frame,
  // shape observations persist from the last frame that carried them.
  std::vector<SceneObject> merged;
  auto merge_frame = [&merged](const std::vector<SceneObject>& seen) {
    for (const SceneObject& obj : seen) {
      auto it = std::find_if(merged.begin(), merged.end(),
                             [&obj](const SceneObject& m) { return m.id == obj.id; });
      if (it == merged.end()) {
        merged.push_back(obj);
      } else {
        it->position = obj.position;
        if (!obj.cloud.empty()) it->cloud = obj.cloud;
        if (obj.size) it->size = obj.size;
        if (obj.bbox) it->bbox = obj.bbox;
      }
    }
  };
  for (const EpisodeFrame& frame : ep.frames) merge_frame(frame.objects);

  // The hand physically meets the intended object (or the one it ends up
  // closest to); the controller's choice only affects the gesture.
  std::string physical_id = ep.meta.intended_target.value_or("");
  if (physical_id.empty() && !merged.empty()) {
    const Point3& last_wrist = ep.frames.back().wrist;
    double best = std::numeric_limits<double>::infinity();
    for (const SceneObject& obj : merged) {
      const double d = (obj.position - last_wrist).norm();
      if (d < best) {
        best = d;
        physical_id = obj.id;
      }
    }
  }
  ContactModel contact;
  contact.contact_angle_deg.fill(std::numeric_limits<double>::infinity());
  if (auto it = contacts.find(physical_id); it != contacts.end()) {
    contact = it->second;
  } else {
    for (const SceneObject& obj : merged) {
      if (obj.id != physical_id) continue;
      if (const GestureLibraryEntry* entry = find_entry_by_class(lib, obj.object_class)) {
        contact = default_contact_model(entry->function);
      }
    }
  }

  TrialRow row;
  row.trial_id = trial_id;
  row.intended = ep.meta.intended_target.value_or("");

  std::vector<GestureSample> grasp_samples;
  bool done = false;
  double done_t = 0.0;
  const double t0 = ep.frames.front().t;

  // Re-run per-frame object merging so the controller only sees what has
  // been observed up to the current frame.
  merged.clear();

  auto step_once = [&](double t, const Point3& wrist, double dt) {
    FrameObservation obs{t, wrist, &merged};
    const ControlCommand cmd = ctrl.step(hand, obs);
    hand = simulate_hand(hand, cmd, contact, opts.actuator_tau_s, dt);

    row.track.push_back({t, wrist.x(), wrist.y(), wrist.z()});
    TrialTraceFrame tf;
    tf.t = t;
    tf.stage = cmd.stage;
    tf.distance = (cmd.stage == Stage::kIntentEstimation)
                      ? std::numeric_limits<double>::quiet_NaN()
                      : ctrl.last_distance();
    tf.selected = cmd.selected_target;
    tf.commanded = cmd.target_angles;
    tf.actual = hand.angles;
    tf.forces = hand.forces;
    tf.locked = hand.locked;
    row.trace.push_back(std::move(tf));

    if (cmd.stage == Stage::kGrasping) {
      grasp_samples.push_back(GestureSample{ctrl.last_distance(), hand.angles});
    }
    if (hand.stage == Stage::kDone && !done) {
      done = true;
      done_t = t;
    }
  };

  double prev_t = t0;
  for (size_t i = 0; i < ep.frames.size() && !done; ++i) {
    const EpisodeFrame& frame = ep.frames[i];
    merge_frame(frame.objects);
    step_once(frame.t, frame.wrist, i == 0 ? 0.0 : frame.t - prev_t);
    prev_t = frame.t;
  }
  if (!done) {
    // Hold the last observation: the grip may still be closing when the
    // recording stops.
    const double dt = 1.0 / ep.meta.fps;
    const Point3 wrist = ep.frames.back().wrist;
    const double t_end = prev_t + kTrialTimeoutS + dt / 2.0;
    for (double t = prev_t + dt; t <= t_end && !done; t += dt) {
      step_once(t, wrist, dt);
      prev_t = t;
    }
  }

  row.duration_s = (done ? done_t : prev_t) - t0;
  row.estimated = ctrl.committed() ? ctrl.committed()->target_id : "";
  row.intent_ok = !row.intended.empty() && row.estimated == row.intended;
  const bool all_locked = std::all_of(hand.locked.begin(), hand.locked.end(),
                                      [](bool b) { return b; });
  const int force_locks = static_cast<int>(
      std::count(hand.locked_by_force.begin(), hand.locked_by_force.end(), true));
  row.success = done && all_locked && force_locks >= 2;

  for (const SceneObject& obj : merged) {
    SceneObject stripped;
    stripped.id = obj.id;
    stripped.object_class = obj.object_class;
    stripped.position = obj.position;
    row.objects.push_back(std::move(stripped));
  }

  if (ctrl.committed_entry() != nullptr && grasp_samples.size() >= 2) {
    try {
      const AnthropomorphismReport rep =
          anthropomorphism(grasp_samples, ctrl.committed_entry()->function);
      row.r2_mean = rep.r2_mean;
      row.rmse_mean_deg = rep.rmse_mean_deg;
    } catch (const Error&) {
      // Degenerate sample sets keep the NaN placeholders.
    }
  }
  return row;
}

ReportDoc simulate_scene(const SceneSpec& scene, const GestureLibrary& lib, int n_trials,
                         const SimulationOptions& opts) {
  if (n_trials <= 0) throw Error(ErrorCode::kInvalidArgument, "trial count must be positive");

  std::map<std::string, ContactModel> contacts;
  for (const SceneObjectSpec& spec : scene.objects) contacts[spec.id] = spec.contact;

  ReportDoc report;
  report.meta.seed = opts.seed;
  report.meta.handedness = opts.handedness;
  report.meta.pos_noise_m = opts.pos_noise_m;
  report.meta.angle_noise_deg = opts.angle_noise_deg;
  report.meta.actuator_tau_s = opts.actuator_tau_s;

  for (int i = 0; i < n_trials; ++i) {
    const uint64_t seed = trial_seed(opts.seed, i);
    std::mt19937_64 rng(seed);
    std::uniform_int_distribution<size_t> pick(0, scene.objects.size() - 1);
    const SceneObjectSpec& target = scene.objects[pick(rng)];

    const GestureLibraryEntry* entry = find_entry_by_class(lib, target.object_class);
    if (entry == nullptr) {
      throw Error(ErrorCode::kClassNotFound,
                  "library has no gesture for class '" + target.object_class + "'");
    }

    std::normal_distribution<double> gauss(0.0, 1.0);
    TrajectorySpec traj;
    traj.start = scene.start +
                 kStartJitterM * Point3(gauss(rng), gauss(rng), gauss(rng));
    traj.duration_s = scene.duration_s;
    traj.fps = scene.fps;
    traj.reach_depth = kSimReachDepth;

    const NoiseSpec noise{opts.pos_noise_m, opts.angle_noise_deg};
    EpisodeRecord ep = generate_synthetic_episode(scene, target.id, traj, entry->function, noise,
                                                  mix64(seed), opts.handedness);
    TrialRow row = run_trial(ep, lib, opts, i, contacts);
    row.spacing_m = scene.spacing_m;
    report.rows.push_back(std::move(row));
  }
  return report;
}

ReportDoc simulate_episode(const EpisodeRecord& episode, const GestureLibrary& lib,
                           const SimulationOptions& opts) {
  ReportDoc report;
  report.meta.seed = opts.seed;
  report.meta.handedness = episode.meta.handedness;
  report.meta.pos_noise_m = opts.pos_noise_m;
  report.meta.angle_noise_deg = opts.angle_noise_deg;
  report.meta.actuator_tau_s = opts.actuator_tau_s;
  report.rows.push_back(run_trial(episode, lib, opts, 0));
  return report;
}

std::string sphere_track_decision(const std::vector<std::array<double, 4>>& track,
                                  const std::vector<SceneObject>& objects, double radius) {
  if (track.empty()) throw Error(ErrorCode::kTooFewPositions, "empty track");
  for (const auto& sample : track) {
    const Point3 hand(sample[1], sample[2], sample[3]);
    const IntentEstimate est = estimate_target_sphere_baseline(hand, objects, radius);
    if (!est.fallback_used) return est.target_id;
  }
  const auto& last = track.back();
  return estimate_target_sphere_baseline(Point3(last[1], last[2], last[3]), objects, radius)
      .target_id;
}

std::string evaluate_report(const ReportDoc& report, const EvaluateOptions& opts) {
  if (report.rows.empty()) throw Error(ErrorCode::kEmptyTrials, "report has no trials");

  struct Group {
    std::optional<double> spacing;
    std::vector<const TrialRow*> rows;
  };
  std::vector<Group> groups;
  if (opts.group_by_spacing) {
    for (const TrialRow& row : report.rows) {
      auto it = std::find_if(groups.begin(), groups.end(), [&row](const Group& g) {
        return g.spacing == row.spacing_m;
      });
      if (it == groups.end()) {
        groups.push_back(Group{row.spacing_m, {&row}});
      } else {
        it->rows.push_back(&row);
      }
    }
    std::sort(groups.begin(), groups.end(), [](const Group& a, const Group& b) {
      if (a.spacing.has_value() != b.spacing.has_value()) return a.spacing.has_value();
      return a.spacing.value_or(0.0) > b.spacing.value_or(0.0);
    });
  } else {
    Group all;
    for (const TrialRow& row : report.rows) all.rows.push_back(&row);
    groups.push_back(std::move(all));
  }

  std::vector<GroupStats> stats;
  for (const Group& group : groups) {
    GroupStats gs;
    if (opts.group_by_spacing) {
      char buf[32];
      if (group.spacing) {
        std::snprintf(buf, sizeof(buf), "%.3f", *group.spacing);
        gs.label = buf;
      } else {
        gs.label = "-";
      }
    } else {
      gs.label = "all";
    }
    gs.n = group.rows.size();

    std::vector<TrialRecord> records;
    records.reserve(group.rows.size());
    for (const TrialRow* row : group.rows) records.push_back(row->record());
    gs.acc = intent_accuracy(records);
    gs.suc = grasp_success_rate(records);

    // Failed grasps sit at the timeout; report the durations of completed
    // grasps when there are any.
    std::vector<TrialRecord> completed;
    for (const TrialRecord& r : records) {
      if (r.grasp_success) completed.push_back(r);
    }
    gs.dur = duration_stats(completed.empty() ? records : completed);

    double r2_sum = 0.0, rmse_sum = 0.0;
    size_t fitted = 0;
    for (const TrialRow* row : group.rows) {
      if (std::isfinite(row->r2_mean) && std::isfinite(row->rmse_mean_deg)) {
        r2_sum += row->r2_mean;
        rmse_sum += row->rmse_mean_deg;
        ++fitted;
      }
    }
    if (fitted > 0) {
      gs.r2 = r2_sum / fitted;
      gs.rmse = rmse_sum / fitted;
    }

    if (opts.baseline == BaselineKind::kSphere) {
      size_t correct = 0;
      for (const TrialRow* row : group.rows) {
        if (row->track.empty() || row->objects.empty()) {
          throw Error(ErrorCode::kSchemaError,
                      "baseline evaluation needs the stored tracks of a JSON report");
        }
        const std::string est =
            sphere_track_decision(row->track, row->objects, opts.sphere_radius_m);
        if (!row->intended.empty() && est == row->intended) ++correct;
      }
      gs.baseline_acc = 100.0 * static_cast<double>(correct) / group.rows.size();
    }
    stats.push_back(std::move(gs));
  }

  std::ostringstream out;
  char line[256];
  const bool with_baseline = opts.baseline == BaselineKind::kSphere;
  std::snprintf(line, sizeof(line), "%-9s %6s %8s %s %8s %14s %9s %10s\n", "spacing", "trials",
                "acc%", with_baseline ? "sphere%  " : "", "success%", "duration_s", "r2_mean",
                "rmse_deg");
  out << line;
  for (const GroupStats& gs : stats) {
    char base[16] = "";
    if (with_baseline) std::snprintf(base, sizeof(base), "%7.2f  ", gs.baseline_acc);
    char r2[16], rmse[16];
    if (std::isfinite(gs.r2)) {
      std::snprintf(r2, sizeof(r2), "%9.4f", gs.r2);
      std::snprintf(rmse, sizeof(rmse), "%10.3f", gs.rmse);
    } else {
      std::snprintf(r2, sizeof(r2), "%9s", "-");
      std::snprintf(rmse, sizeof(rmse), "%10s", "-");
    }
    std::snprintf(line, sizeof(line), "%-9s %6zu %8.2f %s %8.2f %14s %s %s\n", gs.label.c_str(),
                  gs.n, gs.acc, base, gs.suc, format_mean_std(gs.dur.mean_s, gs.dur.std_s).c_str(),
                  r2, rmse);
    out << line;
  }
  return out.str();
}

namespace {

struct DemoClass {
  const char* name;
  Eigen::Vector3d extents;
  AngleVector open;
  AngleVector close;
  AngleVector wiggle;
};

// Eight object shapes with distinct grasp profiles. Angle order is pinky,
// ring, middle, index, thumb bend, thumb rotation; all profiles stay inside
// the reachable cone of the synthetic hand (bending < 90, tb in [55, 85],
// tr in [0, 40]).
const DemoClass kDemoClasses[] = {
    {"apple", {0.075, 0.07, 0.075}, {15, 15, 15, 15, 60, 5}, {55, 58, 60, 62, 75, 25},
     {3, 3, 3, 3, 2, 2}},
    {"bottle", {0.07, 0.24, 0.07}, {12, 12, 12, 12, 58, 8}, {62, 64, 66, 68, 78, 30},
     {4, 3, 3, 4, 2, 3}},
    {"bowl", {0.16, 0.07, 0.16}, {10, 10, 10, 10, 62, 10}, {38, 40, 42, 44, 70, 36},
     {2, 2, 3, 2, 2, 2}},
    {"carrot", {0.035, 0.03, 0.18}, {18, 16, 15, 14, 64, 4}, {70, 72, 74, 75, 82, 18},
     {3, 4, 3, 3, 1, 2}},
    {"cup", {0.09, 0.10, 0.09}, {14, 13, 12, 12, 60, 6}, {58, 60, 62, 64, 76, 28},
     {3, 3, 4, 3, 2, 2}},
    {"fork", {0.025, 0.015, 0.19}, {20, 18, 16, 15, 66, 3}, {74, 75, 76, 78, 84, 14},
     {2, 3, 2, 3, 1, 1}},
    {"mouse", {0.06, 0.04, 0.11}, {16, 15, 14, 13, 58, 7}, {48, 50, 52, 55, 72, 22},
     {3, 2, 3, 2, 2, 2}},
    {"pitcher", {0.14, 0.20, 0.12}, {11, 11, 11, 11, 56, 9}, {52, 55, 58, 60, 74, 34},
     {3, 3, 3, 4, 2, 3}},
};

constexpr double kDemoDStart = 0.45;

double demo_d_end(double radius) { return std::clamp(0.4 * radius + 0.04, 0.05, 0.10); }

SceneObjectSpec make_demo_object(const DemoClass& cls, const std::string& id,
                                 const Point3& position) {
  SceneObjectSpec spec;
  spec.id = id;
  spec.object_class = cls.name;
  spec.position = position;
  spec.size = object_size(make_box_surface_cloud(cls.extents, position, 5));
  spec.contact = default_contact_model(
      make_smoothstep_gesture(cls.open, cls.close, cls.wiggle, demo_d_end(spec.size.radius),
                              kDemoDStart));
  return spec;
}

}  // namespace

std::string generate_demo(const std::filesystem::path& out_dir, uint64_t seed, double spacing_m) {
  const std::filesystem::path episodes_dir = out_dir / "episodes";
  std::filesystem::create_directories(episodes_dir);

  const Point3 observer_start(0.05, 0.28, 0.05);
  int written = 0;
  for (size_t ci = 0; ci < std::size(kDemoClasses); ++ci) {
    const DemoClass& cls = kDemoClasses[ci];
    const Point3 position(0.0, 0.25, 0.45);

    SceneSpec mscene;
    mscene.spacing_m = 1.0;
    mscene.seed = seed;
    mscene.start = observer_start;
    mscene.duration_s = 2.0;
    mscene.objects.push_back(make_demo_object(cls, "obj", position));

    const double d_end = demo_d_end(mscene.objects[0].size.radius);
    const GestureFunction gesture =
        make_smoothstep_gesture(cls.open, cls.close, cls.wiggle, d_end, kDemoDStart);

    TrajectorySpec traj;
    // Start exactly at the far end of the fitted range so the samples
    // cover [d_end, d_start] without clamping.
    traj.start = position + kDemoDStart * (observer_start - position).normalized();
    traj.duration_s = mscene.duration_s;
    traj.fps = mscene.fps;
    traj.reach_depth = 1.0;

    EpisodeRecord ep = generate_synthetic_episode(mscene, "obj", traj, gesture, NoiseSpec{},
                                                  mix64(seed ^ (ci + 1)), Handedness::kRight);
    ep.meta.episode_id = std::string(cls.name) + "_modeling";
    save_episode(ep, episodes_dir / (std::string(cls.name) + "_modeling.json"));
    ++written;
  }

  // Three-object tabletop with staggered depths: nearest-sphere decisions
  // get genuinely harder as the lateral spacing shrinks.
  SceneSpec scene;
  scene.spacing_m = spacing_m;
  scene.seed = seed;
  scene.start = observer_start;
  scene.duration_s = 1.5;
  scene.objects.push_back(
      make_demo_object(kDemoClasses[1], "A", Point3(-spacing_m, 0.25, 0.42)));
  scene.objects.push_back(make_demo_object(kDemoClasses[4], "B", Point3(0.0, 0.25, 0.48)));
  scene.objects.push_back(
      make_demo_object(kDemoClasses[2], "C", Point3(spacing_m, 0.25, 0.45)));
  save_scene(scene, out_dir / "scene.json");

  std::ostringstream out;
  out << "wrote " << written << " modeling episodes to " << episodes_dir.string()
      << " and a 3-object scene to " << (out_dir / "scene.json").string() << " (spacing "
      << spacing_m << " m)";
  return out.str();
}

}  // namespace vgrasp
