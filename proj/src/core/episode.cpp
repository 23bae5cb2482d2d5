#include "core/episode.hpp"

#include "core/geometry.hpp"
#include "core/json_util.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <random>
#include <sstream>

namespace vgrasp {

namespace {

constexpr double kDegToRad = M_PI / 180.0;

Handedness parse_handedness(const std::string& text, const std::string& where) {
  if (text == "right") return Handedness::kRight;
  if (text == "left") return Handedness::kLeft;
  throw Error(ErrorCode::kSchemaError, where + ": handedness must be 'right' or 'left'");
}

Json camera_json(const CameraIntrinsics& cam) {
  Json obj;
  obj["fx"] = cam.fx;
  obj["fy"] = cam.fy;
  obj["px"] = cam.px;
  obj["py"] = cam.py;
  obj["width"] = cam.width;
  obj["height"] = cam.height;
  return obj;
}

CameraIntrinsics parse_camera(const Json& obj, const std::string& where) {
  CameraIntrinsics cam;
  cam.fx = require_number(obj, "fx", where);
  cam.fy = require_number(obj, "fy", where);
  cam.px = require_number(obj, "px", where);
  cam.py = require_number(obj, "py", where);
  cam.width = static_cast<int>(require_number(obj, "width", where));
  cam.height = static_cast<int>(require_number(obj, "height", where));
  if (cam.fx <= 0.0 || cam.fy <= 0.0 || cam.width <= 0 || cam.height <= 0) {
    throw Error(ErrorCode::kSchemaError, where + ": camera intrinsics must be positive");
  }
  return cam;
}

Json bbox_json(const BoundingBox2D& bbox) { return Json::array({bbox.u, bbox.v, bbox.w, bbox.h}); }

BoundingBox2D parse_bbox(const Json& v, const std::string& where) {
  if (!v.is_array() || v.size() != 4) {
    throw Error(ErrorCode::kSchemaError, where + ": expected [u, v, w, h]");
  }
  for (const Json& e : v) {
    if (!e.is_number()) throw Error(ErrorCode::kSchemaError, where + ": non-numeric bbox entry");
  }
  return BoundingBox2D{v[0].get<double>(), v[1].get<double>(), v[2].get<double>(),
                       v[3].get<double>()};
}

Json size_json(const SizeParams& size) {
  Json obj;
  obj["extents"] = Json::array({size.extents.x(), size.extents.y(), size.extents.z()});
  obj["radius"] = size.radius;
  obj["centroid"] = point3_json(size.centroid);
  return obj;
}

SizeParams parse_size(const Json& obj, const std::string& where) {
  SizeParams size;
  size.extents = parse_point3(require_field(obj, "extents", where), where + ".extents");
  size.radius = require_number(obj, "radius", where);
  size.centroid = parse_point3(require_field(obj, "centroid", where), where + ".centroid");
  return size;
}

Json scene_object_json(const SceneObject& obj) {
  Json e;
  e["id"] = obj.id;
  e["class"] = obj.object_class;
  e["position"] = point3_json(obj.position);
  if (obj.bbox) e["bbox"] = bbox_json(*obj.bbox);
  if (obj.size) e["size"] = size_json(*obj.size);
  if (!obj.cloud.empty()) e["cloud"] = cloud_json(obj.cloud);
  return e;
}

SceneObject parse_scene_object(const Json& e, const std::filesystem::path& base,
                               const std::string& where) {
  SceneObject obj;
  obj.id = require_string(e, "id", where);
  obj.object_class = require_string(e, "class", where);
  obj.position = parse_point3(require_field(e, "position", where), where + ".position");
  if (e.contains("bbox")) obj.bbox = parse_bbox(e["bbox"], where + ".bbox");
  if (e.contains("size")) obj.size = parse_size(e["size"], where + ".size");
  if (e.contains("cloud")) {
    obj.cloud = parse_cloud(e["cloud"], where + ".cloud");
  } else if (e.contains("cloud_ref")) {
    const std::string ref = require_string(e, "cloud_ref", where);
    const Json doc = load_json_file(base / ref);
    obj.cloud = parse_cloud(require_field(doc, "points", ref), ref + ".points");
  }
  return obj;
}

DepthMap parse_depth(const Json& doc, const std::string& where) {
  DepthMap depth;
  depth.width = static_cast<int>(require_number(doc, "width", where));
  depth.height = static_cast<int>(require_number(doc, "height", where));
  const Json& values = require_field(doc, "meters", where);
  if (depth.width <= 0 || depth.height <= 0 || !values.is_array() ||
      values.size() != static_cast<size_t>(depth.width) * depth.height) {
    throw Error(ErrorCode::kSchemaError, where + ": depth dimensions do not match values");
  }
  depth.meters.reserve(values.size());
  for (const Json& v : values) {
    if (!v.is_number()) throw Error(ErrorCode::kSchemaError, where + ": non-numeric depth");
    depth.meters.push_back(v.get<double>());
  }
  return depth;
}

std::string stage_to_string(Stage stage) { return stage_name(stage); }

Stage parse_stage(const std::string& text, const std::string& where) {
  for (Stage s : {Stage::kIntentEstimation, Stage::kGrasping, Stage::kGripTightening, Stage::kDone}) {
    if (text == stage_name(s)) return s;
  }
  throw Error(ErrorCode::kSchemaError, where + ": unknown stage '" + text + "'");
}

double number_or_nan(const Json& v) {
  return v.is_null() ? std::numeric_limits<double>::quiet_NaN() : v.get<double>();
}

Json nan_to_null(double v) { return std::isfinite(v) ? Json(v) : Json(nullptr); }

std::string csv_number(double v) {
  if (std::isnan(v)) return "nan";
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

}  // namespace

EpisodeRecord load_episode(const std::filesystem::path& path) {
  const Json doc = load_json_file(path);
  const std::string where = path.string();
  EpisodeRecord ep;

  const Json& meta = require_field(doc, "meta", where);
  ep.meta.episode_id = require_string(meta, "episode_id", where + ".meta");
  ep.meta.handedness =
      parse_handedness(require_string(meta, "handedness", where + ".meta"), where + ".meta");
  ep.meta.fps = require_number(meta, "fps", where + ".meta");
  if (!(ep.meta.fps > 0.0)) {
    throw Error(ErrorCode::kSchemaError, where + ".meta: fps must be positive");
  }
  if (meta.contains("object_class")) {
    ep.meta.object_class = require_string(meta, "object_class", where + ".meta");
  }
  if (meta.contains("intended_target")) {
    ep.meta.intended_target = require_string(meta, "intended_target", where + ".meta");
  }

  ep.camera = parse_camera(require_field(doc, "camera", where), where + ".camera");

  const Json& frames = require_field(doc, "frames", where);
  if (!frames.is_array() || frames.empty()) {
    throw Error(ErrorCode::kSchemaError, where + ": 'frames' must be a non-empty array");
  }

  double prev_t = -std::numeric_limits<double>::infinity();
  for (size_t i = 0; i < frames.size(); ++i) {
    const std::string fw = where + ": frame " + std::to_string(i);
    const Json& f = frames[i];
    EpisodeFrame frame;
    frame.t = require_number(f, "t", fw);
    if (!(frame.t > prev_t)) {
      throw Error(ErrorCode::kSchemaError, fw + ": timestamps must be strictly increasing");
    }
    prev_t = frame.t;

    const Json& hand = require_field(f, "hand", fw);
    frame.wrist = parse_point3(require_field(hand, "wrist", fw + ".hand"), fw + ".hand.wrist");
    if (hand.contains("keypoints")) {
      const Json& kps = hand["keypoints"];
      if (!kps.is_array() || kps.size() != kNumHandKeypoints) {
        throw Error(ErrorCode::kSchemaError,
                    fw + ".hand: keypoints must hold exactly " +
                        std::to_string(kNumHandKeypoints) + " points");
      }
      HandKeypoints keypoints;
      for (int k = 0; k < kNumHandKeypoints; ++k) {
        keypoints[k] = parse_point3(kps[k], fw + ".hand.keypoints[" + std::to_string(k) + "]");
      }
      frame.keypoints = keypoints;
    }
    if (hand.contains("bbox")) frame.hand_bbox = parse_bbox(hand["bbox"], fw + ".hand.bbox");

    if (f.contains("objects")) {
      const Json& objects = f["objects"];
      if (!objects.is_array()) {
        throw Error(ErrorCode::kSchemaError, fw + ": 'objects' must be an array");
      }
      for (size_t o = 0; o < objects.size(); ++o) {
        frame.objects.push_back(parse_scene_object(
            objects[o], path.parent_path(), fw + ".objects[" + std::to_string(o) + "]"));
      }
    }
    if (f.contains("depth_ref")) {
      const std::string ref = require_string(f, "depth_ref", fw);
      frame.depth = parse_depth(load_json_file(path.parent_path() / ref), ref);
    }
    ep.frames.push_back(std::move(frame));
  }
  return ep;
}

void save_episode(const EpisodeRecord& ep, const std::filesystem::path& path) {
  Json doc;
  Json meta;
  meta["episode_id"] = ep.meta.episode_id;
  meta["handedness"] = handedness_name(ep.meta.handedness);
  meta["fps"] = ep.meta.fps;
  if (ep.meta.object_class) meta["object_class"] = *ep.meta.object_class;
  if (ep.meta.intended_target) meta["intended_target"] = *ep.meta.intended_target;
  doc["meta"] = std::move(meta);
  doc["camera"] = camera_json(ep.camera);

  Json frames = Json::array();
  for (size_t i = 0; i < ep.frames.size(); ++i) {
    const EpisodeFrame& frame = ep.frames[i];
    Json f;
    f["t"] = frame.t;
    Json hand;
    hand["wrist"] = point3_json(frame.wrist);
    if (frame.keypoints) {
      Json kps = Json::array();
      for (const Point3& p : *frame.keypoints) kps.push_back(point3_json(p));
      hand["keypoints"] = std::move(kps);
    }
    if (frame.hand_bbox) hand["bbox"] = bbox_json(*frame.hand_bbox);
    f["hand"] = std::move(hand);
    if (frame.depth) {
      // Depth maps go to sidecar files next to the episode, referenced by
      // relative path, so the main document stays reviewable.
      const std::string ref = path.stem().string() + "_depth_" + std::to_string(i) + ".json";
      Json depth;
      depth["width"] = frame.depth->width;
      depth["height"] = frame.depth->height;
      depth["meters"] = frame.depth->meters;
      write_json_file(path.parent_path() / ref, depth);
      f["depth_ref"] = ref;
    }
    if (!frame.objects.empty()) {
      Json objects = Json::array();
      for (const SceneObject& obj : frame.objects) objects.push_back(scene_object_json(obj));
      f["objects"] = std::move(objects);
    }
    frames.push_back(std::move(f));
  }
  doc["frames"] = std::move(frames);
  write_json_file(path, doc);
}

SceneSpec load_scene(const std::filesystem::path& path) {
  const Json doc = load_json_file(path);
  const std::string where = path.string();

  SceneSpec scene;
  scene.spacing_m = require_number(doc, "spacing", where);
  if (doc.contains("seed")) scene.seed = doc["seed"].get<uint64_t>();
  if (doc.contains("start")) scene.start = parse_point3(doc["start"], where + ".start");
  if (doc.contains("duration")) scene.duration_s = require_number(doc, "duration", where);
  if (doc.contains("fps")) scene.fps = require_number(doc, "fps", where);
  if (!(scene.duration_s > 0.0) || !(scene.fps > 0.0)) {
    throw Error(ErrorCode::kSchemaError, where + ": duration and fps must be positive");
  }

  const Json& objects = require_field(doc, "objects", where);
  if (!objects.is_array() || objects.empty()) {
    throw Error(ErrorCode::kSchemaError, where + ": 'objects' must be a non-empty array");
  }
  for (size_t i = 0; i < objects.size(); ++i) {
    const std::string ow = where + ": object " + std::to_string(i);
    const Json& o = objects[i];
    SceneObjectSpec spec;
    spec.id = require_string(o, "id", ow);
    spec.object_class = require_string(o, "class", ow);
    spec.position = parse_point3(require_field(o, "position", ow), ow + ".position");
    spec.size = parse_size(require_field(o, "size", ow), ow + ".size");
    const Json& contact = require_field(o, "contact_angles", ow);
    if (!contact.is_array() || contact.size() != kNumDofs) {
      throw Error(ErrorCode::kSchemaError, ow + ": contact_angles must hold six values");
    }
    for (int j = 0; j < kNumDofs; ++j) {
      spec.contact.contact_angle_deg[j] = contact[j].get<double>();
    }
    if (o.contains("stiffness")) {
      spec.contact.stiffness_n_per_deg = require_number(o, "stiffness", ow);
    }
    scene.objects.push_back(std::move(spec));
  }

  for (size_t a = 0; a < scene.objects.size(); ++a) {
    for (size_t b = a + 1; b < scene.objects.size(); ++b) {
      if (scene.objects[a].id == scene.objects[b].id) {
        throw Error(ErrorCode::kSchemaError, where + ": duplicate object id " + scene.objects[a].id);
      }
      const Eigen::Vector3d d = scene.objects[a].position - scene.objects[b].position;
      const double horizontal = std::hypot(d.x(), d.z());
      if (horizontal + 1e-9 < scene.spacing_m) {
        throw Error(ErrorCode::kSchemaError,
                    where + ": objects " + scene.objects[a].id + " and " + scene.objects[b].id +
                        " violate the minimum spacing");
      }
    }
  }
  return scene;
}

void save_scene(const SceneSpec& scene, const std::filesystem::path& path) {
  Json doc;
  doc["spacing"] = scene.spacing_m;
  doc["seed"] = scene.seed;
  doc["start"] = point3_json(scene.start);
  doc["duration"] = scene.duration_s;
  doc["fps"] = scene.fps;
  Json objects = Json::array();
  for (const SceneObjectSpec& spec : scene.objects) {
    Json o;
    o["id"] = spec.id;
    o["class"] = spec.object_class;
    o["position"] = point3_json(spec.position);
    o["size"] = size_json(spec.size);
    o["contact_angles"] = Json(spec.contact.contact_angle_deg);
    o["stiffness"] = spec.contact.stiffness_n_per_deg;
    objects.push_back(std::move(o));
  }
  doc["objects"] = std::move(objects);
  write_json_file(path, doc);
}

PointCloud make_box_surface_cloud(const Eigen::Vector3d& extents, const Point3& center,
                                  int points_per_edge) {
  const int q = std::max(2, points_per_edge);
  const Eigen::Vector3d half = extents / 2.0;
  PointCloud cloud;
  cloud.reserve(static_cast<size_t>(6) * q * q);
  for (int axis = 0; axis < 3; ++axis) {
    const int a = (axis + 1) % 3;
    const int b = (axis + 2) % 3;
    for (double side : {-1.0, 1.0}) {
      for (int i = 0; i < q; ++i) {
        for (int k = 0; k < q; ++k) {
          Point3 p = center;
          p[axis] += side * half[axis];
          p[a] += -half[a] + 2.0 * half[a] * i / (q - 1);
          p[b] += -half[b] + 2.0 * half[b] * k / (q - 1);
          cloud.push_back(p);
        }
      }
    }
  }
  return cloud;
}

GestureFunction make_smoothstep_gesture(const AngleVector& start_deg, const AngleVector& end_deg,
                                        const AngleVector& wiggle_deg, double d_end,
                                        double d_start) {
  if (!(d_end < d_start)) {
    throw Error(ErrorCode::kInvalidArgument, "need d_end < d_start");
  }
  // Normalized progress u = p + q d runs from 0 at d_start to 1 at d_end.
  const double q = -1.0 / (d_start - d_end);
  const double p = -q * d_start;

  GestureFunction f;
  f.d_end = d_end;
  f.d_start = d_start;
  for (int j = 0; j < kNumDofs; ++j) {
    // Ascending coefficients in u: start + span (3u^2 - 2u^3) + wiggle 16u^2(1-u)^2.
    const double span = end_deg[j] - start_deg[j];
    const std::array<double, 5> in_u{start_deg[j], 0.0, 3.0 * span + 16.0 * wiggle_deg[j],
                                     -2.0 * span - 32.0 * wiggle_deg[j], 16.0 * wiggle_deg[j]};
    // Compose with the affine map using the binomial expansion of (p + q d)^k.
    std::array<double, 5> in_d{};
    for (int k = 0; k < 5; ++k) {
      if (in_u[k] == 0.0) continue;
      std::array<double, 5> binom{};
      binom[0] = 1.0;  // coefficients of (p + q d)^0
      for (int power = 0; power < k; ++power) {
        std::array<double, 5> next{};
        for (int m = 0; m <= power; ++m) {
          next[m] += binom[m] * p;
          next[m + 1] += binom[m] * q;
        }
        binom = next;
      }
      for (int m = 0; m <= k; ++m) in_d[m] += in_u[k] * binom[m];
    }
    for (int m = 0; m < 5; ++m) f.coeffs[j][4 - m] = in_d[m];
  }
  return f;
}

namespace {

struct HandLayout {
  double mcp_forward = 0.09;
  double mcp_half_spread = 0.025;
  double thumb_cmc_forward = 0.03;
  double thumb_cmc_side = 0.015;
  std::array<double, 4> finger_length{0.06, 0.075, 0.08, 0.075};  // pinky, ring, middle, index
  double thumb_length = 0.07;
};

// Builds 21 keypoints at the wrist so that extract_angle_vector returns
// exactly the requested angle vector. u1 points along the fingers, u2
// across the palm; both are unit and orthogonal.
HandKeypoints build_hand(const Point3& wrist, const Eigen::Vector3d& u1,
                         const Eigen::Vector3d& u2, const AngleVector& angles) {
  const HandLayout layout;
  HandKeypoints kp{};
  kp[kWrist] = wrist;
  kp[kIndexMcp] = wrist + layout.mcp_forward * u1 + layout.mcp_half_spread * u2;
  kp[kMiddleMcp] = wrist + (layout.mcp_forward + 0.004) * u1 + (layout.mcp_half_spread / 3.0) * u2;
  kp[kRingMcp] = wrist + (layout.mcp_forward + 0.002) * u1 - (layout.mcp_half_spread / 3.0) * u2;
  kp[kPinkyMcp] = wrist + (layout.mcp_forward - 0.006) * u1 - layout.mcp_half_spread * u2;
  kp[kThumbCmc] = wrist + layout.thumb_cmc_forward * u1 + layout.thumb_cmc_side * u2;

  // Oriented normal of the palm plane as the extractor will see it.
  const Eigen::Vector3d normal =
      (kp[kIndexMcp] - kp[kWrist]).cross(kp[kPinkyMcp] - kp[kWrist]).normalized();

  const std::array<std::pair<int, int>, 4> fingers{
      std::pair<int, int>{kPinkyMcp, kDofPinky}, {kRingMcp, kDofRing},
      {kMiddleMcp, kDofMiddle}, {kIndexMcp, kDofIndex}};
  for (size_t fi = 0; fi < fingers.size(); ++fi) {
    const auto [mcp, dof] = fingers[fi];
    const double a = angles[dof] * kDegToRad;
    // Positive bending moves the tip to the palmar side, opposite the
    // oriented normal.
    const Eigen::Vector3d dir = std::cos(a) * u1 - std::sin(a) * normal;
    const double len = layout.finger_length[fi];
    for (int seg = 1; seg <= 3; ++seg) {
      kp[mcp + seg] = kp[mcp] + dir * (len * seg / 3.0);
    }
  }

  // The thumb segment must satisfy both thumb DOFs: its angle against the
  // rotation axis k1->k5 equals tb, and its elevation against the palm
  // plane equals tr.
  const Eigen::Vector3d axis = (kp[kIndexMcp] - kp[kThumbCmc]).normalized();
  const Eigen::Vector3d side = normal.cross(axis);
  const double tb = angles[kDofThumbBend] * kDegToRad;
  const double tr = angles[kDofThumbRot] * kDegToRad;
  const double along_axis = std::cos(tb);
  const double along_normal = -std::sin(tr);
  const double rest = 1.0 - along_axis * along_axis - along_normal * along_normal;
  if (rest < -1e-9) {
    throw Error(ErrorCode::kInvalidArgument, "thumb angles tb/tr are jointly infeasible");
  }
  const Eigen::Vector3d dir =
      along_axis * axis + along_normal * normal + std::sqrt(std::max(0.0, rest)) * side;
  for (int seg = 1; seg <= 3; ++seg) {
    kp[kThumbCmc + seg] = kp[kThumbCmc] + dir * (layout.thumb_length * seg / 3.0);
  }
  return kp;
}

}  // namespace

EpisodeRecord generate_synthetic_episode(const SceneSpec& scene, const std::string& target_id,
                                         const TrajectorySpec& traj,
                                         const GestureFunction& gesture, const NoiseSpec& noise,
                                         uint64_t seed, Handedness handedness) {
  const SceneObjectSpec* target = nullptr;
  for (const SceneObjectSpec& obj : scene.objects) {
    if (obj.id == target_id) target = &obj;
  }
  if (target == nullptr) {
    throw Error(ErrorCode::kUnknownTarget, "scene has no object '" + target_id + "'");
  }

  if (!(traj.reach_depth > 0.0) || traj.reach_depth > 1.0) {
    throw Error(ErrorCode::kInvalidArgument, "reach_depth must be in (0, 1]");
  }
  const double reach = traj.reach_depth * gesture.d_end;
  const Eigen::Vector3d to_target = target->position - traj.start;
  if (to_target.norm() <= reach) {
    throw Error(ErrorCode::kInvalidArgument, "start position is already inside the grasp range");
  }
  const Eigen::Vector3d v = to_target.normalized();
  Eigen::Vector3d thumb_side = Eigen::Vector3d::UnitY().cross(v);
  if (thumb_side.norm() < 1e-9) {
    throw Error(ErrorCode::kInvalidArgument, "approach direction is vertical");
  }
  thumb_side.normalize();
  if (handedness == Handedness::kLeft) thumb_side = -thumb_side;

  // The wrist stops short of the object center and offset toward the thumb
  // side, at the configured fraction of the gesture's closest fitted
  // distance (3-4-5 split keeps the offset direction unit length).
  const Point3 grasp_point = target->position - 0.8 * reach * v + 0.6 * reach * thumb_side;

  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss(0.0, 1.0);

  EpisodeRecord ep;
  ep.meta.episode_id = target->object_class + "_" + target_id + "_s" + std::to_string(seed);
  ep.meta.handedness = handedness;
  ep.meta.fps = traj.fps;
  ep.meta.object_class = target->object_class;
  ep.meta.intended_target = target_id;
  ep.camera = CameraIntrinsics{600.0, 600.0, 320.0, 240.0, 640, 480};

  const int n_frames = std::max<int>(2, static_cast<int>(std::llround(traj.duration_s * traj.fps)));
  const Eigen::Vector3d palm_across = thumb_side;  // palm spans the travel direction

  for (int i = 0; i < n_frames; ++i) {
    EpisodeFrame frame;
    frame.t = static_cast<double>(i) / traj.fps;
    const double progress = static_cast<double>(i) / (n_frames - 1);
    Point3 wrist = traj.start + progress * (grasp_point - traj.start);
    if (noise.pos_sigma_m > 0.0) {
      wrist += noise.pos_sigma_m * Point3(gauss(rng), gauss(rng), gauss(rng));
    } else {
      // Keep the generator seed-compatible between noise settings.
      gauss(rng), gauss(rng), gauss(rng);
    }
    frame.wrist = wrist;

    const double d = hand_object_distance(wrist, target->position);
    AngleVector angles = eval_gesture(gesture, d);
    for (int j = 0; j < kNumDofs; ++j) {
      const double bump = gauss(rng);
      if (noise.angle_sigma_deg > 0.0) angles[j] += noise.angle_sigma_deg * bump;
    }
    frame.keypoints = build_hand(wrist, v, palm_across, angles);

    for (const SceneObjectSpec& spec : scene.objects) {
      SceneObject obj;
      obj.id = spec.id;
      obj.object_class = spec.object_class;
      obj.position = spec.position;
      if (i == 0) {
        // Shape observations are expensive to carry per frame; emit them
        // once and let consumers persist the first sighting.
        obj.cloud = make_box_surface_cloud(spec.size.extents, spec.position, 5);
        obj.size = object_size(obj.cloud);
      }
      frame.objects.push_back(std::move(obj));
    }
    ep.frames.push_back(std::move(frame));
  }
  return ep;
}

std::string modeled_object_id(const EpisodeRecord& ep) {
  std::string object_id;
  if (ep.meta.intended_target) {
    object_id = *ep.meta.intended_target;
  } else if (!ep.frames.empty() && ep.frames.front().objects.size() == 1) {
    object_id = ep.frames.front().objects.front().id;
  } else if (ep.meta.object_class && !ep.frames.empty()) {
    for (const SceneObject& obj : ep.frames.front().objects) {
      if (obj.object_class == *ep.meta.object_class) {
        if (!object_id.empty()) {
          throw Error(ErrorCode::kSchemaError,
                      ep.meta.episode_id + ": several objects share the modeled class");
        }
        object_id = obj.id;
      }
    }
  }
  if (object_id.empty()) {
    throw Error(ErrorCode::kSchemaError,
                ep.meta.episode_id + ": cannot identify the modeled object");
  }
  return object_id;
}

std::vector<GestureSample> extract_gesture_samples(const EpisodeRecord& ep) {
  const std::string object_id = modeled_object_id(ep);

  struct Raw {
    double distance;
    AngleVector angles;
  };
  std::vector<Raw> raw;
  Point3 position = Point3::Zero();
  bool have_position = false;
  for (const EpisodeFrame& frame : ep.frames) {
    for (const SceneObject& obj : frame.objects) {
      if (obj.id == object_id) {
        position = obj.position;
        have_position = true;
      }
    }
    if (!have_position || !frame.keypoints) continue;
    raw.push_back(Raw{hand_object_distance(frame.wrist, position),
                      extract_angle_vector(*frame.keypoints)});
  }

  // 3-frame median smoothing of the distance profile, then keep frames that
  // push a running minimum: retreat and jitter frames drop out.
  std::vector<GestureSample> samples;
  double running_min = std::numeric_limits<double>::infinity();
  for (size_t i = 0; i < raw.size(); ++i) {
    double smoothed = raw[i].distance;
    if (i > 0 && i + 1 < raw.size()) {
      std::array<double, 3> window{raw[i - 1].distance, raw[i].distance, raw[i + 1].distance};
      std::sort(window.begin(), window.end());
      smoothed = window[1];
    }
    if (smoothed <= running_min + 1e-12) {
      running_min = std::min(running_min, smoothed);
      samples.push_back(GestureSample{raw[i].distance, raw[i].angles});
    }
  }
  return samples;
}

void export_report(const ReportDoc& report, const std::filesystem::path& path) {
  if (path.extension() == ".csv") {
    std::ostringstream out;
    out << "trial_id,spacing_m,intended,estimated,intent_ok,success,duration_s,r2_mean,"
           "rmse_mean_deg\n";
    for (const TrialRow& row : report.rows) {
      for (const std::string* field : {&row.intended, &row.estimated}) {
        if (field->find(',') != std::string::npos) {
          throw Error(ErrorCode::kInvalidArgument, "object id contains a comma: " + *field);
        }
      }
      out << row.trial_id << ','
          << csv_number(row.spacing_m ? *row.spacing_m : std::numeric_limits<double>::quiet_NaN())
          << ',' << row.intended << ',' << row.estimated << ','
          << (row.intent_ok ? "true" : "false") << ',' << (row.success ? "true" : "false") << ','
          << csv_number(row.duration_s) << ',' << csv_number(row.r2_mean) << ','
          << csv_number(row.rmse_mean_deg) << '\n';
    }
    write_text_file(path, out.str());
    return;
  }

  Json doc;
  Json meta;
  meta["seed"] = report.meta.seed;
  meta["library"] = report.meta.library;
  meta["scene"] = report.meta.scene;
  meta["handedness"] = handedness_name(report.meta.handedness);
  meta["pos_noise_m"] = report.meta.pos_noise_m;
  meta["angle_noise_deg"] = report.meta.angle_noise_deg;
  meta["actuator_tau_s"] = report.meta.actuator_tau_s;
  doc["meta"] = std::move(meta);

  Json trials = Json::array();
  for (const TrialRow& row : report.rows) {
    Json r;
    r["trial_id"] = row.trial_id;
    r["spacing_m"] = row.spacing_m ? Json(*row.spacing_m) : Json(nullptr);
    r["intended"] = row.intended;
    r["estimated"] = row.estimated;
    r["intent_ok"] = row.intent_ok;
    r["success"] = row.success;
    r["duration_s"] = row.duration_s;
    r["r2_mean"] = nan_to_null(row.r2_mean);
    r["rmse_mean_deg"] = nan_to_null(row.rmse_mean_deg);

    Json objects = Json::array();
    for (const SceneObject& obj : row.objects) {
      Json o;
      o["id"] = obj.id;
      o["class"] = obj.object_class;
      o["position"] = point3_json(obj.position);
      objects.push_back(std::move(o));
    }
    r["objects"] = std::move(objects);

    Json track = Json::array();
    for (const auto& sample : row.track) {
      track.push_back(Json::array({sample[0], sample[1], sample[2], sample[3]}));
    }
    r["track"] = std::move(track);

    Json trace = Json::array();
    for (const TrialTraceFrame& f : row.trace) {
      Json tf;
      tf["t"] = f.t;
      tf["stage"] = stage_to_string(f.stage);
      tf["d"] = nan_to_null(f.distance);
      tf["selected"] = f.selected;
      tf["commanded"] = Json(f.commanded);
      tf["actual"] = Json(f.actual);
      tf["forces"] = Json(f.forces);
      Json locked = Json::array();
      for (bool b : f.locked) locked.push_back(b);
      tf["locked"] = std::move(locked);
      trace.push_back(std::move(tf));
    }
    r["trace"] = std::move(trace);
    trials.push_back(std::move(r));
  }
  doc["trials"] = std::move(trials);
  write_json_file(path, doc);
}

ReportDoc load_report(const std::filesystem::path& path) {
  ReportDoc report;
  if (path.extension() == ".csv") {
    std::ifstream in(path);
    if (!in) throw Error(ErrorCode::kIoError, "cannot open " + path.string());
    std::string line;
    if (!std::getline(in, line)) {
      throw Error(ErrorCode::kSchemaError, path.string() + ": empty report");
    }
    int line_no = 1;
    while (std::getline(in, line)) {
      ++line_no;
      if (line.empty()) continue;
      std::vector<std::string> fields;
      std::stringstream ss(line);
      std::string field;
      while (std::getline(ss, field, ',')) fields.push_back(field);
      if (fields.size() != 9) {
        throw Error(ErrorCode::kSchemaError,
                    path.string() + ":" + std::to_string(line_no) + ": expected 9 columns");
      }
      TrialRow row;
      row.trial_id = std::stoi(fields[0]);
      const double spacing = std::stod(fields[1]);
      if (!std::isnan(spacing)) row.spacing_m = spacing;
      row.intended = fields[2];
      row.estimated = fields[3];
      row.intent_ok = fields[4] == "true";
      row.success = fields[5] == "true";
      row.duration_s = std::stod(fields[6]);
      row.r2_mean = std::stod(fields[7]);
      row.rmse_mean_deg = std::stod(fields[8]);
      report.rows.push_back(std::move(row));
    }
    return report;
  }

  const Json doc = load_json_file(path);
  const std::string where = path.string();
  const Json& meta = require_field(doc, "meta", where);
  report.meta.seed = meta.contains("seed") ? meta["seed"].get<uint64_t>() : 0;
  report.meta.library = meta.value("library", "");
  report.meta.scene = meta.value("scene", "");
  report.meta.handedness =
      parse_handedness(meta.value("handedness", "right"), where + ".meta");
  report.meta.pos_noise_m = meta.value("pos_noise_m", 0.0);
  report.meta.angle_noise_deg = meta.value("angle_noise_deg", 0.0);
  report.meta.actuator_tau_s = meta.value("actuator_tau_s", 0.1);

  const Json& trials = require_field(doc, "trials", where);
  if (!trials.is_array()) {
    throw Error(ErrorCode::kSchemaError, where + ": 'trials' must be an array");
  }
  for (size_t i = 0; i < trials.size(); ++i) {
    const std::string tw = where + ": trial " + std::to_string(i);
    const Json& r = trials[i];
    TrialRow row;
    row.trial_id = static_cast<int>(require_number(r, "trial_id", tw));
    if (r.contains("spacing_m") && !r["spacing_m"].is_null()) {
      row.spacing_m = r["spacing_m"].get<double>();
    }
    row.intended = require_string(r, "intended", tw);
    row.estimated = require_string(r, "estimated", tw);
    row.intent_ok = require_field(r, "intent_ok", tw).get<bool>();
    row.success = require_field(r, "success", tw).get<bool>();
    row.duration_s = require_number(r, "duration_s", tw);
    row.r2_mean = number_or_nan(require_field(r, "r2_mean", tw));
    row.rmse_mean_deg = number_or_nan(require_field(r, "rmse_mean_deg", tw));

    if (r.contains("objects")) {
      for (size_t o = 0; o < r["objects"].size(); ++o) {
        const Json& obj = r["objects"][o];
        SceneObject so;
        so.id = require_string(obj, "id", tw);
        so.object_class = require_string(obj, "class", tw);
        so.position = parse_point3(require_field(obj, "position", tw), tw + ".position");
        row.objects.push_back(std::move(so));
      }
    }
    if (r.contains("track")) {
      for (const Json& sample : r["track"]) {
        if (!sample.is_array() || sample.size() != 4) {
          throw Error(ErrorCode::kSchemaError, tw + ": track samples must be [t, x, y, z]");
        }
        row.track.push_back({sample[0].get<double>(), sample[1].get<double>(),
                             sample[2].get<double>(), sample[3].get<double>()});
      }
    }
    if (r.contains("trace")) {
      for (const Json& tf : r["trace"]) {
        TrialTraceFrame f;
        f.t = require_number(tf, "t", tw);
        f.stage = parse_stage(require_string(tf, "stage", tw), tw);
        f.distance = number_or_nan(require_field(tf, "d", tw));
        f.selected = tf.value("selected", "");
        for (int j = 0; j < kNumDofs; ++j) {
          f.commanded[j] = tf["commanded"][j].get<double>();
          f.actual[j] = tf["actual"][j].get<double>();
          f.forces[j] = tf["forces"][j].get<double>();
          f.locked[j] = tf["locked"][j].get<bool>();
        }
        row.trace.push_back(std::move(f));
      }
    }
    report.rows.push_back(std::move(row));
  }
  return report;
}

}  // namespace vgrasp
