#include "core/gesture.hpp"

#include "core/intent.hpp"
#include "core/json_util.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <set>

namespace vgrasp {

double hand_object_distance(const Point3& hand, const Point3& object) {
  return (hand - object).norm();
}

GestureFunction fit_gesture_function(const std::vector<GestureSample>& samples) {
  constexpr size_t kMinSamples = 5;
  if (samples.size() < kMinSamples) {
    throw Error(ErrorCode::kTooFewSamples,
                std::to_string(samples.size()) + " samples, need " + std::to_string(kMinSamples));
  }
  std::set<double> distinct;
  for (const GestureSample& s : samples) distinct.insert(s.distance);
  if (distinct.size() < kMinSamples) {
    throw Error(ErrorCode::kIllConditioned,
                "only " + std::to_string(distinct.size()) + " distinct distances");
  }

  const Eigen::Index n = static_cast<Eigen::Index>(samples.size());
  Eigen::MatrixXd vandermonde(n, 5);
  Eigen::MatrixXd targets(n, kNumDofs);
  for (Eigen::Index i = 0; i < n; ++i) {
    const double d = samples[i].distance;
    const double d2 = d * d;
    vandermonde.row(i) << d2 * d2, d2 * d, d2, d, 1.0;
    for (int j = 0; j < kNumDofs; ++j) targets(i, j) = samples[i].angles[j];
  }

  const Eigen::MatrixXd solution = vandermonde.colPivHouseholderQr().solve(targets);

  GestureFunction f;
  f.d_end = *distinct.begin();
  f.d_start = *distinct.rbegin();
  for (int j = 0; j < kNumDofs; ++j) {
    for (int p = 0; p < 5; ++p) f.coeffs[j][p] = solution(p, j);
  }
  return f;
}

double eval_gesture_dof(const GestureFunction& f, int dof, double distance) {
  const double d = std::clamp(distance, f.d_end, f.d_start);
  double value = 0.0;
  for (int p = 0; p < 5; ++p) value = value * d + f.coeffs[dof][p];
  return value;
}

AngleVector eval_gesture(const GestureFunction& f, double distance) {
  AngleVector angles{};
  for (int j = 0; j < kNumDofs; ++j) angles[j] = eval_gesture_dof(f, j, distance);
  return angles;
}

double degree_of_completion(double d_start, double d_ongo, double d_end) {
  if (d_start == d_end) {
    throw Error(ErrorCode::kDegenerateRange, "d_start equals d_end");
  }
  const double doc = (d_start - d_ongo) / (d_start - d_end) * 100.0;
  return std::clamp(doc, 0.0, 100.0);
}

void library_insert(GestureLibrary& lib, GestureLibraryEntry entry) {
  for (GestureLibraryEntry& existing : lib.entries) {
    if (existing.object_class != entry.object_class) continue;
    const ValidationResult check =
        validate_gesture_entry(existing, entry.model_cloud, entry.size);
    if (check.ok) {
      existing = std::move(entry);
      return;
    }
  }
  lib.entries.push_back(std::move(entry));
}

const GestureLibraryEntry& library_lookup(const GestureLibrary& lib,
                                          const std::string& object_class,
                                          const SizeParams& observed_size,
                                          const PointCloud& observed_cloud) {
  const GestureLibraryEntry* best = nullptr;
  double best_rmse = std::numeric_limits<double>::max();
  bool class_seen = false;
  for (const GestureLibraryEntry& entry : lib.entries) {
    if (entry.object_class != object_class) continue;
    class_seen = true;
    const ValidationResult check = validate_gesture_entry(entry, observed_cloud, observed_size);
    if (check.ok && check.rmse < best_rmse) {
      best = &entry;
      best_rmse = check.rmse;
    }
  }
  if (!class_seen) {
    throw Error(ErrorCode::kClassNotFound, "no library entry for class '" + object_class + "'");
  }
  if (best == nullptr) {
    throw Error(ErrorCode::kGestureMismatch,
                "no entry of class '" + object_class + "' passes the shape check");
  }
  return *best;
}

namespace {

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

}  // namespace

void save_library(const GestureLibrary& lib, const std::filesystem::path& path) {
  const std::filesystem::path cloud_dir_name = path.stem().string() + ".clouds";
  const std::filesystem::path cloud_dir = path.parent_path() / cloud_dir_name;

  Json doc;
  doc["entries"] = Json::array();
  for (size_t i = 0; i < lib.entries.size(); ++i) {
    const GestureLibraryEntry& entry = lib.entries[i];
    Json e;
    e["class"] = entry.object_class;
    e["size"] = size_json(entry.size);
    Json coeffs;
    for (int j = 0; j < kNumDofs; ++j) {
      coeffs[kDofKeys[j]] = Json(entry.function.coeffs[j]);
    }
    e["coeffs"] = std::move(coeffs);
    e["d_range"] = Json::array({entry.function.d_end, entry.function.d_start});
    if (!entry.model_cloud.empty()) {
      const std::string ref =
          (cloud_dir_name / (std::to_string(i) + "_" + entry.object_class + ".json")).string();
      e["cloud_ref"] = ref;
      Json cloud_doc;
      cloud_doc["points"] = cloud_json(entry.model_cloud);
      write_json_file(path.parent_path() / ref, cloud_doc);
    }
    doc["entries"].push_back(std::move(e));
  }
  write_json_file(path, doc);
}

GestureLibrary load_library(const std::filesystem::path& path) {
  const Json doc = load_json_file(path);
  const Json& entries = require_field(doc, "entries", path.string());
  if (!entries.is_array()) {
    throw Error(ErrorCode::kSchemaError, path.string() + ": 'entries' must be an array");
  }

  GestureLibrary lib;
  for (size_t i = 0; i < entries.size(); ++i) {
    const std::string where = path.string() + ": entry " + std::to_string(i);
    const Json& e = entries[i];
    GestureLibraryEntry entry;
    entry.object_class = require_string(e, "class", where);
    entry.size = parse_size(require_field(e, "size", where), where + ".size");

    const Json& coeffs = require_field(e, "coeffs", where);
    for (int j = 0; j < kNumDofs; ++j) {
      const Json& row = require_field(coeffs, kDofKeys[j], where + ".coeffs");
      if (!row.is_array() || row.size() != 5) {
        throw Error(ErrorCode::kSchemaError,
                    where + ": coeffs." + kDofKeys[j] + " must hold five values [a4..a0]");
      }
      for (int p = 0; p < 5; ++p) {
        if (!row[p].is_number()) {
          throw Error(ErrorCode::kSchemaError, where + ": coeffs." + kDofKeys[j] + " non-numeric");
        }
        entry.function.coeffs[j][p] = row[p].get<double>();
      }
    }

    const Json& range = require_field(e, "d_range", where);
    if (!range.is_array() || range.size() != 2 || !range[0].is_number() || !range[1].is_number()) {
      throw Error(ErrorCode::kSchemaError, where + ": d_range must be [d_end, d_start]");
    }
    entry.function.d_end = range[0].get<double>();
    entry.function.d_start = range[1].get<double>();
    if (entry.function.d_end > entry.function.d_start) {
      throw Error(ErrorCode::kSchemaError, where + ": d_range must satisfy d_end <= d_start");
    }

    if (e.contains("cloud_ref")) {
      const std::string ref = require_string(e, "cloud_ref", where);
      const Json cloud_doc = load_json_file(path.parent_path() / ref);
      entry.model_cloud = parse_cloud(require_field(cloud_doc, "points", ref), ref + ".points");
    }
    lib.entries.push_back(std::move(entry));
  }
  return lib;
}

}  // namespace vgrasp
