#pragma once

#include "core/types.hpp"

#include <json.hpp>

#include <filesystem>
#include <fstream>
#include <string>

namespace vgrasp {

using Json = nlohmann::ordered_json;

inline Json load_json_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) {
    throw Error(ErrorCode::kIoError, "cannot open " + path.string());
  }
  try {
    Json doc;
    in >> doc;
    return doc;
  } catch (const nlohmann::json::parse_error& e) {
    throw Error(ErrorCode::kSchemaError, path.string() + ": " + e.what());
  }
}

inline void write_text_file(const std::filesystem::path& path, const std::string& text) {
  if (path.has_parent_path()) {
    std::error_code ec;
    std::filesystem::create_directories(path.parent_path(), ec);
  }
  std::ofstream out(path);
  if (!out) {
    throw Error(ErrorCode::kIoError, "cannot write " + path.string());
  }
  out << text;
  if (!out) {
    throw Error(ErrorCode::kIoError, "short write to " + path.string());
  }
}

inline void write_json_file(const std::filesystem::path& path, const Json& doc) {
  write_text_file(path, doc.dump(2) + "\n");
}

inline const Json& require_field(const Json& obj, const char* key, const std::string& where) {
  auto it = obj.find(key);
  if (it == obj.end()) {
    throw Error(ErrorCode::kSchemaError, where + ": missing field '" + key + "'");
  }
  return *it;
}

inline double require_number(const Json& obj, const char* key, const std::string& where) {
  const Json& v = require_field(obj, key, where);
  if (!v.is_number()) {
    throw Error(ErrorCode::kSchemaError, where + ": field '" + key + "' must be a number");
  }
  return v.get<double>();
}

inline std::string require_string(const Json& obj, const char* key, const std::string& where) {
  const Json& v = require_field(obj, key, where);
  if (!v.is_string()) {
    throw Error(ErrorCode::kSchemaError, where + ": field '" + key + "' must be a string");
  }
  return v.get<std::string>();
}

inline Point3 parse_point3(const Json& v, const std::string& where) {
  if (!v.is_array() || v.size() != 3 || !v[0].is_number() || !v[1].is_number() ||
      !v[2].is_number()) {
    throw Error(ErrorCode::kSchemaError, where + ": expected [x, y, z]");
  }
  Point3 p(v[0].get<double>(), v[1].get<double>(), v[2].get<double>());
  if (!p.allFinite()) {
    throw Error(ErrorCode::kSchemaError, where + ": non-finite coordinate");
  }
  return p;
}

inline Json point3_json(const Point3& p) { return Json::array({p.x(), p.y(), p.z()}); }

inline PointCloud parse_cloud(const Json& v, const std::string& where) {
  if (!v.is_array()) {
    throw Error(ErrorCode::kSchemaError, where + ": expected an array of points");
  }
  PointCloud cloud;
  cloud.reserve(v.size());
  for (size_t i = 0; i < v.size(); ++i) {
    cloud.push_back(parse_point3(v[i], where + "[" + std::to_string(i) + "]"));
  }
  return cloud;
}

inline Json cloud_json(const PointCloud& cloud) {
  Json arr = Json::array();
  for (const Point3& p : cloud) arr.push_back(point3_json(p));
  return arr;
}

}  // namespace vgrasp
