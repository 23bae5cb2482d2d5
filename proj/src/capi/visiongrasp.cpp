#include "visiongrasp.h"

#include "core/episode.hpp"
#include "core/simulator.hpp"

#include <cstdlib>
#include <cstring>
#include <filesystem>
#include <sstream>
#include <string>

namespace {

thread_local std::string g_last_error;

char* dup_string(const std::string& s) {
  char* out = static_cast<char*>(std::malloc(s.size() + 1));
  if (out != nullptr) std::memcpy(out, s.c_str(), s.size() + 1);
  return out;
}

vg_status status_for(const vgrasp::Error& e) {
  switch (e.code()) {
    case vgrasp::ErrorCode::kInvalidArgument:
      return VG_USAGE_ERROR;
    case vgrasp::ErrorCode::kIoError:
    case vgrasp::ErrorCode::kSchemaError:
      return VG_DATA_ERROR;
    default:
      return VG_RUNTIME_ERROR;
  }
}

vg_status fail(vg_status status, const std::string& message) {
  g_last_error = message;
  return status;
}

template <typename Fn>
vg_status guarded(Fn&& fn) {
  try {
    g_last_error.clear();
    return fn();
  } catch (const vgrasp::Error& e) {
    return fail(status_for(e), e.what());
  } catch (const std::exception& e) {
    return fail(VG_RUNTIME_ERROR, e.what());
  }
}

vg_status require(const void* p, const char* name) {
  if (p == nullptr) {
    return fail(VG_USAGE_ERROR, std::string(name) + " must not be NULL");
  }
  return VG_OK;
}

// Refuses to clobber an existing output unless the caller opted in.
void check_overwrite(const char* path, int overwrite) {
  if (path != nullptr && !overwrite && std::filesystem::exists(path)) {
    throw vgrasp::Error(vgrasp::ErrorCode::kInvalidArgument,
                        std::string(path) + " exists; pass --force to overwrite");
  }
}

vgrasp::SimulationOptions to_options(const vg_sim_options* options) {
  const vg_sim_options opts = options != nullptr ? *options : vg_default_sim_options();
  vgrasp::SimulationOptions out;
  out.seed = opts.seed;
  out.handedness = opts.left_handed ? vgrasp::Handedness::kLeft : vgrasp::Handedness::kRight;
  out.pos_noise_m = opts.pos_noise_m;
  out.angle_noise_deg = opts.angle_noise_deg;
  out.actuator_tau_s = opts.actuator_tau_s;
  return out;
}

void emit(char** out, const std::string& text) {
  if (out != nullptr) *out = dup_string(text);
}

std::string report_summary(const vgrasp::ReportDoc& report, const char* out_path) {
  std::ostringstream out;
  out << "simulated " << report.rows.size() << (report.rows.size() == 1 ? " trial" : " trials");
  if (out_path != nullptr) out << "; report written to " << out_path;
  out << "\n" << vgrasp::evaluate_report(report, vgrasp::EvaluateOptions{});
  return out.str();
}

}  // namespace

extern "C" {

struct vg_library {
  vgrasp::GestureLibrary lib;
};

struct vg_episode {
  vgrasp::EpisodeRecord ep;
};

vg_sim_options vg_default_sim_options(void) {
  vg_sim_options opts;
  opts.seed = 1;
  opts.left_handed = 0;
  opts.pos_noise_m = 0.0;
  opts.angle_noise_deg = 0.0;
  opts.actuator_tau_s = 0.1;
  return opts;
}

const char* vg_version(void) { return "1.0.0"; }

const char* vg_last_error(void) { return g_last_error.c_str(); }

void vg_string_free(char* s) { std::free(s); }

vg_status vg_build_library(const char* episodes_dir, const char* out_path, int overwrite,
                           char** summary) {
  if (vg_status s = require(episodes_dir, "episodes_dir"); s != VG_OK) return s;
  if (vg_status s = require(out_path, "out_path"); s != VG_OK) return s;
  return guarded([&] {
    check_overwrite(out_path, overwrite);
    vgrasp::BuildLibraryResult result = vgrasp::build_library_from_dir(episodes_dir);
    vgrasp::save_library(result.library, out_path);
    std::ostringstream out;
    for (const std::string& line : result.log) out << line << "\n";
    out << "library with " << result.library.entries.size() << " entries written to " << out_path;
    emit(summary, out.str());
    return VG_OK;
  });
}

vg_status vg_simulate_episode(const char* episode_path, const char* library_path,
                              const vg_sim_options* options, const char* out_path, int overwrite,
                              char** summary) {
  if (vg_status s = require(episode_path, "episode_path"); s != VG_OK) return s;
  if (vg_status s = require(library_path, "library_path"); s != VG_OK) return s;
  return guarded([&] {
    check_overwrite(out_path, overwrite);
    const vgrasp::GestureLibrary lib = vgrasp::load_library(library_path);
    const vgrasp::EpisodeRecord ep = vgrasp::load_episode(episode_path);
    vgrasp::ReportDoc report = vgrasp::simulate_episode(ep, lib, to_options(options));
    report.meta.library = library_path;
    report.meta.scene = episode_path;
    if (out_path != nullptr) vgrasp::export_report(report, out_path);
    emit(summary, report_summary(report, out_path));
    return VG_OK;
  });
}

vg_status vg_simulate_scene(const char* scene_path, const char* library_path, int trials,
                            const vg_sim_options* options, const char* out_path, int overwrite,
                            char** summary) {
  if (vg_status s = require(scene_path, "scene_path"); s != VG_OK) return s;
  if (vg_status s = require(library_path, "library_path"); s != VG_OK) return s;
  return guarded([&] {
    check_overwrite(out_path, overwrite);
    const vgrasp::GestureLibrary lib = vgrasp::load_library(library_path);
    const vgrasp::SceneSpec scene = vgrasp::load_scene(scene_path);
    vgrasp::ReportDoc report = vgrasp::simulate_scene(scene, lib, trials, to_options(options));
    report.meta.library = library_path;
    report.meta.scene = scene_path;
    if (out_path != nullptr) vgrasp::export_report(report, out_path);
    emit(summary, report_summary(report, out_path));
    return VG_OK;
  });
}

vg_status vg_evaluate_report(const char* report_path, int group_by_spacing, int sphere_baseline,
                             double sphere_radius_m, char** table) {
  if (vg_status s = require(report_path, "report_path"); s != VG_OK) return s;
  if (vg_status s = require(table, "table"); s != VG_OK) return s;
  return guarded([&] {
    const vgrasp::ReportDoc report = vgrasp::load_report(report_path);
    vgrasp::EvaluateOptions opts;
    opts.group_by_spacing = group_by_spacing != 0;
    opts.baseline = sphere_baseline ? vgrasp::BaselineKind::kSphere : vgrasp::BaselineKind::kNone;
    opts.sphere_radius_m = sphere_radius_m;
    emit(table, vgrasp::evaluate_report(report, opts));
    return VG_OK;
  });
}

vg_status vg_generate_demo(const char* out_dir, unsigned long long seed, double spacing_m,
                           char** summary) {
  if (vg_status s = require(out_dir, "out_dir"); s != VG_OK) return s;
  return guarded([&] {
    emit(summary, vgrasp::generate_demo(out_dir, seed, spacing_m));
    return VG_OK;
  });
}

vg_status vg_library_load(const char* path, vg_library** out) {
  if (vg_status s = require(path, "path"); s != VG_OK) return s;
  if (vg_status s = require(out, "out"); s != VG_OK) return s;
  return guarded([&] {
    auto* handle = new vg_library{vgrasp::load_library(path)};
    *out = handle;
    return VG_OK;
  });
}

void vg_library_free(vg_library* lib) { delete lib; }

size_t vg_library_entry_count(const vg_library* lib) {
  return lib == nullptr ? 0 : lib->lib.entries.size();
}

const char* vg_library_entry_class(const vg_library* lib, size_t index) {
  if (lib == nullptr || index >= lib->lib.entries.size()) return nullptr;
  return lib->lib.entries[index].object_class.c_str();
}

vg_status vg_library_eval(const vg_library* lib, size_t index, double distance_m,
                          double angles_deg[6]) {
  if (vg_status s = require(lib, "lib"); s != VG_OK) return s;
  if (vg_status s = require(angles_deg, "angles_deg"); s != VG_OK) return s;
  if (index >= lib->lib.entries.size()) {
    return fail(VG_USAGE_ERROR, "entry index out of range");
  }
  return guarded([&] {
    const vgrasp::AngleVector angles =
        vgrasp::eval_gesture(lib->lib.entries[index].function, distance_m);
    for (int j = 0; j < vgrasp::kNumDofs; ++j) angles_deg[j] = angles[j];
    return VG_OK;
  });
}

vg_status vg_library_entry_range(const vg_library* lib, size_t index, double* d_end_m,
                                 double* d_start_m) {
  if (vg_status s = require(lib, "lib"); s != VG_OK) return s;
  if (index >= lib->lib.entries.size()) {
    return fail(VG_USAGE_ERROR, "entry index out of range");
  }
  if (d_end_m != nullptr) *d_end_m = lib->lib.entries[index].function.d_end;
  if (d_start_m != nullptr) *d_start_m = lib->lib.entries[index].function.d_start;
  return VG_OK;
}

vg_status vg_episode_load(const char* path, vg_episode** out) {
  if (vg_status s = require(path, "path"); s != VG_OK) return s;
  if (vg_status s = require(out, "out"); s != VG_OK) return s;
  return guarded([&] {
    auto* handle = new vg_episode{vgrasp::load_episode(path)};
    *out = handle;
    return VG_OK;
  });
}

void vg_episode_free(vg_episode* ep) { delete ep; }

size_t vg_episode_frame_count(const vg_episode* ep) {
  return ep == nullptr ? 0 : ep->ep.frames.size();
}

vg_status vg_episode_wrist(const vg_episode* ep, size_t frame, double* t, double xyz[3]) {
  if (vg_status s = require(ep, "ep"); s != VG_OK) return s;
  if (frame >= ep->ep.frames.size()) {
    return fail(VG_USAGE_ERROR, "frame index out of range");
  }
  const vgrasp::EpisodeFrame& f = ep->ep.frames[frame];
  if (t != nullptr) *t = f.t;
  if (xyz != nullptr) {
    xyz[0] = f.wrist.x();
    xyz[1] = f.wrist.y();
    xyz[2] = f.wrist.z();
  }
  return VG_OK;
}

}  // extern "C"
