// Exercises the shared-library C interface end to end: demo generation,
// library construction, simulation, evaluation, handle-based inspection,
// and the error-reporting contract.
#include <visiongrasp.h>

#include <cmath>
#include <cstdio>
#include <cstring>
#include <filesystem>
#include <string>

namespace {

int g_failures = 0;

#define REQUIRE(cond)                                                        \
  do {                                                                       \
    if (!(cond)) {                                                           \
      std::fprintf(stderr, "FAILED %s:%d: %s\n", __FILE__, __LINE__, #cond); \
      ++g_failures;                                                          \
    }                                                                        \
  } while (0)

std::string take(char* s) {
  std::string out = s != nullptr ? s : "";
  vg_string_free(s);
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  if (argc < 2) {
    std::fprintf(stderr, "usage: %s <scratch-dir>\n", argv[0]);
    return 2;
  }
  const std::string dir = argv[1];
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);

  REQUIRE(vg_version() != nullptr);
  REQUIRE(std::strlen(vg_version()) > 0);
  REQUIRE(std::strcmp(vg_last_error(), "") == 0);

  // End-to-end happy path: demo corpus -> library -> simulation -> table.
  char* text = nullptr;
  REQUIRE(vg_generate_demo((dir + "/demo").c_str(), 7, 0.2, &text) == VG_OK);
  REQUIRE(!take(text).empty());

  const std::string lib_path = dir + "/library.json";
  text = nullptr;
  REQUIRE(vg_build_library((dir + "/demo/episodes").c_str(), lib_path.c_str(), 0, &text) == VG_OK);
  {
    const std::string summary = take(text);
    REQUIRE(summary.find("8") != std::string::npos);
  }

  // Refusing to overwrite is a usage error and must leave a message.
  text = nullptr;
  REQUIRE(vg_build_library((dir + "/demo/episodes").c_str(), lib_path.c_str(), 0, &text) ==
          VG_USAGE_ERROR);
  REQUIRE(text == nullptr);
  REQUIRE(std::strlen(vg_last_error()) > 0);
  REQUIRE(vg_build_library((dir + "/demo/episodes").c_str(), lib_path.c_str(), 1, &text) == VG_OK);
  take(text);

  vg_sim_options opts = vg_default_sim_options();
  REQUIRE(opts.seed == 1ULL);
  REQUIRE(opts.left_handed == 0);
  REQUIRE(opts.actuator_tau_s > 0.0);

  const std::string report_path = dir + "/report.json";
  text = nullptr;
  REQUIRE(vg_simulate_scene((dir + "/demo/scene.json").c_str(), lib_path.c_str(), 6, &opts,
                            report_path.c_str(), 0, &text) == VG_OK);
  {
    const std::string summary = take(text);
    REQUIRE(summary.find("6 trials") != std::string::npos);
  }

  text = nullptr;
  REQUIRE(vg_evaluate_report(report_path.c_str(), 0, 1, 0.15, &text) == VG_OK);
  {
    const std::string table = take(text);
    REQUIRE(table.find("sphere") != std::string::npos);
    REQUIRE(table.find("all") != std::string::npos);
  }

  // Library handle: entries, evaluation, clamped range.
  vg_library* lib = nullptr;
  REQUIRE(vg_library_load(lib_path.c_str(), &lib) == VG_OK);
  REQUIRE(lib != nullptr);
  REQUIRE(vg_library_entry_count(lib) == 8);
  bool found_cup = false;
  for (size_t i = 0; i < vg_library_entry_count(lib); ++i) {
    const char* cls = vg_library_entry_class(lib, i);
    REQUIRE(cls != nullptr);
    if (cls != nullptr && std::strcmp(cls, "cup") == 0) found_cup = true;
  }
  REQUIRE(found_cup);
  REQUIRE(vg_library_entry_class(lib, 999) == nullptr);

  double d_end = 0.0, d_start = 0.0;
  REQUIRE(vg_library_entry_range(lib, 0, &d_end, &d_start) == VG_OK);
  REQUIRE(d_start > d_end);
  REQUIRE(d_end > 0.0);

  double far_pose[6];
  double clamped[6];
  REQUIRE(vg_library_eval(lib, 0, d_start, far_pose) == VG_OK);
  REQUIRE(vg_library_eval(lib, 0, d_start + 10.0, clamped) == VG_OK);
  for (int j = 0; j < 6; ++j) {
    REQUIRE(std::isfinite(far_pose[j]));
    REQUIRE(std::fabs(far_pose[j] - clamped[j]) < 1e-9);
  }
  REQUIRE(vg_library_eval(lib, 999, d_start, far_pose) == VG_USAGE_ERROR);
  vg_library_free(lib);

  // Episode handle over a generated modeling recording.
  vg_episode* ep = nullptr;
  REQUIRE(vg_episode_load((dir + "/demo/episodes/cup_modeling.json").c_str(), &ep) == VG_OK);
  REQUIRE(vg_episode_frame_count(ep) >= 2);
  double t0 = -1.0, t1 = -1.0;
  double xyz[3];
  REQUIRE(vg_episode_wrist(ep, 0, &t0, xyz) == VG_OK);
  REQUIRE(vg_episode_wrist(ep, 1, &t1, xyz) == VG_OK);
  REQUIRE(t1 > t0);
  REQUIRE(vg_episode_wrist(ep, 100000, &t0, xyz) == VG_USAGE_ERROR);
  vg_episode_free(ep);

  // Missing and malformed inputs are data errors with a message.
  REQUIRE(vg_library_load((dir + "/missing.json").c_str(), &lib) == VG_DATA_ERROR);
  REQUIRE(std::strlen(vg_last_error()) > 0);
  text = nullptr;
  REQUIRE(vg_evaluate_report((dir + "/missing.json").c_str(), 0, 0, 0.15, &text) ==
          VG_DATA_ERROR);

  // Null-pointer misuse is a usage error, not a crash.
  REQUIRE(vg_build_library(nullptr, lib_path.c_str(), 1, &text) == VG_USAGE_ERROR);
  REQUIRE(vg_library_load(lib_path.c_str(), nullptr) == VG_USAGE_ERROR);

  if (g_failures == 0) std::printf("capi tests passed\n");
  return g_failures == 0 ? 0 : 1;
}
