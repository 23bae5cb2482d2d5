// Command-line front end for the grasp pipeline shared library.
//
// Exit codes: 0 success, 1 usage error, 2 unreadable/malformed data,
// 3 algorithm failure on valid data.
#include "visiongrasp.h"

#include <CLI11.hpp>

#include <cstdio>
#include <string>

namespace {

int finish(vg_status status, char* text) {
  if (text != nullptr) {
    std::fputs(text, stdout);
    if (text[0] != '\0' && text[std::strlen(text) - 1] != '\n') std::fputc('\n', stdout);
    vg_string_free(text);
  }
  if (status != VG_OK) {
    std::fprintf(stderr, "error: %s\n", vg_last_error());
  }
  return static_cast<int>(status);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Prosthetic-hand grasp pipeline: gesture libraries, intent estimation, "
               "grasp simulation, and report evaluation"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string("vgrasp ") + vg_version());

  // build-library
  std::string episodes_dir, library_out;
  bool build_force = false;
  CLI::App* build = app.add_subcommand(
      "build-library", "Fit a gesture library from the modeling episodes in a directory");
  build->add_option("--episodes", episodes_dir, "Directory with modeling episode *.json files")
      ->required();
  build->add_option("--out", library_out, "Output library path")->required();
  build->add_flag("--force", build_force, "Overwrite an existing output file");

  // simulate
  std::string episode_path, scene_path, sim_library, sim_out, handedness = "right";
  int trials = 20;
  bool sim_force = false;
  vg_sim_options opts = vg_default_sim_options();
  CLI::App* simulate = app.add_subcommand(
      "simulate", "Run the grasp controller on an episode or on synthetic scene trials");
  CLI::Option* opt_episode =
      simulate->add_option("--episode", episode_path, "Recorded episode to play back");
  CLI::Option* opt_scene =
      simulate->add_option("--scene", scene_path, "Scene file for synthetic trials");
  opt_episode->excludes(opt_scene);
  simulate->add_option("--library", sim_library, "Gesture library path")->required();
  simulate->add_option("--trials", trials, "Number of synthetic trials (scene mode)")
      ->check(CLI::PositiveNumber);
  simulate->add_option("--seed", opts.seed, "Random seed");
  simulate->add_option("--handedness", handedness, "Hand side: right or left")
      ->check(CLI::IsMember({"right", "left"}));
  simulate->add_option("--pos-noise", opts.pos_noise_m, "Wrist position noise sigma [m]");
  simulate->add_option("--angle-noise", opts.angle_noise_deg, "Joint angle noise sigma [deg]");
  simulate->add_option("--tau", opts.actuator_tau_s, "Actuator time constant [s]; <= 0 is ideal");
  simulate->add_option("--out", sim_out, "Report output path (.json or .csv)");
  simulate->add_flag("--force", sim_force, "Overwrite an existing report");

  // evaluate
  std::string report_path, group_by, baseline = "none";
  double sphere_radius = 0.15;
  CLI::App* evaluate = app.add_subcommand("evaluate", "Aggregate a simulation report");
  evaluate->add_option("--report", report_path, "Report file (.json or .csv)")->required();
  evaluate->add_option("--group-by", group_by, "Group rows; only 'spacing' is supported")
      ->check(CLI::IsMember({"spacing"}));
  evaluate->add_option("--baseline", baseline, "Also score a proximity baseline")
      ->check(CLI::IsMember({"sphere", "none"}));
  evaluate->add_option("--sphere-radius", sphere_radius, "Baseline sphere radius [m]")
      ->check(CLI::PositiveNumber);

  // gen-demo
  std::string demo_dir;
  unsigned long long demo_seed = 7;
  double demo_spacing = 0.15;
  CLI::App* demo = app.add_subcommand(
      "gen-demo", "Write demo modeling episodes and a three-object scene");
  demo->add_option("--out-dir", demo_dir, "Output directory")->required();
  demo->add_option("--seed", demo_seed, "Random seed");
  demo->add_option("--spacing", demo_spacing, "Lateral object spacing [m]")
      ->check(CLI::PositiveNumber);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : static_cast<int>(VG_USAGE_ERROR);
  }

  char* text = nullptr;
  vg_status status = VG_USAGE_ERROR;
  if (build->parsed()) {
    status = vg_build_library(episodes_dir.c_str(), library_out.c_str(), build_force, &text);
  } else if (simulate->parsed()) {
    opts.left_handed = handedness == "left" ? 1 : 0;
    const char* out = sim_out.empty() ? nullptr : sim_out.c_str();
    if (!episode_path.empty()) {
      status = vg_simulate_episode(episode_path.c_str(), sim_library.c_str(), &opts, out,
                                   sim_force, &text);
    } else if (!scene_path.empty()) {
      status = vg_simulate_scene(scene_path.c_str(), sim_library.c_str(), trials, &opts, out,
                                 sim_force, &text);
    } else {
      std::fprintf(stderr, "error: simulate needs --episode or --scene\n");
      return static_cast<int>(VG_USAGE_ERROR);
    }
  } else if (evaluate->parsed()) {
    status = vg_evaluate_report(report_path.c_str(), group_by == "spacing" ? 1 : 0,
                                baseline == "sphere" ? 1 : 0, sphere_radius, &text);
  } else if (demo->parsed()) {
    status = vg_generate_demo(demo_dir.c_str(), demo_seed, demo_spacing, &text);
  }
  return finish(status, text);
}
