/* C interface for the vision-driven grasp pipeline: gesture-library
 * construction from recorded episodes, trajectory-based intent estimation,
 * grasp simulation, and report evaluation.
 *
 * All functions returning vg_status leave a human-readable message in
 * vg_last_error() on failure. Strings returned through char** parameters
 * are heap-allocated; release them with vg_string_free().
 */
#ifndef VISIONGRASP_H
#define VISIONGRASP_H

#include <stddef.h>

#ifdef __cplusplus
extern "C" {
#endif

typedef enum vg_status {
  VG_OK = 0,
  VG_USAGE_ERROR = 1,   /* bad arguments, refusing to overwrite */
  VG_DATA_ERROR = 2,    /* unreadable or malformed input files */
  VG_RUNTIME_ERROR = 3  /* algorithm failure on valid input */
} vg_status;

typedef struct vg_sim_options {
  unsigned long long seed;
  int left_handed;        /* 0: right hand, nonzero: left hand */
  double pos_noise_m;     /* wrist position noise, standard deviation */
  double angle_noise_deg; /* joint angle noise, standard deviation */
  double actuator_tau_s;  /* first-order actuator lag; <= 0 is ideal */
} vg_sim_options;

/* seed 1, right hand, no noise, tau 0.1 s. */
vg_sim_options vg_default_sim_options(void);

const char* vg_version(void);

/* Message of the most recent failure on this thread; empty when none. */
const char* vg_last_error(void);

void vg_string_free(char* s);

/* Fits one gesture-library entry per modeling episode (*.json) in
 * episodes_dir and writes the library to out_path. */
vg_status vg_build_library(const char* episodes_dir, const char* out_path, int overwrite,
                           char** summary);

/* Plays a recorded or synthetic episode through the grasp controller.
 * out_path may be NULL to skip writing the report. */
vg_status vg_simulate_episode(const char* episode_path, const char* library_path,
                              const vg_sim_options* options, const char* out_path, int overwrite,
                              char** summary);

/* Runs `trials` synthetic grasps in the given scene. out_path may be NULL. */
vg_status vg_simulate_scene(const char* scene_path, const char* library_path, int trials,
                            const vg_sim_options* options, const char* out_path, int overwrite,
                            char** summary);

/* Renders the aggregate table for a report file (.json or .csv). The
 * sphere-proximity baseline needs stored tracks, i.e. a JSON report. */
vg_status vg_evaluate_report(const char* report_path, int group_by_spacing, int sphere_baseline,
                             double sphere_radius_m, char** table);

/* Writes a demo corpus: eight modeling episodes plus a three-object scene. */
vg_status vg_generate_demo(const char* out_dir, unsigned long long seed, double spacing_m,
                           char** summary);

/* Gesture library inspection. */
typedef struct vg_library vg_library;

vg_status vg_library_load(const char* path, vg_library** out);
void vg_library_free(vg_library* lib);
size_t vg_library_entry_count(const vg_library* lib);
/* Borrowed pointer, valid while the library lives; NULL when out of range. */
const char* vg_library_entry_class(const vg_library* lib, size_t index);
/* Joint angles (degrees) at the given hand-object distance, in the order
 * pinky, ring, middle, index, thumb bend, thumb rotation. */
vg_status vg_library_eval(const vg_library* lib, size_t index, double distance_m,
                          double angles_deg[6]);
vg_status vg_library_entry_range(const vg_library* lib, size_t index, double* d_end_m,
                                 double* d_start_m);

/* Episode inspection. */
typedef struct vg_episode vg_episode;

vg_status vg_episode_load(const char* path, vg_episode** out);
void vg_episode_free(vg_episode* ep);
size_t vg_episode_frame_count(const vg_episode* ep);
vg_status vg_episode_wrist(const vg_episode* ep, size_t frame, double* t, double xyz[3]);

#ifdef __cplusplus
}
#endif

#endif /* VISIONGRASP_H */
