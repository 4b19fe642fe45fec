#ifndef GRASPMAP_CAPI_H
#define GRASPMAP_CAPI_H

/* C interface to the contact-map pipeline.  Every function returns GM_OK or
 * an error status; gm_last_error() describes the most recent failure on the
 * calling thread.  Strings handed back through char** are heap-allocated and
 * must be released with gm_string_free(). */

#include <stddef.h>
#include <stdint.h>

#ifdef __cplusplus
extern "C" {
#endif

typedef enum gm_status {
  GM_OK = 0,
  GM_ERR_INVALID_ARGUMENT = 1,
  GM_ERR_OUT_OF_BOUNDS = 2,
  GM_ERR_INVALID_DEPTH = 3,
  GM_ERR_BEHIND_CAMERA = 4,
  GM_ERR_SHAPE_MISMATCH = 5,
  GM_ERR_DIMENSION_MISMATCH = 6,
  GM_ERR_TOPOLOGY = 7,
  GM_ERR_PARSE = 8,
  GM_ERR_IO = 9,
  GM_ERR_EMPTY_INPUT = 10,
  GM_ERR_DEGENERATE_GEOMETRY = 11,
  GM_ERR_MISSING_DEPTH = 12,
  GM_ERR_ASSIGNMENT = 13,
  GM_ERR_MISSING_CONTACT = 14,
  GM_ERR_INSUFFICIENT_DATA = 15,
  GM_ERR_NUMERIC = 16,
  GM_ERR_VALIDATION = 17,
  GM_ERR_UNKNOWN = 127
} gm_status;

const char* gm_version(void);

/* Message for the last failing call on this thread; empty string if none. */
const char* gm_last_error(void);

void gm_string_free(char* s);

/* ------------------------------------------------------------------ mesh */

typedef struct gm_mesh gm_mesh;

gm_status gm_mesh_load(const char* path, gm_mesh** out);
/* shape: "sphere", "cube", "torus", or "dumbbell". */
gm_status gm_mesh_make(const char* shape, gm_mesh** out);
void gm_mesh_free(gm_mesh* mesh);

gm_status gm_mesh_contains(const gm_mesh* mesh, const double point[3],
                           int* inside);
gm_status gm_mesh_signed_distance(const gm_mesh* mesh, const double point[3],
                                  double* distance);
/* 1 iff `samples` interior points of the segment all lie inside the volume or
 * within surface_tol of the surface. */
gm_status gm_mesh_segment_inside(const gm_mesh* mesh, const double a[3],
                                 const double b[3], int samples,
                                 double surface_tol, int* inside);

/* ----------------------------------------------------------------- chain */

typedef struct gm_chain gm_chain;

gm_status gm_chain_load(const char* path, gm_chain** out);
/* name: "five_finger" (20 joints) or "four_finger" (16 joints). */
gm_status gm_chain_builtin(const char* name, gm_chain** out);
void gm_chain_free(gm_chain* chain);

int gm_chain_dof(const gm_chain* chain);
int gm_chain_fingertip_count(const gm_chain* chain);
/* Forward kinematics: wrist position (3), wrist rotation as axis-angle (3),
 * joint values (joint_count = dof).  Writes fingertip_count*3 doubles. */
gm_status gm_chain_fingertips(const gm_chain* chain, const double wrist_pos[3],
                              const double wrist_rot[3], const double* joints,
                              size_t joint_count, double* tips_xyz);

/* ----------------------------------------------------------- contact map */

typedef struct gm_contact_map gm_contact_map;

gm_status gm_contact_map_load(const char* path, gm_contact_map** out);
void gm_contact_map_free(gm_contact_map* map);
size_t gm_contact_map_size(const gm_contact_map* map);
gm_status gm_contact_map_point(const gm_contact_map* map, size_t index,
                               double point[3], double* score);

/* -------------------------------------------------------------- pipeline */

/* Built-in defaults as a config document. */
gm_status gm_default_config(char** config_json);

/* Generates a complete synthetic bundle under out_dir. */
gm_status gm_synth(const char* shape, int resolution, uint64_t seed,
                   const char* out_dir);

/* Checks a bundle manifest; GM_OK even when findings exist.  errors/warnings
 * receive the finding counts (either may be NULL). */
gm_status gm_validate(const char* bundle_path, char** report_json, int* errors,
                      int* warnings);

/* Runs the pipeline.  config_path NULL uses the bundle's config (or the
 * defaults); intent < 0 runs every intent; threads <= 0 keeps the config
 * value. */
gm_status gm_run(const char* bundle_path, const char* config_path,
                 const char* out_dir, int intent, int threads);

/* Evaluates every episode log in logs_dir against the maps in maps_dir. */
gm_status gm_eval(const char* logs_dir, const char* maps_dir,
                  const char* config_path, char** report_json);

/* Contact map + chain document -> pseudo-pose document.  mesh_path (optional)
 * supplies surface normals for the initial wrist placement; config_path
 * (optional) supplies IK parameters. */
gm_status gm_derive_pose(const char* map_path, const char* chain_path,
                         const char* mesh_path, const char* config_path,
                         char** pose_json);

#ifdef __cplusplus
}
#endif

#endif /* GRASPMAP_CAPI_H */
