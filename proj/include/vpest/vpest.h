// Copyright 2026 The vpest Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

/* C interface to the vanishing-point estimator.
 *
 * Every function returns a vpest_status. On failure, vpest_last_error()
 * returns a message for the calling thread, and for parse failures
 * vpest_last_error_location() gives the 1-based line and column (0 when
 * unknown). Strings returned through char** are owned by the caller and must
 * be released with vpest_string_free. */
#ifndef VPEST_VPEST_H
#define VPEST_VPEST_H

#include <stddef.h>
#include <stdint.h>

#if defined(VPEST_BUILDING_LIBRARY)
#define VPEST_API __attribute__((visibility("default")))
#else
#define VPEST_API
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum vpest_status {
  VPEST_OK = 0,
  VPEST_INVALID_ARGUMENT = 1,
  VPEST_DEGENERATE_SEGMENT = 2,
  VPEST_SINGULAR_INPUT = 3,
  VPEST_EMPTY_INPUT = 4,
  VPEST_INSUFFICIENT_LINES = 5,
  VPEST_DEGENERATE_BUNDLE = 6,
  VPEST_RANK_DEFICIENT = 7,
  VPEST_NON_POSITIVE_FOCAL_SQUARED = 8,
  VPEST_CONFIG_MISMATCH = 9,
  VPEST_ALL_ZERO_WEIGHTS = 10,
  VPEST_NO_MODEL_FOUND = 11,
  VPEST_PARSE_ERROR = 12,
  VPEST_IO_ERROR = 13,
  VPEST_INTERNAL_ERROR = 14
} vpest_status;

typedef enum vpest_solver {
  VPEST_SOLVER_HYBRID = -1,
  VPEST_SOLVER_220 = 0,
  VPEST_SOLVER_211 = 1,
  VPEST_SOLVER_200G = 2,
  VPEST_SOLVER_011G = 3,
  VPEST_SOLVER_110G = 4
} vpest_solver;

typedef enum vpest_gravity_quality {
  VPEST_GRAVITY_EXACT = 0,
  VPEST_GRAVITY_PRIOR = 1,
  VPEST_GRAVITY_ABSENT = 2
} vpest_gravity_quality;

typedef enum vpest_lo_mode { VPEST_LO_OURS = 0, VPEST_LO_ITER = 1, VPEST_LO_NONE = 2 } vpest_lo_mode;

typedef enum vpest_study {
  VPEST_STUDY_STABILITY = 0,
  VPEST_STUDY_NOISE = 1,
  VPEST_STUDY_NOISE_PP = 2,
  VPEST_STUDY_RUNTIME = 3
} vpest_study;

typedef struct vpest_scene vpest_scene;
typedef struct vpest_result vpest_result;

typedef struct vpest_estimate_options {
  int solver; /* vpest_solver */
  double inlier_threshold_px;
  uint64_t seed;
  int lo_mode; /* vpest_lo_mode */
  int min_iterations;
  int max_iterations;
  double confidence;
  double solver_priors[5];
  int evaluate;
} vpest_estimate_options;

typedef struct vpest_bench_options {
  int study; /* vpest_study */
  int n;
  uint64_t seed;
  int threads;
  const double* outlier_ratios; /* runtime study */
  size_t outlier_ratio_count;
  long calls;
} vpest_bench_options;

typedef struct vpest_synth_options {
  uint64_t seed;
  uint64_t index;
  int lines_per_direction[3];
  double sigma_image_px;
  double sigma_gravity_deg;
  double outlier_fraction;
  double width;
  double height;
  int gravity_quality; /* vpest_gravity_quality */
} vpest_synth_options;

VPEST_API const char* vpest_status_name(vpest_status status);
VPEST_API const char* vpest_last_error(void);
VPEST_API void vpest_last_error_location(int* line, int* column);
VPEST_API void vpest_string_free(char* s);

/* width/height are only used for CSV input and may be 0 otherwise. */
VPEST_API vpest_status vpest_scene_load(const char* path, double width, double height,
                                        vpest_scene** out);
VPEST_API vpest_status vpest_scene_parse_json(const char* text, vpest_scene** out);
VPEST_API void vpest_scene_free(vpest_scene* scene);
VPEST_API vpest_status vpest_scene_segment_count(const vpest_scene* scene, size_t* count);
VPEST_API vpest_status vpest_scene_set_gravity(vpest_scene* scene, const double gravity[3],
                                               int quality);
/* quality receives a vpest_gravity_quality; gravity may be NULL. */
VPEST_API vpest_status vpest_scene_gravity(const vpest_scene* scene, double gravity[3],
                                           int* quality);
VPEST_API vpest_status vpest_scene_to_json(const vpest_scene* scene, char** json);

VPEST_API void vpest_estimate_options_init(vpest_estimate_options* options);
VPEST_API vpest_status vpest_estimate(const vpest_scene* scene,
                                      const vpest_estimate_options* options, vpest_result** out);
VPEST_API void vpest_result_free(vpest_result* result);
/* rotation is row-major. */
VPEST_API vpest_status vpest_result_rotation(const vpest_result* result, double rotation[9]);
VPEST_API vpest_status vpest_result_focal(const vpest_result* result, double* focal);
VPEST_API vpest_status vpest_result_vanishing_point(const vpest_result* result, int index,
                                                    double vp[3]);
VPEST_API vpest_status vpest_result_score(const vpest_result* result, int* score);
VPEST_API vpest_status vpest_result_iterations(const vpest_result* result, int* iterations);
VPEST_API vpest_status vpest_result_solver_draws(const vpest_result* result, int draws[5]);
/* With indices == NULL only *count is written. */
VPEST_API vpest_status vpest_result_inliers(const vpest_result* result, int vp_index,
                                            size_t* indices, size_t* count);
/* Fails with VPEST_INVALID_ARGUMENT unless evaluation was requested. */
VPEST_API vpest_status vpest_result_rotation_error_deg(const vpest_result* result, double* err);
VPEST_API vpest_status vpest_result_to_json(const vpest_result* result, int include_timings,
                                            char** json);

VPEST_API void vpest_bench_options_init(vpest_bench_options* options);
VPEST_API vpest_status vpest_bench_run(const vpest_bench_options* options, char** csv);

VPEST_API void vpest_synth_options_init(vpest_synth_options* options);
VPEST_API vpest_status vpest_synth_scene(const vpest_synth_options* options, vpest_scene** out);

#ifdef __cplusplus
}
#endif

#endif /* VPEST_VPEST_H */
