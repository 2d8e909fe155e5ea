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

#include "vpest/vpest.h"

#include <algorithm>
#include <cstdlib>
#include <cstring>
#include <new>
#include <optional>
#include <string>
#include <vector>

#include "vpest/scene_io.hpp"
#include "vpest/studies.hpp"

struct vpest_scene {
  vpest::SceneInput scene;
};

struct vpest_result {
  vpest::SceneEstimate estimate;
};

namespace {

thread_local std::string g_last_error;
thread_local int g_error_line = 0;
thread_local int g_error_column = 0;

void set_error(const std::string& message, int line = 0, int column = 0) {
  g_last_error = message;
  g_error_line = line;
  g_error_column = column;
}

vpest_status map_code(vpest::ErrorCode code) {
  using vpest::ErrorCode;
  switch (code) {
    case ErrorCode::InvalidArgument: return VPEST_INVALID_ARGUMENT;
    case ErrorCode::DegenerateSegment: return VPEST_DEGENERATE_SEGMENT;
    case ErrorCode::SingularInput: return VPEST_SINGULAR_INPUT;
    case ErrorCode::EmptyInput: return VPEST_EMPTY_INPUT;
    case ErrorCode::InsufficientLines: return VPEST_INSUFFICIENT_LINES;
    case ErrorCode::DegenerateBundle: return VPEST_DEGENERATE_BUNDLE;
    case ErrorCode::RankDeficient: return VPEST_RANK_DEFICIENT;
    case ErrorCode::NonPositiveFocalSquared: return VPEST_NON_POSITIVE_FOCAL_SQUARED;
    case ErrorCode::ConfigMismatch: return VPEST_CONFIG_MISMATCH;
    case ErrorCode::AllZeroWeights: return VPEST_ALL_ZERO_WEIGHTS;
    case ErrorCode::NoModelFound: return VPEST_NO_MODEL_FOUND;
    case ErrorCode::ParseError: return VPEST_PARSE_ERROR;
    case ErrorCode::IoError: return VPEST_IO_ERROR;
  }
  return VPEST_INTERNAL_ERROR;
}

// Runs `fn`, translating exceptions into status codes.
template <class Fn>
vpest_status guarded(Fn&& fn) {
  set_error("");
  try {
    fn();
    return VPEST_OK;
  } catch (const vpest::ParseError& e) {
    set_error(e.what(), e.line(), e.column());
    return VPEST_PARSE_ERROR;
  } catch (const vpest::Error& e) {
    set_error(e.what());
    return map_code(e.code());
  } catch (const std::bad_alloc&) {
    set_error("out of memory");
    return VPEST_INTERNAL_ERROR;
  } catch (const std::exception& e) {
    set_error(e.what());
    return VPEST_INTERNAL_ERROR;
  }
}

vpest_status null_argument() {
  set_error("null argument");
  return VPEST_INVALID_ARGUMENT;
}

char* copy_string(const std::string& s) {
  char* out = static_cast<char*>(std::malloc(s.size() + 1));
  if (!out) throw std::bad_alloc();
  std::memcpy(out, s.c_str(), s.size() + 1);
  return out;
}

vpest::GravityObservation make_gravity(const double g[3], int quality) {
  const vpest::Vec3 dir(g[0], g[1], g[2]);
  switch (quality) {
    case VPEST_GRAVITY_EXACT: return vpest::GravityObservation::exact(dir);
    case VPEST_GRAVITY_PRIOR: return vpest::GravityObservation::prior(dir);
    case VPEST_GRAVITY_ABSENT: return vpest::GravityObservation::absent();
    default: throw vpest::Error(vpest::ErrorCode::InvalidArgument, "unknown gravity quality");
  }
}

}  // namespace

extern "C" {

const char* vpest_status_name(vpest_status status) {
  switch (status) {
    case VPEST_OK: return "Ok";
    case VPEST_INVALID_ARGUMENT: return "InvalidArgument";
    case VPEST_DEGENERATE_SEGMENT: return "DegenerateSegment";
    case VPEST_SINGULAR_INPUT: return "SingularInput";
    case VPEST_EMPTY_INPUT: return "EmptyInput";
    case VPEST_INSUFFICIENT_LINES: return "InsufficientLines";
    case VPEST_DEGENERATE_BUNDLE: return "DegenerateBundle";
    case VPEST_RANK_DEFICIENT: return "RankDeficient";
    case VPEST_NON_POSITIVE_FOCAL_SQUARED: return "NonPositiveFocalSquared";
    case VPEST_CONFIG_MISMATCH: return "ConfigMismatch";
    case VPEST_ALL_ZERO_WEIGHTS: return "AllZeroWeights";
    case VPEST_NO_MODEL_FOUND: return "NoModelFound";
    case VPEST_PARSE_ERROR: return "ParseError";
    case VPEST_IO_ERROR: return "IoError";
    case VPEST_INTERNAL_ERROR: return "InternalError";
  }
  return "Unknown";
}

const char* vpest_last_error(void) { return g_last_error.c_str(); }

void vpest_last_error_location(int* line, int* column) {
  if (line) *line = g_error_line;
  if (column) *column = g_error_column;
}

void vpest_string_free(char* s) { std::free(s); }

vpest_status vpest_scene_load(const char* path, double width, double height, vpest_scene** out) {
  if (!path || !out) return null_argument();
  *out = nullptr;
  return guarded([&] {
    std::optional<double> w, h;
    if (width > 0.0) w = width;
    if (height > 0.0) h = height;
    *out = new vpest_scene{vpest::load_scene(path, w, h)};
  });
}

vpest_status vpest_scene_parse_json(const char* text, vpest_scene** out) {
  if (!text || !out) return null_argument();
  *out = nullptr;
  return guarded([&] { *out = new vpest_scene{vpest::parse_scene_json(text)}; });
}

void vpest_scene_free(vpest_scene* scene) { delete scene; }

vpest_status vpest_scene_segment_count(const vpest_scene* scene, size_t* count) {
  if (!scene || !count) return null_argument();
  *count = scene->scene.segments.size();
  return VPEST_OK;
}

vpest_status vpest_scene_set_gravity(vpest_scene* scene, const double gravity[3], int quality) {
  if (!scene || (!gravity && quality != VPEST_GRAVITY_ABSENT)) return null_argument();
  return guarded([&] {
    const double zero[3] = {0.0, 0.0, 0.0};
    scene->scene.gravity = make_gravity(gravity ? gravity : zero, quality);
  });
}

vpest_status vpest_scene_gravity(const vpest_scene* scene, double gravity[3], int* quality) {
  if (!scene || !quality) return null_argument();
  const vpest::GravityObservation& g = scene->scene.gravity;
  switch (g.quality) {
    case vpest::GravityQuality::Exact: *quality = VPEST_GRAVITY_EXACT; break;
    case vpest::GravityQuality::Prior: *quality = VPEST_GRAVITY_PRIOR; break;
    case vpest::GravityQuality::Absent: *quality = VPEST_GRAVITY_ABSENT; break;
  }
  if (gravity) {
    for (int i = 0; i < 3; ++i) gravity[i] = g.direction(i);
  }
  return VPEST_OK;
}

vpest_status vpest_scene_to_json(const vpest_scene* scene, char** json) {
  if (!scene || !json) return null_argument();
  *json = nullptr;
  return guarded([&] { *json = copy_string(vpest::scene_to_json(scene->scene)); });
}

void vpest_estimate_options_init(vpest_estimate_options* options) {
  if (!options) return;
  const vpest::RansacConfig defaults;
  options->solver = VPEST_SOLVER_HYBRID;
  options->inlier_threshold_px = defaults.inlier_threshold_px;
  options->seed = defaults.seed;
  options->lo_mode = VPEST_LO_OURS;
  options->min_iterations = defaults.min_iterations;
  options->max_iterations = defaults.max_iterations;
  options->confidence = defaults.confidence;
  for (int i = 0; i < 5; ++i) options->solver_priors[i] = defaults.solver_priors[static_cast<std::size_t>(i)];
  options->evaluate = 0;
}

vpest_status vpest_estimate(const vpest_scene* scene, const vpest_estimate_options* options,
                            vpest_result** out) {
  if (!scene || !options || !out) return null_argument();
  *out = nullptr;
  return guarded([&] {
    vpest::EstimateOptions opts;
    if (options->solver != VPEST_SOLVER_HYBRID) {
      if (options->solver < 0 || options->solver > 4) {
        throw vpest::Error(vpest::ErrorCode::InvalidArgument, "unknown solver");
      }
      opts.solver = vpest::kAllSolvers[static_cast<std::size_t>(options->solver)];
    }
    switch (options->lo_mode) {
      case VPEST_LO_OURS: opts.ransac.lo_mode = vpest::LoMode::Ours; break;
      case VPEST_LO_ITER: opts.ransac.lo_mode = vpest::LoMode::Iter; break;
      case VPEST_LO_NONE: opts.ransac.lo_mode = vpest::LoMode::None; break;
      default: throw vpest::Error(vpest::ErrorCode::InvalidArgument, "unknown LO mode");
    }
    opts.ransac.inlier_threshold_px = options->inlier_threshold_px;
    opts.ransac.seed = options->seed;
    opts.ransac.min_iterations = options->min_iterations;
    opts.ransac.max_iterations = options->max_iterations;
    opts.ransac.confidence = options->confidence;
    for (int i = 0; i < 5; ++i) opts.ransac.solver_priors[static_cast<std::size_t>(i)] = options->solver_priors[i];
    opts.evaluate = options->evaluate != 0;
    *out = new vpest_result{vpest::estimate_scene(scene->scene, opts)};
  });
}

void vpest_result_free(vpest_result* result) { delete result; }

vpest_status vpest_result_rotation(const vpest_result* result, double rotation[9]) {
  if (!result || !rotation) return null_argument();
  for (int i = 0; i < 9; ++i) rotation[i] = result->estimate.robust.frame.rotation(i / 3, i % 3);
  return VPEST_OK;
}

vpest_status vpest_result_focal(const vpest_result* result, double* focal) {
  if (!result || !focal) return null_argument();
  *focal = result->estimate.robust.frame.focal;
  return VPEST_OK;
}

vpest_status vpest_result_vanishing_point(const vpest_result* result, int index, double vp[3]) {
  if (!result || !vp) return null_argument();
  if (index < 0 || index > 2) {
    set_error("vanishing point index must be 0, 1 or 2");
    return VPEST_INVALID_ARGUMENT;
  }
  const vpest::Vec3 v = result->estimate.robust.frame.vanishing_point(index);
  for (int i = 0; i < 3; ++i) vp[i] = v(i);
  return VPEST_OK;
}

vpest_status vpest_result_score(const vpest_result* result, int* score) {
  if (!result || !score) return null_argument();
  *score = result->estimate.robust.score;
  return VPEST_OK;
}

vpest_status vpest_result_iterations(const vpest_result* result, int* iterations) {
  if (!result || !iterations) return null_argument();
  *iterations = result->estimate.robust.iterations_run;
  return VPEST_OK;
}

vpest_status vpest_result_solver_draws(const vpest_result* result, int draws[5]) {
  if (!result || !draws) return null_argument();
  for (int i = 0; i < 5; ++i) draws[i] = result->estimate.robust.solver_draws[static_cast<std::size_t>(i)];
  return VPEST_OK;
}

vpest_status vpest_result_inliers(const vpest_result* result, int vp_index, size_t* indices,
                                  size_t* count) {
  if (!result || !count) return null_argument();
  if (vp_index < 0 || vp_index > 2) {
    set_error("vanishing point index must be 0, 1 or 2");
    return VPEST_INVALID_ARGUMENT;
  }
  const auto& set = result->estimate.segment_indices[static_cast<std::size_t>(vp_index)];
  *count = set.size();
  if (indices) std::copy(set.begin(), set.end(), indices);
  return VPEST_OK;
}

vpest_status vpest_result_rotation_error_deg(const vpest_result* result, double* err) {
  if (!result || !err) return null_argument();
  if (!result->estimate.metrics) {
    set_error("estimate was run without evaluation");
    return VPEST_INVALID_ARGUMENT;
  }
  *err = result->estimate.metrics->rotation_error_deg;
  return VPEST_OK;
}

vpest_status vpest_result_to_json(const vpest_result* result, int include_timings, char** json) {
  if (!result || !json) return null_argument();
  *json = nullptr;
  return guarded([&] {
    *json = copy_string(vpest::estimate_to_json(result->estimate, include_timings != 0));
  });
}

void vpest_bench_options_init(vpest_bench_options* options) {
  if (!options) return;
  options->study = VPEST_STUDY_STABILITY;
  options->n = 1000;
  options->seed = 0;
  options->threads = 1;
  options->outlier_ratios = nullptr;
  options->outlier_ratio_count = 0;
  options->calls = 100000;
}

vpest_status vpest_bench_run(const vpest_bench_options* options, char** csv) {
  if (!options || !csv) return null_argument();
  *csv = nullptr;
  return guarded([&] {
    std::string text;
    switch (options->study) {
      case VPEST_STUDY_STABILITY:
        text = vpest::stability_csv(vpest::run_stability_study(options->n, options->seed, options->threads));
        break;
      case VPEST_STUDY_NOISE:
      case VPEST_STUDY_NOISE_PP: {
        const auto grid = options->study == VPEST_STUDY_NOISE ? vpest::default_noise_grid()
                                                              : vpest::principal_point_grid();
        text = vpest::noise_csv(vpest::run_noise_study(grid, options->n, options->seed, options->threads));
        break;
      }
      case VPEST_STUDY_RUNTIME: {
        std::vector<double> ratios{0.5};
        if (options->outlier_ratio_count > 0) {
          if (!options->outlier_ratios) throw vpest::Error(vpest::ErrorCode::InvalidArgument, "null outlier ratios");
          ratios.assign(options->outlier_ratios, options->outlier_ratios + options->outlier_ratio_count);
        }
        text = vpest::runtime_csv(vpest::run_runtime_study(ratios, options->seed, options->calls));
        break;
      }
      default: throw vpest::Error(vpest::ErrorCode::InvalidArgument, "unknown study");
    }
    *csv = copy_string(text);
  });
}

void vpest_synth_options_init(vpest_synth_options* options) {
  if (!options) return;
  const vpest::SyntheticConfig defaults;
  options->seed = 0;
  options->index = 0;
  for (int i = 0; i < 3; ++i) options->lines_per_direction[i] = defaults.lines_per_direction[static_cast<std::size_t>(i)];
  options->sigma_image_px = 1.0;
  options->sigma_gravity_deg = 0.0;
  options->outlier_fraction = 0.3;
  options->width = 1920.0;
  options->height = 1080.0;
  options->gravity_quality = VPEST_GRAVITY_EXACT;
}

vpest_status vpest_synth_scene(const vpest_synth_options* options, vpest_scene** out) {
  if (!options || !out) return null_argument();
  *out = nullptr;
  return guarded([&] {
    vpest::SyntheticConfig cfg;
    cfg.seed = options->seed;
    for (int i = 0; i < 3; ++i) cfg.lines_per_direction[static_cast<std::size_t>(i)] = options->lines_per_direction[i];
    cfg.sigma_image_px = options->sigma_image_px;
    cfg.sigma_gravity_deg = options->sigma_gravity_deg;
    cfg.outlier_fraction = options->outlier_fraction;
    const vpest::SyntheticInstance inst = vpest::generate_instance(cfg, options->index);
    vpest::GravityQuality quality;
    switch (options->gravity_quality) {
      case VPEST_GRAVITY_EXACT: quality = vpest::GravityQuality::Exact; break;
      case VPEST_GRAVITY_PRIOR: quality = vpest::GravityQuality::Prior; break;
      case VPEST_GRAVITY_ABSENT: quality = vpest::GravityQuality::Absent; break;
      default: throw vpest::Error(vpest::ErrorCode::InvalidArgument, "unknown gravity quality");
    }
    *out = new vpest_scene{vpest::scene_from_instance(inst, options->width, options->height, quality)};
  });
}

}  // extern "C"
