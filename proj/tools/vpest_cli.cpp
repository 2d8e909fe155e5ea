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

// Command-line front end over the C API.
//
// Exit codes: 0 success, 2 usage or parse error, 3 estimation failure.
// Failures print a JSON object {"error": <status name>, "message": ...} on
// stdout; parse errors add "line" and "column".

#include <algorithm>
#include <array>
#include <cstdint>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "vpest/vpest.h"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitUsage = 2;
constexpr int kExitEstimation = 3;

struct SceneDeleter {
  void operator()(vpest_scene* s) const { vpest_scene_free(s); }
};
struct ResultDeleter {
  void operator()(vpest_result* r) const { vpest_result_free(r); }
};
struct StringDeleter {
  void operator()(char* s) const { vpest_string_free(s); }
};
using ScenePtr = std::unique_ptr<vpest_scene, SceneDeleter>;
using ResultPtr = std::unique_ptr<vpest_result, ResultDeleter>;
using StringPtr = std::unique_ptr<char, StringDeleter>;

int report_failure(vpest_status status) {
  nlohmann::json err;
  err["error"] = vpest_status_name(status);
  err["message"] = vpest_last_error();
  if (status == VPEST_PARSE_ERROR) {
    int line = 0, column = 0;
    vpest_last_error_location(&line, &column);
    err["line"] = line;
    err["column"] = column;
  }
  std::cout << err.dump() << '\n';
  switch (status) {
    case VPEST_INSUFFICIENT_LINES:
    case VPEST_NO_MODEL_FOUND:
    case VPEST_CONFIG_MISMATCH:
    case VPEST_ALL_ZERO_WEIGHTS:
    case VPEST_DEGENERATE_BUNDLE:
    case VPEST_RANK_DEFICIENT:
    case VPEST_SINGULAR_INPUT:
    case VPEST_NON_POSITIVE_FOCAL_SQUARED:
    case VPEST_INTERNAL_ERROR:
      return kExitEstimation;
    default:
      return kExitUsage;
  }
}

int write_output(const std::string& text, const std::string& path) {
  if (path.empty()) {
    std::cout << text;
    std::cout.flush();
    return kExitOk;
  }
  std::ofstream out(path, std::ios::binary);
  out << text;
  if (!out) {
    nlohmann::json err{{"error", "IoError"}, {"message", "cannot write " + path}};
    std::cout << err.dump() << '\n';
    return kExitUsage;
  }
  return kExitOk;
}

std::optional<std::array<double, 3>> parse_vector(const std::string& text) {
  std::array<double, 3> v{};
  std::stringstream ss(text);
  std::string field;
  int k = 0;
  while (std::getline(ss, field, ',')) {
    if (k >= 3) return std::nullopt;
    try {
      std::size_t used = 0;
      v[static_cast<std::size_t>(k)] = std::stod(field, &used);
      if (used != field.size()) return std::nullopt;
    } catch (const std::exception&) {
      return std::nullopt;
    }
    ++k;
  }
  if (k != 3) return std::nullopt;
  return v;
}

struct EstimateArgs {
  std::string input;
  std::string solver = "hybrid";
  std::string gravity;
  std::string gravity_quality;
  double threshold = 0.0;
  std::uint64_t seed = 0;
  std::string lo = "ours";
  int min_iters = -1;
  int max_iters = -1;
  bool eval = false;
  bool timings = false;
  double width = 0.0;
  double height = 0.0;
  std::string out;
};

int run_estimate(const EstimateArgs& a) {
  vpest_estimate_options opts;
  vpest_estimate_options_init(&opts);

  const std::vector<std::pair<std::string, int>> solvers{
      {"hybrid", VPEST_SOLVER_HYBRID}, {"220", VPEST_SOLVER_220},   {"211", VPEST_SOLVER_211},
      {"200g", VPEST_SOLVER_200G},     {"011g", VPEST_SOLVER_011G}, {"110g", VPEST_SOLVER_110G}};
  for (const auto& [name, id] : solvers) {
    if (name == a.solver) opts.solver = id;
  }
  if (a.lo == "ours") opts.lo_mode = VPEST_LO_OURS;
  if (a.lo == "iter") opts.lo_mode = VPEST_LO_ITER;
  if (a.lo == "none") opts.lo_mode = VPEST_LO_NONE;
  if (a.threshold > 0.0) opts.inlier_threshold_px = a.threshold;
  if (a.min_iters >= 0) opts.min_iterations = a.min_iters;
  if (a.max_iters >= 0) opts.max_iterations = a.max_iters;
  opts.seed = a.seed;
  opts.evaluate = a.eval ? 1 : 0;

  vpest_scene* raw_scene = nullptr;
  vpest_status st = vpest_scene_load(a.input.c_str(), a.width, a.height, &raw_scene);
  if (st != VPEST_OK) return report_failure(st);
  ScenePtr scene(raw_scene);

  if (!a.gravity.empty() || !a.gravity_quality.empty()) {
    int quality = VPEST_GRAVITY_EXACT;
    if (a.gravity_quality == "prior") quality = VPEST_GRAVITY_PRIOR;
    if (a.gravity_quality == "absent") quality = VPEST_GRAVITY_ABSENT;
    if (!a.gravity.empty()) {
      const auto g = parse_vector(a.gravity);
      if (!g) {
        std::cerr << "--gravity expects three comma-separated numbers\n";
        return kExitUsage;
      }
      st = vpest_scene_set_gravity(scene.get(), g->data(), quality);
    } else {
      // Re-tag the gravity stored in the file.
      std::array<double, 3> g{};
      int stored = VPEST_GRAVITY_ABSENT;
      vpest_scene_gravity(scene.get(), g.data(), &stored);
      if (stored != VPEST_GRAVITY_ABSENT || quality == VPEST_GRAVITY_ABSENT) {
        st = vpest_scene_set_gravity(scene.get(), g.data(), quality);
      } else {
        std::cerr << "--gravity-quality needs a gravity direction in the scene or via --gravity\n";
        return kExitUsage;
      }
    }
    if (st != VPEST_OK) return report_failure(st);
  }

  vpest_result* raw_result = nullptr;
  st = vpest_estimate(scene.get(), &opts, &raw_result);
  if (st != VPEST_OK) return report_failure(st);
  ResultPtr result(raw_result);

  char* raw_json = nullptr;
  st = vpest_result_to_json(result.get(), a.timings ? 1 : 0, &raw_json);
  if (st != VPEST_OK) return report_failure(st);
  StringPtr json(raw_json);
  return write_output(json.get(), a.out);
}

struct BenchArgs {
  std::string study;
  int n = 1000;
  std::uint64_t seed = 0;
  std::string threads = "1";
  std::string grid = "default";
  std::vector<double> outliers{0.5};
  long calls = 100000;
  std::string out;
};

int run_bench(const BenchArgs& a) {
  vpest_bench_options opts;
  vpest_bench_options_init(&opts);
  if (a.study == "stability") {
    opts.study = VPEST_STUDY_STABILITY;
  } else if (a.study == "noise") {
    opts.study = a.grid == "pp" ? VPEST_STUDY_NOISE_PP : VPEST_STUDY_NOISE;
  } else {
    opts.study = VPEST_STUDY_RUNTIME;
  }
  opts.n = a.n;
  opts.seed = a.seed;
  opts.threads = a.threads == "max" ? static_cast<int>(std::max(1u, std::thread::hardware_concurrency()))
                                     : std::stoi(a.threads);
  opts.outlier_ratios = a.outliers.data();
  opts.outlier_ratio_count = a.outliers.size();
  opts.calls = a.calls;
  char* raw_csv = nullptr;
  const vpest_status st = vpest_bench_run(&opts, &raw_csv);
  if (st != VPEST_OK) return report_failure(st);
  StringPtr csv(raw_csv);
  return write_output(csv.get(), a.out);
}

struct SynthArgs {
  std::uint64_t seed = 0;
  std::uint64_t index = 0;
  int lines = 20;
  double sigma_image = 1.0;
  double sigma_gravity = 0.0;
  double outliers = 0.3;
  double width = 1920.0;
  double height = 1080.0;
  std::string gravity_quality = "exact";
  std::string out;
};

int run_synth(const SynthArgs& a) {
  vpest_synth_options opts;
  vpest_synth_options_init(&opts);
  opts.seed = a.seed;
  opts.index = a.index;
  for (int& n : opts.lines_per_direction) n = a.lines;
  opts.sigma_image_px = a.sigma_image;
  opts.sigma_gravity_deg = a.sigma_gravity;
  opts.outlier_fraction = a.outliers;
  opts.width = a.width;
  opts.height = a.height;
  opts.gravity_quality = a.gravity_quality == "prior"    ? VPEST_GRAVITY_PRIOR
                         : a.gravity_quality == "absent" ? VPEST_GRAVITY_ABSENT
                                                         : VPEST_GRAVITY_EXACT;
  vpest_scene* raw_scene = nullptr;
  vpest_status st = vpest_synth_scene(&opts, &raw_scene);
  if (st != VPEST_OK) return report_failure(st);
  ScenePtr scene(raw_scene);
  char* raw_json = nullptr;
  st = vpest_scene_to_json(scene.get(), &raw_json);
  if (st != VPEST_OK) return report_failure(st);
  StringPtr json(raw_json);
  return write_output(json.get(), a.out);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Vanishing point and focal length estimation from line segments"};
  app.require_subcommand(1);

  EstimateArgs est;
  auto* estimate = app.add_subcommand("estimate", "Estimate the Manhattan frame of one scene");
  estimate->add_option("input", est.input, "Scene file (JSON, or CSV of x1,y1,x2,y2)")->required();
  estimate->add_option("--solver", est.solver, "Minimal solver or hybrid")
      ->check(CLI::IsMember({"hybrid", "220", "211", "200g", "011g", "110g"}));
  estimate->add_option("--gravity", est.gravity, "Gravity direction \"x,y,z\" in camera coordinates");
  estimate->add_option("--gravity-quality", est.gravity_quality, "How far to trust the gravity direction")
      ->check(CLI::IsMember({"exact", "prior", "absent"}));
  estimate->add_option("--threshold", est.threshold, "Inlier threshold in pixels")
      ->check(CLI::PositiveNumber);
  estimate->add_option("--seed", est.seed, "Random seed");
  estimate->add_option("--lo", est.lo, "Local optimization mode")
      ->check(CLI::IsMember({"ours", "iter", "none"}));
  estimate->add_option("--min-iters", est.min_iters, "Minimum RANSAC iterations")
      ->check(CLI::NonNegativeNumber);
  estimate->add_option("--max-iters", est.max_iters, "Maximum RANSAC iterations")
      ->check(CLI::PositiveNumber);
  estimate->add_flag("--eval", est.eval, "Report errors against the ground truth in the scene");
  estimate->add_flag("--timings", est.timings, "Include wall-clock timings (not reproducible)");
  estimate->add_option("--width", est.width, "Image width for CSV input")->check(CLI::PositiveNumber);
  estimate->add_option("--height", est.height, "Image height for CSV input")->check(CLI::PositiveNumber);
  estimate->add_option("--out", est.out, "Output file (default stdout)");

  BenchArgs bench_args;
  auto* bench = app.add_subcommand("bench", "Run a synthetic benchmark study and print CSV");
  bench->add_option("study", bench_args.study, "stability | noise | runtime")
      ->required()
      ->check(CLI::IsMember({"stability", "noise", "runtime"}));
  bench->add_option("--n", bench_args.n, "Instances per solver (and per noise cell)")
      ->check(CLI::PositiveNumber);
  bench->add_option("--seed", bench_args.seed, "Random seed");
  bench->add_option("--threads", bench_args.threads, "Worker threads, or \"max\" for one per core")
      ->check(CLI::IsMember({"max"}) | CLI::Range(1, 4096));
  bench->add_option("--grid", bench_args.grid, "Noise grid: image/gravity (default) or principal point (pp)")
      ->check(CLI::IsMember({"default", "pp"}));
  bench->add_option("--outliers", bench_args.outliers, "Outlier ratios for the runtime study")
      ->delimiter(',')
      ->check(CLI::Range(0.0, 0.999999));
  bench->add_option("--calls", bench_args.calls, "Timed solver calls per solver")
      ->check(CLI::PositiveNumber);
  bench->add_option("--out", bench_args.out, "Output file (default stdout)");

  SynthArgs syn;
  auto* synth = app.add_subcommand("synth", "Write a synthetic scene with embedded ground truth");
  synth->add_option("--seed", syn.seed, "Random seed");
  synth->add_option("--index", syn.index, "Instance index within the seed");
  synth->add_option("--lines", syn.lines, "Lines per direction")->check(CLI::NonNegativeNumber);
  synth->add_option("--sigma-image", syn.sigma_image, "Endpoint noise in pixels")->check(CLI::NonNegativeNumber);
  synth->add_option("--sigma-gravity", syn.sigma_gravity, "Gravity noise in degrees")
      ->check(CLI::NonNegativeNumber);
  synth->add_option("--outliers", syn.outliers, "Outlier fraction")->check(CLI::Range(0.0, 0.999999));
  synth->add_option("--width", syn.width, "Image width")->check(CLI::PositiveNumber);
  synth->add_option("--height", syn.height, "Image height")->check(CLI::PositiveNumber);
  synth->add_option("--gravity-quality", syn.gravity_quality, "Gravity tag written to the scene")
      ->check(CLI::IsMember({"exact", "prior", "absent"}));
  synth->add_option("--out", syn.out, "Output file (default stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitUsage;
  }

  if (*estimate) return run_estimate(est);
  if (*bench) return run_bench(bench_args);
  return run_synth(syn);
}
