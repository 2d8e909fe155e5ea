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

// Acceptance checks. Prints one PASS/FAIL line per criterion and exits
// non-zero if any criterion fails.

#include <algorithm>
#include <array>
#include <atomic>
#include <chrono>
#include <cstdio>
#include <functional>
#include <limits>
#include <sstream>
#include <string>
#include <sys/wait.h>
#include <thread>
#include <vector>

#include "vpest/geometry.hpp"
#include "vpest/minimal_solvers.hpp"
#include "vpest/nonminimal.hpp"
#include "vpest/robust.hpp"
#include "vpest/studies.hpp"
#include "vpest/synthetic.hpp"

namespace {

using namespace vpest;

constexpr std::uint64_t kSeed = 2026;

int hardware_threads() { return static_cast<int>(std::max(1u, std::thread::hardware_concurrency())); }

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

double median(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  const std::size_t m = v.size() / 2;
  return v.size() % 2 ? v[m] : 0.5 * (v[m - 1] + v[m]);
}

void parallel(int n, const std::function<void(int)>& fn) {
  std::atomic<int> next{0};
  std::vector<std::jthread> pool;
  for (int t = 0; t < hardware_threads(); ++t) {
    pool.emplace_back([&] {
      for (int i = next++; i < n; i = next++) fn(i);
    });
  }
}

// 1
Outcome stability() {
  const auto start = std::chrono::steady_clock::now();
  const StabilityStudy study = run_stability_study(10000, kSeed, hardware_threads());
  const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  std::array<int, 5> ok{}, runs{};
  for (const StabilityRow& r : study.rows) {
    const bool loose = r.solver == SolverId::S211;
    const double rot_tol = loose ? 1e-5 : 1e-6;
    const double focal_tol = loose ? 1e-4 : 1e-8;
    const auto j = static_cast<std::size_t>(solver_index(r.solver));
    ++runs[j];
    if (r.solved && r.rotation_error_deg < rot_tol && r.focal_rel_error < focal_tol) ++ok[j];
  }
  Outcome out{seconds < 60.0, ""};
  for (SolverId id : kAllSolvers) {
    const auto j = static_cast<std::size_t>(solver_index(id));
    const double frac = static_cast<double>(ok[j]) / runs[j];
    out.pass = out.pass && runs[j] == 10000 && frac >= 0.999;
    out.detail += fmt("%s=%.4f ", std::string(solver_name(id)).c_str(), frac);
  }
  out.detail += fmt("time=%.1fs", seconds);
  return out;
}

// 2 and 3 share one noise study over the default grid.
std::pair<Outcome, Outcome> noise() {
  const auto grid = default_noise_grid();
  const std::vector<NoiseRow> rows = run_noise_study(grid, 10000, kSeed, hardware_threads());
  const auto mean_at = [&](SolverId id, double si, double sg) {
    for (const NoiseRow& r : rows) {
      if (r.solver == id && r.cell.sigma_image_px == si && r.cell.sigma_gravity_deg == sg) {
        return r.mean_rotation_error_deg;
      }
    }
    return std::numeric_limits<double>::quiet_NaN();
  };

  Outcome ordering{true, ""};
  double worst_gravity = 0.0, best_four = std::numeric_limits<double>::infinity();
  for (SolverId id : kAllSolvers) {
    const double e = mean_at(id, 1.0, 0.0);
    if (needs_gravity(id)) worst_gravity = std::max(worst_gravity, e);
    else best_four = std::min(best_four, e);
    ordering.detail += fmt("%s=%.4g ", std::string(solver_name(id)).c_str(), e);
  }
  ordering.pass = worst_gravity < best_four;

  const std::array<double, 5> sg{0.0, 0.1, 1.0, 5.0, 10.0};
  const std::array<double, 4> si{0.0, 0.5, 1.0, 2.0};
  int pairs = 0, violations = 0;
  for (SolverId id : kAllSolvers) {
    if (!needs_gravity(id)) continue;
    for (double s : si) {
      for (std::size_t k = 0; k + 1 < sg.size(); ++k) {
        ++pairs;
        if (mean_at(id, s, sg[k + 1]) < mean_at(id, s, sg[k])) ++violations;
      }
    }
  }
  Outcome monotone{violations <= 0.05 * pairs, fmt("violations=%d/%d", violations, pairs)};
  return {ordering, monotone};
}

// 4
Outcome runtime() {
  const int f2 = iterations_needed(0.5, 2, 0.99, std::numeric_limits<int>::max());
  const int f4 = iterations_needed(0.5, 4, 0.99, std::numeric_limits<int>::max());
  const std::vector<double> ratios{0.5};
  const auto rows = run_runtime_study(ratios, kSeed, 100000);
  double worst_two = 0.0, best_four = std::numeric_limits<double>::infinity();
  std::string detail = fmt("factors=%d,%d ", f2, f4);
  for (const RuntimeRow& r : rows) {
    if (sample_size(r.solver) == 2) worst_two = std::max(worst_two, r.theoretical_us);
    else best_four = std::min(best_four, r.theoretical_us);
    detail += fmt("%s=%.3gus ", std::string(solver_name(r.solver)).c_str(), r.theoretical_us);
  }
  bool factors_ok = f2 == 17 && f4 == 72;
  for (const RuntimeRow& r : rows) factors_ok = factors_ok && r.iterations == (sample_size(r.solver) == 2 ? 17 : 72);
  return {factors_ok && worst_two < best_four, detail};
}

SyntheticInstance scene(int i, double sigma_gravity) {
  SyntheticConfig cfg;
  cfg.lines_per_direction = {20, 20, 20};
  cfg.outlier_fraction = 0.3;
  cfg.sigma_image_px = 1.0;
  cfg.sigma_gravity_deg = sigma_gravity;
  cfg.seed = kSeed;
  return generate_instance(cfg, static_cast<std::uint64_t>(i));
}

double scene_error(const SyntheticInstance& inst, std::optional<SolverId> solver, const GravityObservation& g,
                   LoMode mode, int i) {
  RansacConfig cfg;
  cfg.seed = static_cast<std::uint64_t>(i);
  cfg.lo_mode = mode;
  const auto lines = inst.lines();
  const RobustEstimate est = solver ? ransac(lines, *solver, g, cfg) : hybrid_ransac(lines, g, cfg);
  return aligned_rotation_error_deg(est.frame.rotation, inst.gt_frame.rotation);
}

InlierPartition partition_of(const SyntheticInstance& inst) {
  InlierPartition part;
  for (const LabeledSegment& s : inst.segments) {
    if (s.label >= 0) part.sets[static_cast<std::size_t>(s.label)].push_back(line_from_segment(s.segment, Vec2::Zero()));
  }
  return part;
}

// Refinement from ground truth on the true labels: the error no estimator
// using these lines can be expected to beat. Reported, not checked.
double labelled_floor(const SyntheticInstance& inst) {
  RefineOptions options;
  options.lock_vertical = true;
  const ManhattanFrame f = refine_ls(inst.gt_frame, partition_of(inst), options);
  return aligned_rotation_error_deg(f.rotation, inst.gt_frame.rotation);
}

// 5 and 6 share the scenes.
std::pair<Outcome, Outcome> scenes() {
  constexpr int kScenes = 100;
  std::vector<double> hybrid_prior(kScenes), s220(kScenes), s211(kScenes);
  std::vector<double> ours(kScenes), iter(kScenes), none(kScenes), floor(kScenes);
  parallel(kScenes, [&](int i) {
    const SyntheticInstance inst = scene(i, 5.0);
    const auto k = static_cast<std::size_t>(i);
    const GravityObservation prior = GravityObservation::prior(inst.gravity_noisy);
    const GravityObservation exact = GravityObservation::exact(inst.gravity_gt);
    hybrid_prior[k] = scene_error(inst, std::nullopt, prior, LoMode::Ours, i);
    s220[k] = scene_error(inst, SolverId::S220, prior, LoMode::Ours, i);
    s211[k] = scene_error(inst, SolverId::S211, prior, LoMode::Ours, i);
    ours[k] = scene_error(inst, std::nullopt, exact, LoMode::Ours, i);
    iter[k] = scene_error(inst, std::nullopt, exact, LoMode::Iter, i);
    none[k] = scene_error(inst, std::nullopt, exact, LoMode::None, i);
    floor[k] = labelled_floor(inst);
  });
  const double mh = median(hybrid_prior), m220 = median(s220), m211 = median(s211);
  const double mo = median(ours), mi = median(iter), mn = median(none);
  Outcome hybrid{mh <= m220 && mh <= m211 && mo < 1.0,
                 fmt("prior: hybrid=%.4f 220=%.4f 211=%.4f; exact: hybrid=%.4f", mh, m220, m211, mo)};
  Outcome lo{mo <= mi && mi <= mn && 2.0 * mo <= mn, fmt("ours=%.4f iter=%.4f none=%.4f labelled_floor=%.4f", mo, mi, mn, median(floor))};
  return {hybrid, lo};
}

// 7
Outcome nonminimal() {
  Rng counts = derived_rng(kSeed, 7);
  std::uniform_int_distribution<int> per_dir(2, 20);
  int ok = 0;
  const int trials = 1000;
  double worst_rot = 0.0, worst_f = 0.0;
  for (int i = 0; i < trials; ++i) {
    SyntheticConfig cfg;
    cfg.lines_per_direction = {per_dir(counts), per_dir(counts), per_dir(counts)};
    cfg.seed = kSeed + 7;
    const SyntheticInstance inst = generate_instance(cfg, static_cast<std::uint64_t>(i));
    const ManhattanFrame est = nonminimal_solve(partition_of(inst), ManhattanFrame{});
    const double rot = aligned_rotation_error_deg(est.rotation, inst.gt_frame.rotation);
    const double f = std::abs(est.focal - inst.gt_frame.focal) / inst.gt_frame.focal;
    worst_rot = std::max(worst_rot, rot);
    worst_f = std::max(worst_f, f);
    ok += rot < 1e-6 && f < 1e-8;
  }
  // focal_from_vps on VPs built with f = 600.
  Rng rng = derived_rng(kSeed, 77);
  double worst_600 = 0.0;
  for (int i = 0; i < 1000; ++i) {
    const ManhattanFrame frame{random_rotation(rng), 600.0};
    const double f = focal_from_vps(frame.vanishing_point(0), frame.vanishing_point(1), frame.vanishing_point(2));
    worst_600 = std::max(worst_600, std::abs(f - 600.0) / 600.0);
  }
  return {ok == trials && worst_600 < 1e-8,
          fmt("recovered=%d/%d max_rot=%.2e max_frel=%.2e f600_rel=%.2e", ok, trials, worst_rot, worst_f, worst_600)};
}

// 8
Outcome elimination() {
  int matched = 0;
  const int trials = 10000;
  for (int i = 0; i < trials; ++i) {
    SyntheticConfig cfg;
    cfg.lines_per_direction = {0, 1, 1};
    cfg.seed = kSeed + 8;
    const SyntheticInstance inst = generate_instance(cfg, static_cast<std::uint64_t>(i));
    const auto lines = inst.lines();
    const Direction3 g(inst.gravity_gt);
    const SolveResult a = solve_110g(lines[0], lines[1], g);
    const SolveResult b = solve_110g_quartic(lines[0], lines[1], g);
    const auto covers = [](const SolveResult& x, const SolveResult& y) {
      for (const ManhattanFrame& fx : x.frames) {
        bool found = false;
        for (const ManhattanFrame& fy : y.frames) {
          found = found || (std::abs(fx.focal - fy.focal) <= 1e-6 * fy.focal &&
                            aligned_rotation_error_deg(fx.rotation, fy.rotation) <= 1e-6);
        }
        if (!found) return false;
      }
      return true;
    };
    matched += a.ok() && b.ok() && covers(a, b) && covers(b, a);
  }
  return {matched == trials, fmt("matched=%d/%d", matched, trials)};
}

// 9
Outcome gradient() {
  Rng rng = derived_rng(kSeed, 9);
  std::normal_distribution<double> normal;
  std::uniform_real_distribution<double> uniform(0.5, 3.0);
  double worst = 0.0;
  for (int i = 0; i < 100; ++i) {
    SyntheticConfig cfg;
    cfg.lines_per_direction = {6, 6, 6};
    cfg.sigma_image_px = 1.0;
    cfg.seed = kSeed + 9;
    const SyntheticInstance inst = generate_instance(cfg, static_cast<std::uint64_t>(i));
    InlierPartition part = partition_of(inst);
    for (auto& set : part.sets) {
      for (auto& l : set) l = HomogeneousLine2(l.coeffs(), l.weight() * uniform(rng), l.anchor());
    }
    const Vec3 axis = Vec3(normal(rng), normal(rng), normal(rng)).normalized();
    const ManhattanFrame state{inst.gt_frame.rotation * axis_angle(axis, deg2rad(5.0 * normal(rng))),
                               inst.gt_frame.focal * std::exp(0.2 * normal(rng))};
    const Eigen::MatrixX4d analytic = refine_jacobian(state, part);
    Eigen::MatrixX4d numeric(analytic.rows(), 4);
    const double h = 1e-6;
    for (int k = 0; k < 4; ++k) {
      ChartStep step = ChartStep::Zero();
      step(k) = h;
      const Eigen::VectorXd plus = refine_residuals(apply_chart_step(state, step), part);
      step(k) = -h;
      const Eigen::VectorXd minus = refine_residuals(apply_chart_step(state, step), part);
      numeric.col(k) = (plus - minus) / (2.0 * h);
    }
    worst = std::max(worst, (numeric - analytic).norm() / analytic.norm());
  }
  return {worst < 1e-5, fmt("max_rel=%.2e", worst)};
}

// 10
struct CliRun {
  int code = -1;
  std::string out;
};

CliRun cli(const std::string& args) {
  CliRun r;
  FILE* pipe = popen((std::string(VPEST_CLI_PATH) + " " + args + " 2>/dev/null").c_str(), "r");
  if (!pipe) return r;
  char buf[4096];
  std::size_t n;
  while ((n = fread(buf, 1, sizeof buf, pipe)) > 0) r.out.append(buf, n);
  const int status = pclose(pipe);
  r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return r;
}

// Drops the measured timing columns of the runtime CSV, which are wall-clock
// values and cannot repeat.
std::string runtime_deterministic_columns(const std::string& csv) {
  std::istringstream in(csv);
  std::ostringstream out;
  std::string line;
  while (std::getline(in, line)) {
    std::istringstream fields(line);
    std::string f;
    std::vector<std::string> cols;
    while (std::getline(fields, f, ',')) cols.push_back(f);
    if (cols.size() >= 5) out << cols[0] << ',' << cols[1] << ',' << cols[2] << ',' << cols[3] << ',' << cols[4] << '\n';
    else out << line << '\n';
  }
  return out.str();
}

Outcome determinism() {
  const std::string scene = "/tmp/vpest_acceptance_scene.json";
  const std::string scene_prior = "/tmp/vpest_acceptance_scene_prior.json";
  std::vector<std::pair<std::string, std::string>> checks;  // (first, second) commands
  const std::vector<std::string> repeated = {
      "synth --seed 10 --out " + scene,
      "synth --seed 11 --gravity-quality prior --sigma-gravity 5 --out " + scene_prior,
      "synth --seed 12 --index 3",
      "estimate " + scene + " --seed 3",
      "estimate " + scene_prior + " --seed 3 --lo iter --eval",
      "estimate " + scene_prior + " --solver 211 --seed 4",
      "bench stability --n 1000 --seed 7",
      "bench noise --grid default --n 100 --seed 7",
      "bench noise --grid pp --n 100 --seed 7",
  };
  int identical = 0, total = 0;
  std::string failed;
  const auto compare = [&](const std::string& a, const std::string& b, bool runtime_filter) {
    const CliRun x = cli(a), y = cli(b);
    const bool same = runtime_filter
                          ? runtime_deterministic_columns(x.out) == runtime_deterministic_columns(y.out)
                          : x.out == y.out;
    ++total;
    if (x.code == 0 && y.code == 0 && same) ++identical;
    else failed += " [" + a + "]";
  };
  for (const std::string& cmd : repeated) compare(cmd, cmd, false);
  compare("bench stability --n 1000 --seed 7", "bench stability --n 1000 --seed 7 --threads max", false);
  compare("bench noise --grid default --n 100 --seed 7", "bench noise --grid default --n 100 --seed 7 --threads max",
          false);
  compare("bench noise --grid pp --n 100 --seed 7 --threads max", "bench noise --grid pp --n 100 --seed 7 --threads max",
          false);
  compare("bench runtime --outliers 0.25,0.5 --calls 2000", "bench runtime --outliers 0.25,0.5 --calls 2000", true);
  return {identical == total, fmt("identical=%d/%d", identical, total) + failed};
}

}  // namespace

int main() {
  int failures = 0;
  const auto report = [&](int id, const Outcome& o) {
    std::printf("criterion %2d: %s  %s\n", id, o.pass ? "PASS" : "FAIL", o.detail.c_str());
    std::fflush(stdout);
    failures += !o.pass;
  };
  report(1, stability());
  const auto [ordering, monotone] = noise();
  report(2, ordering);
  report(3, monotone);
  report(4, runtime());
  const auto [hybrid, lo] = scenes();
  report(5, hybrid);
  report(6, lo);
  report(7, nonminimal());
  report(8, elimination());
  report(9, gradient());
  report(10, determinism());
  std::printf("%d of 10 criteria passed\n", 10 - failures);
  return failures == 0 ? 0 : 1;
}
