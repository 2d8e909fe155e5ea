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

#include "vpest/scene_io.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <fstream>
#include <sstream>

#include "json.hpp"

namespace vpest {

namespace {

using nlohmann::json;

[[noreturn]] void schema_error(const std::string& what) { throw ParseError(what, 0, 0); }

void location_of(std::string_view text, std::size_t byte, int& line, int& column) {
  line = 1;
  column = 1;
  const std::size_t end = std::min(byte > 0 ? byte - 1 : 0, text.size());
  for (std::size_t i = 0; i < end; ++i) {
    if (text[i] == '\n') {
      ++line;
      column = 1;
    } else {
      ++column;
    }
  }
}

double number_at(const json& j, const std::string& where) {
  if (!j.is_number()) schema_error(where + " must be a number");
  const double x = j.get<double>();
  if (!std::isfinite(x)) schema_error(where + " must be finite");
  return x;
}

void check_dimensions(double width, double height) {
  if (!(width > 0.0 && height > 0.0 && std::isfinite(width) && std::isfinite(height))) {
    throw ParseError("image width and height must be positive", 0, 0);
  }
}

GravityQuality parse_quality(const std::string& s) {
  if (s == "exact") return GravityQuality::Exact;
  if (s == "prior") return GravityQuality::Prior;
  schema_error("gravity_quality must be \"exact\" or \"prior\"");
}

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

json vec_json(const Vec3& v) { return json::array({v(0), v(1), v(2)}); }

json index_lists(const std::array<std::vector<std::size_t>, 3>& sets) {
  json out = json::array();
  for (const auto& s : sets) out.push_back(s);
  return out;
}

}  // namespace

SceneInput parse_scene_json(std::string_view text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    int line = 0, column = 0;
    location_of(text, e.byte, line, column);
    throw ParseError(std::string("malformed JSON: ") + e.what(), line, column);
  }
  if (!doc.is_object()) schema_error("scene must be a JSON object");

  SceneInput scene;
  if (!doc.contains("width") || !doc.contains("height")) schema_error("scene needs width and height");
  scene.width = number_at(doc["width"], "width");
  scene.height = number_at(doc["height"], "height");
  check_dimensions(scene.width, scene.height);

  if (!doc.contains("segments") || !doc["segments"].is_array()) {
    schema_error("scene needs a segments array");
  }
  const json& segs = doc["segments"];
  for (std::size_t i = 0; i < segs.size(); ++i) {
    const json& s = segs[i];
    const std::string where = "segments[" + std::to_string(i) + "]";
    if (!s.is_array() || (s.size() != 4 && s.size() != 5)) {
      schema_error(where + " must hold 4 or 5 numbers");
    }
    LineSegment seg;
    seg.p = Vec2(number_at(s[0], where), number_at(s[1], where));
    seg.q = Vec2(number_at(s[2], where), number_at(s[3], where));
    if (s.size() == 5) seg.weight = number_at(s[4], where);
    scene.segments.push_back(seg);
  }

  if (doc.contains("gravity") && !doc["gravity"].is_null()) {
    const json& g = doc["gravity"];
    if (!g.is_array() || g.size() != 3) schema_error("gravity must hold 3 numbers");
    const Vec3 dir(number_at(g[0], "gravity"), number_at(g[1], "gravity"), number_at(g[2], "gravity"));
    if (!(dir.norm() > 0.0)) schema_error("gravity must be non-zero");
    GravityQuality quality = GravityQuality::Exact;
    if (doc.contains("gravity_quality")) {
      if (!doc["gravity_quality"].is_string()) schema_error("gravity_quality must be a string");
      quality = parse_quality(doc["gravity_quality"].get<std::string>());
    }
    scene.gravity = quality == GravityQuality::Exact ? GravityObservation::exact(dir)
                                                     : GravityObservation::prior(dir);
  }

  if (doc.contains("gt") && !doc["gt"].is_null()) {
    const json& gt = doc["gt"];
    if (!gt.is_object() || !gt.contains("rotation") || !gt.contains("focal")) {
      schema_error("gt needs rotation and focal");
    }
    const json& r = gt["rotation"];
    if (!r.is_array() || r.size() != 9) schema_error("gt.rotation must hold 9 numbers");
    ManhattanFrame frame;
    for (int i = 0; i < 9; ++i) frame.rotation(i / 3, i % 3) = number_at(r[static_cast<std::size_t>(i)], "gt.rotation");
    frame.focal = number_at(gt["focal"], "gt.focal");
    if (!is_valid_frame(frame, 1e-6)) schema_error("gt must be a rotation with positive focal");
    scene.gt = frame;
  }
  return scene;
}

SceneInput parse_scene_csv(std::string_view text, double width, double height) {
  check_dimensions(width, height);
  SceneInput scene;
  scene.width = width;
  scene.height = height;
  int line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const std::size_t eol = std::min(text.find('\n', pos), text.size());
    const std::string_view raw = text.substr(pos, eol - pos);
    pos = eol + 1;
    ++line_no;
    const std::string_view row = trim(raw);
    if (row.empty() || row.front() == '#') continue;

    double v[4];
    std::size_t field_start = 0;
    for (int k = 0; k < 4; ++k) {
      const std::size_t comma = k < 3 ? row.find(',', field_start) : row.size();
      const int column = static_cast<int>(raw.find(row) + field_start) + 1;
      if (comma == std::string_view::npos) {
        throw ParseError("expected 4 comma-separated values", line_no, column);
      }
      const std::string field(trim(row.substr(field_start, comma - field_start)));
      std::size_t used = 0;
      try {
        v[k] = std::stod(field, &used);
      } catch (const std::exception&) {
        used = 0;
      }
      if (used == 0 || used != field.size() || !std::isfinite(v[k])) {
        throw ParseError("invalid number '" + field + "'", line_no, column);
      }
      field_start = comma + 1;
    }
    LineSegment seg;
    seg.p = Vec2(v[0], v[1]);
    seg.q = Vec2(v[2], v[3]);
    scene.segments.push_back(seg);
  }
  return scene;
}

SceneInput load_scene(const std::string& path, std::optional<double> width,
                      std::optional<double> height) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::IoError, "cannot open " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  const std::string text = buf.str();
  const auto first = text.find_first_not_of(" \t\r\n");
  if (first != std::string::npos && text[first] == '{') return parse_scene_json(text);
  if (!width || !height) {
    throw ParseError("CSV input needs an image width and height", 0, 0);
  }
  return parse_scene_csv(text, *width, *height);
}

std::string scene_to_json(const SceneInput& scene) {
  json doc;
  doc["width"] = scene.width;
  doc["height"] = scene.height;
  json segs = json::array();
  for (const LineSegment& s : scene.segments) {
    json row = json::array({s.p(0), s.p(1), s.q(0), s.q(1)});
    if (s.weight) row.push_back(*s.weight);
    segs.push_back(std::move(row));
  }
  doc["segments"] = std::move(segs);
  if (scene.gravity.present()) {
    doc["gravity"] = vec_json(scene.gravity.direction);
    doc["gravity_quality"] = scene.gravity.quality == GravityQuality::Exact ? "exact" : "prior";
  }
  if (scene.gt) {
    json r = json::array();
    for (int i = 0; i < 9; ++i) r.push_back(scene.gt->rotation(i / 3, i % 3));
    doc["gt"] = {{"rotation", r}, {"focal", scene.gt->focal}};
  }
  return doc.dump(2) + "\n";
}

SceneInput scene_from_instance(const SyntheticInstance& inst, double width, double height,
                               GravityQuality quality, bool noisy_gravity) {
  check_dimensions(width, height);
  SceneInput scene;
  scene.width = width;
  scene.height = height;
  const Vec2 center(0.5 * width, 0.5 * height);
  for (const LabeledSegment& s : inst.segments) {
    LineSegment seg = s.segment;
    seg.p += center;
    seg.q += center;
    scene.segments.push_back(seg);
  }
  const Vec3 g = noisy_gravity ? inst.gravity_noisy : inst.gravity_gt;
  if (quality == GravityQuality::Exact) scene.gravity = GravityObservation::exact(g);
  if (quality == GravityQuality::Prior) scene.gravity = GravityObservation::prior(g);
  scene.gt = inst.gt_frame;
  return scene;
}

SceneEstimate estimate_scene(const SceneInput& scene, const EstimateOptions& options) {
  const auto start = std::chrono::steady_clock::now();
  const Vec2 size(scene.width, scene.height);
  std::vector<HomogeneousLine2> lines;
  std::vector<std::size_t> source;
  for (std::size_t i = 0; i < scene.segments.size(); ++i) {
    try {
      lines.push_back(line_from_segment(scene.segments[i], size));
      source.push_back(i);
    } catch (const Error& e) {
      if (e.code() != ErrorCode::DegenerateSegment) throw;
    }
  }
  const std::size_t needed = options.solver ? static_cast<std::size_t>(sample_size(*options.solver)) : 4;
  if (lines.size() < std::max<std::size_t>(needed, 2)) {
    throw Error(ErrorCode::InsufficientLines,
                "need at least " + std::to_string(std::max<std::size_t>(needed, 2)) +
                    " non-degenerate segments, got " + std::to_string(lines.size()));
  }

  SceneEstimate out;
  out.robust = options.solver ? ransac(lines, *options.solver, scene.gravity, options.ransac)
                              : hybrid_ransac(lines, scene.gravity, options.ransac);
  for (std::size_t k = 0; k < 3; ++k) {
    for (std::size_t j : out.robust.inlier_indices[k]) out.segment_indices[k].push_back(source[j]);
  }
  if (options.evaluate) {
    if (!scene.gt) throw Error(ErrorCode::InvalidArgument, "evaluation needs ground truth in the scene");
    out.metrics = evaluate(out.robust.frame, *scene.gt);
  }
  out.elapsed_ms =
      std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
  return out;
}

std::string estimate_to_json(const SceneEstimate& estimate, bool include_timings) {
  const RobustEstimate& r = estimate.robust;
  json doc;
  json rot = json::array();
  for (int i = 0; i < 9; ++i) rot.push_back(r.frame.rotation(i / 3, i % 3));
  doc["rotation"] = std::move(rot);
  doc["focal_px"] = r.frame.focal;
  json vps = json::array();
  for (int i = 0; i < 3; ++i) vps.push_back(vec_json(r.frame.vanishing_point(i)));
  doc["vps"] = std::move(vps);
  doc["inlier_indices"] = index_lists(estimate.segment_indices);
  doc["score"] = r.score;
  doc["iterations"] = r.iterations_run;
  json draws = json::object();
  for (SolverId id : kAllSolvers) draws[std::string(solver_name(id))] = r.solver_draws[static_cast<std::size_t>(solver_index(id))];
  doc["solver_draws"] = std::move(draws);
  if (estimate.metrics) {
    doc["eval"] = {{"rotation_error_deg", estimate.metrics->rotation_error_deg},
                   {"vp_error_deg", estimate.metrics->vp_error_deg},
                   {"focal_abs_error_px", estimate.metrics->focal_abs_error},
                   {"focal_rel_error", estimate.metrics->focal_rel_error}};
  }
  if (include_timings) doc["timings_ms"] = {{"estimate", estimate.elapsed_ms}};
  return doc.dump(2) + "\n";
}

}  // namespace vpest
