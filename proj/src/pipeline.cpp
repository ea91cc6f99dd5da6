// Copyright 2026 The Endovo Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "endovo/pipeline.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <map>
#include <numeric>

#include "endovo/error.hpp"
#include "endovo/imgproc.hpp"
#include "endovo/log.hpp"
#include "json_util.hpp"

namespace endovo {

using detail::Json;
using detail::ObjectReader;

namespace {

constexpr double kBytesPerMiB = 1024.0 * 1024.0;
constexpr double kReferenceTrackingMs = 300.0;
constexpr double kReferenceFusionSeconds = 7.0;
constexpr int kReferenceFusionViews = 1200;
// Trajectory timestamps are printed with microsecond resolution.
constexpr double kTimestampTolerance = 5e-6;

std::string dump(const Json& j) { return j.dump(2) + "\n"; }

Intrinsics read_intrinsics(ObjectReader& r) {
  Intrinsics out;
  out.camera.fx = r.value<double>("fx");
  out.camera.fy = r.value<double>("fy");
  out.camera.cx = r.value<double>("cx");
  out.camera.cy = r.value<double>("cy");
  out.camera.width = r.value<int>("width");
  out.camera.height = r.value<int>("height");
  r.optional("depth_scale", out.depth_scale);
  r.finish();
  try {
    out.camera.validate();
  } catch (const Error& e) {
    throw Error(ErrorCode::kConfig, std::string("intrinsics: ") + e.what());
  }
  if (!(out.depth_scale > 0.0)) {
    throw Error(ErrorCode::kConfig, "intrinsics: depth_scale must be > 0");
  }
  return out;
}

Json pose_json(const Pose& pose) {
  const Eigen::Quaterniond q = pose.quaternion();
  return Json{{"position", detail::to_json(pose.translation())},
              {"quaternion", Json::array({q.x(), q.y(), q.z(), q.w()})}};
}

Json metrics_json(const DepthMetrics& m) {
  return Json{{"abs_rel", m.abs_rel},   {"sq_rel", m.sq_rel}, {"rmse", m.rmse},
              {"rmse_log", m.rmse_log}, {"delta1", m.delta1}, {"delta2", m.delta2},
              {"delta3", m.delta3},     {"n_pixels", m.n_pixels},
              {"n_log_excluded", m.n_log_excluded}};
}

DepthMetrics in_units(DepthMetrics m, const std::string& units) {
  if (units == "mm") {
    m.rmse *= 1000.0;
    m.sq_rel *= 1000.0;
  }
  return m;
}

std::string csv_row(const std::string& name, const DepthMetrics& m) {
  char buf[512];
  std::snprintf(buf, sizeof(buf), "%s,%.10g,%.10g,%.10g,%.10g,%.10g,%.10g,%.10g,%lld\n",
                name.c_str(), m.abs_rel, m.sq_rel, m.rmse, m.rmse_log, m.delta1,
                m.delta2, m.delta3, m.n_pixels);
  return buf;
}

std::vector<std::string> list_pngs(const fs::path& dir) {
  if (!fs::is_directory(dir)) {
    throw Error(ErrorCode::kIo, "not a directory: " + dir.string());
  }
  std::vector<std::string> names;
  for (const auto& entry : fs::directory_iterator(dir)) {
    if (entry.is_regular_file() && entry.path().extension() == ".png") {
      names.push_back(entry.path().filename().string());
    }
  }
  std::sort(names.begin(), names.end());
  return names;
}

std::string join_names(const std::vector<std::string>& names) {
  std::string out;
  for (const auto& n : names) out += (out.empty() ? "" : ", ") + n;
  return out;
}

fs::path sibling(const fs::path& path, const std::string& suffix) {
  return path.parent_path() / (path.stem().string() + suffix);
}

}  // namespace

Intrinsics parse_intrinsics(const std::string& json_text) {
  const Json j = detail::parse_json(json_text, "intrinsics");
  ObjectReader r(j, "intrinsics");
  return read_intrinsics(r);
}

Intrinsics load_intrinsics(const fs::path& path) {
  return parse_intrinsics(read_text_file(path));
}

std::string intrinsics_to_json(const Intrinsics& in) {
  const Json j{{"fx", in.camera.fx},       {"fy", in.camera.fy},
               {"cx", in.camera.cx},       {"cy", in.camera.cy},
               {"width", in.camera.width}, {"height", in.camera.height},
               {"depth_scale", in.depth_scale}};
  return dump(j);
}

SequenceManifest load_manifest(const fs::path& path) {
  const Json j = detail::parse_json(read_text_file(path), path.string());
  ObjectReader r(j, "manifest");
  SequenceManifest m;
  m.root = path.parent_path();
  auto resolve = [&](const std::string& p) {
    const fs::path rel(p);
    return rel.is_absolute() ? rel : m.root / rel;
  };

  const Json& intr = r.require("intrinsics");
  if (intr.is_string()) {
    const fs::path ipath = resolve(intr.get<std::string>());
    if (!fs::exists(ipath)) {
      throw Error(ErrorCode::kConfig,
                  "manifest: intrinsics file does not exist: " + ipath.string());
    }
    m.intrinsics = load_intrinsics(ipath);
  } else {
    ObjectReader ir(intr, "manifest.intrinsics");
    m.intrinsics = read_intrinsics(ir);
  }

  const Json& frames = r.require("frames");
  if (!frames.is_array()) r.fail("frames", "expected an array");
  r.finish();
  if (frames.empty()) throw Error(ErrorCode::kConfig, "manifest: no frames");

  const PinholeCamera& cam = m.intrinsics.camera;
  for (std::size_t i = 0; i < frames.size(); ++i) {
    const std::string where = "manifest.frames[" + std::to_string(i) + "]";
    ObjectReader fr(frames[i], where);
    ManifestFrame f;
    f.timestamp = fr.value<double>("timestamp");
    f.rgb = resolve(fr.value<std::string>("rgb"));
    f.depth = resolve(fr.value<std::string>("depth"));
    fr.finish();
    if (!m.frames.empty() && !(f.timestamp > m.frames.back().timestamp)) {
      throw Error(ErrorCode::kConfig, where + ": timestamps must increase");
    }
    for (const fs::path* p : {&f.rgb, &f.depth}) {
      if (!fs::is_regular_file(*p)) {
        throw Error(ErrorCode::kConfig,
                    where + ": missing " + (p == &f.rgb ? "rgb" : "depth") +
                        " file " + p->string());
      }
      const auto [w, h] = png_size(*p);
      if (w != cam.width || h != cam.height) {
        throw Error(ErrorCode::kConfig, where + ": " + p->string() + " is " +
                                            std::to_string(w) + "x" +
                                            std::to_string(h) + ", intrinsics say " +
                                            std::to_string(cam.width) + "x" +
                                            std::to_string(cam.height));
      }
    }
    m.frames.push_back(std::move(f));
  }
  return m;
}

PseudoRgbdFrame load_frame(const SequenceManifest& manifest, std::size_t index) {
  const ManifestFrame& f = manifest.frames.at(index);
  PseudoRgbdFrame out;
  out.timestamp = f.timestamp;
  RgbImage rgb = read_png_rgb(f.rgb);
  out.intensity = to_grayscale(rgb);
  out.color = std::move(rgb);
  out.depth = depth_from_raw(read_png_u16(f.depth), manifest.intrinsics.depth_scale);
  return out;
}

void PipelineConfig::validate() const {
  tracker.validate();
  fusion.validate();
  if (eval.units != "m" && eval.units != "mm") {
    throw Error(ErrorCode::kConfig, "eval.units must be \"m\" or \"mm\"");
  }
}

PipelineConfig parse_config(const std::string& json_text) {
  const Json j = detail::parse_json(json_text, "config");
  ObjectReader r(j, "");
  PipelineConfig cfg;

  if (const Json* t = r.find("tracker")) {
    ObjectReader tr(*t, "tracker");
    TrackerConfig& c = cfg.tracker;
    tr.optional("pyramid_levels", c.pyramid_levels);
    tr.optional("gamma", c.gamma);
    tr.optional("max_iterations", c.max_iterations);
    tr.optional("convergence_eps", c.convergence_eps);
    tr.optional("keyframe_ratio", c.keyframe_ratio);
    tr.optional("min_valid_pixels", c.min_valid_pixels);
    tr.optional("min_overlap", c.min_overlap);
    tr.optional("min_inlier_ratio", c.min_inlier_ratio);
    tr.optional("failure_patience", c.failure_patience);
    tr.finish();
  }

  if (const Json* f = r.find("fusion")) {
    ObjectReader fr(*f, "fusion");
    FusionConfig& c = cfg.fusion;
    fr.optional("voxel_size", c.voxel_size);
    double trunc = 0.0;
    if (const Json* v = fr.find("trunc"); v && !v->is_null()) {
      fr.optional("trunc", trunc);
      c.trunc = trunc;
    }
    double cap_mb = c.memory_cap_bytes / kBytesPerMiB;
    fr.optional("memory_cap_mb", cap_mb);
    if (!(cap_mb > 0.0) || !std::isfinite(cap_mb)) {
      fr.fail("memory_cap_mb", "must be a positive number");
    }
    c.memory_cap_bytes = static_cast<std::size_t>(std::llround(cap_mb * kBytesPerMiB));
    if (const Json* b = fr.find("bounds"); b && !b->is_null()) {
      ObjectReader br(*b, "fusion.bounds");
      c.bounds = VolumeBounds{br.vec3("min"), br.vec3("max")};
      br.finish();
    }
    fr.optional("use_color", c.use_color);
    fr.finish();
  }

  if (const Json* e = r.find("eval")) {
    ObjectReader er(*e, "eval");
    if (const Json* s = er.find("scale"); s && !s->is_null()) {
      const auto text = er.value<std::string>("scale");
      const auto mode = parse_scale_mode(text);
      if (!mode) er.fail("scale", "unknown scale mode '" + text + "'");
      cfg.eval.scale = *mode;
    }
    er.optional("units", cfg.eval.units);
    er.finish();
  }

  r.finish();
  cfg.validate();
  return cfg;
}

PipelineConfig load_config(const fs::path& path) {
  return parse_config(read_text_file(path));
}

std::string config_to_json(const PipelineConfig& cfg) {
  const TrackerConfig& t = cfg.tracker;
  const FusionConfig& f = cfg.fusion;
  Json bounds = nullptr;
  if (f.bounds) {
    bounds = Json{{"min", detail::to_json(f.bounds->min)},
                  {"max", detail::to_json(f.bounds->max)}};
  }
  const Json j{
      {"tracker",
       {{"pyramid_levels", t.pyramid_levels},
        {"gamma", t.gamma},
        {"max_iterations", t.max_iterations},
        {"convergence_eps", t.convergence_eps},
        {"keyframe_ratio", t.keyframe_ratio},
        {"min_valid_pixels", t.min_valid_pixels},
        {"min_overlap", t.min_overlap},
        {"min_inlier_ratio", t.min_inlier_ratio},
        {"failure_patience", t.failure_patience}}},
      {"fusion",
       {{"voxel_size", f.voxel_size},
        {"trunc", f.trunc ? Json(*f.trunc) : Json(nullptr)},
        {"memory_cap_mb", f.memory_cap_bytes / kBytesPerMiB},
        {"bounds", bounds},
        {"use_color", f.use_color}}},
      {"eval", {{"scale", to_string(cfg.eval.scale)}, {"units", cfg.eval.units}}}};
  return dump(j);
}

TrackSummary cmd_track(const fs::path& manifest_path, const PipelineConfig& cfg,
                       const fs::path& out_dir) {
  cfg.validate();
  const SequenceManifest manifest = load_manifest(manifest_path);
  fs::create_directories(out_dir);
  write_text_file(out_dir / "config.json", config_to_json(cfg));

  Odometry odometry(manifest.intrinsics.camera, cfg.tracker);
  for (std::size_t i = 0; i < manifest.frames.size(); ++i) {
    odometry.add_frame(load_frame(manifest, i));
    if (odometry.failed()) break;
  }
  const OdometryResult result = odometry.take_result();

  std::vector<TumEntry> tum;
  tum.reserve(result.trajectory.size());
  for (const TrajectoryEntry& e : result.trajectory) {
    tum.push_back({e.timestamp, e.pose_world});
  }
  write_tum(out_dir / "trajectory.txt", tum);

  Json keyframes = Json::array();
  for (const Keyframe& kf : result.keyframes) {
    keyframes.push_back({{"frame_id", kf.id()},
                         {"timestamp", manifest.frames[kf.id()].timestamp},
                         {"pose", pose_json(kf.pose_world())}});
  }
  write_text_file(out_dir / "keyframes.json", dump(Json{{"keyframes", keyframes}}));

  TrackSummary summary;
  summary.frames = static_cast<int>(manifest.frames.size());
  summary.frames_processed = static_cast<int>(result.trajectory.size());
  summary.keyframes = static_cast<int>(result.keyframes.size());
  summary.failure_frame = result.failure_frame;

  Json per_frame = Json::array();
  std::vector<double> ms;
  for (const FrameDiagnostics& d : result.diagnostics) {
    per_frame.push_back({{"frame_id", d.frame_id},
                         {"timestamp", manifest.frames[d.frame_id].timestamp},
                         {"keyframe_id", d.keyframe_id},
                         {"new_keyframe", d.new_keyframe},
                         {"converged", d.converged},
                         {"overlap_ratio", d.overlap_ratio},
                         {"inlier_ratio", d.inlier_ratio},
                         {"final_cost", d.final_cost},
                         {"iterations", d.iterations}});
    ms.push_back(d.tracking_ms);
  }
  const Json diagnostics{
      {"frames", summary.frames},
      {"frames_processed", summary.frames_processed},
      {"keyframes", summary.keyframes},
      {"completed", !summary.failure_frame.has_value()},
      {"failure_frame",
       summary.failure_frame ? Json(*summary.failure_frame) : Json(nullptr)},
      {"frames_until_failure", frames_until_failure(result)},
      {"per_frame", per_frame}};
  write_text_file(out_dir / "diagnostics.json", dump(diagnostics));

  summary.mean_tracking_ms =
      ms.empty() ? 0.0 : std::accumulate(ms.begin(), ms.end(), 0.0) / ms.size();
  const Json timing{{"per_frame_ms", ms},
                    {"mean_ms", summary.mean_tracking_ms},
                    {"median_ms", ms.empty() ? 0.0 : median(ms)},
                    {"max_ms", ms.empty() ? 0.0 : *std::max_element(ms.begin(), ms.end())},
                    {"reference_ms", kReferenceTrackingMs},
                    {"ratio_to_reference", summary.mean_tracking_ms / kReferenceTrackingMs}};
  write_text_file(out_dir / "timing.json", dump(timing));

  if (summary.failure_frame) {
    log(LogLevel::kWarn, "tracking failed at frame %d", *summary.failure_frame);
  } else {
    log(LogLevel::kInfo, "tracked %d frames, %d keyframes, %.1f ms/frame",
        summary.frames_processed, summary.keyframes, summary.mean_tracking_ms);
  }
  return summary;
}

FuseSummary cmd_fuse(const fs::path& manifest_path, const fs::path& keyframes_path,
                     const fs::path& trajectory_path, const PipelineConfig& cfg,
                     const fs::path& out_mesh) {
  cfg.validate();
  const SequenceManifest manifest = load_manifest(manifest_path);

  const Json kj = detail::parse_json(read_text_file(keyframes_path), keyframes_path.string());
  ObjectReader kr(kj, "keyframes");
  const Json& list = kr.require("keyframes");
  if (!list.is_array()) kr.fail("keyframes", "expected an array");
  kr.finish();
  std::vector<int> ids;
  for (std::size_t i = 0; i < list.size(); ++i) {
    ObjectReader er(list[i], "keyframes[" + std::to_string(i) + "]");
    const int id = er.value<int>("frame_id");
    er.find("timestamp");
    er.find("pose");
    er.finish();
    if (id < 0 || id >= static_cast<int>(manifest.frames.size())) {
      throw Error(ErrorCode::kConfig, "keyframe frame_id " + std::to_string(id) +
                                          " is outside the manifest");
    }
    ids.push_back(id);
  }
  if (ids.empty()) throw Error(ErrorCode::kInvalidArgument, "fuse: no keyframes");

  const std::vector<TumEntry> trajectory = read_tum(trajectory_path);
  std::vector<PseudoRgbdFrame> frames;
  std::vector<FusionView> views;
  frames.reserve(ids.size());
  views.reserve(ids.size());
  for (int id : ids) {
    const double t = manifest.frames[id].timestamp;
    const auto it = std::min_element(
        trajectory.begin(), trajectory.end(), [&](const TumEntry& a, const TumEntry& b) {
          return std::abs(a.timestamp - t) < std::abs(b.timestamp - t);
        });
    if (it == trajectory.end() || std::abs(it->timestamp - t) > kTimestampTolerance) {
      char buf[160];
      std::snprintf(buf, sizeof(buf), "trajectory has no pose for keyframe %d (t=%.6f)",
                    id, t);
      throw Error(ErrorCode::kConfig, buf);
    }
    frames.push_back(load_frame(manifest, id));
    FusionView view;
    view.depth = &frames.back().depth;
    view.color = cfg.fusion.use_color && frames.back().color ? &*frames.back().color
                                                              : nullptr;
    view.camera = manifest.intrinsics.camera;
    view.pose_world = it->pose;
    views.push_back(view);
  }

  FuseSummary summary;
  const TriangleMesh mesh = fuse_views(views, cfg.fusion, &summary.stats);
  summary.vertex_count = mesh.vertices.size();
  summary.triangle_count = mesh.triangles.size();
  write_ply(out_mesh, mesh);

  const FusionStats& s = summary.stats;
  const Json report{{"keyframes", ids},
                    {"dims", Json::array({s.dims[0], s.dims[1], s.dims[2]})},
                    {"voxel_count", s.voxel_count},
                    {"voxel_size", cfg.fusion.voxel_size},
                    {"trunc", cfg.fusion.truncation()},
                    {"views_integrated", s.views_integrated},
                    {"vertex_count", summary.vertex_count},
                    {"triangle_count", summary.triangle_count}};
  write_text_file(sibling(out_mesh, "_report.json"), dump(report));

  const double projected = s.views_integrated
                               ? s.integration_seconds * kReferenceFusionViews /
                                     s.views_integrated
                               : 0.0;
  const Json timing{{"integration_s", s.integration_seconds},
                    {"extraction_s", s.extraction_seconds},
                    {"views_integrated", s.views_integrated},
                    {"projected_s_per_1200_views", projected},
                    {"reference_s_per_1200_views", kReferenceFusionSeconds}};
  write_text_file(sibling(out_mesh, "_timing.json"), dump(timing));
  log(LogLevel::kInfo, "fused %d views into %zu triangles in %.2f s", s.views_integrated,
      summary.triangle_count, s.integration_seconds);
  return summary;
}

EvalSummary cmd_eval(const fs::path& pred_dir, const fs::path& gt_dir,
                     const EvalConfig& cfg, double depth_scale,
                     const fs::path& out_json) {
  if (cfg.units != "m" && cfg.units != "mm") {
    throw Error(ErrorCode::kConfig, "eval.units must be \"m\" or \"mm\"");
  }
  if (!(depth_scale > 0.0)) {
    throw Error(ErrorCode::kInvalidArgument, "depth_scale must be > 0");
  }
  const std::vector<std::string> pred = list_pngs(pred_dir);
  const std::vector<std::string> gt = list_pngs(gt_dir);
  std::vector<std::string> pred_only, gt_only;
  std::set_difference(pred.begin(), pred.end(), gt.begin(), gt.end(),
                      std::back_inserter(pred_only));
  std::set_difference(gt.begin(), gt.end(), pred.begin(), pred.end(),
                      std::back_inserter(gt_only));
  if (!pred_only.empty() || !gt_only.empty()) {
    throw Error(ErrorCode::kInvalidArgument,
                "unmatched depth files; only in pred: [" + join_names(pred_only) +
                    "]; only in gt: [" + join_names(gt_only) + "]");
  }
  if (pred.empty()) throw Error(ErrorCode::kInvalidArgument, "no depth images to compare");

  EvalSummary summary;
  summary.names = pred;
  for (const std::string& name : pred) {
    const DepthImage p = depth_from_raw(read_png_u16(pred_dir / name), depth_scale);
    const DepthImage g = depth_from_raw(read_png_u16(gt_dir / name), depth_scale);
    try {
      summary.per_image.push_back(depth_metrics(p, g, cfg.scale));
    } catch (const Error& e) {
      throw Error(e.code(), name + ": " + e.what());
    }
  }
  summary.aggregate = aggregate_metrics(summary.per_image);

  Json images = Json::array();
  std::string csv = "name,abs_rel,sq_rel,rmse,rmse_log,delta1,delta2,delta3,n_pixels\n";
  for (std::size_t i = 0; i < pred.size(); ++i) {
    const DepthMetrics m = in_units(summary.per_image[i], cfg.units);
    Json entry{{"name", pred[i]}};
    entry.update(metrics_json(m));
    images.push_back(std::move(entry));
    csv += csv_row(pred[i], m);
  }
  const DepthMetrics agg = in_units(summary.aggregate, cfg.units);
  csv += csv_row("mean", agg);
  const Json report{{"scale", to_string(cfg.scale)},
                    {"units", cfg.units},
                    {"depth_scale", depth_scale},
                    {"images", images},
                    {"aggregate", metrics_json(agg)}};
  write_text_file(out_json, dump(report));
  write_text_file(fs::path(out_json).replace_extension(".csv"), csv);
  return summary;
}

void write_sequence(const SyntheticSequence& seq, const Intrinsics& intrinsics,
                    const fs::path& out_dir) {
  fs::create_directories(out_dir / "frames");
  fs::create_directories(out_dir / "depth");
  Json frames = Json::array();
  std::vector<TumEntry> gt;
  for (std::size_t i = 0; i < seq.frames.size(); ++i) {
    const PseudoRgbdFrame& f = seq.frames[i];
    char name[32];
    std::snprintf(name, sizeof(name), "%06zu.png", i);
    const std::string rgb = std::string("frames/") + name;
    const std::string depth = std::string("depth/") + name;
    write_png_rgb(out_dir / rgb, f.color ? *f.color : gray_to_rgb(f.intensity));
    write_png_u16(out_dir / depth, depth_to_raw(f.depth, intrinsics.depth_scale));
    frames.push_back({{"timestamp", f.timestamp}, {"rgb", rgb}, {"depth", depth}});
    gt.push_back({f.timestamp, seq.ground_truth.at(i)});
  }
  write_text_file(out_dir / "intrinsics.json", intrinsics_to_json(intrinsics));
  write_tum(out_dir / "groundtruth.txt", gt);
  write_text_file(out_dir / "manifest.json",
                  dump(Json{{"intrinsics", "intrinsics.json"}, {"frames", frames}}));
}

int cmd_synth(const fs::path& scene_path, const fs::path& out_dir, std::uint64_t seed) {
  const SceneDescription desc = parse_scene(read_text_file(scene_path));
  const SyntheticSequence seq = generate_sequence(desc.scene, desc.camera, desc.trajectory,
                                                  desc.noise, seed, desc.fps);
  write_sequence(seq, Intrinsics{desc.camera, desc.depth_scale}, out_dir);
  log(LogLevel::kInfo, "wrote %zu frames to %s", seq.frames.size(), out_dir.c_str());
  return static_cast<int>(seq.frames.size());
}

}  // namespace endovo
