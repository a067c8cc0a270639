// Command-line front end: render, calibrate, plan, optimize-path, scan,
// evaluate, export-scene.

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <numbers>
#include <sstream>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "turbid/calibration.hpp"
#include "turbid/errors.hpp"
#include "turbid/image_io.hpp"
#include "turbid/scene.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace turbid;

namespace {

struct Common {
  std::string scene;
  std::uint64_t seed = 0;
  bool seed_given = false;
  std::optional<double> beta_override;
  bool no_ambient = false;
  std::string out;
};

std::string read_file(const fs::path& p) {
  std::ifstream in(p);
  if (!in) throw DataError("cannot open " + p.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const fs::path& p, const std::string& text) {
  std::ofstream out(p);
  out << text;
  if (!out) throw DataError("cannot write " + p.string());
}

void write_json(const fs::path& p, const json& j) { write_file(p, j.dump(2) + "\n"); }

Scene load(const Common& c) {
  if (c.scene.empty()) throw CLI::RequiredError("--scene");
  SceneConfig cfg = load_scene_config(c.scene);
  for (const auto& f : cfg.defaulted) std::cerr << "default: " << f << "\n";
  if (c.beta_override) cfg.medium.beta = *c.beta_override;
  if (c.no_ambient) cfg.medium.ambient_enabled = false;
  return build_scene(cfg);
}

std::uint64_t seed_of(const Common& c, const Scene& s) { return c.seed_given ? c.seed : s.config.seed; }

fs::path out_dir(const Common& c, const char* fallback) {
  fs::path p = c.out.empty() ? fs::path(fallback) : fs::path(c.out);
  fs::create_directories(p);
  return p;
}

json pose_json(const Pose& p) {
  const Vec3 t = p.tilts();
  const auto& q = p.orientation();
  return {{"position", {p.position().x(), p.position().y(), p.position().z()}},
          {"orientation", {q.w(), q.x(), q.y(), q.z()}},
          {"tilts", {t.x(), t.y(), t.z()}}};
}

json view_json(const JointView& v) {
  return {{"t", v.t}, {"camera", pose_json(v.camera)}, {"light", pose_json(v.light)}};
}

json gain_json(const GainReport& r, const TextureLayout& layout) {
  json faces = json::array();
  for (std::size_t k = 0; k < r.face_gain.size(); ++k) {
    faces.push_back({{"face", k},
                     {"patches", layout.patch_count(k)},
                     {"quality", r.face_quality[k]},
                     {"gain", r.face_gain[k]},
                     {"observed", !r.unobserved[k]}});
  }
  return {{"total_nats", r.total}, {"total_bits", r.total_bits()}, {"faces", faces}};
}

double mean_over(const ImageD& img, const ProjectionMap& proj, bool faces_only) {
  double s = 0.0;
  int n = 0;
  for (int p = 0; p < img.size(); ++p) {
    if (faces_only && proj.face(p) < 0) continue;
    s += img[p];
    ++n;
  }
  return n ? s / n : 0.0;
}

JointView default_view(const Scene& s) {
  if (s.config.waypoints.empty()) throw DataError("scene has no waypoints; pass --view");
  return rig_view(*s.world.surface, s.config.waypoints.front(), s.config.planner.initial_baseline, 0);
}

// ------------------------------------------------------------------ render

int cmd_render(const Common& c, const std::string& view_file) {
  const Scene s = load(c);
  const JointView view = view_file.empty() ? default_view(s) : parse_view(read_file(view_file));
  const std::optional<std::uint64_t> seed =
      c.seed_given ? std::optional<std::uint64_t>(c.seed) : std::nullopt;
  const Frame f = render(*s.world.surface, s.world.optics, view, seed);
  const fs::path dir = out_dir(c, "render");
  ImageD rho_e(f.irradiance.width(), f.irradiance.height());
  const auto& albedo = s.world.mesh().albedo();
  for (int p = 0; p < rho_e.size(); ++p) {
    const int face = f.projection.face(p);
    rho_e[p] = face >= 0 ? albedo[static_cast<std::size_t>(face)] * f.irradiance[p] : 0.0;
  }
  const double white = s.world.optics.camera.full_well;
  write_pfm(dir / "intensity.pfm", f.intensity);
  write_pfm(dir / "irradiance.pfm", f.irradiance);
  write_pfm(dir / "backscatter.pfm", f.backscatter);
  write_pfm(dir / "noiseless.pfm", f.noiseless);
  write_png(dir / "intensity.png", f.intensity, white);
  write_png(dir / "irradiance.png", f.irradiance, white);
  write_png(dir / "backscatter.png", f.backscatter, white);
  const json summary = {{"view", view_json(view)},
                        {"mean_intensity", mean_over(f.intensity, f.projection, false)},
                        {"mean_backscatter", mean_over(f.backscatter, f.projection, false)},
                        {"mean_rho_e", mean_over(rho_e, f.projection, false)},
                        {"mean_irradiance", mean_over(f.irradiance, f.projection, true)},
                        {"saturated", std::count(f.intensity.data().begin(), f.intensity.data().end(), white)}};
  write_json(dir / "render.json", summary);
  std::cout << "mean(I) " << summary["mean_intensity"] << "  mean(rhoE) " << summary["mean_rho_e"]
            << "  mean(B) " << summary["mean_backscatter"] << "\n";
  return 0;
}

// ------------------------------------------------------------------ calibrate

int cmd_calibrate(const Common& c, const std::string& image_file, const std::string& view_file,
                  double reference_albedo, double plane_z) {
  const Scene s = load(c);
  if (image_file.empty()) throw CLI::RequiredError("--image");
  const JointView view = view_file.empty() ? default_view(s) : parse_view(read_file(view_file));
  CalibrationSetup setup;
  setup.surface = std::make_shared<const Surface>(make_plane({20.0, 20.0}, 2, 2, plane_z, 1.0));
  setup.optics = s.world.optics;
  setup.view = view;
  setup.image = read_pfm(image_file);
  setup.reference_albedo = reference_albedo;
  const CalibrationResult r = fit_medium(setup);
  const json out = {{"beta", r.beta},
                    {"g", r.g},
                    {"residual", r.residual},
                    {"weak_g", r.weak_g},
                    {"evaluations", r.evaluations},
                    {"warnings", r.warnings}};
  for (const auto& w : r.warnings) std::cerr << "warning: " << w << "\n";
  const fs::path dir = out_dir(c, "calibration");
  write_json(dir / "medium.json", out);
  std::cout << "beta " << r.beta << "  g " << r.g << "  residual " << r.residual << "\n";
  return 0;
}

// ------------------------------------------------------------------ plan

TextureMap load_texture(const Scene& s, const std::string& path, FusionRule rule) {
  if (path.empty()) return s.world.blank_texture(rule);
  return TextureMap::load(path, s.world.layout);
}

int cmd_plan(const Common& c, const std::string& resume, int waypoint) {
  const Scene s = load(c);
  if (s.config.waypoints.empty()) throw DataError("scene has no waypoints");
  if (waypoint < 0 || waypoint >= static_cast<int>(s.config.waypoints.size())) {
    throw DataError("waypoint index out of range");
  }
  const TextureMap texture = load_texture(s, resume, FusionRule::MaximumLikelihood);
  const CandidateSet set = generate_candidates(s.config.waypoints[static_cast<std::size_t>(waypoint)],
                                               s.config.planner.candidates, waypoint + 1);
  const Selection sel = next_best_view(s.world, texture, set);
  const fs::path dir = out_dir(c, "plan");
  json cands = json::array();
  std::ofstream csv(dir / "candidates.csv");
  csv << "index,radius,light_x,light_y,light_z,gain_nats\n";
  csv.precision(17);
  for (std::size_t i = 0; i < set.size(); ++i) {
    const Vec3& l = set.views[i].light.position();
    csv << i << ',' << set.radius[i] << ',' << l.x() << ',' << l.y() << ',' << l.z() << ','
        << sel.candidate_gains[i] << '\n';
  }
  write_json(dir / "plan.json", {{"candidates", set.size()},
                                 {"selected", sel.index},
                                 {"view", view_json(sel.view)},
                                 {"expected_gain_nats", sel.report.total},
                                 {"report", gain_json(sel.report, *s.world.layout)}});
  write_file(dir / "view.json", serialize_view(sel.view) + "\n");
  std::cout << "selected " << sel.index << " of " << set.size() << "  gain " << sel.report.total
            << " nats\n";
  return 0;
}

// ------------------------------------------------------------------ optimize-path

int cmd_optimize(const Common& c, int iterations, const std::string& resume) {
  const Scene s = load(c);
  if (!s.config.path) throw DataError("scene has no path section");
  const PathConfig& pc = *s.config.path;
  PathPlan plan;
  plan.views = pc.views;
  plan.bounds = pc.bounds;
  plan.position_step = pc.position_step;
  plan.angle_step = pc.angle_step;
  const int iters = iterations >= 0 ? iterations : pc.iterations;
  const TextureMap texture = load_texture(s, resume, FusionRule::MaximumLikelihood);
  const PathOptimization opt = optimize_path(s.world, texture, plan, iters);
  const double before = path_uncertainty(s.world, texture, plan.views);
  const double after = path_uncertainty(s.world, texture, opt.plan.views);
  const double improvement = 100.0 * (before - after) / before;

  const fs::path dir = out_dir(c, "path");
  json initial = json::array();
  json optimized = json::array();
  for (const auto& v : plan.views) initial.push_back(view_json(v));
  for (const auto& v : opt.plan.views) optimized.push_back(view_json(v));
  write_json(dir / "path.json", {{"variant", opt.search.variant},
                                 {"dof", plan.dof()},
                                 {"iterations", opt.search.iterations},
                                 {"evaluations", opt.search.evaluations},
                                 {"final_step", opt.search.delta},
                                 {"initial_gain_nats", opt.initial_gain},
                                 {"gain_nats", opt.gain},
                                 {"initial_uncertainty", before},
                                 {"uncertainty", after},
                                 {"improvement_percent", improvement},
                                 {"initial", initial},
                                 {"optimized", optimized}});
  std::ofstream hist(dir / "history.csv");
  hist.precision(17);
  hist << "iteration,gain_nats\n0," << opt.initial_gain << '\n';
  for (std::size_t i = 0; i < opt.search.history.size(); ++i) {
    hist << i + 1 << ',' << opt.search.history[i] << '\n';
  }
  std::cout << "uncertainty " << before << " -> " << after << "  improvement " << improvement
            << "%\n";
  return 0;
}

// ------------------------------------------------------------------ scan

fs::path snapshot_path(const fs::path& dir, int t) {
  char name[32];
  std::snprintf(name, sizeof name, "texture_%03d.json", t);
  return dir / "snapshots" / name;
}

int cmd_scan(const Common& c, const std::string& mode_name, const std::string& resume) {
  const Scene s = load(c);
  if (s.config.waypoints.empty()) throw DataError("scene has no waypoints");
  ScanMode mode;
  if (mode_name == "nbuv") mode = ScanMode::Nbuv;
  else if (mode_name == "fixed" || mode_name == "fixed-baseline") mode = ScanMode::FixedBaseline;
  else throw CLI::ValidationError("--mode", "must be nbuv or fixed");

  const fs::path dir = out_dir(c, "run");
  fs::create_directories(dir / "frames");
  fs::create_directories(dir / "snapshots");
  write_file(dir / "scene.json", serialize(s.config) + "\n");

  ScanOptions opts;
  opts.mode = mode;
  opts.seed = seed_of(c, s);
  std::vector<json> trajectory;
  if (!resume.empty()) {
    // A run directory: continue after its last snapshot.
    const json prior = json::parse(read_file(fs::path(resume) / "trajectory.json"));
    int last = -1;
    for (const auto& step : prior["steps"]) {
      trajectory.push_back(step);
      last = step["t"].get<int>();
    }
    if (last < 0) throw DataError("nothing to resume in " + resume);
    opts.resume = TextureMap::load(snapshot_path(resume, last), s.world.layout);
    opts.first_step = last + 1;
  }
  const double white = s.world.optics.camera.full_well;
  opts.on_step = [&](const ScanStep& step, const Frame& frame, const TextureMap& tex) {
    char name[32];
    std::snprintf(name, sizeof name, "frame_%03d", step.t);
    write_pfm(dir / "frames" / (std::string(name) + ".pfm"), frame.intensity);
    write_png(dir / "frames" / (std::string(name) + ".png"), frame.intensity, white);
    tex.save(snapshot_path(dir, step.t));
    json j = {{"t", step.t},
              {"view", view_json(step.view)},
              {"candidates", step.candidate_count},
              {"gain_nats", step.gain},
              {"uncertainty", step.uncertainty},
              {"baseline", step.radius}};
    if (step.candidate) j["candidate"] = *step.candidate;
    trajectory.push_back(j);
  };
  const ScanResult result = greedy_scan(s.world, s.config.waypoints, s.config.planner, opts);

  double total = 0.0;
  std::ofstream ig(dir / "ig_log.csv");
  ig.precision(17);
  ig << "t,gain_nats,uncertainty,baseline\n";
  for (const auto& step : trajectory) {
    total += step["gain_nats"].get<double>();
    ig << step["t"] << ',' << step["gain_nats"].get<double>() << ','
       << step["uncertainty"].get<double>() << ',' << step["baseline"].get<double>() << '\n';
  }
  write_json(dir / "trajectory.json", {{"mode", mode_name}, {"seed", opts.seed}, {"steps", trajectory}});
  result.texture.save(dir / "texture.json");

  std::ofstream q(dir / "quality.csv");
  q.precision(17);
  q << "face,patches,quality,variance,observations\n";
  const auto& tex = result.texture;
  for (std::size_t k = 0; k < tex.face_qualities().size(); ++k) {
    q << k << ',' << tex.layout().patch_count(k) << ',' << tex.face_quality(k) << ','
      << tex.face_variance(k) << ',' << tex.face_observations(k) << '\n';
  }
  write_pfm(dir / "albedo_atlas.pfm", atlas_albedo(tex));
  write_png(dir / "albedo_atlas.png", atlas_albedo(tex), 1.0);
  write_json(dir / "report.json", {{"mode", mode_name},
                                   {"steps", trajectory.size()},
                                   {"total_gain_nats", total},
                                   {"total_uncertainty", tex.total_uncertainty()}});
  std::cout << mode_name << ": " << trajectory.size() << " views, total gain " << total
            << " nats, uncertainty " << tex.total_uncertainty() << "\n";
  return 0;
}

// ------------------------------------------------------------------ evaluate

int cmd_evaluate(const Common& c, const std::string& run_a, const std::string& run_b) {
  if (run_a.empty() || run_b.empty()) throw CLI::RequiredError("--run-a/--run-b");
  const SceneConfig cfg_a = load_scene_config(fs::path(run_a) / "scene.json");
  const SceneConfig cfg_b = load_scene_config(fs::path(run_b) / "scene.json");
  const TriMesh mesh_a = build_mesh(cfg_a.mesh);
  const TriMesh mesh_b = build_mesh(cfg_b.mesh);
  if (mesh_a.vertices() != mesh_b.vertices() || mesh_a.faces() != mesh_b.faces() ||
      cfg_a.estimation.r_min != cfg_b.estimation.r_min) {
    throw DataError("runs use different meshes");
  }
  const Scene s = build_scene(cfg_a);
  const TextureMap a = TextureMap::load(fs::path(run_a) / "texture.json", s.world.layout);
  const TextureMap b = TextureMap::load(fs::path(run_b) / "texture.json", s.world.layout);
  const auto& truth = s.world.mesh().albedo();
  const TextureLayout& layout = *s.world.layout;

  auto rmse = [&](const TextureMap& t) {
    double se = 0.0;
    int n = 0;
    for (int x = 0; x < static_cast<int>(layout.texel_count()); ++x) {
      if (!t.observed(x)) continue;
      const double e = t.value(x) - truth[static_cast<std::size_t>(layout.face_of(x))];
      se += e * e;
      ++n;
    }
    return n ? std::sqrt(se / n) : 0.0;
  };

  const fs::path dir = out_dir(c, "evaluation");
  std::ofstream csv(dir / "winners.csv");
  csv.precision(17);
  csv << "face,variance_a,variance_b,winner\n";
  int wins_a = 0, wins_b = 0, ties = 0;
  for (std::size_t k = 0; k < layout.face_count(); ++k) {
    const double va = a.face_variance(k);
    const double vb = b.face_variance(k);
    const char* w = va < vb ? "a" : (vb < va ? "b" : "tie");
    (va < vb ? wins_a : (vb < va ? wins_b : ties))++;
    csv << k << ',' << va << ',' << vb << ',' << w << '\n';
  }
  const double ua = a.total_uncertainty();
  const double ub = b.total_uncertainty();
  const double improvement = 100.0 * (ub - ua) / ub;
  write_json(dir / "evaluation.json", {{"run_a", run_a},
                                       {"run_b", run_b},
                                       {"uncertainty_a", ua},
                                       {"uncertainty_b", ub},
                                       {"improvement_percent", improvement},
                                       {"rmse_a", rmse(a)},
                                       {"rmse_b", rmse(b)},
                                       {"faces_won_a", wins_a},
                                       {"faces_won_b", wins_b},
                                       {"faces_tied", ties}});
  std::cout << "uncertainty a " << ua << "  b " << ub << "  improvement of a over b "
            << improvement << "%  faces won a/b/tie " << wins_a << '/' << wins_b << '/' << ties
            << "\n";
  return 0;
}

int cmd_export(const std::string& builtin, const std::string& out) {
  SceneConfig cfg;
  if (builtin == "hills") cfg = hills_scene();
  else if (builtin == "cube") cfg = cube_scene();
  else throw CLI::ValidationError("--builtin", "must be hills or cube");
  if (out.empty()) std::cout << serialize(cfg) << "\n";
  else write_file(out, serialize(cfg) + "\n");
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Simulation and view planning for imaging through scattering media"};
  app.require_subcommand(1);
  Common common;

  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--scene", common.scene, "scene JSON file");
    sub->add_option("--out", common.out, "output directory");
    sub->add_option("--beta-override", common.beta_override, "replace the extinction coefficient");
    sub->add_flag("--no-ambient", common.no_ambient, "disable the ambient term");
    sub->add_option_function<std::uint64_t>(
        "--seed", [&](std::uint64_t v) { common.seed = v; common.seed_given = true; }, "noise seed");
  };

  std::string view_file, image_file, resume, mode = "nbuv", run_a, run_b, builtin, out;
  double reference_albedo = 1.0;
  double plane_z = 0.0;
  int iterations = -1;
  int waypoint = 0;

  auto* render = app.add_subcommand("render", "render one joint view");
  add_common(render);
  render->add_option("--view", view_file, "joint view JSON (default: v(0) at the first waypoint)");

  auto* calibrate = app.add_subcommand("calibrate", "fit beta and g to a reference-sheet image");
  add_common(calibrate);
  calibrate->add_option("--image", image_file, "PFM image of the sheet")->required();
  calibrate->add_option("--view", view_file, "joint view JSON");
  calibrate->add_option("--reference-albedo", reference_albedo, "albedo of the sheet");
  calibrate->add_option("--plane-z", plane_z, "height of the sheet");

  auto* plan = app.add_subcommand("plan", "next best view at one waypoint");
  add_common(plan);
  plan->add_option("--resume", resume, "texture snapshot to plan against");
  plan->add_option("--waypoint", waypoint, "waypoint index");

  auto* optimize = app.add_subcommand("optimize-path", "pattern-search path optimization");
  add_common(optimize);
  optimize->add_option("--iterations", iterations, "iteration budget (default from scene)");
  optimize->add_option("--resume", resume, "texture snapshot of the starting state");

  auto* scan = app.add_subcommand("scan", "execute a scan and fuse the texture");
  add_common(scan);
  scan->add_option("--mode", mode, "nbuv or fixed");
  scan->add_option("--resume", resume, "run directory to continue");

  auto* evaluate = app.add_subcommand("evaluate", "compare two scan runs");
  add_common(evaluate);
  evaluate->add_option("--run-a", run_a, "run directory")->required();
  evaluate->add_option("--run-b", run_b, "run directory")->required();

  auto* exporter = app.add_subcommand("export-scene", "write a built-in scene file");
  exporter->add_option("--builtin", builtin, "hills or cube")->required();
  exporter->add_option("--out", out, "destination file");

  try {
    app.parse(argc, argv);
    if (*render) return cmd_render(common, view_file);
    if (*calibrate) return cmd_calibrate(common, image_file, view_file, reference_albedo, plane_z);
    if (*plan) return cmd_plan(common, resume, waypoint);
    if (*optimize) return cmd_optimize(common, iterations, resume);
    if (*scan) return cmd_scan(common, mode, resume);
    if (*evaluate) return cmd_evaluate(common, run_a, run_b);
    if (*exporter) return cmd_export(builtin, out);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  } catch (const NumericalError& e) {
    std::cerr << "numerical failure: " << e.what() << "\n";
    return 3;
  } catch (const DataError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 1;
}
