// End-to-end acceptance checks. Prints one PASS/FAIL line per criterion and
// exits nonzero if any criterion fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <numbers>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "turbid/calibration.hpp"
#include "turbid/scene.hpp"

using namespace turbid;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

int failures = 0;

void run(int id, const char* title, double budget_s, const std::function<Outcome()>& fn) {
  const auto t0 = std::chrono::steady_clock::now();
  Outcome o;
  try {
    o = fn();
  } catch (const std::exception& e) {
    o = {false, std::string("exception: ") + e.what()};
  }
  const double s = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  const bool in_time = s < budget_s;
  if (!in_time) o.detail += " [over time budget]";
  const bool pass = o.pass && in_time;
  if (!pass) ++failures;
  std::printf("criterion %d %s: %s | %s | %.1f s (budget %.0f s)\n", id, title,
              pass ? "PASS" : "FAIL", o.detail.c_str(), s, budget_s);
  std::fflush(stdout);
}

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

// Gauss-Legendre nodes and weights on [-1, 1] by Newton iteration.
void gauss_legendre(int n, std::vector<double>& x, std::vector<double>& w) {
  x.resize(static_cast<std::size_t>(n));
  w.resize(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    double z = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
    double dp = 0.0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0, p1 = z;
      for (int k = 2; k <= n; ++k) {
        const double p2 = ((2.0 * k - 1.0) * z * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      dp = n * (z * p1 - p0) / (z * z - 1.0);
      const double dz = p1 / dp;
      z -= dz;
      if (std::abs(dz) < 1e-15) break;
    }
    x[static_cast<std::size_t>(i)] = z;
    w[static_cast<std::size_t>(i)] = 2.0 / ((1.0 - z * z) * dp * dp);
  }
}

// ------------------------------------------------------------------ 1

Outcome phase_normalization() {
  // Product rule: 256 Gauss-Legendre nodes in cos(theta) x 64 azimuths.
  std::vector<double> mu, wmu;
  gauss_legendre(256, mu, wmu);
  const int nphi = 64;
  Outcome o{true, ""};
  for (double g : {0.0, 0.3, 0.6, 0.9}) {
    double sum = 0.0;
    for (std::size_t i = 0; i < mu.size(); ++i) {
      for (int j = 0; j < nphi; ++j) sum += wmu[i] * (2.0 * std::numbers::pi / nphi) * hg_phase(mu[i], g);
    }
    o.pass = o.pass && std::abs(sum - 1.0) <= 1e-3;
    o.detail += fmt("g=%.1f: %.6f  ", g, sum);
  }
  o.detail += fmt("(%d directions)", static_cast<int>(mu.size()) * nphi);
  return o;
}

// ------------------------------------------------------------------ 2

Outcome noise_model() {
  SceneConfig cfg = hills_scene();
  cfg.mesh.generator = "plane";
  cfg.mesh.plane_size = {2.0, 2.0};
  cfg.mesh.plane_cells = 4;
  cfg.mesh.albedo = 0.5;
  cfg.camera = CameraModel::from_fov(1, 1, 0.05);
  cfg.estimation.operating_point.rho_bar = 0.5;
  const Scene scene = build_scene(cfg);
  const Pose camera = Pose::from_tilts({0.013, -0.021, 0.3}, 0.0, 0.0);
  JointView view = rig_view(*scene.world.surface, camera, {0.12, 0.0, 0.0});
  const ProjectionMap proj = project(*scene.world.surface, camera, scene.world.optics.camera);

  const int n = 100000;
  double s1 = 0, s2 = 0, r1 = 0, r2 = 0;
  double e = 0, b = 0, model_rho_var = 0;
  for (int i = 0; i < n; ++i) {
    view.t = i;
    const Frame f = render(*scene.world.surface, scene.world.optics, proj, view, 2024);
    const DescatteredFrame d = descatter(f, scene.world.estimation, cfg.camera.read_noise, cfg.camera.full_well);
    s1 += f.intensity[0];
    s2 += f.intensity[0] * f.intensity[0];
    r1 += d.albedo[0];
    r2 += d.albedo[0] * d.albedo[0];
    e = f.irradiance[0];
    b = f.backscatter[0];
    model_rho_var = d.variance[0];
  }
  const double var_i = (s2 - s1 * s1 / n) / (n - 1);
  const double var_r = (r2 - r1 * r1 / n) / (n - 1);
  const double rn = cfg.camera.read_noise;
  const double expected_i = 0.5 * e + b + rn * rn;  // photon + backscatter + read noise
  const double expected_r = expected_i / (e * e);
  const double dev_i = std::abs(var_i / expected_i - 1.0);
  const double dev_r = std::abs(std::sqrt(var_r / expected_r) - 1.0);
  const double dev_model = std::abs(model_rho_var / expected_r - 1.0);
  return {dev_i <= 0.03 && dev_r <= 0.03 && dev_model <= 1e-12,
          fmt("E=%.1f B=%.1f var(I) %.1f vs %.1f (%.2f%%), std(rho) %.5f vs %.5f (%.2f%%)", e, b,
              var_i, expected_i, 100 * dev_i, std::sqrt(var_r), std::sqrt(expected_r), 100 * dev_r)};
}

// ------------------------------------------------------------------ 3

Outcome ml_fusion() {
  const Scene scene = build_scene(hills_scene());
  const World& world = scene.world;
  const auto& cfg = scene.config;
  const std::size_t texels = world.layout->texel_count();
  const auto& truth = world.mesh().albedo();

  double worst = 0.0;
  double chi2_sum = 0.0;
  long chi2_n = 0;
  std::vector<double> chi2_runs;
  for (std::uint64_t seed : {11u, 12u, 13u, 14u}) {
    TextureMap fused = world.blank_texture();
    std::vector<TextureMap> singles;
    for (int i = 0; i < 5; ++i) {
      const Pose camera = cfg.waypoints[static_cast<std::size_t>(i)];
      const JointView view = rig_view(*world.surface, camera, cfg.planner.fixed_baseline, i);
      const Frame f = render(*world.surface, world.optics, view, seed);
      const DescatteredFrame d = descatter(f, world.estimation, cfg.camera.read_noise, cfg.camera.full_well);
      fuse(fused, d, f.projection, world.mesh(), cfg.camera, camera, world.estimation);
      TextureMap single = world.blank_texture();
      fuse(single, d, f.projection, world.mesh(), cfg.camera, camera, world.estimation);
      singles.push_back(std::move(single));
    }
    double run_sum = 0.0;
    long run_n = 0;
    for (std::size_t x = 0; x < texels; ++x) {
      const int t = static_cast<int>(x);
      if (!fused.observed(t)) continue;
      double info = 0.0;
      double weighted = 0.0;
      for (const auto& s : singles) {
        if (!s.observed(t)) continue;
        info += 1.0 / s.variance(t);
        weighted += s.value(t) / s.variance(t);
      }
      worst = std::max(worst, std::abs(fused.variance(t) * info - 1.0));
      worst = std::max(worst, std::abs(fused.value(t) - weighted / info) / std::abs(weighted / info));
      const double err = fused.value(t) - truth[static_cast<std::size_t>(world.layout->face_of(t))];
      run_sum += err * err / fused.variance(t);
      ++run_n;
    }
    chi2_runs.push_back(run_sum / run_n);
    chi2_sum += run_sum;
    chi2_n += run_n;
  }
  const double chi2 = chi2_sum / chi2_n;
  std::string runs;
  for (double c : chi2_runs) runs += fmt("%.3f ", c);
  return {worst <= 1e-12 && chi2 >= 0.8 && chi2 <= 1.2,
          fmt("max rel. deviation from inverse-variance sum %.2e; mean chi2 %.3f (runs: %s)", worst,
              chi2, runs.c_str())};
}

// ------------------------------------------------------------------ 4

Outcome info_gain_identities() {
  double worst_entropy = 0.0;
  for (double a : {1e-6, 3e-4, 0.02, 1.0, 7.5, 100.0}) {
    for (double b : {2e-6, 1e-3, 0.5, 3.0, 100.0}) {
      worst_entropy = std::max(worst_entropy,
                               std::abs(info_gain(a, b) - (gaussian_entropy(a) - gaussian_entropy(b))));
    }
  }

  const Scene scene = build_scene(hills_scene());
  const World& world = scene.world;
  const auto& cfg = scene.config;
  std::vector<std::vector<double>> q;
  for (int i = 0; i < 3; ++i) {
    const JointView v = rig_view(*world.surface, cfg.waypoints[static_cast<std::size_t>(2 * i)],
                                 cfg.planner.fixed_baseline, i + 1);
    q.push_back(prospective_qualities(world, v));
  }
  const std::vector<double> q0(world.mesh().face_count(), world.estimation.prior_quality());
  std::vector<double> q1 = q0;
  for (std::size_t k = 0; k < q1.size(); ++k) q1[k] += q[0][k];
  const double whole = path_gain(*world.layout, q0, q);
  const double first = path_gain(*world.layout, q0, std::span(q).first(1));
  const double rest = path_gain(*world.layout, q1, std::span(q).subspan(1));
  const double rel_total = std::abs(whole - (first + rest)) / whole;

  // Per face: the same identity on single-face quality vectors.
  double worst_face = 0.0;
  for (std::size_t k = 0; k < q0.size(); ++k) {
    std::vector<std::vector<double>> qk(3, std::vector<double>(q0.size(), 0.0));
    for (int i = 0; i < 3; ++i) qk[static_cast<std::size_t>(i)][k] = q[static_cast<std::size_t>(i)][k];
    const double w = path_gain(*world.layout, q0, qk);
    const double f = path_gain(*world.layout, q0, std::span(qk).first(1));
    const double r = path_gain(*world.layout, q1, std::span(qk).subspan(1));
    worst_face = std::max(worst_face, std::abs(w - (f + r)));
  }

  // Segment gain vs per-texel brute force on uniformly lit faces: one noise
  // free view fused into a blank map, texel gains from the fused variances.
  const JointView view = rig_view(*world.surface, cfg.waypoints[3], cfg.planner.fixed_baseline, 1);
  const ProjectionMap proj = project(*world.surface, view.camera, cfg.camera);
  const ModelImages model = render_model(*world.surface, world.optics, proj, view);
  DescatteredFrame d{ImageD(cfg.camera.width, cfg.camera.height),
                     model_variance(model.irradiance, model.backscatter, proj, world.estimation,
                                    cfg.camera.read_noise),
                     Mask(cfg.camera.width, cfg.camera.height, 0)};
  for (int p = 0; p < d.valid.size(); ++p) {
    d.valid[p] = proj.face(p) >= 0 && model.irradiance[p] >= cfg.camera.read_noise ? 1 : 0;
  }
  TextureMap tex = world.blank_texture();
  fuse(tex, d, proj, world.mesh(), cfg.camera, view.camera, world.estimation);
  const auto qv = segment_qualities(proj, d.variance, world.mesh(), world.estimation);
  const GainReport report = view_gain(*world.layout, q0, qv);
  const double q_prior = world.estimation.prior_quality();
  double worst_seg = 0.0;
  int faces = 0;
  for (std::size_t k = 0; k < q0.size(); ++k) {
    const auto pix = proj.pixels_of(k);
    if (pix.size() < 8) continue;
    double emin = 1e300, emax = 0.0;
    bool lit = true;
    for (int p : pix) {
      lit = lit && model.lit[p] && d.valid[p];
      emin = std::min(emin, model.irradiance[p]);
      emax = std::max(emax, model.irradiance[p]);
    }
    const double gamma = static_cast<double>(pix.size()) / world.mesh().area(k) / world.estimation.r_min;
    if (!lit || emax > 1.05 * emin || gamma < 1.0) continue;
    double brute = 0.0;
    bool complete = true;
    const int first_texel = world.layout->first_texel(k);
    for (int t = first_texel; t < first_texel + world.layout->patch_count(k); ++t) {
      if (!tex.observed(t)) {
        complete = false;
        break;
      }
      brute += 0.5 * std::log1p(tex.information_sum(t) / q_prior);
    }
    if (!complete) continue;
    ++faces;
    worst_seg = std::max(worst_seg, std::abs(report.face_gain[k] / brute - 1.0));
  }
  return {worst_entropy <= 1e-12 && rel_total <= 1e-12 && worst_face <= 1e-12 && faces > 0 &&
              worst_seg <= 0.02,
          fmt("entropy identity %.1e; telescoping total rel. %.1e (total %.1f nats), per face abs. "
              "%.1e; segment vs texel gain max dev %.2f%% over %d faces",
              worst_entropy, rel_total, whole, worst_face, 100 * worst_seg, faces)};
}

// ------------------------------------------------------------------ 5

Outcome calibration_recovery() {
  SceneConfig cfg = hills_scene();
  cfg.medium.beta = 2.5;
  cfg.medium.g = 0.6;
  cfg.camera = CameraModel::from_fov(64, 48, std::numbers::pi / 3.0);
  const Optics optics = cfg.optics();
  auto sheet = std::make_shared<const Surface>(make_plane({4.0, 4.0}, 2, 2, 0.0, 1.0));
  const Pose camera = Pose::from_tilts({0.0, 0.0, 0.3}, 0.0, 0.0);
  const JointView view = rig_view(*sheet, camera, {0.12, 0.0, 0.0});

  std::vector<double> betas, gs;
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    const Frame f = render(*sheet, optics, view, seed);
    CalibrationSetup setup{sheet, optics, view, f.intensity, 1.0};
    const CalibrationResult r = fit_medium(setup);
    betas.push_back(r.beta);
    gs.push_back(r.g);
  }
  auto median = [](std::vector<double> v) {
    std::sort(v.begin(), v.end());
    return 0.5 * (v[v.size() / 2 - 1] + v[v.size() / 2]);
  };
  const double mb = median(betas);
  const double mg = median(gs);
  const double rel_beta = std::abs(mb / 2.5 - 1.0);
  const double abs_g = std::abs(mg - 0.6);
  return {rel_beta <= 0.05 && abs_g <= 0.05,
          fmt("median beta %.4f (%.2f%%), median g %.4f (|dg| %.4f) over 20 seeds", mb,
              100 * rel_beta, mg, abs_g)};
}

// ------------------------------------------------------------------ 6 and 9

struct HillRuns {
  std::optional<ScanResult> nbuv;
  std::optional<ScanResult> fixed;
  std::set<std::size_t> shadowed;  // faces partly unlit in some fixed-baseline frame
  bool done = false;
};

HillRuns& hill_runs() {
  static HillRuns runs;
  if (runs.done) return runs;
  const Scene scene = build_scene(hills_scene());
  const auto& cfg = scene.config;
  ScanOptions opts;
  opts.seed = cfg.seed;
  opts.mode = ScanMode::FixedBaseline;
  opts.on_step = [&](const ScanStep&, const Frame& f, const TextureMap&) {
    for (std::size_t k = 0; k < scene.world.mesh().face_count(); ++k) {
      for (int p : f.projection.pixels_of(k)) {
        if (!f.lit[p]) {
          runs.shadowed.insert(k);
          break;
        }
      }
    }
  };
  runs.fixed.emplace(greedy_scan(scene.world, cfg.waypoints, cfg.planner, opts));
  opts.mode = ScanMode::Nbuv;
  opts.on_step = nullptr;
  runs.nbuv.emplace(greedy_scan(scene.world, cfg.waypoints, cfg.planner, opts));
  runs.done = true;
  return runs;
}

double rmse_on(const TextureMap& a, const TextureMap& b, const TextureMap& which,
               const std::set<std::size_t>& faces, const std::vector<double>& truth, int* count) {
  const TextureLayout& layout = a.layout();
  double se = 0.0;
  int n = 0;
  for (std::size_t k : faces) {
    const int first = layout.first_texel(k);
    for (int t = first; t < first + layout.patch_count(k); ++t) {
      if (!a.observed(t) || !b.observed(t)) continue;
      const double e = which.value(t) - truth[k];
      se += e * e;
      ++n;
    }
  }
  if (count) *count = n;
  return n ? std::sqrt(se / n) : 0.0;
}

Outcome hill_reproduction() {
  HillRuns& r = hill_runs();
  const Scene scene = build_scene(hills_scene());
  const auto& truth = scene.world.mesh().albedo();
  int n = 0;
  const double rmse_nbuv = rmse_on(r.nbuv->texture, r.fixed->texture, r.nbuv->texture, r.shadowed, truth, &n);
  const double rmse_fixed = rmse_on(r.nbuv->texture, r.fixed->texture, r.fixed->texture, r.shadowed, truth, nullptr);
  const double ig_n = r.nbuv->total_gain();
  const double ig_f = r.fixed->total_gain();
  const std::size_t candidates = r.nbuv->steps.back().candidate_count;
  return {ig_n >= ig_f && rmse_nbuv < rmse_fixed && n > 0 && candidates == 288 &&
              r.nbuv->steps.size() == 9,
          fmt("IG nbuv %.1f vs fixed %.1f nats; RMSE on %zu shadow-affected faces (%d texels) "
              "nbuv %.4f vs fixed %.4f; %zu candidates/step",
              ig_n, ig_f, r.shadowed.size(), n, rmse_nbuv, rmse_fixed, candidates)};
}

Outcome not_all_patches_benefit() {
  HillRuns& r = hill_runs();
  const TextureMap& a = r.nbuv->texture;
  const TextureMap& b = r.fixed->texture;
  int fixed_wins = 0, nbuv_wins = 0;
  for (std::size_t k = 0; k < a.layout().face_count(); ++k) {
    if (b.face_variance(k) < a.face_variance(k)) ++fixed_wins;
    if (a.face_variance(k) < b.face_variance(k)) ++nbuv_wins;
  }
  const double ua = a.total_uncertainty();
  const double ub = b.total_uncertainty();
  return {fixed_wins > 0 && ua < ub && r.nbuv->total_gain() >= r.fixed->total_gain(),
          fmt("faces won: nbuv %d, fixed %d; total uncertainty nbuv %.1f vs fixed %.1f", nbuv_wins,
              fixed_wins, ua, ub)};
}

// ------------------------------------------------------------------ 7

Outcome cube_path() {
  const Scene scene = build_scene(cube_scene());
  const PathConfig& pc = *scene.config.path;
  PathPlan plan;
  plan.views = pc.views;
  plan.bounds = pc.bounds;
  plan.position_step = pc.position_step;
  plan.angle_step = pc.angle_step;
  const TextureMap blank = scene.world.blank_texture();
  const PathOptimization opt = optimize_path(scene.world, blank, plan, 20);
  const double before = path_uncertainty(scene.world, blank, plan.views);
  const double after = path_uncertainty(scene.world, blank, opt.plan.views);
  const double reduction = (before - after) / before;
  bool monotone = opt.search.history.empty() || opt.search.history.front() >= opt.initial_gain;
  for (std::size_t i = 1; i < opt.search.history.size(); ++i) {
    monotone = monotone && opt.search.history[i] >= opt.search.history[i - 1];
  }
  return {reduction >= 0.15 && monotone && plan.dof() == 60 && opt.search.iterations == 20,
          fmt("%zu DOF, %d iterations, %d evaluations; uncertainty %.1f -> %.1f (%.1f%% reduction); "
              "gain %.1f -> %.1f nats; monotone %s",
              plan.dof(), opt.search.iterations, opt.search.evaluations, before, after,
              100 * reduction, opt.initial_gain, opt.gain, monotone ? "yes" : "no")};
}

// ------------------------------------------------------------------ 8

Outcome clear_medium() {
  SceneConfig cfg = hills_scene();
  cfg.medium.beta = 0.0;
  for (auto& b : cfg.mesh.hills.bumps) b.height = 0.0;
  const Scene scene = build_scene(cfg);
  ScanOptions opts;
  opts.mode = ScanMode::Nbuv;
  opts.seed = 3;
  const ScanResult r = greedy_scan(scene.world, cfg.waypoints, cfg.planner, opts);
  const double rmin = *std::min_element(cfg.planner.candidates.radii.begin(), cfg.planner.candidates.radii.end());
  int ok = 0, steps = 0;
  std::string picked;
  for (const auto& s : r.steps) {
    if (!s.candidate) continue;
    ++steps;
    if (std::abs(s.radius - rmin) < 1e-9) ++ok;
    picked += fmt("%.2f ", s.radius);
  }
  return {steps > 0 && ok == steps,
          fmt("%d/%d steps chose the minimum baseline %.2f m (chosen: %s)", ok, steps, rmin,
              picked.c_str())};
}

}  // namespace

int main() {
  run(1, "phase-function normalization", 1, phase_normalization);
  run(2, "noise-model consistency", 30, noise_model);
  run(3, "ML fusion correctness", 120, ml_fusion);
  run(4, "information-gain identities", 30, info_gain_identities);
  run(5, "calibration recovery", 120, calibration_recovery);
  run(6, "hill-scene reproduction", 600, hill_reproduction);
  run(7, "cube-scene path optimization", 1200, cube_path);
  run(8, "clear-medium sanity", 60, clear_medium);
  run(9, "not all patches benefit", 600, not_all_patches_benefit);
  std::printf("%d of 9 criteria failed\n", failures);
  return failures == 0 ? 0 : 1;
}
